//! IMEX pseudo-spectral time stepping, tendencies and residual evaluators.

mod budget;
mod config;
mod forcing;
mod implicit;
mod reformulation;
mod rhs;
mod stepper;

pub use budget::{stability_budget, BUDGET_CAP};
pub use config::{SchemeConfig, SchemeKind};
pub use forcing::{ExactSnapshot, ManufacturedForcing};
pub use implicit::FrozenOperator;
pub use reformulation::{residual_original_vs_reformulated, MomentumFields, ReformulationReport};
pub use rhs::{
    capillary_divergence, capillary_strong, eval_continuity_rhs, eval_momentum_rhs, hyper_strong,
    hyper_weak, RhsTerms,
};
pub use stepper::{Forcing, Stepper};
