//! Pseudo-spectral simulation of a quasi-incompressible Navier–Stokes/Cahn–Hilliard
//! mixture with unmatched densities, written as a Korteweg-type system for the
//! velocity `u` and the density `ρ` on the unit torus.
//!
//! The crate also audits the structure of the model: conservation laws, the
//! energy and Bresch–Desjardins entropy balances, entropy-pressure
//! integrability and the algebraic identities linking the phase-field and
//! density formulations.
//!
//! ```
//! use qnsch::potentials::{Params, ParamsSpec, PotentialPack};
//!
//! let params = Params::new(ParamsSpec::default()).unwrap();
//! let pack = PotentialPack::new(params).unwrap();
//! assert!((params.ell() - 3.0).abs() < 1e-14);
//! assert!(pack.p_tilde_c(pack.rho_star()).unwrap().0.abs() < 1e-12);
//! ```

pub mod diagnostics;
pub mod error;
pub mod io;
pub mod level;
pub mod model;
pub mod potentials;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use level::Level;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
