//! The prognostic state, reconstruction of the phase-field variables and
//! initial data.

mod initial;
mod state;

pub use initial::{
    build_initial_data, mollified_initial_density, seeded_noise, InitialData, InitialKind,
    InitialSpec,
};
pub use state::{capillary_identity, reconstruct_derived, CapillaryReport, DerivedFields, State};
