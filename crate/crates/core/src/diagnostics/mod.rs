//! Energies, entropies, dissipation, conservation and pressure audits.

mod balance;
mod energy;
mod pressure;
mod record;

pub use balance::{
    bd_identity_residual, conservation_drift, energy_balance_residual, energy_inequality_slack,
    BdResidual, ConservationDrift,
};
pub use energy::{
    bd_forcing_pairing, compute_bd_dissipation, compute_bd_entropy, compute_dissipation,
    compute_energies, BdDissipation, BdEntropy, Dissipation, EnergyComponents,
};
pub use pressure::{
    equi_integrability_tail, pressure_integrability, pressure_sample, psi_window,
    PressureIntegrability, PressureSample, TailRow, TailTable, TAIL_LADDER,
};
pub use record::{evaluate_record, DiagnosticsRecord, Recorder};
