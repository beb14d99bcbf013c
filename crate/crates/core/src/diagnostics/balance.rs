use serde::Serialize;
use crate::error::{Error, Result};
use crate::potentials::PotentialPack;

use super::record::DiagnosticsRecord;

fn require(records: &[DiagnosticsRecord], need: usize) -> Result<()> {
    if records.len() < need {
        return Err(Error::InsufficientHistory {
            need,
            have: records.len(),
        });
    }
    Ok(())
}

/// Per-step defects `e_n = E_{n+1} − E_n + dt(D_{n+1} − S_{n+1})`.
pub fn energy_balance_residual(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    require(records, 2)?;
    Ok(records
        .windows(2)
        .map(|w| {
            let dt = w[1].time - w[0].time;
            w[1].e_sigma_delta - w[0].e_sigma_delta + dt * (w[1].dissipation() - w[1].source_reg)
        })
        .collect())
}

/// Per-step slack of the inequality form `ΔE + dt·D − dt·δωℓ²‖∇ρ‖²`.
pub fn energy_inequality_slack(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    require(records, 2)?;
    Ok(records
        .windows(2)
        .map(|w| {
            let dt = w[1].time - w[0].time;
            w[1].e_sigma_delta - w[0].e_sigma_delta + dt * (w[1].dissipation() - w[1].source_bound)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdResidual {
    /// Finite-difference rate of `E_BD − α⁻²∫ln ρ` plus the mean BD dissipation, per step
    pub balance: Vec<f64>,
    /// Mean forcing pairing per step (zero without forcing)
    pub forcing: Vec<f64>,
    /// `balance − forcing`
    pub defect: Vec<f64>,
    /// Set when the density came within `1e-3` of the band edges
    pub unreliable: bool,
}

/// Target-level BD law `d/dt[E_BD − α⁻²∫ln ρ] = −(∫|∇μ_p|² + ∫F̃″|∇ρ|² + ℓ²∫|Δρ|² + ¼∫ρ|∇u−∇uᵀ|²) + forcing`
/// checked along a trajectory with the trapezoidal rule in time.
///
/// `forcing`, when given, holds the forcing pairing at every record.
pub fn bd_identity_residual(
    pack: &PotentialPack,
    records: &[DiagnosticsRecord],
    forcing: Option<&[f64]>,
) -> Result<BdResidual> {
    require(records, 2)?;
    if let Some(f) = forcing {
        if f.len() != records.len() {
            return Err(Error::Consistency(format!(
                "{} forcing pairings for {} records",
                f.len(),
                records.len()
            )));
        }
    }
    let params = pack.params();
    let inv_a2 = params.alpha().powi(-2);
    let lo = params.rho_lower();
    let margin = 1e-3;
    let g = |r: &DiagnosticsRecord| r.e_bd - inv_a2 * r.log_rho_integral;
    let dis = |r: &DiagnosticsRecord| r.d_mup + r.bd_hess + r.bd_lap_rho + r.bd_rotation;
    let mut out = BdResidual {
        balance: Vec::with_capacity(records.len() - 1),
        forcing: Vec::with_capacity(records.len() - 1),
        defect: Vec::with_capacity(records.len() - 1),
        unreliable: records
            .iter()
            .any(|r| r.rho_min - lo < margin || 1.0 - r.rho_max < margin),
    };
    for (k, w) in records.windows(2).enumerate() {
        let dt = w[1].time - w[0].time;
        let b = (g(&w[1]) - g(&w[0])) / dt + 0.5 * (dis(&w[0]) + dis(&w[1]));
        let f = forcing.map_or(0.0, |f| 0.5 * (f[k] + f[k + 1]));
        out.balance.push(b);
        out.forcing.push(f);
        out.defect.push(b - f);
    }
    Ok(out)
}

/// Largest relative drifts over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationDrift {
    /// `max |⟨ρ⟩_n − ⟨ρ⟩_0| / |⟨ρ⟩_0|`
    pub mass_rho: f64,
    /// `max |⟨φ⟩_n − ⟨φ⟩_0|`, relative to the unit scale of `φ`
    pub mass_phi: f64,
    /// `max |∫ρu_n − ∫ρu_0| / max(|∫ρu_0|, ‖ρu_0‖₂)`
    pub momentum: f64,
}

pub fn conservation_drift(records: &[DiagnosticsRecord]) -> Result<ConservationDrift> {
    require(records, 2)?;
    let r0 = &records[0];
    let m0_norm = r0.momentum.iter().map(|v| v * v).sum::<f64>().sqrt();
    let m_scale = m0_norm.max(r0.momentum_l2);
    let mut d = ConservationDrift {
        mass_rho: 0.0,
        mass_phi: 0.0,
        momentum: 0.0,
    };
    for r in &records[1..] {
        d.mass_rho = d.mass_rho.max((r.mass_rho - r0.mass_rho).abs() / r0.mass_rho.abs());
        d.mass_phi = d.mass_phi.max((r.mass_phi - r0.mass_phi).abs() / r0.mass_phi.abs().max(1.0));
        let dm = r
            .momentum
            .iter()
            .zip(&r0.momentum)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if m_scale > 0.0 {
            d.momentum = d.momentum.max(dm / m_scale);
        } else {
            d.momentum = d.momentum.max(dm);
        }
    }
    Ok(d)
}
