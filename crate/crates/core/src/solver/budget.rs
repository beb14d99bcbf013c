use std::f64::consts::PI;

use crate::error::Result;
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::Torus;

use super::config::SchemeConfig;

/// Upper bound returned when no explicit term constrains the step.
pub const BUDGET_CAP: f64 = 1.0;

/// Heuristic largest stable `dt` for the explicit part of the scheme.
///
/// Takes the minimum of the advective limit `h/max|u|`, the limits of the
/// explicit `∇ρ`-weighted terms at the largest retained wavenumber and, when the
/// density departs strongly from the splitting density, a capillary-fluctuation
/// limit. The result is multiplied by `cfl_safety`.
pub fn stability_budget(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    config: &SchemeConfig,
) -> Result<f64> {
    let grid = torus.grid();
    let params = pack.params();
    let h = grid.spacing();
    let kmax = 2.0 * PI * grid.dealias_cutoff() as f64 * (grid.dim() as f64).sqrt();
    let rho = &state.rho;
    let rho_min = rho.min().max(0.5 * params.rho_lower());
    let rho_bar = config
        .splitting_rho_bar
        .unwrap_or_else(|| rho.mean().max(0.6 * rho.max()));

    let mut dt = BUDGET_CAP;
    let umax = state.u.max_abs();
    if umax > 0.0 {
        dt = dt.min(h / umax);
    }
    let grad = torus.grad(rho)?;
    let gmax = grad.max_abs();
    if gmax > 0.0 {
        dt = dt.min(rho_min / (gmax * kmax));
        if config.level.has_delta() {
            dt = dt.min(1.0 / (params.delta() * gmax * kmax));
        }
    }
    let ratio = rho.max() / rho_bar;
    if ratio >= 2.0 {
        let fluct = params.ell().powi(2) * (rho.max() - rho_bar) * kmax.powi(2);
        dt = dt.min(1.0 / fluct.sqrt() / kmax);
    }
    Ok(config.cfl_safety * dt)
}
