use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::Params;
use super::profile::Taylor2;
use crate::error::{Error, Result};

/// Data of the convex extension `W_δ` of the base confinement `W ≡ 0` on `[ρ̲, 1]`.
///
/// Outside the band `W_δ` is the quartic `A·dist⁴`, with `A` fixed so that
/// `W_δ = steep_level` at distance `θ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfinementSpec {
    pub theta: f64,
    pub kappa: f64,
    pub big_r: f64,
    pub steep_level: f64,
    rho_lower: f64,
    quartic: f64,
}

/// Sup-norm of the Hölder seminorm `[f]_{1/2}` over `‖f‖_{H²}` for single
/// Fourier modes on the unit torus, maximized over the first few wavenumbers.
pub fn holder_embedding_constant(dim: usize) -> f64 {
    let mut best = 0.0f64;
    let dirs: Vec<f64> = match dim {
        2 => vec![1.0, 2f64.sqrt()],
        _ => vec![1.0, 2f64.sqrt(), 3f64.sqrt()],
    };
    for kmax in 1..=8 {
        for d in &dirs {
            let k = kmax as f64 * d;
            let h2 = (1.0 + 4.0 * PI * PI * k * k) / 2f64.sqrt();
            for j in 1..=2000 {
                let s = 0.5 * j as f64 / 2000.0;
                let osc = 2.0 * (PI * k * s).sin().abs() / s.sqrt();
                best = best.max(osc / h2);
            }
        }
    }
    best
}

fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        2 => PI * radius * radius,
        _ => 4.0 / 3.0 * PI * radius.powi(3),
    }
}

impl ConfinementSpec {
    /// Builds the extension from an energy ceiling.
    ///
    /// `R = (E₀ + C*)(1 + 2δωT·e^{2δωT}) + 1` bounds the approximate energy on
    /// `[0,T]`; `κ` is the volume of a ball of radius `(θ/(2C₁R′))²` where
    /// `R′` bounds `‖ρ‖_{H²}`.
    pub fn from_energy(params: &Params, e0: f64, t_final: f64, c_star: f64) -> Result<Self> {
        if !e0.is_finite() || !t_final.is_finite() || t_final < 0.0 {
            return Err(Error::InvalidParameter {
                name: "confinement",
                reason: format!("needs finite energy and horizon, got E0={e0}, T={t_final}"),
            });
        }
        let delta = params.delta();
        let growth = 2.0 * delta * params.omega().abs() * t_final;
        let big_r = (e0.abs() + c_star) * (1.0 + growth * growth.exp()) + 1.0;
        let c0 = 1.0 + params.theta();
        let r_prime = c0 + (1.0 + 1.0 / (4.0 * PI * PI)) * (2.0 * (big_r + c_star) / delta).sqrt();
        let c1 = holder_embedding_constant(params.dim());
        let radius = (params.theta() / (2.0 * c1 * r_prime)).powi(2);
        let kappa = ball_volume(params.dim(), radius).min(1.0);
        let steep_level = (big_r + 1.0) / (delta * kappa);
        Ok(Self::assemble(params, kappa, big_r, steep_level))
    }

    /// Extension with a prescribed steepness, bypassing the energy recipe.
    pub fn with_steep_level(params: &Params, steep_level: f64) -> Self {
        Self::assemble(params, f64::NAN, f64::NAN, steep_level)
    }

    /// Extension from stored recipe values, e.g. when restoring a run.
    pub fn from_parts(params: &Params, kappa: f64, big_r: f64, steep_level: f64) -> Self {
        Self::assemble(params, kappa, big_r, steep_level)
    }

    fn assemble(params: &Params, kappa: f64, big_r: f64, steep_level: f64) -> Self {
        let theta = params.theta();
        Self {
            theta,
            kappa,
            big_r,
            steep_level,
            rho_lower: params.rho_lower(),
            quartic: 16.0 * steep_level / theta.powi(4),
        }
    }

    pub fn quartic_coefficient(&self) -> f64 {
        self.quartic
    }

    /// Base potential `W`, identically zero on `[ρ̲, 1]`.
    pub fn w(&self, r: f64) -> Result<Taylor2> {
        if !(r >= self.rho_lower && r <= 1.0) {
            return Err(Error::SingularDomain {
                value: r,
                domain: format!("[{}, 1]", self.rho_lower),
            });
        }
        Ok(Taylor2::ZERO)
    }

    pub fn w_delta(&self, r: f64) -> Taylor2 {
        let d = if r > 1.0 {
            r - 1.0
        } else if r < self.rho_lower {
            r - self.rho_lower
        } else {
            return Taylor2::ZERO;
        };
        let a = self.quartic;
        Taylor2::new(a * d.powi(4), 4.0 * a * d.powi(3), 12.0 * a * d * d)
    }

    /// `H = rW′ − W` and its derivative `rW″`.
    pub fn h(&self, r: f64) -> Result<(f64, f64)> {
        let w = self.w(r)?;
        Ok((r * w.d1 - w.value, r * w.d2))
    }

    /// `H_δ = rW_δ′ − W_δ` and its derivative `rW_δ″`.
    pub fn h_delta(&self, r: f64) -> (f64, f64) {
        let w = self.w_delta(r);
        (r * w.d1 - w.value, r * w.d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::ParamsSpec;

    fn params() -> Params {
        Params::new(ParamsSpec::default()).unwrap()
    }

    #[test]
    fn embedding_constant_is_attained_by_the_first_mode() {
        let c1 = holder_embedding_constant(2);
        assert!(c1 > 0.1 && c1 < 0.11, "{c1}");
    }

    #[test]
    fn zero_inside_band_and_steep_outside() {
        let p = params();
        let c = ConfinementSpec::with_steep_level(&p, 1e4);
        assert_eq!(c.w_delta(0.5), Taylor2::ZERO);
        assert_eq!(c.h(0.9).unwrap(), (0.0, 0.0));
        assert!(c.w(1.01).is_err());
        let th = p.theta();
        assert!((c.w_delta(1.0 + th / 2.0).value - 1e4).abs() < 1e-8);
        assert!((c.w_delta(p.rho_lower() - th / 2.0).value - 1e4).abs() < 1e-8);
        assert!(c.w_delta(1.0 + th).value > 1e4);
    }

    #[test]
    fn energy_recipe_is_finite() {
        let p = params();
        let c = ConfinementSpec::from_energy(&p, 1.0, 1.0, 0.0).unwrap();
        assert!(c.kappa > 0.0 && c.kappa < 1.0);
        assert!(c.steep_level.is_finite() && c.steep_level > c.big_r);
    }
}
