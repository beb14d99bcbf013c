use num_complex::Complex64;

use crate::error::Result;
use crate::level::Level;
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::Torus;

type C = Complex64;

/// Frozen constant-coefficient operator `A` acting on `(ρ̂, m̂)` mode by mode.
///
/// Per mode, with `K` the odd wavevector, `q = |K|` and `κ² = |2πk|²`:
///
/// ```text
/// ρ_t   = −iK·m − δκ²ρ
/// m_t   = −iK g ρ − r_T m − c_L K(K·m)
/// g     = ℓ²ρ̄κ² + δρ̄κ⁴ + c_s²
/// r_T   = κ²/2 + δκ⁴/ρ_min
/// c_L   = 1/2 + α⁻²/(ρ_min κ²)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenOperator {
    pub rho_split: f64,
    pub rho_min: f64,
    pub sound_sq: f64,
    pub ell_sq: f64,
    pub inv_alpha_sq: f64,
    pub delta: f64,
}

impl FrozenOperator {
    /// Coefficients frozen from `state`.
    pub fn from_state(
        pack: &PotentialPack,
        state: &State,
        level: Level,
        splitting: Option<f64>,
    ) -> Result<Self> {
        let params = pack.params();
        let rho = &state.rho;
        let rho_split = splitting.unwrap_or_else(|| rho.mean().max(0.6 * rho.max()));
        let delta = if level.has_delta() { params.delta() } else { 0.0 };
        let mut sound_sq = 0.0f64;
        for &r in rho.values() {
            let mut c = pack.pressure(level, r)?.1;
            if level.has_delta() {
                c += delta * r * pack.confinement_potential(level, r)?.d2;
            }
            sound_sq = sound_sq.max(c);
        }
        Ok(Self {
            rho_split,
            rho_min: rho.min().max(0.5 * params.rho_lower()),
            sound_sq,
            ell_sq: params.ell().powi(2),
            inv_alpha_sq: params.alpha().powi(-2),
            delta,
        })
    }

    fn coefficients(&self, torus: &Torus, idx: usize) -> ([f64; 3], f64, f64, f64, f64, f64) {
        let k = torus.odd_wavevector(idx);
        let q2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let k2 = torus.ksq(idx);
        let diff = self.delta * k2;
        let r_t = 0.5 * k2 + self.delta * k2 * k2 / self.rho_min;
        let c_l = 0.5 + self.inv_alpha_sq / (self.rho_min * k2);
        let g = self.ell_sq * self.rho_split * k2 + self.delta * self.rho_split * k2 * k2 + self.sound_sq;
        (k, q2, diff, r_t, c_l, g)
    }

    /// `A·(ρ̂, m̂)` at mode `idx`.
    pub fn apply(&self, torus: &Torus, idx: usize, rho: C, m: &[C]) -> (C, [C; 3]) {
        let mut out = [C::default(); 3];
        if idx == 0 {
            return (C::default(), out);
        }
        let (k, _q2, diff, r_t, c_l, g) = self.coefficients(torus, idx);
        let dim = m.len();
        let kdotm: C = (0..dim).map(|a| m[a] * k[a]).sum();
        let i = C::new(0.0, 1.0);
        let arho = -i * kdotm - rho * diff;
        for a in 0..dim {
            out[a] = -i * k[a] * g * rho - m[a] * r_t - kdotm * (c_l * k[a]);
        }
        (arho, out)
    }

    /// Solves `(γI − dt·A)(ρ̂, m̂) = (r_ρ, r_m)` at mode `idx`.
    pub fn solve(&self, torus: &Torus, idx: usize, gamma: f64, dt: f64, r_rho: C, r_m: &[C]) -> (C, [C; 3]) {
        let dim = r_m.len();
        let mut out = [C::default(); 3];
        if idx == 0 {
            for a in 0..dim {
                out[a] = r_m[a] / gamma;
            }
            return (r_rho / gamma, out);
        }
        let (k, q2, diff, r_t, c_l, g) = self.coefficients(torus, idx);
        let d_rho = gamma + dt * diff;
        let d_t = gamma + dt * r_t;
        if q2 == 0.0 {
            for a in 0..dim {
                out[a] = r_m[a] / d_t;
            }
            return (r_rho / d_rho, out);
        }
        let q = q2.sqrt();
        let e: Vec<f64> = (0..dim).map(|a| k[a] / q).collect();
        let r_l: C = (0..dim).map(|a| r_m[a] * e[a]).sum();
        let a_l = r_t + c_l * q2;
        let d_l = gamma + dt * a_l;
        let det = d_rho * d_l + dt * dt * q2 * g;
        let i = C::new(0.0, 1.0);
        let rho = (r_rho * d_l - i * (dt * q) * r_l) / det;
        let m_l = (r_l * d_rho - i * (dt * q * g) * r_rho) / det;
        for a in 0..dim {
            out[a] = (r_m[a] - r_l * e[a]) / d_t + m_l * e[a];
        }
        (rho, out)
    }

    /// Decay factor of a density mode when only `ρ_t = −δκ²ρ` is advanced.
    pub fn density_factor(&self, torus: &Torus, idx: usize, dt: f64) -> f64 {
        1.0 / (1.0 + dt * self.delta * torus.ksq(idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn solve_inverts_gamma_minus_dt_a() {
        let torus = Torus::new(Grid::new(2, 16).unwrap());
        let op = FrozenOperator {
            rho_split: 0.7,
            rho_min: 0.5,
            sound_sq: 4.0,
            ell_sq: 9.0,
            inv_alpha_sq: 4.0,
            delta: 1e-3,
        };
        let dt = 0.01;
        for idx in [1usize, 5, 17, 40, 8, 8 * 16, 255] {
            for gamma in [1.0, 1.5] {
                let rho = C::new(0.3, -0.2);
                let m = [C::new(0.1, 0.4), C::new(-0.7, 0.05)];
                let (ar, am) = op.apply(&torus, idx, rho, &m);
                let r_rho = rho * gamma - ar * dt;
                let r_m = [m[0] * gamma - am[0] * dt, m[1] * gamma - am[1] * dt];
                let (sr, sm) = op.solve(&torus, idx, gamma, dt, r_rho, &r_m);
                assert!((sr - rho).norm() < 1e-13, "{idx}");
                assert!((sm[0] - m[0]).norm() < 1e-13 && (sm[1] - m[1]).norm() < 1e-13, "{idx}");
            }
        }
    }
}
