use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::Params;
use crate::spectral::{Field, Grid, MollifierSpec, Torus, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Uniform,
    Spinodal,
    Stratified,
    Bubble,
    Manufactured,
}

impl FromStr for InitialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => InitialKind::Uniform,
            "spinodal" => InitialKind::Spinodal,
            "stratified" => InitialKind::Stratified,
            "bubble" => InitialKind::Bubble,
            "manufactured" => InitialKind::Manufactured,
            other => {
                return Err(Error::InvalidParameter {
                    name: "init.kind",
                    reason: format!("unknown initial data `{other}`"),
                })
            }
        })
    }
}

impl InitialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InitialKind::Uniform => "uniform",
            InitialKind::Spinodal => "spinodal",
            InitialKind::Stratified => "stratified",
            InitialKind::Bubble => "bubble",
            InitialKind::Manufactured => "manufactured",
        }
    }
}

/// Recipe for initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub kind: InitialKind,
    pub seed: u64,
    /// Size of the phase-field perturbation (or of the interface plateau).
    pub amplitude: f64,
    /// `|φ₀|` must stay below `1 − margin`.
    pub margin: f64,
    /// Largest wavenumber in the spinodal noise.
    pub noise_modes: usize,
    /// Scale of the prescribed velocity; zero gives a fluid at rest.
    pub u0_amplitude: f64,
    pub mean_phi: f64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self {
            kind: InitialKind::Spinodal,
            seed: 42,
            amplitude: 1e-2,
            margin: 0.05,
            noise_modes: 8,
            u0_amplitude: 0.0,
            mean_phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: VectorField,
    pub phi0: Field,
    pub rho0: Field,
}

fn periodic_offset(x: f64) -> f64 {
    x - x.round()
}

/// Seeded real trigonometric noise with wavenumbers up to `modes`, scaled to unit sup-norm.
pub fn seeded_noise(grid: Grid, seed: u64, modes: usize) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = modes.min(grid.dealias_cutoff()) as i64;
    let dim = grid.dim();
    let mut waves: Vec<([i64; 3], f64, f64)> = Vec::new();
    let range: Vec<i64> = (-m..=m).collect();
    let mut k = [0i64; 3];
    let combos = range.len().pow(dim as u32);
    for c in 0..combos {
        let mut rem = c;
        for slot in k.iter_mut().take(dim) {
            *slot = range[rem % range.len()];
            rem /= range.len();
        }
        // half space: first nonzero component positive
        let first = k[..dim].iter().find(|&&v| v != 0);
        if matches!(first, Some(&v) if v > 0) {
            let a: f64 = rng.random_range(-1.0..1.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            waves.push((k, a, b));
        }
    }
    let f = Field::from_fn(grid, |x| {
        waves
            .iter()
            .map(|(k, a, b)| {
                let t = 2.0 * PI * (0..dim).map(|i| k[i] as f64 * x[i]).sum::<f64>();
                a * t.cos() + b * t.sin()
            })
            .sum()
    });
    let s = f.max_abs().max(f64::MIN_POSITIVE);
    f.map(|v| v / s)
}

fn velocity(grid: Grid, amp: f64) -> VectorField {
    VectorField::from_fn(grid, |a, x| {
        let s = 2.0 * PI;
        amp * match a {
            0 => 1.0 + 0.5 * (s * x[1]).sin(),
            1 => 0.5 - 0.25 * (s * x[0]).cos(),
            _ => 0.25 * (s * x[0]).sin(),
        }
    })
}

/// Builds `(u₀, φ₀, ρ₀)` deterministically from `spec`.
pub fn build_initial_data(grid: Grid, params: &Params, spec: &InitialSpec) -> Result<InitialData> {
    if grid.dim() != params.dim() {
        return Err(Error::Dimension {
            expected: format!("dim {}", params.dim()),
            got: format!("dim {}", grid.dim()),
        });
    }
    let a = spec.amplitude;
    let mean = spec.mean_phi;
    let phi0 = match spec.kind {
        InitialKind::Uniform => Field::constant(grid, mean),
        InitialKind::Spinodal => seeded_noise(grid, spec.seed, spec.noise_modes).map(|v| mean + a * v),
        InitialKind::Stratified => {
            Field::from_fn(grid, |x| mean + a * ((2.0 * PI * x[0]).cos() / 0.15).tanh())
        }
        InitialKind::Bubble => {
            let dim = grid.dim();
            Field::from_fn(grid, |x| {
                let r = (0..dim)
                    .map(|i| periodic_offset(x[i] - 0.5).powi(2))
                    .sum::<f64>()
                    .sqrt();
                mean + a * ((r - 0.25) / 0.05).tanh()
            })
        }
        InitialKind::Manufactured => Field::from_fn(grid, |x| {
            let s = 2.0 * PI;
            mean + a * ((s * x[0]).cos() + 0.5 * (s * (x[0] + x[1])).sin())
        }),
    };
    let limit = 1.0 - spec.margin;
    let max_abs = phi0.max_abs();
    if !(max_abs <= limit) {
        return Err(Error::Margin { max_abs, limit });
    }
    let rho0 = phi0.map(|v| params.rho_of_phi(v));
    Ok(InitialData {
        u0: velocity(grid, spec.u0_amplitude),
        phi0,
        rho0,
    })
}

/// `ρ₀` convolved with a Gaussian of width `δ^{1/4}`.
pub fn mollified_initial_density(torus: &Torus, rho0: &Field, delta: f64) -> Result<Field> {
    torus.mollify(rho0, &MollifierSpec::gaussian(delta.powf(0.25)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::ParamsSpec;

    fn params() -> Params {
        Params::new(ParamsSpec::default()).unwrap()
    }

    #[test]
    fn spinodal_is_deterministic_and_centered() {
        let g = Grid::new(2, 32).unwrap();
        let s = InitialSpec::default();
        let a = build_initial_data(g, &params(), &s).unwrap();
        let b = build_initial_data(g, &params(), &s).unwrap();
        assert_eq!(a, b);
        assert!(a.phi0.mean().abs() < 1e-15);
        assert!((a.rho0.mean() - params().rho_mid()).abs() < 1e-15);
        assert!((a.phi0.max_abs() - 1e-2).abs() < 1e-15);
        let c = build_initial_data(g, &params(), &InitialSpec { seed: 7, ..s }).unwrap();
        assert_ne!(a.phi0, c.phi0);
    }

    #[test]
    fn margin_is_enforced() {
        let g = Grid::new(2, 16).unwrap();
        let s = InitialSpec {
            kind: InitialKind::Bubble,
            amplitude: 0.99,
            ..Default::default()
        };
        assert!(matches!(
            build_initial_data(g, &params(), &s),
            Err(Error::Margin { .. })
        ));
    }

    #[test]
    fn bubble_stays_inside() {
        let g = Grid::new(2, 32).unwrap();
        let s = InitialSpec {
            kind: InitialKind::Bubble,
            amplitude: 0.9,
            ..Default::default()
        };
        let d = build_initial_data(g, &params(), &s).unwrap();
        assert!(d.phi0.max() < 1.0 && d.phi0.min() > -1.0);
        assert!(d.phi0.min() < -0.85 && d.phi0.max() > 0.85);
    }

    #[test]
    fn mollified_constant_is_unchanged() {
        let t = Torus::new(Grid::new(2, 16).unwrap());
        let c = Field::constant(t.grid(), 0.6);
        let m = mollified_initial_density(&t, &c, 1e-3).unwrap();
        assert!(m.max_abs_diff(&c) < 1e-14);
    }
}
