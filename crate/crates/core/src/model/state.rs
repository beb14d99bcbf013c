use crate::error::{Error, Result};
use crate::level::Level;
use crate::potentials::PotentialPack;
use crate::spectral::{Field, Grid, Torus, VectorField};

/// Prognostic pair `(u, ρ)` at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub time: f64,
    pub step: u64,
    pub u: VectorField,
    pub rho: Field,
}

impl State {
    pub fn new(u: VectorField, rho: Field, time: f64) -> Result<Self> {
        if u.grid() != rho.grid() {
            return Err(Error::Dimension {
                expected: rho.grid().to_string(),
                got: u.grid().to_string(),
            });
        }
        Ok(Self {
            time,
            step: 0,
            u,
            rho,
        })
    }

    /// Fluid at rest with constant density.
    pub fn uniform(grid: Grid, rho: f64) -> Self {
        Self {
            time: 0.0,
            step: 0,
            u: VectorField::zeros(grid),
            rho: Field::constant(grid, rho),
        }
    }

    pub fn grid(&self) -> Grid {
        self.rho.grid()
    }

    /// `m = ρu`.
    pub fn momentum(&self) -> VectorField {
        self.u.scale_by(&self.rho).expect("state components share a grid")
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.u.is_finite()
    }

    /// Errors if any density value leaves the open band of `level`.
    pub fn check_band(&self, pack: &PotentialPack, level: Level) -> Result<()> {
        let (lo, hi) = pack.band(level);
        let (min, max) = (self.rho.min(), self.rho.max());
        if !(min > lo && max < hi) {
            return Err(Error::Confinement { lo, hi, min, max });
        }
        Ok(())
    }
}

/// Phase-field quantities recovered from `(u, ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFields {
    pub phi: Field,
    pub mu: Field,
    pub mu_p: Field,
    pub p: Field,
}

/// `φ = −ℓρ + ℓ − 1`, `μ = −Δφ + F′(φ)`, `αΔμ_p = div u` with zero mean,
/// and `p = (μ_p − μ)/α`. The truncated `F_σ` is used at the truncated level.
pub fn reconstruct_derived(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<DerivedFields> {
    state.check_band(pack, level)?;
    let alpha = pack.params().alpha();
    let phi = state.rho.map(|r| pack.phi_of_rho(r));
    let fprime = if level.truncated() {
        phi.map(|v| pack.f_sigma(v).d1)
    } else {
        phi.try_map(|v| pack.f(v).map(|t| t.d1))?
    };
    let mut mu = torus.laplacian(&phi)?;
    mu.scale(-1.0);
    mu.axpy(1.0, &fprime)?;
    let div_u = torus.div(&state.u)?;
    let mut mu_p = torus.inv_laplacian_zero_mean_tol(&div_u, 1e-10)?;
    mu_p.scale(1.0 / alpha);
    let p = (&mu_p - &mu).map(|v| v / alpha);
    Ok(DerivedFields { phi, mu, mu_p, p })
}

/// Both sides of the capillary identity `φ∇μ = div(∇φ⊗∇φ + (φμ − |∇φ|²/2 − F)I)`.
#[derive(Debug, Clone)]
pub struct CapillaryReport {
    pub lhs: VectorField,
    pub rhs: VectorField,
    /// `‖lhs − rhs‖₂ / ‖lhs‖₂`
    pub relative_discrepancy: f64,
}

/// Evaluates the capillary identity for `μ = −Δφ + F_σ′(φ)`.
///
/// The potential enters the divergence form through `∇F_σ(φ) = F_σ′(φ)∇φ`.
pub fn capillary_identity(torus: &Torus, pack: &PotentialPack, phi: &Field) -> Result<CapillaryReport> {
    let grid = phi.grid();
    let dim = grid.dim();
    let fprime = phi.map(|v| pack.f_sigma(v).d1);
    let mut mu = torus.laplacian(phi)?;
    mu.scale(-1.0);
    mu.axpy(1.0, &fprime)?;

    let grad_mu = torus.grad(&mu)?;
    let lhs = grad_mu
        .scale_by(phi)?
        .map_components(|c| torus.dealias(c).expect("same grid"));

    let grad_phi = torus.grad(phi)?;
    let half_sq = grad_phi.norm_sq().map(|v| 0.5 * v);
    let iso = &phi.mul_pointwise(&mu)? - &half_sq;
    let grad_iso = torus.grad(&iso)?;
    let mut comps = Vec::with_capacity(dim);
    for a in 0..dim {
        let row = VectorField::from_components(
            (0..dim)
                .map(|b| grad_phi.component(a).mul_pointwise(grad_phi.component(b)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let mut c = torus.div(&row)?;
        c.axpy(1.0, grad_iso.component(a))?;
        c.axpy(-1.0, &fprime.mul_pointwise(grad_phi.component(a))?)?;
        comps.push(torus.dealias(&c)?);
    }
    let rhs = VectorField::from_components(comps)?;
    let relative_discrepancy = (&lhs - &rhs).l2_norm() / lhs.l2_norm().max(f64::MIN_POSITIVE);
    Ok(CapillaryReport {
        lhs,
        rhs,
        relative_discrepancy,
    })
}
