use crate::error::{Error, Result};
use crate::level::Level;
use crate::potentials::PotentialPack;
use crate::spectral::{Field, Torus, VectorField};

use super::rhs::{capillary_divergence, Calculus};

/// Inputs of the two momentum forms.
#[derive(Debug, Clone)]
pub struct MomentumFields {
    pub u: VectorField,
    pub rho: Field,
    pub phi: Field,
    pub mu: Field,
    pub p: Field,
}

/// Residuals of the momentum equation without the time derivative.
#[derive(Debug, Clone)]
pub struct ReformulationReport {
    /// `div(ρu⊗u) − div(ρDu) + ∇p + φ∇μ`
    pub original: VectorField,
    /// `div(ρu⊗u) − div(ρDu) + ∇P̃ − ℓ²ρ∇Δρ + α⁻²∇Δ⁻¹div u`
    pub reformulated: VectorField,
    /// `‖original − reformulated‖₂ / max(‖original‖₂, ‖reformulated‖₂)`
    pub discrepancy: f64,
}

const CONSISTENCY_TOL: f64 = 1e-9;

fn check(name: &str, err: f64, scale: f64) -> Result<()> {
    if !(err <= CONSISTENCY_TOL * scale.max(1.0)) {
        return Err(Error::Consistency(format!(
            "{name} violated: residual {err:.3e} against scale {scale:.3e}"
        )));
    }
    Ok(())
}

/// Evaluates both forms after checking `φ = −ℓρ + ℓ − 1`, `μ = −Δφ + F′(φ)`
/// and `αΔ(μ + αp) = div u`. The truncated potential is used at the truncated level.
pub fn residual_original_vs_reformulated(
    torus: &Torus,
    pack: &PotentialPack,
    fields: &MomentumFields,
    level: Level,
) -> Result<ReformulationReport> {
    let calc = Calculus::new(torus);
    let grid = torus.grid();
    let dim = grid.dim();
    let params = pack.params();
    let alpha = params.alpha();
    let MomentumFields { u, rho, phi, mu, p } = fields;

    let phi_expected = rho.map(|r| pack.phi_of_rho(r));
    check("affine density map", phi.max_abs_diff(&phi_expected), phi.max_abs())?;

    let fprime = if level.truncated() {
        phi.map(|v| pack.f_sigma(v).d1)
    } else {
        phi.try_map(|v| pack.f(v).map(|t| t.d1))?
    };
    let mut mu_expected = torus.laplacian(phi)?;
    mu_expected.scale(-1.0);
    mu_expected.axpy(1.0, &fprime)?;
    check("chemical potential", mu.max_abs_diff(&mu_expected), mu.max_abs())?;

    let mut mu_p = mu.clone();
    mu_p.axpy(alpha, p)?;
    let mut lhs = torus.laplacian(&mu_p)?;
    lhs.scale(alpha);
    let div_u = torus.div(u)?;
    check("divergence constraint", lhs.max_abs_diff(&div_u), div_u.max_abs())?;

    let m = u.scale_by(rho)?;
    let grad_u = u
        .components()
        .iter()
        .map(|c| torus.grad(c))
        .collect::<Result<Vec<_>>>()?;
    let mut transport_rows = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for b in 0..dim {
            let mut e = m.component(a).mul_pointwise(u.component(b))?;
            let sym = (grad_u[a].component(b) + grad_u[b].component(a)).map(|v| 0.5 * v);
            e.axpy(-1.0, &rho.mul_pointwise(&sym)?)?;
            row.push(e);
        }
        transport_rows.push(row);
    }
    let transport = calc.div_rows(&transport_rows)?;

    let mut original = transport.clone();
    original.axpy(1.0, &calc.grad(p)?)?;
    let grad_mu = torus.grad(mu)?;
    let phi_grad_mu = grad_mu
        .scale_by(phi)?
        .map_components(|c| calc.dealias(c).expect("same grid"));
    original.axpy(1.0, &phi_grad_mu)?;

    let mut reformulated = transport;
    let p_tilde = if level.truncated() {
        rho.map(|r| pack.p_tilde_sigma(r).0)
    } else {
        rho.try_map(|r| pack.p_tilde(r).map(|v| v.0))?
    };
    reformulated.axpy(1.0, &calc.grad(&p_tilde)?)?;
    reformulated.axpy(-1.0, &capillary_divergence(torus, pack, rho)?)?;
    reformulated.axpy(alpha.powi(-2), &torus.bogovskii(&div_u)?)?;

    let scale = original.l2_norm().max(reformulated.l2_norm());
    let discrepancy = if scale > 0.0 {
        (&original - &reformulated).l2_norm() / scale
    } else {
        0.0
    };
    Ok(ReformulationReport {
        original,
        reformulated,
        discrepancy,
    })
}

impl MomentumFields {
    /// Consistent inputs reconstructed from `(u, ρ)`.
    pub fn from_state(torus: &Torus, pack: &PotentialPack, state: &crate::model::State, level: Level) -> Result<Self> {
        let d = crate::model::reconstruct_derived(torus, pack, state, level)?;
        Ok(Self {
            u: state.u.clone(),
            rho: state.rho.clone(),
            phi: d.phi,
            mu: d.mu,
            p: d.p,
        })
    }
}
