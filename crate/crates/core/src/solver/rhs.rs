use num_complex::Complex64;

use crate::error::Result;
use crate::level::Level;
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::{Field, Spectrum, Torus, VectorField};

/// Individually evaluated tendencies of `∂t(ρu)` and `∂tρ`.
///
/// Terms absent at the chosen level are `None`.
#[derive(Debug, Clone)]
pub struct RhsTerms {
    /// `−div(ρu⊗u)`
    pub convection: VectorField,
    /// `div(ρDu)`
    pub viscous: VectorField,
    /// `−∇P̃`
    pub pressure: VectorField,
    /// `−δ∇H_δ = −δρ∇W_δ′`
    pub confinement: Option<VectorField>,
    /// `ℓ²ρ∇Δρ`, assembled in divergence form
    pub capillary: VectorField,
    /// `−α⁻²∇Δ⁻¹div u`
    pub damping: VectorField,
    /// `−δρ∇Δ²ρ`
    pub reg_bilap_rho: Option<VectorField>,
    /// `−δ(∇ρ·∇)u`
    pub reg_grad_rho_grad_u: Option<VectorField>,
    /// `−δΔ²u`
    pub reg_bilap_u: Option<VectorField>,
    /// `−div(ρu)`
    pub continuity_flux: Field,
    /// `δΔρ`
    pub diffusion: Option<Field>,
}

impl RhsTerms {
    pub fn named_momentum(&self) -> Vec<(&'static str, &VectorField)> {
        let mut out = vec![
            ("convection", &self.convection),
            ("viscous", &self.viscous),
            ("pressure", &self.pressure),
        ];
        if let Some(v) = &self.confinement {
            out.push(("confinement", v));
        }
        out.push(("capillary", &self.capillary));
        out.push(("damping", &self.damping));
        for (name, v) in [
            ("reg_bilap_rho", &self.reg_bilap_rho),
            ("reg_grad_rho_grad_u", &self.reg_grad_rho_grad_u),
            ("reg_bilap_u", &self.reg_bilap_u),
        ] {
            if let Some(v) = v {
                out.push((name, v));
            }
        }
        out
    }

    pub fn momentum_total(&self) -> VectorField {
        let terms = self.named_momentum();
        let mut acc = terms[0].1.clone();
        for (_, t) in &terms[1..] {
            acc.axpy(1.0, t).expect("terms share a grid");
        }
        acc
    }

    pub fn continuity_total(&self) -> Field {
        match &self.diffusion {
            Some(d) => &self.continuity_flux + d,
            None => self.continuity_flux.clone(),
        }
    }
}

/// Spectral helpers that fold the 2/3 rule into differentiation.
pub(crate) struct Calculus<'a> {
    pub torus: &'a Torus,
}

impl<'a> Calculus<'a> {
    pub fn new(torus: &'a Torus) -> Self {
        Self { torus }
    }

    fn masked(&self, f: &Field) -> Result<Spectrum> {
        let mut s = self.torus.forward(f)?;
        self.torus.dealias_spectrum(&mut s);
        Ok(s)
    }

    fn derivative(&self, s: &Spectrum, axis: usize) -> Spectrum {
        let mut out = s.clone();
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= Complex64::new(0.0, self.torus.odd_wavevector(i)[axis]);
        }
        out
    }

    pub fn dealias(&self, f: &Field) -> Result<Field> {
        self.torus.backward(&self.masked(f)?)
    }

    /// `∇` of the dealiased field.
    pub fn grad(&self, f: &Field) -> Result<VectorField> {
        let s = self.masked(f)?;
        self.torus.grad_spectrum(&s)
    }

    /// `Σ_b ∂_b T_ab` with every entry dealiased before differentiation.
    pub fn div_rows(&self, t: &[Vec<Field>]) -> Result<VectorField> {
        let grid = self.torus.grid();
        let mut comps = Vec::with_capacity(t.len());
        for row in t {
            let mut acc = Spectrum::zeros(grid);
            for (b, entry) in row.iter().enumerate() {
                let d = self.derivative(&self.masked(entry)?, b);
                for (o, c) in acc.coeffs_mut().iter_mut().zip(d.coeffs()) {
                    *o += c;
                }
            }
            comps.push(self.torus.backward(&acc)?);
        }
        VectorField::from_components(comps)
    }

    /// Multiplies mode `i` by `m(i)`.
    pub fn multiplier(&self, s: &Spectrum, m: impl Fn(usize) -> f64) -> Result<Field> {
        let mut out = s.clone();
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= m(i);
        }
        self.torus.backward(&out)
    }

    /// Gradient of the field whose spectrum is `s` times `m(i)`.
    pub fn grad_multiplier(&self, s: &Spectrum, m: impl Fn(usize) -> f64) -> Result<VectorField> {
        let mut out = s.clone();
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= m(i);
        }
        self.torus.grad_spectrum(&out)
    }
}

fn neg(v: &mut VectorField) {
    v.scale(-1.0);
}

/// `ℓ²ρ∇Δρ` in strong form: dealiased product of `ρ` with `∇Δρ`.
pub fn capillary_strong(torus: &Torus, pack: &PotentialPack, rho: &Field) -> Result<VectorField> {
    let calc = Calculus::new(torus);
    let s = torus.forward(rho)?;
    let g = calc.grad_multiplier(&s, |i| -torus.ksq(i))?;
    let ell2 = pack.params().ell().powi(2);
    let comps = g
        .components()
        .iter()
        .map(|c| calc.dealias(&rho.mul_pointwise(c)?).map(|f| &f * ell2))
        .collect::<Result<Vec<_>>>()?;
    VectorField::from_components(comps)
}

/// `ℓ²ρ∇Δρ` as `ℓ² div((ρΔρ + |∇ρ|²/2)I − ∇ρ⊗∇ρ)`.
pub fn capillary_divergence(torus: &Torus, pack: &PotentialPack, rho: &Field) -> Result<VectorField> {
    let calc = Calculus::new(torus);
    let s = torus.forward(rho)?;
    let grad = torus.grad_spectrum(&s)?;
    let lap = calc.multiplier(&s, |i| -torus.ksq(i))?;
    capillary_from_parts(&calc, pack, rho, &grad, &lap)
}

fn capillary_from_parts(
    calc: &Calculus,
    pack: &PotentialPack,
    rho: &Field,
    grad: &VectorField,
    lap: &Field,
) -> Result<VectorField> {
    let dim = rho.grid().dim();
    let iso = &rho.mul_pointwise(lap)? + &grad.norm_sq().map(|v| 0.5 * v);
    let mut t = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for b in 0..dim {
            let mut e = grad.component(a).mul_pointwise(grad.component(b))?;
            e.scale(-1.0);
            if a == b {
                e.axpy(1.0, &iso)?;
            }
            row.push(e);
        }
        t.push(row);
    }
    let mut out = calc.div_rows(&t)?;
    out.scale(pack.params().ell().powi(2));
    Ok(out)
}

/// `−δρ∇Δ²ρ` in strong form.
pub fn hyper_strong(torus: &Torus, pack: &PotentialPack, rho: &Field) -> Result<VectorField> {
    let calc = Calculus::new(torus);
    let s = torus.forward(rho)?;
    let g = calc.grad_multiplier(&s, |i| torus.ksq(i) * torus.ksq(i))?;
    hyper_from_grad(&calc, pack, rho, &g)
}

fn hyper_from_grad(
    calc: &Calculus,
    pack: &PotentialPack,
    rho: &Field,
    grad_bilap: &VectorField,
) -> Result<VectorField> {
    let delta = pack.params().delta();
    let comps = grad_bilap
        .components()
        .iter()
        .map(|c| calc.dealias(&rho.mul_pointwise(c)?).map(|f| &f * -delta))
        .collect::<Result<Vec<_>>>()?;
    VectorField::from_components(comps)
}

/// `−δρ∇Δ²ρ` through the product rule `−δ(∇(ρΔ²ρ) − Δ²ρ∇ρ)`.
pub fn hyper_weak(torus: &Torus, pack: &PotentialPack, rho: &Field) -> Result<VectorField> {
    let calc = Calculus::new(torus);
    let s = torus.forward(rho)?;
    let bilap = calc.multiplier(&s, |i| torus.ksq(i) * torus.ksq(i))?;
    let grad = torus.grad_spectrum(&s)?;
    let mut out = calc.grad(&rho.mul_pointwise(&bilap)?)?;
    let corr = grad.scale_by(&bilap)?.map_components(|c| calc.dealias(c).expect("same grid"));
    out.axpy(-1.0, &corr)?;
    out.scale(-pack.params().delta());
    Ok(out)
}

/// All tendencies of the momentum and continuity equations at `level`.
///
/// Products are dealiased. At the target level the density must lie in `(ρ̲, 1)`.
pub fn eval_momentum_rhs(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<RhsTerms> {
    if !level.truncated() {
        state.check_band(pack, level)?;
    }
    let calc = Calculus::new(torus);
    let grid = torus.grid();
    let dim = grid.dim();
    let params = pack.params();
    let delta = params.delta();
    let rho = &state.rho;
    let u = &state.u;

    let rho_hat = torus.forward(rho)?;
    let grad_rho = torus.grad_spectrum(&rho_hat)?;
    let lap_rho = calc.multiplier(&rho_hat, |i| -torus.ksq(i))?;
    let u_hat = u
        .components()
        .iter()
        .map(|c| torus.forward(c))
        .collect::<Result<Vec<_>>>()?;
    // grad_u[a][b] = ∂_b u_a
    let grad_u = u_hat
        .iter()
        .map(|s| torus.grad_spectrum(s))
        .collect::<Result<Vec<_>>>()?;

    let m = state.momentum();
    let convection = {
        let t: Vec<Vec<Field>> = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| m.component(a).mul_pointwise(u.component(b)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut v = calc.div_rows(&t)?;
        neg(&mut v);
        v
    };

    let viscous = {
        let t: Vec<Vec<Field>> = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        let sym = (grad_u[a].component(b) + grad_u[b].component(a)).map(|v| 0.5 * v);
                        rho.mul_pointwise(&sym)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        calc.div_rows(&t)?
    };

    let p_field = rho.try_map(|r| pack.pressure(level, r).map(|p| p.0))?;
    let mut pressure = calc.grad(&p_field)?;
    neg(&mut pressure);

    let confinement = if level.has_delta() {
        let h = rho.try_map(|r| pack.confinement_pressure(level, r).map(|h| h.0))?;
        let mut v = calc.grad(&h)?;
        v.scale(-delta);
        Some(v)
    } else {
        None
    };

    let capillary = capillary_from_parts(&calc, pack, rho, &grad_rho, &lap_rho)?;

    let div_u = torus.div_spectrum(u)?;
    let mut damping = torus.bogovskii_spectrum(&div_u)?;
    damping.scale(-1.0 / params.alpha().powi(2));

    let (reg_bilap_rho, reg_grad_rho_grad_u, reg_bilap_u, diffusion) = if level.has_delta() {
        let gb = calc.grad_multiplier(&rho_hat, |i| torus.ksq(i) * torus.ksq(i))?;
        let hyper = hyper_from_grad(&calc, pack, rho, &gb)?;
        let adv = (0..dim)
            .map(|a| {
                let mut acc = Field::zeros(grid);
                for b in 0..dim {
                    acc.axpy(1.0, &grad_rho.component(b).mul_pointwise(grad_u[a].component(b))?)?;
                }
                calc.dealias(&acc).map(|f| &f * -delta)
            })
            .collect::<Result<Vec<_>>>()?;
        let bilap_u = u_hat
            .iter()
            .map(|s| calc.multiplier(s, |i| -delta * torus.ksq(i) * torus.ksq(i)))
            .collect::<Result<Vec<_>>>()?;
        (
            Some(hyper),
            Some(VectorField::from_components(adv)?),
            Some(VectorField::from_components(bilap_u)?),
            Some(&lap_rho * delta),
        )
    } else {
        (None, None, None, None)
    };

    let mut flux = Spectrum::zeros(grid);
    for a in 0..dim {
        let s = torus.forward(m.component(a))?;
        for (i, (o, c)) in flux.coeffs_mut().iter_mut().zip(s.coeffs()).enumerate() {
            if torus.is_retained(i) {
                *o -= c * Complex64::new(0.0, torus.odd_wavevector(i)[a]);
            }
        }
    }
    let continuity_flux = torus.backward(&flux)?;

    Ok(RhsTerms {
        convection,
        viscous,
        pressure,
        confinement,
        capillary,
        damping,
        reg_bilap_rho,
        reg_grad_rho_grad_u,
        reg_bilap_u,
        continuity_flux,
        diffusion,
    })
}

/// `−div(ρu) + δΔρ` (the diffusion only below the target level).
pub fn eval_continuity_rhs(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<Field> {
    let grid = torus.grid();
    let m = state.momentum();
    let rho_hat = torus.forward(&state.rho)?;
    let delta = if level.has_delta() { pack.params().delta() } else { 0.0 };
    let mut acc = Spectrum::zeros(grid);
    for (i, c) in acc.coeffs_mut().iter_mut().enumerate() {
        *c = -rho_hat.coeffs()[i] * (delta * torus.ksq(i));
    }
    for a in 0..grid.dim() {
        let s = torus.forward(m.component(a))?;
        for (i, (o, c)) in acc.coeffs_mut().iter_mut().zip(s.coeffs()).enumerate() {
            if torus.is_retained(i) {
                *o -= c * Complex64::new(0.0, torus.odd_wavevector(i)[a]);
            }
        }
    }
    torus.backward(&acc)
}
