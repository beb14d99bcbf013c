use serde::Serialize;
use crate::error::{Error, Result};
use crate::level::Level;
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::{Field, Torus, VectorField};

/// Integrals of the energy densities. `δ` terms are zero at the target level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergyComponents {
    /// `∫½ρ|u|²`
    pub kinetic: f64,
    /// `∫ℓ²/2 |∇ρ|² = ∫½|∇φ|²`
    pub gradient: f64,
    /// `∫F̃(ρ)` with the potential of the level
    pub potential: f64,
    /// `∫δ/2 |Δρ|²`
    pub hyper: f64,
    /// `∫δW_δ(ρ)` (or `δW`)
    pub confinement: f64,
}

impl EnergyComponents {
    /// Ginzburg–Landau free energy.
    pub fn e_gl(&self) -> f64 {
        self.gradient + self.potential
    }

    /// Kinetic plus free energy.
    pub fn e_total(&self) -> f64 {
        self.kinetic + self.e_gl()
    }

    /// Energy of the level, including the `δ` terms.
    pub fn e_level(&self) -> f64 {
        self.e_total() + self.hyper + self.confinement
    }
}

/// Pieces of the energy balance `dE/dt = −D + S` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Dissipation {
    /// `∫ρ|Du|²`
    pub visc: f64,
    /// `∫|∇μ_p|² = α⁻²∫|∇Δ⁻¹div u|²`
    pub mup: f64,
    /// `δ∫|Δu|² + δ²∫|∇Δρ|² + δℓ²∫|Δρ|²`
    pub reg: f64,
    /// `−δ∫(F̃″ + δW″)|∇ρ|²`, which may have either sign
    pub source: f64,
    /// `δωℓ²∫|∇ρ|²`, the bound on `source`
    pub source_bound: f64,
}

impl Dissipation {
    pub fn total(&self) -> f64 {
        self.visc + self.mup + self.reg
    }
}

/// Derivatives shared by the functionals.
pub(crate) struct Kinematics {
    pub grad_rho: VectorField,
    pub lap_rho: Field,
    /// `grad_u[a]` is `∇u_a`
    pub grad_u: Vec<VectorField>,
    pub bog: VectorField,
}

impl Kinematics {
    pub fn new(torus: &Torus, state: &State) -> Result<Self> {
        let grad_rho = torus.grad(&state.rho)?;
        let lap_rho = torus.laplacian(&state.rho)?;
        let grad_u = state
            .u
            .components()
            .iter()
            .map(|c| torus.grad(c))
            .collect::<Result<Vec<_>>>()?;
        let bog = torus.bogovskii(&torus.div(&state.u)?)?;
        Ok(Self {
            grad_rho,
            lap_rho,
            grad_u,
            bog,
        })
    }

    /// Pointwise `Σ_ab w(∂_b u_a, ∂_a u_b)`.
    fn pair_sum(&self, w: impl Fn(f64, f64) -> f64) -> Field {
        let dim = self.grad_u.len();
        let grid = self.lap_rho.grid();
        let mut out = Field::zeros(grid);
        for a in 0..dim {
            for b in 0..dim {
                let ab = self.grad_u[a].component(b).values();
                let ba = self.grad_u[b].component(a).values();
                for ((o, &x), &y) in out.values_mut().iter_mut().zip(ab).zip(ba) {
                    *o += w(x, y);
                }
            }
        }
        out
    }

    /// `|Du|²`
    pub fn sym_sq(&self) -> Field {
        self.pair_sum(|x, y| 0.25 * (x + y) * (x + y))
    }

    /// `|∇u − ∇uᵀ|²`
    pub fn skew_sq(&self) -> Field {
        self.pair_sum(|x, y| (x - y) * (x - y))
    }
}

pub(crate) fn integral(f: &Field) -> f64 {
    f.mean()
}

fn weighted(rho: &Field, f: &Field) -> f64 {
    rho.values().iter().zip(f.values()).map(|(r, v)| r * v).sum::<f64>() / rho.values().len() as f64
}

fn level_delta(pack: &PotentialPack, level: Level) -> f64 {
    if level.has_delta() {
        pack.params().delta()
    } else {
        0.0
    }
}

/// Energy integrals of `state` at `level`; quadrature is the grid-point average.
pub fn compute_energies(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<EnergyComponents> {
    let kin = Kinematics::new(torus, state)?;
    energies_with(pack, state, level, &kin)
}

pub(crate) fn energies_with(
    pack: &PotentialPack,
    state: &State,
    level: Level,
    kin: &Kinematics,
) -> Result<EnergyComponents> {
    if !level.truncated() {
        state.check_band(pack, level)?;
    }
    let ell2 = pack.params().ell().powi(2);
    let delta = level_delta(pack, level);
    let rho = &state.rho;
    let kinetic = 0.5 * weighted(rho, &state.u.norm_sq());
    let gradient = 0.5 * ell2 * integral(&kin.grad_rho.norm_sq());
    let potential = integral(&rho.try_map(|r| pack.free_energy(level, r).map(|t| t.value))?);
    let (hyper, confinement) = if delta > 0.0 {
        (
            0.5 * delta * integral(&kin.lap_rho.map(|v| v * v)),
            delta * integral(&rho.try_map(|r| pack.confinement_potential(level, r).map(|t| t.value))?),
        )
    } else {
        (0.0, 0.0)
    };
    Ok(EnergyComponents {
        kinetic,
        gradient,
        potential,
        hyper,
        confinement,
    })
}

/// Dissipation and source integrals of the energy balance at `level`.
pub fn compute_dissipation(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<Dissipation> {
    let kin = Kinematics::new(torus, state)?;
    dissipation_with(torus, pack, state, level, &kin)
}

pub(crate) fn dissipation_with(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
    kin: &Kinematics,
) -> Result<Dissipation> {
    let params = pack.params();
    let ell2 = params.ell().powi(2);
    let delta = level_delta(pack, level);
    let rho = &state.rho;
    let visc = weighted(rho, &kin.sym_sq());
    let mup = params.alpha().powi(-2) * integral(&kin.bog.norm_sq());
    let grad_sq = kin.grad_rho.norm_sq();
    let (reg, source, source_bound) = if delta > 0.0 {
        let lap_u: f64 = state
            .u
            .components()
            .iter()
            .map(|c| torus.laplacian(c).map(|l| integral(&l.map(|v| v * v))))
            .sum::<Result<f64>>()?;
        let grad_lap = torus.grad(&kin.lap_rho)?;
        let lap_sq = integral(&kin.lap_rho.map(|v| v * v));
        let reg = delta * lap_u + delta * delta * integral(&grad_lap.norm_sq()) + delta * ell2 * lap_sq;
        let curv = rho.try_map(|r| {
            let f2 = pack.free_energy(level, r)?.d2;
            let w2 = pack.confinement_potential(level, r)?.d2;
            Ok(f2 + delta * w2)
        })?;
        let source = -delta * weighted(&curv, &grad_sq);
        let source_bound = delta * params.omega() * ell2 * integral(&grad_sq);
        (reg, source, source_bound)
    } else {
        (0.0, 0.0, 0.0)
    };
    Ok(Dissipation {
        visc,
        mup,
        reg,
        source,
        source_bound,
    })
}

/// Bresch–Desjardins entropy in both algebraic forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdEntropy {
    /// `∫½ρ|u + ∇ln ρ|²` plus the free-energy terms of the level
    pub grouped: f64,
    /// The same with the kinetic part expanded as `½ρ|u|² + u·∇ρ + |∇ρ|²/(2ρ)`
    pub expanded: f64,
    /// `∫ln ρ`
    pub log_rho: f64,
}

/// `E_BD` at `level`: `∫½ρ|u + ∇ln ρ|² + ℓ²/2|∇ρ|² + F̃(ρ)` plus `δ/2|Δρ|² + δW` below the target level.
pub fn compute_bd_entropy(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<BdEntropy> {
    let kin = Kinematics::new(torus, state)?;
    let e = energies_with(pack, state, level, &kin)?;
    bd_with(state, &kin, &e)
}

pub(crate) fn bd_with(state: &State, kin: &Kinematics, e: &EnergyComponents) -> Result<BdEntropy> {
    let rho = &state.rho;
    if rho.min() <= 0.0 {
        return Err(Error::SingularDomain {
            value: rho.min(),
            domain: "(0, ∞) for ln ρ".into(),
        });
    }
    let rest = e.e_level() - e.kinetic;
    let dim = state.u.dim();
    let n = rho.values().len();
    let (mut grouped, mut expanded, mut log_rho) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let r = rho.values()[i];
        let (mut w2, mut u2, mut ug, mut g2) = (0.0, 0.0, 0.0, 0.0);
        for a in 0..dim {
            let u = state.u.component(a).values()[i];
            let g = kin.grad_rho.component(a).values()[i];
            let w = u + g / r;
            w2 += w * w;
            u2 += u * u;
            ug += u * g;
            g2 += g * g;
        }
        grouped += 0.5 * r * w2;
        expanded += 0.5 * r * u2 + ug + 0.5 * g2 / r;
        log_rho += r.ln();
    }
    let nf = n as f64;
    Ok(BdEntropy {
        grouped: grouped / nf + rest,
        expanded: expanded / nf + rest,
        log_rho: log_rho / nf,
    })
}

/// Dissipation terms of the target-level BD law.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BdDissipation {
    /// `ℓ²∫|Δρ|²`
    pub lap_rho: f64,
    /// `∫F̃″(ρ)|∇ρ|²`, sign-indefinite when `ω > 0`
    pub hess: f64,
    /// `¼∫ρ|∇u − ∇uᵀ|²`
    pub rotation: f64,
}

pub(crate) fn bd_dissipation_with(
    pack: &PotentialPack,
    state: &State,
    level: Level,
    kin: &Kinematics,
) -> Result<BdDissipation> {
    let ell2 = pack.params().ell().powi(2);
    let f2 = state.rho.try_map(|r| pack.free_energy(level, r).map(|t| t.d2))?;
    Ok(BdDissipation {
        lap_rho: ell2 * integral(&kin.lap_rho.map(|v| v * v)),
        hess: weighted(&f2, &kin.grad_rho.norm_sq()),
        rotation: 0.25 * weighted(&state.rho, &kin.skew_sq()),
    })
}

/// BD dissipation of `state` at `level`.
pub fn compute_bd_dissipation(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<BdDissipation> {
    let kin = Kinematics::new(torus, state)?;
    bd_dissipation_with(pack, state, level, &kin)
}

/// `∫w·f_m + f_ρ(−div w − ½|w|² − ℓ²Δρ + F̃′(ρ) − α⁻²/ρ)` with `w = u + ∇ln ρ`:
/// the rate at which forcing feeds `E_BD − α⁻²∫ln ρ` at the target level.
pub fn bd_forcing_pairing(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    f_rho: &Field,
    f_m: &VectorField,
) -> Result<f64> {
    let params = pack.params();
    let ell2 = params.ell().powi(2);
    let inv_a2 = params.alpha().powi(-2);
    let rho = &state.rho;
    let grad = torus.grad(rho)?;
    let w = VectorField::from_components(
        (0..rho.grid().dim())
            .map(|a| {
                let mut c = grad.component(a).zip_map(rho, |g, r| g / r)?;
                c.axpy(1.0, state.u.component(a))?;
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let div_w = torus.div(&w)?;
    let lap = torus.laplacian(rho)?;
    let w2 = w.norm_sq();
    let mut acc = integral(&w.dot(f_m)?);
    let n = rho.values().len();
    let mut s = 0.0;
    for i in 0..n {
        let r = rho.values()[i];
        let fp = pack.free_energy(Level::Target, r)?.d1;
        let g = -div_w.values()[i] - 0.5 * w2.values()[i] - ell2 * lap.values()[i] + fp - inv_a2 / r;
        s += f_rho.values()[i] * g;
    }
    acc += s / n as f64;
    Ok(acc)
}
