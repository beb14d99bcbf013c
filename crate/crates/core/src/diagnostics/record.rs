use serde::{Deserialize, Serialize};

use super::energy::{bd_dissipation_with, bd_with, dissipation_with, energies_with, Kinematics};
use super::pressure::{pressure_sample, PressureSample, TAIL_LADDER};
use crate::error::Result;
use crate::level::Level;
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::Torus;

/// Scalar audit values of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub time: f64,
    pub mass_rho: f64,
    pub mass_phi: f64,
    pub momentum: Vec<f64>,
    /// `‖ρu‖₂`, the scale for momentum drift
    pub momentum_l2: f64,
    pub e_total: f64,
    pub e_gl: f64,
    /// Energy of the run's level including its `δ` terms
    pub e_sigma_delta: f64,
    pub e_bd: f64,
    pub log_rho_integral: f64,
    pub d_visc: f64,
    pub d_mup: f64,
    pub d_reg: f64,
    pub source_reg: f64,
    pub source_bound: f64,
    pub bd_lap_rho: f64,
    pub bd_hess: f64,
    pub bd_rotation: f64,
    pub p_l1: f64,
    pub p_chi_l1: f64,
    /// `∫_{|P̃|≥M}|P̃|` along the default ladder
    pub tails: Vec<f64>,
    pub rho_min: f64,
    pub rho_max: f64,
    /// `E_{n+1} − E_n + dt(D_{n+1} − S_{n+1})`; zero on the first record
    pub energy_defect: f64,
    /// `E_{n+1} − E_n + dt(D_visc + D_mup + D_reg) − dt·δωℓ²‖∇ρ‖²`, non-positive up to the defect
    pub energy_slack: f64,
}

impl DiagnosticsRecord {
    pub fn dissipation(&self) -> f64 {
        self.d_visc + self.d_mup + self.d_reg
    }
}

/// Evaluates a record for `state` without the step-to-step columns.
pub fn evaluate_record(
    torus: &Torus,
    pack: &PotentialPack,
    state: &State,
    level: Level,
) -> Result<(DiagnosticsRecord, PressureSample)> {
    let kin = Kinematics::new(torus, state)?;
    let e = energies_with(pack, state, level, &kin)?;
    let d = dissipation_with(torus, pack, state, level, &kin)?;
    let bd = bd_with(state, &kin, &e)?;
    let bdd = bd_dissipation_with(pack, state, level, &kin)?;
    let ps = pressure_sample(pack, &state.rho, level, state.time, &TAIL_LADDER)?;
    let m = state.momentum();
    let mass_rho = state.rho.mean();
    let rec = DiagnosticsRecord {
        step: state.step,
        time: state.time,
        mass_rho,
        mass_phi: pack.phi_of_rho(mass_rho),
        momentum: m.means(),
        momentum_l2: m.l2_norm(),
        e_total: e.e_total(),
        e_gl: e.e_gl(),
        e_sigma_delta: e.e_level(),
        e_bd: bd.grouped,
        log_rho_integral: bd.log_rho,
        d_visc: d.visc,
        d_mup: d.mup,
        d_reg: d.reg,
        source_reg: d.source,
        source_bound: d.source_bound,
        bd_lap_rho: bdd.lap_rho,
        bd_hess: bdd.hess,
        bd_rotation: bdd.rotation,
        p_l1: ps.p_l1,
        p_chi_l1: ps.p_chi_l1,
        tails: ps.tails.iter().map(|t| t.2).collect(),
        rho_min: state.rho.min(),
        rho_max: state.rho.max(),
        energy_defect: 0.0,
        energy_slack: 0.0,
    };
    Ok((rec, ps))
}

/// Builds records along a run and fills the step-to-step columns.
pub struct Recorder<'a> {
    torus: &'a Torus,
    pack: &'a PotentialPack,
    level: Level,
    previous: Option<DiagnosticsRecord>,
    pressure: Vec<PressureSample>,
}

impl<'a> Recorder<'a> {
    pub fn new(torus: &'a Torus, pack: &'a PotentialPack, level: Level) -> Self {
        Self {
            torus,
            pack,
            level,
            previous: None,
            pressure: Vec::new(),
        }
    }

    /// Continues after `previous`, e.g. on resume.
    pub fn with_previous(mut self, previous: Option<DiagnosticsRecord>) -> Self {
        self.previous = previous;
        self
    }

    /// Records `state`. With `keep_pressure` the pressure sample is kept for run totals.
    pub fn record(&mut self, state: &State, keep_pressure: bool) -> Result<DiagnosticsRecord> {
        let (mut rec, ps) = evaluate_record(self.torus, self.pack, state, self.level)?;
        if let Some(prev) = &self.previous {
            let dt = rec.time - prev.time;
            let de = rec.e_sigma_delta - prev.e_sigma_delta;
            rec.energy_defect = de + dt * (rec.dissipation() - rec.source_reg);
            rec.energy_slack = de + dt * (rec.dissipation() - rec.source_bound);
        }
        if keep_pressure {
            self.pressure.push(ps);
        }
        self.previous = Some(rec.clone());
        Ok(rec)
    }

    pub fn pressure_samples(&self) -> &[PressureSample] {
        &self.pressure
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.previous.as_ref()
    }
}
