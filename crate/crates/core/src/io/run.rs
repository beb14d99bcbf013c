use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;

use super::checkpoint::{Checkpoint, ParamBlock};
use super::config::{ConfinementMode, RunConfig};
use super::table::CsvSink;
use crate::diagnostics::{
    conservation_drift, equi_integrability_tail, pressure_integrability, ConservationDrift,
    DiagnosticsRecord, PressureIntegrability, Recorder, TailTable,
};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::model::{build_initial_data, State};
use crate::potentials::{ConfinementSpec, Params, PotentialPack};
use crate::solver::{stability_budget, SchemeConfig, Stepper};
use crate::spectral::{Grid, MollifierSpec, Torus};
use crate::verify::{run_suites, VerifyReport};

pub const CSV_NAME: &str = "diagnostics.csv";
pub const SUMMARY_NAME: &str = "summary.json";
pub const FINAL_CHECKPOINT: &str = "final.qnsch";
pub const CONFIG_ECHO: &str = "config.txt";

pub fn checkpoint_name(step: u64) -> String {
    format!("checkpoint-{step:08}.qnsch")
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfinementSummary {
    pub kappa: f64,
    pub big_r: f64,
    pub steep_level: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    /// `completed`, `confinement` or `divergence`
    pub status: String,
    pub message: Option<String>,
    pub grid: String,
    pub level: Level,
    pub scheme: String,
    pub dt: f64,
    pub start_step: u64,
    pub final_step: u64,
    pub final_time: f64,
    pub confinement: ConfinementSummary,
    pub drift: Option<ConservationDrift>,
    pub max_abs_energy_defect: f64,
    pub max_energy_slack: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// `max_t E_BD(t) − E_BD(t₀)`
    pub e_bd_excess: f64,
    /// Time integral of `ℓ²∫|Δρ|²` (trapezoidal)
    pub lap_rho_integral: f64,
    pub pressure: Option<PressureIntegrability>,
    pub tails: Option<TailTable>,
    pub verify: Option<VerifyReport>,
}

/// Result of a run that got past setup. `error` holds the abort reason.
#[derive(Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub state: State,
    pub records: Vec<DiagnosticsRecord>,
    pub error: Option<Error>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code(),
            None if self.summary.verify.as_ref().is_some_and(|v| !v.passed) => 1,
            None => 0,
        }
    }
}

/// Physics and the initial state of a fresh run.
pub struct Setup {
    pub torus: Torus,
    pub pack: PotentialPack,
    pub scheme: SchemeConfig,
    pub state: State,
}

/// Builds the grid, potentials, initial state, confinement and `dt` from `cfg`.
pub fn prepare(cfg: &RunConfig) -> Result<Setup> {
    let params = Params::new(cfg.params)?;
    let grid = Grid::new(params.dim(), cfg.n)?;
    let torus = Torus::new(grid);
    let nominal = PotentialPack::new(params)?;
    let level = cfg.scheme.level;
    let data = build_initial_data(grid, &params, &cfg.initial)?;
    let rho0 = if cfg.mollify && level.has_delta() {
        let eps = params.delta().powf(cfg.mollify_exponent);
        torus.mollify(&data.rho0, &MollifierSpec::gaussian(eps))?
    } else {
        data.rho0
    };
    let state = State::new(data.u0, rho0, 0.0)?;
    let spec = match cfg.confinement {
        ConfinementMode::Energy => {
            let e0 = crate::diagnostics::compute_energies(&torus, &nominal, &state, level)?;
            ConfinementSpec::from_energy(&params, e0.e_level(), cfg.t_final, nominal.c_star())?
        }
        ConfinementMode::Steep(s) => ConfinementSpec::with_steep_level(&params, s),
    };
    let pack = nominal.with_confinement(spec);
    let mut scheme = cfg.scheme;
    if cfg.dt_auto {
        scheme.dt = stability_budget(&torus, &pack, &state, &scheme)?;
        info!("stability budget gives dt = {:e}", scheme.dt);
    }
    scheme.validate(&params)?;
    Ok(Setup {
        torus,
        pack,
        scheme,
        state,
    })
}

/// Runs `cfg` from `t = 0`, writing the CSV, checkpoints and summary into
/// `cfg.output.dir`. Setup errors are returned; step failures end up in
/// [`RunOutcome::error`].
pub fn simulate(cfg: &RunConfig) -> Result<RunOutcome> {
    let setup = prepare(cfg)?;
    let stepper = Stepper::new(&setup.torus, &setup.pack, setup.scheme)?;
    let mut outcome = drive(cfg, &setup.torus, &setup.pack, stepper, setup.state)?;
    if !cfg.verify_suites.is_empty() && outcome.error.is_none() {
        let report = run_suites(&cfg.verify_suites)?;
        outcome.summary.verify = Some(report);
        write_summary(&cfg.output.dir, &outcome.summary)?;
    }
    Ok(outcome)
}

/// Continues the run saved in `checkpoint` up to `cfg.t_final`. The grid,
/// physics, level and scheme must match `cfg`; the step size is taken from
/// the checkpoint.
pub fn resume(checkpoint: &Path, cfg: &RunConfig) -> Result<RunOutcome> {
    let ck = Checkpoint::load(checkpoint)?;
    let params = Params::new(cfg.params)?;
    let grid = Grid::new(params.dim(), cfg.n)?;
    if grid != ck.grid {
        return Err(Error::Checkpoint(format!(
            "grid mismatch: checkpoint is {} ({}D), config is {} ({}D)",
            ck.grid,
            ck.grid.dim(),
            grid,
            grid.dim()
        )));
    }
    let block = ParamBlock::new(&params, PotentialPack::new(params)?.confinement());
    if !block.same_physics(&ck.params) {
        return Err(Error::Checkpoint(format!(
            "physical parameters differ: checkpoint {:?}, config {:?}",
            ck.params, block
        )));
    }
    if ck.level != cfg.scheme.level || ck.scheme != cfg.scheme.scheme {
        return Err(Error::Checkpoint(format!(
            "checkpoint was written by {} at level {}, config asks for {} at level {}",
            ck.scheme.as_str(),
            ck.level,
            cfg.scheme.scheme.as_str(),
            cfg.scheme.level
        )));
    }
    let torus = Torus::new(grid);
    let spec = ConfinementSpec::from_parts(&params, ck.params.kappa, ck.params.big_r, ck.params.steep_level);
    let pack = PotentialPack::new(params)?.with_confinement(spec);
    let mut scheme = cfg.scheme;
    scheme.dt = ck.dt;
    let mut stepper = Stepper::new(&torus, &pack, scheme)?;
    stepper.set_previous_state(ck.previous.clone())?;
    info!("resuming at step {} (t = {})", ck.state.step, ck.state.time);
    drive(cfg, &torus, &pack, stepper, ck.state)
}

fn checkpoint_of(pack: &PotentialPack, stepper: &Stepper, state: &State) -> Checkpoint {
    let cfg = stepper.config();
    Checkpoint {
        grid: state.grid(),
        level: cfg.level,
        scheme: cfg.scheme,
        dt: cfg.dt,
        params: ParamBlock::new(pack.params(), pack.confinement()),
        state: state.clone(),
        previous: stepper.previous_state().cloned(),
    }
}

fn write_summary(dir: &Path, summary: &RunSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::Io(e.into()))?;
    fs::write(dir.join(SUMMARY_NAME), text + "\n")?;
    Ok(())
}

fn drive(
    cfg: &RunConfig,
    torus: &Torus,
    pack: &PotentialPack,
    mut stepper: Stepper,
    mut state: State,
) -> Result<RunOutcome> {
    let out = &cfg.output;
    let dir: PathBuf = out.dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(CONFIG_ECHO), cfg.to_config_string())?;
    let scheme = *stepper.config();
    let level = scheme.level;
    let total = cfg.total_steps(scheme.dt);
    let start = state.step;
    let mut sink = CsvSink::create(&dir.join(CSV_NAME), torus.grid().dim())?;
    let mut recorder = Recorder::new(torus, pack, level);
    let mut records = Vec::new();

    let first = recorder.record(&state, true)?;
    sink.write(&first)?;
    records.push(first);

    let report_every = ((total.saturating_sub(start)) / 10).max(1);
    let mut error = None;
    while state.step < total {
        let next = match stepper.step(&state) {
            Ok(s) => s,
            Err(e @ (Error::Confinement { .. } | Error::Divergence { .. })) => {
                warn!("run stopped at step {}: {e}", state.step + 1);
                error = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        state = next;
        let k = state.step;
        let last = k == total;
        let rec = recorder.record(&state, last || k % out.pressure_every == 0)?;
        if last || k % out.csv_every == 0 {
            sink.write(&rec)?;
        }
        records.push(rec);
        if out.checkpoint_every > 0 && k % out.checkpoint_every == 0 {
            checkpoint_of(pack, &stepper, &state).save(&dir.join(checkpoint_name(k)))?;
        }
        if (k - start) % report_every == 0 {
            info!("step {k}/{total}, t = {:.6}", state.time);
        }
    }
    if let (Some(_), Some(r)) = (&error, records.last()) {
        // last good state, unless already written
        if r.step % out.csv_every != 0 {
            sink.write(r)?;
        }
    }
    sink.flush()?;
    checkpoint_of(pack, &stepper, &state).save(&dir.join(FINAL_CHECKPOINT))?;

    let summary = summarize(cfg, pack, &stepper, &state, &records, &recorder, start, &error);
    write_summary(&dir, &summary)?;
    Ok(RunOutcome {
        summary,
        state,
        records,
        error,
    })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    cfg: &RunConfig,
    pack: &PotentialPack,
    stepper: &Stepper,
    state: &State,
    records: &[DiagnosticsRecord],
    recorder: &Recorder,
    start: u64,
    error: &Option<Error>,
) -> RunSummary {
    let scheme = stepper.config();
    let status = match error {
        None => "completed",
        Some(Error::Confinement { .. }) => "confinement",
        Some(_) => "divergence",
    };
    let c = pack.confinement();
    let samples = recorder.pressure_samples();
    let e_bd0 = records[0].e_bd;
    let lap_rho_integral = records
        .windows(2)
        .map(|w| 0.5 * (w[1].time - w[0].time) * (w[0].bd_lap_rho + w[1].bd_lap_rho))
        .sum();
    RunSummary {
        status: status.into(),
        message: error.as_ref().map(|e| e.to_string()),
        grid: state.grid().to_string(),
        level: scheme.level,
        scheme: scheme.scheme.as_str().into(),
        dt: scheme.dt,
        start_step: start,
        final_step: state.step,
        final_time: state.time,
        confinement: ConfinementSummary {
            kappa: c.kappa,
            big_r: c.big_r,
            steep_level: c.steep_level,
        },
        drift: conservation_drift(records).ok(),
        max_abs_energy_defect: records.iter().map(|r| r.energy_defect.abs()).fold(0.0, f64::max),
        max_energy_slack: records[1..].iter().map(|r| r.energy_slack).fold(f64::NEG_INFINITY, f64::max),
        rho_min: records.iter().map(|r| r.rho_min).fold(f64::INFINITY, f64::min),
        rho_max: records.iter().map(|r| r.rho_max).fold(f64::NEG_INFINITY, f64::max),
        e_bd_excess: records.iter().map(|r| r.e_bd - e_bd0).fold(0.0, f64::max),
        lap_rho_integral,
        pressure: pressure_integrability(samples, cfg.output.window_m).ok(),
        tails: equi_integrability_tail(samples).ok(),
        verify: None,
    }
}
