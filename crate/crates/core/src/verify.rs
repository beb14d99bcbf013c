//! Verification suites behind `qnsch verify`. Each check reports the measured
//! value next to its tolerance.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::Checkpoint;
use crate::io::ParamBlock;
use crate::level::Level;
use crate::model::{capillary_identity, seeded_noise, State};
use crate::potentials::{Params, ParamsSpec, PotentialPack};
use crate::solver::{residual_original_vs_reformulated, MomentumFields, SchemeConfig, SchemeKind, Stepper};
use crate::spectral::{zero_mean, Field, Grid, Torus, VectorField};

pub const SUITES: [&str; 4] = ["algebra", "operators", "potentials", "scheme"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

struct Checks(Vec<CheckResult>);

impl Checks {
    /// Passes when `measured ≤ tolerance`; NaN fails.
    fn at_most(&mut self, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.0.push(CheckResult {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        });
    }

    /// Passes when `measured ≥ floor`.
    fn at_least(&mut self, name: impl Into<String>, measured: f64, floor: f64) {
        self.0.push(CheckResult {
            name: name.into(),
            measured,
            tolerance: floor,
            passed: measured >= floor,
        });
    }
}

fn pack_with(spec: ParamsSpec) -> Result<PotentialPack> {
    PotentialPack::new(Params::new(spec)?)
}

fn two_mode(grid: Grid, mean: f64, a: f64, b: f64) -> Field {
    Field::from_fn(grid, |x| {
        mean + a * (2.0 * PI * x[0]).cos() + b * (2.0 * PI * (x[0] + 2.0 * x[1])).sin()
    })
}

fn two_mode_velocity(grid: Grid) -> VectorField {
    VectorField::from_fn(grid, |a, x| {
        let s = 2.0 * PI;
        if a == 0 {
            0.3 * (s * x[1]).sin() + 0.1 * (s * (x[0] + x[1])).cos()
        } else {
            0.2 * (s * x[0]).cos() - 0.1 * (2.0 * s * x[0]).sin()
        }
    })
}

fn algebra() -> Result<Vec<CheckResult>> {
    let mut c = Checks(Vec::new());
    for n in [64, 128] {
        let torus = Torus::new(Grid::new(2, n)?);
        let pack = pack_with(ParamsSpec::default())?;
        let phi = two_mode(torus.grid(), 0.0, 0.4, 0.2);
        let r = capillary_identity(&torus, &pack, &phi)?;
        c.at_most(format!("capillary_identity_n{n}"), r.relative_discrepancy, 1e-8);
    }
    let torus = Torus::new(Grid::new(2, 64)?);
    for (beta, rho1) in [(1.5, 1.0 / 3.0), (2.0, 0.5)] {
        let pack = pack_with(ParamsSpec {
            beta,
            rho1,
            ..Default::default()
        })?;
        let mid = pack.params().rho_mid();
        let span = 1.0 - pack.params().rho_lower();
        let rho = two_mode(torus.grid(), mid, 0.1 * span, 0.05 * span);
        let state = State::new(two_mode_velocity(torus.grid()), rho, 0.0)?;
        for level in [Level::Target, Level::SigmaDelta] {
            let fields = MomentumFields::from_state(&torus, &pack, &state, level)?;
            let r = residual_original_vs_reformulated(&torus, &pack, &fields, level)?;
            c.at_most(
                format!("reformulation_beta{beta}_rho1_{rho1:.4}_{level}"),
                r.discrepancy,
                1e-8,
            );
        }
    }
    let params = Params::new(ParamsSpec::default())?;
    let worst = (0..=1000)
        .map(|k| {
            let phi = -1.0 + 2.0 * k as f64 / 1000.0;
            (params.phi_of_rho(params.rho_of_phi(phi)) - phi).abs()
        })
        .fold(0.0, f64::max);
    c.at_most("affine_map_roundtrip", worst, 1e-14);
    let a = params.alpha();
    c.at_most("ell_from_alpha", (params.ell() - (a + 1.0) / a).abs(), 1e-14);
    Ok(c.0)
}

fn operators() -> Result<Vec<CheckResult>> {
    let mut c = Checks(Vec::new());
    let grid = Grid::new(2, 64)?;
    let torus = Torus::new(grid);
    let mut fft = 0.0f64;
    let mut bog = 0.0f64;
    let mut inv = 0.0f64;
    let mut dealias = 0.0f64;
    for seed in 0..10 {
        let f = seeded_noise(grid, seed, 12);
        fft = fft.max(torus.backward(&torus.forward(&f)?)?.max_abs_diff(&f));
        let g = zero_mean(&f);
        let b = torus.div(&torus.bogovskii(&g)?)?;
        bog = bog.max(b.max_abs_diff(&g) / g.l2_norm());
        let lap = torus.laplacian(&torus.inv_laplacian_zero_mean(&g)?)?;
        inv = inv.max(lap.max_abs_diff(&g) / g.l2_norm());
        let once = torus.dealias(&f)?;
        dealias = dealias.max(torus.dealias(&once)?.max_abs_diff(&once));
    }
    c.at_most("fft_roundtrip", fft, 1e-13);
    c.at_most("bogovskii_right_inverse", bog, 1e-12);
    c.at_most("inverse_laplacian", inv, 1e-12);
    c.at_most("dealias_idempotent", dealias, 1e-14);

    let k = 3.0;
    let f = Field::from_fn(grid, |x| (2.0 * PI * k * x[0]).sin());
    let exact = Field::from_fn(grid, |x| 2.0 * PI * k * (2.0 * PI * k * x[0]).cos());
    let g = torus.grad(&f)?;
    c.at_most(
        "gradient_of_sine",
        g.component(0).max_abs_diff(&exact) / (2.0 * PI * k),
        1e-12,
    );
    let lap = torus.laplacian(&f)?;
    let exact = f.map(|v| -(2.0 * PI * k).powi(2) * v);
    c.at_most(
        "laplacian_of_sine",
        lap.max_abs_diff(&exact) / (2.0 * PI * k).powi(2),
        1e-12,
    );
    Ok(c.0)
}

fn potentials() -> Result<Vec<CheckResult>> {
    let mut c = Checks(Vec::new());
    let pack = pack_with(ParamsSpec::default())?;
    let p = *pack.params();
    let lo = p.rho_lower();
    let width = 1.0 - lo;
    let mut worst = 0.0f64;
    for k in 1..=1000 {
        let r = lo + width * (0.01 + 0.98 * k as f64 / 1001.0);
        let h = 1e-6 * width;
        let fd = (pack.p_tilde(r + h)?.0 - pack.p_tilde(r - h)?.0) / (2.0 * h);
        let exact = pack.p_tilde(r)?.1;
        worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    c.at_most("legendre_derivative_fd", worst, 1e-6);
    c.at_most("rho_star_root", pack.p_tilde_c(pack.rho_star())?.0.abs(), 1e-12);

    let sigma = p.sigma();
    let mut jump = 0.0f64;
    for edge in [1.0 - sigma, -(1.0 - sigma)] {
        let inner = pack.fc(edge)?;
        let outer = pack.profile().fc_sigma(edge, sigma);
        for (a, b) in [(inner.value, outer.value), (inner.d1, outer.d1), (inner.d2, outer.d2)] {
            jump = jump.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    c.at_most("truncation_c2_matching", jump, 1e-12);

    let conf = pack.confinement();
    let theta = p.theta();
    let (a, b) = (lo - 2.0 * theta, 1.0 + 2.0 * theta);
    let min_curv = (0..10_000)
        .map(|k| conf.w_delta(a + (b - a) * k as f64 / 9999.0).d2)
        .fold(f64::INFINITY, f64::min);
    c.at_least("confinement_convexity", min_curv, 0.0);
    Ok(c.0)
}

fn scheme() -> Result<Vec<CheckResult>> {
    let mut c = Checks(Vec::new());
    let pack = pack_with(ParamsSpec::default())?;
    let grid = Grid::new(2, 32)?;
    let torus = Torus::new(grid);
    let config = SchemeConfig {
        dt: 1e-4,
        ..Default::default()
    };

    let rest = State::uniform(grid, pack.params().rho_mid());
    let mut stepper = Stepper::new(&torus, &pack, config)?;
    let mut s = rest.clone();
    for _ in 0..10 {
        s = stepper.step(&s)?;
    }
    let change = s.rho.max_abs_diff(&rest.rho).max(s.u.max_abs());
    c.at_most("uniform_rest_is_steady", change, 1e-13);

    let mid = pack.params().rho_mid();
    let rho = seeded_noise(grid, 7, 4).map(|v| mid + 0.05 * v);
    let start = State::new(two_mode_velocity(grid), rho, 0.0)?;
    for kind in [SchemeKind::ImexEuler, SchemeKind::ImexBdf2] {
        let mut stepper = Stepper::new(
            &torus,
            &pack,
            SchemeConfig {
                scheme: kind,
                ..config
            },
        )?;
        let mut s = start.clone();
        for _ in 0..20 {
            s = stepper.step(&s)?;
        }
        let drift = (s.rho.mean() - start.rho.mean()).abs() / start.rho.mean();
        c.at_most(format!("mass_drift_{}", kind.as_str()), drift, 1e-12);
        if kind == SchemeKind::ImexBdf2 {
            let ck = Checkpoint {
                grid,
                level: config.level,
                scheme: kind,
                dt: config.dt,
                params: ParamBlock::new(pack.params(), pack.confinement()),
                state: s.clone(),
                previous: stepper.previous_state().cloned(),
            };
            let back = Checkpoint::from_bytes(&ck.to_bytes())?;
            c.at_most(
                "checkpoint_roundtrip_mismatch",
                if back == ck { 0.0 } else { 1.0 },
                0.0,
            );
        }
    }
    Ok(c.0)
}

/// Runs one suite by name.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let checks = match name {
        "algebra" => algebra()?,
        "operators" => operators()?,
        "potentials" => potentials()?,
        "scheme" => scheme()?,
        other => {
            return Err(Error::InvalidParameter {
                name: "suite",
                reason: format!("unknown suite `{other}`; expected one of {}", SUITES.join(", ")),
            })
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Runs the named suites in order; `all` expands to every suite.
pub fn run_suites<S: AsRef<str>>(names: &[S]) -> Result<VerifyReport> {
    let mut list: Vec<&str> = Vec::new();
    for n in names {
        match n.as_ref() {
            "all" => list.extend(SUITES),
            s => list.push(s),
        }
    }
    let suites = list.into_iter().map(run_suite).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}
