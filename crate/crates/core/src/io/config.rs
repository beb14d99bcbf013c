use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::level::Level;
use crate::model::{InitialKind, InitialSpec};
use crate::potentials::ParamsSpec;
use crate::solver::{SchemeConfig, SchemeKind};

/// How the `W_δ` steepness is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfinementMode {
    /// From the initial energy and the run length.
    Energy,
    /// Fixed steepness level.
    Steep(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write a CSV row every this many steps (the first and last rows are always written).
    pub csv_every: u64,
    /// Checkpoint cadence in steps; 0 writes only the final checkpoint.
    pub checkpoint_every: u64,
    /// Pressure snapshot cadence in steps.
    pub pressure_every: u64,
    /// Ramp parameter `m` of the time window.
    pub window_m: u32,
}

/// Everything a run needs. See [`RunConfig::KEYS`] for the file keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: ParamsSpec,
    pub n: usize,
    pub scheme: SchemeConfig,
    /// Pick `dt` from the stability budget of the initial state.
    pub dt_auto: bool,
    pub t_final: f64,
    pub initial: InitialSpec,
    /// Mollify `ρ₀` at levels with `δ` terms.
    pub mollify: bool,
    /// Mollifier width is `δ^mollify_exponent`.
    pub mollify_exponent: f64,
    pub confinement: ConfinementMode,
    pub output: OutputConfig,
    /// Verification suites run after `simulate`.
    pub verify_suites: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsSpec::default(),
            n: 128,
            scheme: SchemeConfig::default(),
            dt_auto: false,
            t_final: 0.1,
            initial: InitialSpec::default(),
            mollify: true,
            mollify_exponent: 0.25,
            confinement: ConfinementMode::Energy,
            output: OutputConfig {
                dir: PathBuf::from("qnsch-out"),
                csv_every: 1,
                checkpoint_every: 0,
                pressure_every: 10,
                window_m: 10,
            },
            verify_suites: Vec::new(),
        }
    }
}

/// Parses a real number; `a/b` fractions are accepted.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        a / b
    } else {
        s.parse().map_err(|_| format!("`{s}` is not a number"))?
    };
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn parse_int<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a nonnegative integer", s.trim()))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn parse_with<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

fn opt_real(s: &str) -> std::result::Result<Option<f64>, String> {
    match s.trim() {
        "auto" => Ok(None),
        v => parse_real(v).map(Some),
    }
}

impl RunConfig {
    /// Recognized keys with a one-line description.
    pub const KEYS: &'static [(&'static str, &'static str)] = &[
        ("physics.dim", "spatial dimension, 2 or 3"),
        ("physics.n", "grid points per axis, a power of two >= 8"),
        ("physics.rho1", "density of the lighter fluid in (0,1); fractions like 1/3 allowed"),
        ("physics.beta", "exponent of the singular potential"),
        ("physics.omega", "strength of the concave part of the potential"),
        ("physics.sigma", "truncation parameter of the potential"),
        ("physics.sigma0", "upper bound for sigma"),
        ("physics.delta", "regularization parameter"),
        ("physics.theta", "half-width of the confinement band, or auto"),
        ("physics.confinement", "`energy` or a fixed steepness level of W_delta"),
        ("scheme.kind", "imex_euler or imex_bdf2"),
        ("scheme.level", "sigma_delta, delta_only or target"),
        ("scheme.dt", "time step, or auto for the stability budget of the initial state"),
        ("scheme.cfl_safety", "safety factor in (0,1] applied to the budget"),
        ("scheme.splitting_rho_bar", "density of the frozen operator, or auto"),
        ("scheme.max_steps", "hard cap on the number of steps"),
        ("scheme.abort_on_confinement", "stop when the density leaves its band"),
        ("scheme.retry_halving", "retry failed steps with halved substeps"),
        ("scheme.freeze_velocity", "advance only the density"),
        ("run.t_final", "final time T"),
        ("init.kind", "uniform, spinodal, stratified, bubble or manufactured"),
        ("init.seed", "seed of the spinodal noise"),
        ("init.amplitude", "phase-field amplitude"),
        ("init.margin", "phi0 must stay inside (-1+margin, 1-margin)"),
        ("init.noise_modes", "largest wavenumber of the spinodal noise"),
        ("init.u0_amplitude", "scale of the initial velocity"),
        ("init.mean_phi", "mean of the initial phase field"),
        ("init.mollify", "mollify rho0 at levels with delta terms"),
        ("init.mollify_exponent", "mollifier width is delta^exponent"),
        ("output.dir", "output directory"),
        ("output.csv_every", "CSV row cadence in steps"),
        ("output.checkpoint_every", "checkpoint cadence in steps, 0 for final only"),
        ("output.pressure_every", "pressure snapshot cadence in steps"),
        ("output.window_m", "ramp parameter of the time window"),
        ("verify.suites", "comma-separated suites to run after simulate, or none"),
    ];

    /// Sets one key; the error message is meant for the user.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "physics.dim" => self.params.dim = parse_int(v)?,
            "physics.n" => self.n = parse_int(v)?,
            "physics.rho1" => self.params.rho1 = parse_real(v)?,
            "physics.beta" => self.params.beta = parse_real(v)?,
            "physics.omega" => self.params.omega = parse_real(v)?,
            "physics.sigma" => self.params.sigma = parse_real(v)?,
            "physics.sigma0" => self.params.sigma0 = parse_real(v)?,
            "physics.delta" => self.params.delta = parse_real(v)?,
            "physics.theta" => self.params.theta = opt_real(v)?,
            "physics.confinement" => {
                self.confinement = match v {
                    "energy" => ConfinementMode::Energy,
                    other => ConfinementMode::Steep(parse_real(other)?),
                }
            }
            "scheme.kind" => self.scheme.scheme = parse_with::<SchemeKind>(v)?,
            "scheme.level" => self.scheme.level = parse_with::<Level>(v)?,
            "scheme.dt" => match v {
                "auto" => self.dt_auto = true,
                other => {
                    self.dt_auto = false;
                    self.scheme.dt = parse_real(other)?;
                }
            },
            "scheme.cfl_safety" => self.scheme.cfl_safety = parse_real(v)?,
            "scheme.splitting_rho_bar" => self.scheme.splitting_rho_bar = opt_real(v)?,
            "scheme.max_steps" => self.scheme.max_steps = parse_int(v)?,
            "scheme.abort_on_confinement" => self.scheme.abort_on_confinement = parse_bool(v)?,
            "scheme.retry_halving" => self.scheme.retry_halving = parse_bool(v)?,
            "scheme.freeze_velocity" => self.scheme.freeze_velocity = parse_bool(v)?,
            "run.t_final" => self.t_final = parse_real(v)?,
            "init.kind" => self.initial.kind = parse_with::<InitialKind>(v)?,
            "init.seed" => self.initial.seed = parse_int(v)?,
            "init.amplitude" => self.initial.amplitude = parse_real(v)?,
            "init.margin" => self.initial.margin = parse_real(v)?,
            "init.noise_modes" => self.initial.noise_modes = parse_int(v)?,
            "init.u0_amplitude" => self.initial.u0_amplitude = parse_real(v)?,
            "init.mean_phi" => self.initial.mean_phi = parse_real(v)?,
            "init.mollify" => self.mollify = parse_bool(v)?,
            "init.mollify_exponent" => self.mollify_exponent = parse_real(v)?,
            "output.dir" => {
                if v.is_empty() {
                    return Err("output directory must not be empty".into());
                }
                self.output.dir = PathBuf::from(v);
            }
            "output.csv_every" => self.output.csv_every = parse_int::<u64>(v)?.max(1),
            "output.checkpoint_every" => self.output.checkpoint_every = parse_int(v)?,
            "output.pressure_every" => self.output.pressure_every = parse_int::<u64>(v)?.max(1),
            "output.window_m" => self.output.window_m = parse_int::<u32>(v)?.max(1),
            "verify.suites" => {
                self.verify_suites = if v == "none" || v.is_empty() {
                    Vec::new()
                } else {
                    v.split(',').map(|s| s.trim().to_string()).collect()
                };
            }
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Parses `key = value` lines. `#` starts a comment; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let key_col = content.len() - content.trim_start().len() + 1;
            let Some(eq) = content.find('=') else {
                return Err(Error::Config {
                    line,
                    column: key_col,
                    message: format!("expected `key = value`, found `{}`", content.trim()),
                });
            };
            let key = content[..eq].trim();
            let value = &content[eq + 1..];
            let value_col = eq + 2 + (value.len() - value.trim_start().len());
            self.set(key, value).map_err(|message| Error::Config {
                line,
                column: if message.starts_with("unknown key") { key_col } else { value_col },
                message,
            })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies `key=value` overrides; errors report the override's position as the line.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for (i, o) in overrides.iter().enumerate() {
            let o = o.as_ref();
            let Some((k, v)) = o.split_once('=') else {
                return Err(Error::Config {
                    line: i + 1,
                    column: 1,
                    message: format!("override `{o}` is not `key=value`"),
                });
            };
            self.set(k.trim(), v).map_err(|message| Error::Config {
                line: i + 1,
                column: 1,
                message: format!("override: {message}"),
            })?;
        }
        Ok(())
    }

    /// Number of steps the run takes.
    pub fn total_steps(&self, dt: f64) -> u64 {
        let n = (self.t_final / dt - 1e-9).ceil().max(0.0) as u64;
        n.min(self.scheme.max_steps)
    }

    /// All keys with their current values, in the file format.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let s = &self.scheme;
        let i = &self.initial;
        let o = &self.output;
        let opt = |v: Option<f64>| v.map_or("auto".to_string(), |x| format!("{x:?}"));
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("physics.dim", p.dim.to_string());
        put("physics.n", self.n.to_string());
        put("physics.rho1", format!("{:?}", p.rho1));
        put("physics.beta", format!("{:?}", p.beta));
        put("physics.omega", format!("{:?}", p.omega));
        put("physics.sigma", format!("{:?}", p.sigma));
        put("physics.sigma0", format!("{:?}", p.sigma0));
        put("physics.delta", format!("{:?}", p.delta));
        put("physics.theta", opt(p.theta));
        put(
            "physics.confinement",
            match self.confinement {
                ConfinementMode::Energy => "energy".into(),
                ConfinementMode::Steep(v) => format!("{v:?}"),
            },
        );
        put("scheme.kind", s.scheme.as_str().into());
        put("scheme.level", s.level.as_str().into());
        put("scheme.dt", if self.dt_auto { "auto".into() } else { format!("{:?}", s.dt) });
        put("scheme.cfl_safety", format!("{:?}", s.cfl_safety));
        put("scheme.splitting_rho_bar", opt(s.splitting_rho_bar));
        put("scheme.max_steps", s.max_steps.to_string());
        put("scheme.abort_on_confinement", s.abort_on_confinement.to_string());
        put("scheme.retry_halving", s.retry_halving.to_string());
        put("scheme.freeze_velocity", s.freeze_velocity.to_string());
        put("run.t_final", format!("{:?}", self.t_final));
        put("init.kind", i.kind.as_str().into());
        put("init.seed", i.seed.to_string());
        put("init.amplitude", format!("{:?}", i.amplitude));
        put("init.margin", format!("{:?}", i.margin));
        put("init.noise_modes", i.noise_modes.to_string());
        put("init.u0_amplitude", format!("{:?}", i.u0_amplitude));
        put("init.mean_phi", format!("{:?}", i.mean_phi));
        put("init.mollify", self.mollify.to_string());
        put("init.mollify_exponent", format!("{:?}", self.mollify_exponent));
        put("output.dir", o.dir.display().to_string());
        put("output.csv_every", o.csv_every.to_string());
        put("output.checkpoint_every", o.checkpoint_every.to_string());
        put("output.pressure_every", o.pressure_every.to_string());
        put("output.window_m", o.window_m.to_string());
        put(
            "verify.suites",
            if self.verify_suites.is_empty() {
                "none".into()
            } else {
                self.verify_suites.join(",")
            },
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_text() {
        let mut c = RunConfig::default();
        c.set("physics.rho1", "1/2").unwrap();
        c.set("scheme.dt", "auto").unwrap();
        c.set("verify.suites", "algebra, operators").unwrap();
        let back = RunConfig::parse(&c.to_config_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let text = RunConfig::default().to_config_string();
        let keys: Vec<&str> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        let documented: Vec<&str> = RunConfig::KEYS.iter().map(|k| k.0).collect();
        assert_eq!(keys, documented);
    }

    #[test]
    fn unknown_key_reports_position() {
        let err = RunConfig::parse("# header\nphysics.dim = 2\n  physics.bogus = 1\n").unwrap_err();
        match err {
            Error::Config { line, column, message } => {
                assert_eq!((line, column), (3, 3));
                assert!(message.contains("physics.bogus"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_value_points_at_value() {
        let err = RunConfig::parse("physics.beta = abc").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, column: 16, .. }), "{err}");
    }
}
