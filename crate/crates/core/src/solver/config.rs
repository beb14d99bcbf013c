use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::Level;
use crate::potentials::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    ImexEuler,
    ImexBdf2,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::ImexEuler => "imex_euler",
            SchemeKind::ImexBdf2 => "imex_bdf2",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            SchemeKind::ImexEuler => 0,
            SchemeKind::ImexBdf2 => 1,
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex_euler" => Ok(SchemeKind::ImexEuler),
            "imex_bdf2" => Ok(SchemeKind::ImexBdf2),
            other => Err(Error::InvalidParameter {
                name: "scheme.kind",
                reason: format!("unknown scheme `{other}`"),
            }),
        }
    }
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub dt: f64,
    pub scheme: SchemeKind,
    pub level: Level,
    pub cfl_safety: f64,
    /// Density used in the frozen capillary and hyperdiffusion operators.
    /// `None` picks `max(mean ρ, 0.6·max ρ)` at every step.
    pub splitting_rho_bar: Option<f64>,
    pub max_steps: u64,
    pub abort_on_confinement: bool,
    /// Retry a failed step with halved substeps instead of aborting.
    pub retry_halving: bool,
    /// Advance only the density with the velocity held fixed.
    pub freeze_velocity: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            scheme: SchemeKind::ImexEuler,
            level: Level::SigmaDelta,
            cfl_safety: 0.5,
            splitting_rho_bar: None,
            max_steps: 1000,
            abort_on_confinement: true,
            retry_halving: false,
            freeze_velocity: false,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self, params: &Params) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scheme.dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "scheme.cfl_safety",
                reason: format!("must lie in (0,1], got {}", self.cfl_safety),
            });
        }
        if let Some(r) = self.splitting_rho_bar {
            let lo = 0.5 * params.rho_lower();
            let hi = 1.0 + 0.5 * params.rho_lower();
            if !(r > lo && r < hi) {
                return Err(Error::InvalidParameter {
                    name: "scheme.splitting_rho_bar",
                    reason: format!("must lie in ({lo}, {hi}), got {r}"),
                });
            }
        }
        Ok(())
    }
}
