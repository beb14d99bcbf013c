use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which layer of the approximation hierarchy a computation works at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Truncated potential, `W_δ` confinement and all `δ` regularizers.
    SigmaDelta,
    /// Singular potential with the `δ` regularizers; `ρ` must stay in `(ρ̲, 1)`.
    DeltaOnly,
    /// Singular Korteweg system without regularizers.
    Target,
}

impl Level {
    pub fn truncated(self) -> bool {
        self == Level::SigmaDelta
    }

    pub fn has_delta(self) -> bool {
        self != Level::Target
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::SigmaDelta => "sigma_delta",
            Level::DeltaOnly => "delta_only",
            Level::Target => "target",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Level::SigmaDelta => 0,
            Level::DeltaOnly => 1,
            Level::Target => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Level> {
        match c {
            0 => Some(Level::SigmaDelta),
            1 => Some(Level::DeltaOnly),
            2 => Some(Level::Target),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma_delta" => Ok(Level::SigmaDelta),
            "delta_only" => Ok(Level::DeltaOnly),
            "target" => Ok(Level::Target),
            other => Err(Error::InvalidParameter {
                name: "level",
                reason: format!("unknown level `{other}`"),
            }),
        }
    }
}
