use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw physical and regularization constants as supplied by a user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsSpec {
    pub dim: usize,
    /// Density of the lighter fluid; the heavier one is fixed to 1.
    pub rho1: f64,
    pub beta: f64,
    pub omega: f64,
    pub sigma: f64,
    pub delta: f64,
    pub sigma0: f64,
    /// Half-width of the confinement band; defaults to `rho_lower / 2`.
    pub theta: Option<f64>,
}

impl Default for ParamsSpec {
    fn default() -> Self {
        Self {
            dim: 2,
            rho1: 1.0 / 3.0,
            beta: 1.5,
            omega: 3.0,
            sigma: 1e-2,
            delta: 1e-3,
            sigma0: 0.1,
            theta: None,
        }
    }
}

/// Validated constants together with the derived quantities `alpha`, `ell`
/// and `rho_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    dim: usize,
    rho1: f64,
    alpha: f64,
    ell: f64,
    rho_lower: f64,
    beta: f64,
    omega: f64,
    sigma: f64,
    delta: f64,
    sigma0: f64,
    theta: f64,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl Params {
    pub fn new(spec: ParamsSpec) -> Result<Self> {
        let ParamsSpec {
            dim,
            rho1,
            beta,
            omega,
            sigma,
            delta,
            sigma0,
            theta,
        } = spec;
        if dim != 2 && dim != 3 {
            return Err(invalid("dim", format!("must be 2 or 3, got {dim}")));
        }
        if !(rho1 > 0.0 && rho1 < 1.0) {
            return Err(invalid("rho1", format!("must lie in (0,1), got {rho1}")));
        }
        let beta_ok = if dim == 3 { beta >= 1.5 } else { beta > 1.0 };
        if !beta.is_finite() || !beta_ok {
            return Err(invalid(
                "beta",
                format!("must be >= 3/2 in 3D and > 1 in 2D, got {beta} (dim {dim})"),
            ));
        }
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        if !(sigma0 > 0.0 && sigma0 < 1.0) {
            return Err(invalid("sigma0", format!("must lie in (0,1), got {sigma0}")));
        }
        if !(sigma > 0.0 && sigma <= sigma0) {
            return Err(invalid("sigma", format!("must lie in (0, sigma0], got {sigma}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0,1), got {delta}")));
        }
        let alpha = (1.0 - rho1) / (1.0 + rho1);
        let ell = (alpha + 1.0) / alpha;
        let rho_lower = 1.0 - 2.0 / ell;
        if sigma >= 0.5 * (1.0 - rho_lower) {
            return Err(invalid(
                "sigma",
                format!("must be below half the band width {}", 0.5 * (1.0 - rho_lower)),
            ));
        }
        let theta = theta.unwrap_or(0.5 * rho_lower);
        if !(theta > 0.0 && theta < rho_lower) {
            return Err(invalid("theta", format!("must lie in (0, rho_lower), got {theta}")));
        }
        Ok(Self {
            dim,
            rho1,
            alpha,
            ell,
            rho_lower,
            beta,
            omega,
            sigma,
            delta,
            sigma0,
            theta,
        })
    }

    pub fn spec(&self) -> ParamsSpec {
        ParamsSpec {
            dim: self.dim,
            rho1: self.rho1,
            beta: self.beta,
            omega: self.omega,
            sigma: self.sigma,
            delta: self.delta,
            sigma0: self.sigma0,
            theta: Some(self.theta),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn rho1(&self) -> f64 {
        self.rho1
    }
    pub fn rho2(&self) -> f64 {
        1.0
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn ell(&self) -> f64 {
        self.ell
    }
    pub fn rho_lower(&self) -> f64 {
        self.rho_lower
    }
    /// Density at which `phi = 0`.
    pub fn rho_mid(&self) -> f64 {
        0.5 * (self.rho_lower + 1.0)
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi_of_rho(&self, rho: f64) -> f64 {
        -self.ell * rho + self.ell - 1.0
    }

    pub fn rho_of_phi(&self, phi: f64) -> f64 {
        (self.ell - 1.0 - phi) / self.ell
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants_for_one_third() {
        let p = Params::new(ParamsSpec::default()).unwrap();
        assert!((p.alpha() - 0.5).abs() < 1e-15);
        assert!((p.ell() - 3.0).abs() < 1e-14);
        assert!((p.rho_lower() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.phi_of_rho(1.0 / 3.0) - 1.0).abs() < 1e-14);
        assert!((p.phi_of_rho(1.0) + 1.0).abs() < 1e-14);
        assert!(p.phi_of_rho(p.rho_mid()).abs() < 1e-15);
        assert!((p.theta() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn beta_rules_depend_on_dimension() {
        let mut s = ParamsSpec {
            beta: 1.2,
            ..Default::default()
        };
        assert!(Params::new(s).is_ok());
        s.dim = 3;
        assert!(Params::new(s).is_err());
        s.beta = 1.01;
        s.dim = 2;
        assert!(Params::new(s).is_ok());
    }

    #[test]
    fn rejects_out_of_range() {
        for bad in [
            ParamsSpec { rho1: 1.0, ..Default::default() },
            ParamsSpec { sigma: 0.0, ..Default::default() },
            ParamsSpec { sigma: 0.2, ..Default::default() },
            ParamsSpec { delta: 1.0, ..Default::default() },
            ParamsSpec { theta: Some(0.5), ..Default::default() },
        ] {
            assert!(Params::new(bad).is_err(), "{bad:?}");
        }
    }
}
