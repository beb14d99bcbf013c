use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Value and first two derivatives of a scalar function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Taylor2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Taylor2 {
    pub const ZERO: Taylor2 = Taylor2 {
        value: 0.0,
        d1: 0.0,
        d2: 0.0,
    };

    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    /// Second-order Taylor polynomial around the point this was evaluated at,
    /// evaluated at offset `h`.
    pub fn extend(&self, h: f64) -> Taylor2 {
        Taylor2 {
            value: self.value + self.d1 * h + 0.5 * self.d2 * h * h,
            d1: self.d1 + self.d2 * h,
            d2: self.d2,
        }
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;
    fn add(self, o: Taylor2) -> Taylor2 {
        Taylor2::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Mul<f64> for Taylor2 {
    type Output = Taylor2;
    fn mul(self, c: f64) -> Taylor2 {
        Taylor2::new(self.value * c, self.d1 * c, self.d2 * c)
    }
}

/// The singular convex profile `F_c(r) = (1 − r²)^(−β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularProfile {
    pub beta: f64,
}

impl SingularProfile {
    pub fn new(beta: f64) -> Self {
        Self { beta }
    }

    fn eval_inside(&self, r: f64) -> Taylor2 {
        let b = self.beta;
        let s = 1.0 - r * r;
        let v = s.powf(-b);
        Taylor2 {
            value: v,
            d1: 2.0 * b * r * v / s,
            d2: 2.0 * b * v / s + 4.0 * b * (b + 1.0) * r * r * v / (s * s),
        }
    }

    /// `F_c` and derivatives; only defined on `(−1, 1)`.
    pub fn fc(&self, r: f64) -> Result<Taylor2> {
        if !(r.abs() < 1.0) {
            return Err(Error::SingularDomain {
                value: r,
                domain: "(-1, 1)".into(),
            });
        }
        Ok(self.eval_inside(r))
    }

    /// `F_{c,σ}`: equal to `F_c` on `[−1+σ, 1−σ]`, quadratic Taylor extension outside.
    pub fn fc_sigma(&self, r: f64, sigma: f64) -> Taylor2 {
        let a = 1.0 - sigma;
        if r > a {
            self.eval_inside(a).extend(r - a)
        } else if r < -a {
            self.eval_inside(-a).extend(r + a)
        } else {
            self.eval_inside(r)
        }
    }

    /// `F = F_c − ω r²/2`.
    pub fn f(&self, r: f64, omega: f64) -> Result<Taylor2> {
        Ok(self.fc(r)? + concave(r, omega))
    }

    pub fn f_sigma(&self, r: f64, sigma: f64, omega: f64) -> Taylor2 {
        self.fc_sigma(r, sigma) + concave(r, omega)
    }
}

/// The concave part `−ω r²/2`.
pub fn concave(r: f64, omega: f64) -> Taylor2 {
    Taylor2::new(-0.5 * omega * r * r, -omega * r, -omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_values_at_zero() {
        for beta in [1.01, 1.5, 2.0, 3.7] {
            let t = SingularProfile::new(beta).fc(0.0).unwrap();
            assert_eq!(t.value, 1.0);
            assert_eq!(t.d1, 0.0);
            assert!((t.d2 - 2.0 * beta).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_is_open_interval() {
        let p = SingularProfile::new(1.5);
        assert!(p.fc(1.0).is_err());
        assert!(p.fc(-1.2).is_err());
        assert!(p.fc(f64::NAN).is_err());
    }

    #[test]
    fn omega_shifts_curvature() {
        let p = SingularProfile::new(1.5);
        let f = p.f(0.0, 2.0).unwrap();
        assert_eq!(f.value, 1.0);
        assert!((f.d2 - 1.0).abs() < 1e-15);
    }
}
