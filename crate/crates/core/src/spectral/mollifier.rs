use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::torus::{Spectrum, Torus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierProfile {
    GaussianPeriodized,
    BumpPeriodized,
}

/// Width and shape of a periodized mollifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub epsilon: f64,
    pub profile: MollifierProfile,
}

impl MollifierSpec {
    pub fn gaussian(epsilon: f64) -> Self {
        Self {
            epsilon,
            profile: MollifierProfile::GaussianPeriodized,
        }
    }

    pub fn bump(epsilon: f64) -> Self {
        Self {
            epsilon,
            profile: MollifierProfile::BumpPeriodized,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be positive and finite, got {}", self.epsilon),
            });
        }
        Ok(())
    }
}

fn fold(x: f64) -> f64 {
    let y = x - x.round();
    if y <= -0.5 {
        y + 1.0
    } else {
        y
    }
}

fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

impl Torus {
    /// Fourier multiplier of the sampled, periodized, unit-sum kernel.
    ///
    /// Entries lie in `[-1, 1]` and mode 0 is exactly one.
    pub fn mollifier_multiplier(&self, spec: &MollifierSpec) -> Result<Vec<f64>> {
        spec.validate()?;
        let grid = self.grid();
        let n = grid.n();
        let eps = spec.epsilon;
        let mut mult = match spec.profile {
            MollifierProfile::GaussianPeriodized => {
                let images = (8.0 * eps).ceil() as i64 + 1;
                let mut w: Vec<f64> = (0..n)
                    .map(|j| {
                        let x = fold(j as f64 / n as f64);
                        (-images..=images)
                            .map(|m| {
                                let y = (x + m as f64) / eps;
                                (-0.5 * y * y).exp()
                            })
                            .sum()
                    })
                    .collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|v| *v /= total);
                let w1: Vec<f64> = (0..n)
                    .map(|k| {
                        w.iter()
                            .enumerate()
                            .map(|(j, wj)| wj * (2.0 * PI * (k * j % n) as f64 / n as f64).cos())
                            .sum()
                    })
                    .collect();
                (0..grid.len())
                    .map(|idx| {
                        let m = grid.multi_index(idx);
                        (0..grid.dim()).map(|a| w1[m[a]]).product()
                    })
                    .collect::<Vec<f64>>()
            }
            MollifierProfile::BumpPeriodized => {
                let images = eps.ceil() as i64;
                let dim = grid.dim();
                let offsets: Vec<[i64; 3]> = {
                    let r: Vec<i64> = (-images..=images).collect();
                    let mut out = Vec::new();
                    for &a in &r {
                        for &b in &r {
                            if dim == 2 {
                                out.push([a, b, 0]);
                            } else {
                                for &c in &r {
                                    out.push([a, b, c]);
                                }
                            }
                        }
                    }
                    out
                };
                let mut w: Vec<f64> = (0..grid.len())
                    .map(|idx| {
                        let x = grid.point(idx);
                        offsets
                            .iter()
                            .map(|o| {
                                let r2: f64 = (0..dim)
                                    .map(|a| {
                                        let y = (fold(x[a]) + o[a] as f64) / eps;
                                        y * y
                                    })
                                    .sum();
                                bump(r2)
                            })
                            .sum()
                    })
                    .collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|v| *v /= total);
                let kernel = Field::from_values(grid, w)?;
                let len = grid.len() as f64;
                self.forward(&kernel)?
                    .coeffs()
                    .iter()
                    .map(|c| c.re * len)
                    .collect()
            }
        };
        mult[0] = 1.0;
        Ok(mult)
    }

    /// Periodic convolution with the mollifier described by `spec`.
    pub fn mollify(&self, f: &Field, spec: &MollifierSpec) -> Result<Field> {
        let mult = self.mollifier_multiplier(spec)?;
        let mut s: Spectrum = self.forward(f)?;
        for (c, m) in s.coeffs_mut().iter_mut().zip(&mult) {
            *c *= *m;
        }
        // mode 0 untouched keeps the mean bit-for-bit up to the transform pair
        s.coeffs_mut()[0] = Complex64::new(f.mean(), 0.0);
        self.backward(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn constant_is_fixed() {
        let t = Torus::new(Grid::new(2, 32).unwrap());
        let c = Field::constant(t.grid(), 0.7);
        for spec in [MollifierSpec::gaussian(0.05), MollifierSpec::bump(0.2)] {
            let out = t.mollify(&c, &spec).unwrap();
            assert!(out.max_abs_diff(&c) < 1e-14);
        }
    }

    #[test]
    fn gaussian_multiplier_matches_continuum_for_wide_kernels() {
        let t = Torus::new(Grid::new(2, 64).unwrap());
        let eps = 0.08;
        let m = t.mollifier_multiplier(&MollifierSpec::gaussian(eps)).unwrap();
        for idx in [1usize, 2, 3, 64, 65] {
            let expect = (-0.5 * eps * eps * t.ksq(idx)).exp();
            assert!((m[idx] - expect).abs() < 1e-10, "{idx}");
        }
    }

    #[test]
    fn bump_multiplier_is_bounded_by_one() {
        let t = Torus::new(Grid::new(2, 32).unwrap());
        let m = t.mollifier_multiplier(&MollifierSpec::bump(0.15)).unwrap();
        assert!(m.iter().all(|v| v.abs() <= 1.0 + 1e-14));
    }

    #[test]
    fn rejects_nonpositive_width() {
        let t = Torus::new(Grid::new(2, 8).unwrap());
        assert!(t.mollifier_multiplier(&MollifierSpec::gaussian(0.0)).is_err());
    }
}
