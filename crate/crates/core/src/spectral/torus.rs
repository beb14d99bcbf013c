use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::field::{Field, VectorField};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Default relative tolerance on the mean of inputs to the zero-mean inverses.
pub const MEAN_TOL: f64 = 1e-12;

const LINES_PER_TASK: usize = 16;

/// Fourier coefficients of a real field, normalized so that mode 0 is the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Sum of `|c_k|²`, equal to the grid mean of `f²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Transform plans plus per-mode wavevector tables for one grid.
pub struct Torus {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kfull: Vec<[f64; 3]>,
    kodd: Vec<[f64; 3]>,
    ksq: Vec<f64>,
    retained: Vec<bool>,
}

impl std::fmt::Debug for Torus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Torus").field("grid", &self.grid).finish()
    }
}

impl Torus {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n());
        let inv = planner.plan_fft_inverse(grid.n());
        let cutoff = grid.dealias_cutoff() as i64;
        let len = grid.len();
        let mut kfull = Vec::with_capacity(len);
        let mut kodd = Vec::with_capacity(len);
        let mut ksq = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        for idx in 0..len {
            let m = grid.multi_index(idx);
            let mut kf = [0.0; 3];
            let mut ko = [0.0; 3];
            let mut keep = true;
            for a in 0..grid.dim() {
                let k = grid.wavenumber(m[a]);
                kf[a] = 2.0 * PI * k as f64;
                if !grid.is_nyquist(m[a]) {
                    ko[a] = kf[a];
                }
                keep &= k.abs() <= cutoff;
            }
            ksq.push(kf.iter().map(|k| k * k).sum());
            kfull.push(kf);
            kodd.push(ko);
            retained.push(keep);
        }
        Self {
            grid,
            fwd,
            inv,
            kfull,
            kodd,
            ksq,
            retained,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `2πk` for mode `idx`, Nyquist kept.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.kfull[idx]
    }

    /// `2πk` for mode `idx` with Nyquist components zeroed (odd derivatives).
    pub fn odd_wavevector(&self, idx: usize) -> [f64; 3] {
        self.kodd[idx]
    }

    /// `|2πk|²` for mode `idx`.
    pub fn ksq(&self, idx: usize) -> f64 {
        self.ksq[idx]
    }

    /// Whether mode `idx` survives the 2/3 rule.
    pub fn is_retained(&self, idx: usize) -> bool {
        self.retained[idx]
    }

    fn fft_lines(&self, data: &mut [Complex64], inverse: bool) {
        let fft = if inverse { &self.inv } else { &self.fwd };
        let n = self.grid.n();
        data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.n();
        let d = self.grid.dim();
        self.fft_lines(data, inverse);
        let mut lines = vec![Complex64::default(); data.len()];
        for axis in 0..d - 1 {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = n * stride;
            {
                let src = &*data;
                lines.par_chunks_mut(n).enumerate().for_each(|(line, out)| {
                    let base = (line / stride) * block + line % stride;
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = src[base + j * stride];
                    }
                });
            }
            self.fft_lines(&mut lines, inverse);
            let src = &lines;
            data.par_chunks_mut(stride).enumerate().for_each(|(row, out)| {
                let b = row / n;
                let j = row % n;
                for (o, v) in out.iter_mut().enumerate() {
                    *v = src[(b * stride + o) * n + j];
                }
            });
        }
    }

    pub fn forward(&self, f: &Field) -> Result<Spectrum> {
        self.grid.check_same(&f.grid())?;
        let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Ok(Spectrum {
            grid: self.grid,
            coeffs: data,
        })
    }

    /// Inverse transform, keeping the real part.
    pub fn backward(&self, s: &Spectrum) -> Result<Field> {
        self.grid.check_same(&s.grid)?;
        let mut data = s.coeffs.clone();
        self.transform(&mut data, true);
        Field::from_values(self.grid, data.into_iter().map(|c| c.re).collect())
    }

    fn map_modes(&self, s: &Spectrum, f: impl Fn(usize, Complex64) -> Complex64) -> Spectrum {
        Spectrum {
            grid: s.grid,
            coeffs: s.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect(),
        }
    }

    pub fn grad(&self, f: &Field) -> Result<VectorField> {
        let s = self.forward(f)?;
        let comps = (0..self.grid.dim())
            .map(|a| {
                let d = self.map_modes(&s, |i, c| c * Complex64::new(0.0, self.kodd[i][a]));
                self.backward(&d)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::from_components(comps)
    }

    /// Gradient of a field already in spectral form.
    pub fn grad_spectrum(&self, s: &Spectrum) -> Result<VectorField> {
        let comps = (0..self.grid.dim())
            .map(|a| {
                let d = self.map_modes(s, |i, c| c * Complex64::new(0.0, self.kodd[i][a]));
                self.backward(&d)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::from_components(comps)
    }

    pub fn div(&self, v: &VectorField) -> Result<Field> {
        self.backward(&self.div_spectrum(v)?)
    }

    /// Spectrum of `div v`; mode 0 is exactly zero.
    pub fn div_spectrum(&self, v: &VectorField) -> Result<Spectrum> {
        self.grid.check_same(&v.grid())?;
        let mut acc = Spectrum::zeros(self.grid);
        for (a, comp) in v.components().iter().enumerate() {
            let s = self.forward(comp)?;
            for (i, (o, c)) in acc.coeffs.iter_mut().zip(&s.coeffs).enumerate() {
                *o += c * Complex64::new(0.0, self.kodd[i][a]);
            }
        }
        Ok(acc)
    }

    pub fn laplacian(&self, f: &Field) -> Result<Field> {
        let s = self.forward(f)?;
        self.backward(&self.map_modes(&s, |i, c| -c * self.ksq[i]))
    }

    pub fn bilaplacian(&self, f: &Field) -> Result<Field> {
        let s = self.forward(f)?;
        self.backward(&self.map_modes(&s, |i, c| c * (self.ksq[i] * self.ksq[i])))
    }

    fn check_mean(&self, g: &Field, tol: f64) -> Result<()> {
        let mean = g.mean();
        let scale = g.max_abs();
        if mean.abs() > tol * scale {
            return Err(Error::NonzeroMean {
                mean,
                tol: tol * scale,
            });
        }
        Ok(())
    }

    /// Zero-mean solution of `Δψ = g`; the mean of `g` must vanish within [`MEAN_TOL`].
    pub fn inv_laplacian_zero_mean(&self, g: &Field) -> Result<Field> {
        self.inv_laplacian_zero_mean_tol(g, MEAN_TOL)
    }

    pub fn inv_laplacian_zero_mean_tol(&self, g: &Field, tol: f64) -> Result<Field> {
        self.check_mean(g, tol)?;
        let s = self.forward(g)?;
        self.backward(&self.map_modes(&s, |i, c| {
            if i == 0 {
                Complex64::default()
            } else {
                -c / self.ksq[i]
            }
        }))
    }

    /// `B[g] = ∇Δ⁻¹g`, a right inverse of the divergence on zero-mean fields.
    pub fn bogovskii(&self, g: &Field) -> Result<VectorField> {
        self.check_mean(g, MEAN_TOL)?;
        let s = self.forward(g)?;
        self.bogovskii_spectrum(&s)
    }

    /// Bogovskiĭ operator applied to a spectrum; mode 0 is discarded.
    pub fn bogovskii_spectrum(&self, s: &Spectrum) -> Result<VectorField> {
        let comps = (0..self.grid.dim())
            .map(|a| {
                let d = self.map_modes(s, |i, c| {
                    if i == 0 {
                        Complex64::default()
                    } else {
                        c * Complex64::new(0.0, -self.kodd[i][a] / self.ksq[i])
                    }
                });
                self.backward(&d)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::from_components(comps)
    }

    /// Zeroes every mode with some `|k_i| > floor(n/3)`.
    pub fn dealias(&self, f: &Field) -> Result<Field> {
        let mut s = self.forward(f)?;
        self.dealias_spectrum(&mut s);
        self.backward(&s)
    }

    pub fn dealias_spectrum(&self, s: &mut Spectrum) {
        for (c, &keep) in s.coeffs.iter_mut().zip(&self.retained) {
            if !keep {
                *c = Complex64::default();
            }
        }
    }

    /// Dealiased pointwise product.
    pub fn product(&self, a: &Field, b: &Field) -> Result<Field> {
        self.dealias(&a.mul_pointwise(b)?)
    }

    /// `sqrt(Σ (1+|2πk|²)^s |f̂_k|²)`.
    pub fn sobolev_norm(&self, f: &Field, s: f64) -> Result<f64> {
        let spec = self.forward(f)?;
        Ok(self.sobolev_norm_spectrum(&spec, s))
    }

    pub fn sobolev_norm_spectrum(&self, spec: &Spectrum, s: f64) -> f64 {
        spec.coeffs
            .iter()
            .zip(&self.ksq)
            .map(|(c, k2)| (1.0 + k2).powf(s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Multiplies every mode by `m(idx)`.
    pub fn apply_multiplier(&self, f: &Field, m: impl Fn(usize) -> f64) -> Result<Field> {
        let s = self.forward(f)?;
        self.backward(&self.map_modes(&s, |i, c| c * m(i)))
    }
}

/// `f − mean(f)`.
pub fn zero_mean(f: &Field) -> Field {
    let m = f.mean();
    f.map(|v| v - m)
}
