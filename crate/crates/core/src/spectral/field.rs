use std::ops::{Add, Mul, Sub};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real scalar field sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f` at every grid point. Coordinates beyond `dim` are zero.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension {
                expected: format!("{} values", grid.len()),
                got: format!("{} values", values.len()),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid-point average, which equals the torus integral since the volume is one.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sqrt(∫ f²)` on the unit torus.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Field> {
        let values = self.values.iter().map(|&v| f(v)).collect::<Result<_>>()?;
        Ok(Field {
            grid: self.grid,
            values,
        })
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Pointwise product.
    pub fn mul_pointwise(&self, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a * b)
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Field) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b).expect("grid mismatch in addition")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b).expect("grid mismatch in subtraction")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, c: f64) -> Field {
        self.map(|v| v * c)
    }
}

/// `dim`-component vector field; all components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<Field>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            components: (0..grid.dim()).map(|_| Field::zeros(grid)).collect(),
        }
    }

    pub fn from_components(components: Vec<Field>) -> Result<Self> {
        let grid = components
            .first()
            .map(|c| c.grid())
            .ok_or_else(|| Error::Consistency("vector field needs components".into()))?;
        if components.len() != grid.dim() {
            return Err(Error::Dimension {
                expected: format!("{} components", grid.dim()),
                got: format!("{} components", components.len()),
            });
        }
        for c in &components {
            grid.check_same(&c.grid())?;
        }
        Ok(Self { grid, components })
    }

    /// Samples component `a` from `f(a, x)`.
    pub fn from_fn(grid: Grid, f: impl Fn(usize, &[f64; 3]) -> f64) -> Self {
        let components = (0..grid.dim())
            .map(|a| Field::from_fn(grid, |x| f(a, x)))
            .collect();
        Self { grid, components }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Field] {
        &mut self.components
    }

    pub fn component(&self, a: usize) -> &Field {
        &self.components[a]
    }

    pub fn into_components(self) -> Vec<Field> {
        self.components
    }

    pub fn map_components(&self, f: impl Fn(&Field) -> Field) -> VectorField {
        VectorField {
            grid: self.grid,
            components: self.components.iter().map(f).collect(),
        }
    }

    /// Pointwise Euclidean norm squared.
    pub fn norm_sq(&self) -> Field {
        let mut out = Field::zeros(self.grid);
        for c in &self.components {
            for (o, v) in out.values_mut().iter_mut().zip(c.values()) {
                *o += v * v;
            }
        }
        out
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &VectorField) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let mut out = Field::zeros(self.grid);
        for (a, b) in self.components.iter().zip(&other.components) {
            for ((o, x), y) in out.values_mut().iter_mut().zip(a.values()).zip(b.values()) {
                *o += x * y;
            }
        }
        Ok(out)
    }

    /// Multiplies every component pointwise by `s`.
    pub fn scale_by(&self, s: &Field) -> Result<VectorField> {
        let components = self
            .components
            .iter()
            .map(|c| c.mul_pointwise(s))
            .collect::<Result<_>>()?;
        Ok(VectorField {
            grid: self.grid,
            components,
        })
    }

    pub fn scale(&mut self, c: f64) {
        self.components.iter_mut().for_each(|f| f.scale(c));
    }

    pub fn axpy(&mut self, c: f64, other: &VectorField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.axpy(c, b)?;
        }
        Ok(())
    }

    pub fn means(&self) -> Vec<f64> {
        self.components.iter().map(Field::mean).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.norm_sq().max().sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().mean().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(Field::is_finite)
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(1.0, rhs).expect("grid mismatch in addition");
        out
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs).expect("grid mismatch in subtraction");
        out
    }
}
