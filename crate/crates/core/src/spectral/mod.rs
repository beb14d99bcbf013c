//! Periodic spectral calculus on the unit torus.
//!
//! Coefficients are normalized so that mode 0 holds the mean, and wavevectors
//! carry the `2π` factor. Odd-order derivatives drop the Nyquist mode.

mod field;
mod grid;
mod mollifier;
mod torus;

pub use field::{Field, VectorField};
pub use grid::Grid;
pub use mollifier::{MollifierProfile, MollifierSpec};
pub use torus::{zero_mean, Spectrum, Torus, MEAN_TOL};
