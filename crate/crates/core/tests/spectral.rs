use std::f64::consts::PI;

use proptest::prelude::*;
use qnsch::model::seeded_noise;
use qnsch::spectral::{zero_mean, Field, Grid, MollifierSpec, Torus, VectorField};
use qnsch::Error;

const TAU: f64 = 2.0 * PI;

fn torus(dim: usize, n: usize) -> Torus {
    Torus::new(Grid::new(dim, n).unwrap())
}

/// Random trigonometric polynomial with its analytic gradient and Laplacian.
#[derive(Debug, Clone)]
struct Trig {
    waves: Vec<([i64; 3], f64, f64)>,
}

impl Trig {
    fn arg(k: &[i64; 3], x: &[f64; 3]) -> f64 {
        TAU * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2])
    }

    fn value(&self, x: &[f64; 3]) -> f64 {
        self.waves
            .iter()
            .map(|(k, a, b)| a * Self::arg(k, x).cos() + b * Self::arg(k, x).sin())
            .sum()
    }

    fn d(&self, axis: usize, x: &[f64; 3]) -> f64 {
        self.waves
            .iter()
            .map(|(k, a, b)| {
                let t = Self::arg(k, x);
                TAU * k[axis] as f64 * (-a * t.sin() + b * t.cos())
            })
            .sum()
    }

    fn lap(&self, x: &[f64; 3]) -> f64 {
        self.waves
            .iter()
            .map(|(k, a, b)| {
                let t = Self::arg(k, x);
                let k2 = TAU * TAU * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
                -k2 * (a * t.cos() + b * t.sin())
            })
            .sum()
    }
}

fn trig_strategy(dim: usize, kmax: i64) -> impl Strategy<Value = Trig> {
    prop::collection::vec(
        (
            prop::array::uniform3(-kmax..=kmax),
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..6,
    )
    .prop_map(move |w| Trig {
        waves: w
            .into_iter()
            .map(|(mut k, a, b)| {
                k.iter_mut().skip(dim).for_each(|v| *v = 0);
                (k, a, b)
            })
            .collect(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_roundtrip_is_exact(values in prop::collection::vec(-10.0f64..10.0, 256)) {
        let t = torus(2, 16);
        let f = Field::from_values(t.grid(), values).unwrap();
        let back = t.backward(&t.forward(&f).unwrap()).unwrap();
        prop_assert!(f.max_abs_diff(&back) <= 1e-13 * f.max_abs().max(1.0));
    }

    #[test]
    fn derivatives_match_closed_forms(p in trig_strategy(2, 5)) {
        let t = torus(2, 32);
        let f = Field::from_fn(t.grid(), |x| p.value(x));
        let grad = t.grad(&f).unwrap();
        let lap = t.laplacian(&f).unwrap();
        let scale = 4.0 * TAU * TAU * 25.0;
        for axis in 0..2 {
            let exact = Field::from_fn(t.grid(), |x| p.d(axis, x));
            prop_assert!(grad.component(axis).max_abs_diff(&exact) <= 1e-10 * scale);
        }
        let exact = Field::from_fn(t.grid(), |x| p.lap(x));
        prop_assert!(lap.max_abs_diff(&exact) <= 1e-10 * scale);
    }

    #[test]
    fn div_of_grad_is_laplacian_in_3d(p in trig_strategy(3, 2)) {
        let t = torus(3, 8);
        let f = Field::from_fn(t.grid(), |x| p.value(x));
        let a = t.div(&t.grad(&f).unwrap()).unwrap();
        let b = t.laplacian(&f).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn bogovskii_inverts_divergence(seed in 0u64..1000) {
        let t = torus(2, 32);
        let g = zero_mean(&seeded_noise(t.grid(), seed, 6));
        let d = t.div(&t.bogovskii(&g).unwrap()).unwrap();
        prop_assert!((&d - &g).l2_norm() <= 1e-12 * g.l2_norm());
    }

    #[test]
    fn dealias_is_idempotent(seed in 0u64..1000) {
        let t = torus(2, 16);
        let f = seeded_noise(t.grid(), seed, 8);
        let once = t.dealias(&f).unwrap();
        let twice = t.dealias(&once).unwrap();
        prop_assert!(once.max_abs_diff(&twice) <= 1e-14);
    }
}

#[test]
fn sobolev_norm_of_single_mode() {
    let t = torus(2, 16);
    let f = Field::from_fn(t.grid(), |x| (TAU * (2.0 * x[0] + x[1])).cos());
    let k2 = TAU * TAU * 5.0;
    for s in [0.0, 1.0, 2.0] {
        // two modes ±k, each with coefficient 1/2
        let exact = ((1.0 + k2).powf(s) * 0.5).sqrt();
        let got = t.sobolev_norm(&f, s).unwrap();
        assert!((got - exact).abs() <= 1e-12 * exact, "s={s}: {got} vs {exact}");
    }
    assert!((t.sobolev_norm(&f, 0.0).unwrap() - f.l2_norm()).abs() < 1e-14);
}

#[test]
fn gaussian_mollifier_matches_heat_kernel() {
    let t = torus(2, 32);
    let eps = 0.05;
    let f = Field::from_fn(t.grid(), |x| 1.0 + (TAU * 3.0 * x[0]).sin() + (TAU * x[1]).cos());
    let m = t.mollify(&f, &MollifierSpec::gaussian(eps)).unwrap();
    let damp = |k2: f64| (-eps * eps * TAU * TAU * k2 / 2.0).exp();
    let exact = Field::from_fn(t.grid(), |x| {
        1.0 + damp(9.0) * (TAU * 3.0 * x[0]).sin() + damp(1.0) * (TAU * x[1]).cos()
    });
    assert!(m.max_abs_diff(&exact) < 1e-12);
}

#[test]
fn mollifier_multipliers_are_bounded_and_fix_the_mean() {
    let t = torus(2, 16);
    for spec in [MollifierSpec::gaussian(0.1), MollifierSpec::bump(0.2)] {
        let m = t.mollifier_multiplier(&spec).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-14);
        assert!(m.iter().all(|v| (-1.0 - 1e-14..=1.0 + 1e-14).contains(v)));
    }
    assert!(t.mollify(&Field::zeros(t.grid()), &MollifierSpec::gaussian(-1.0)).is_err());
}

#[test]
fn product_of_low_modes_is_unaliased() {
    let t = torus(2, 32);
    let a = Field::from_fn(t.grid(), |x| (TAU * 2.0 * x[0]).cos());
    let b = Field::from_fn(t.grid(), |x| (TAU * 3.0 * x[1]).sin());
    let p = t.product(&a, &b).unwrap();
    assert!(p.max_abs_diff(&a.mul_pointwise(&b).unwrap()) < 1e-13);
}

#[test]
fn inverse_laplacian_rejects_nonzero_mean() {
    let t = torus(2, 8);
    let err = t.inv_laplacian_zero_mean(&Field::constant(t.grid(), 1.0)).unwrap_err();
    assert!(matches!(err, Error::NonzeroMean { .. }));
}

#[test]
fn mismatched_grids_are_rejected() {
    let t = torus(2, 8);
    let f = Field::zeros(Grid::new(2, 16).unwrap());
    assert!(matches!(t.forward(&f), Err(Error::Dimension { .. })));
    let v = VectorField::zeros(Grid::new(3, 8).unwrap());
    assert!(t.div(&v).is_err());
}

#[test]
fn grid_validation() {
    assert!(Grid::new(1, 16).is_err());
    assert!(Grid::new(2, 12).is_err());
    assert!(Grid::new(2, 4).is_err());
    let g = Grid::new(3, 8).unwrap();
    assert_eq!(g.len(), 512);
    for idx in [0, 7, 100, 511] {
        assert_eq!(g.flat_index(&g.multi_index(idx)), idx);
    }
}
