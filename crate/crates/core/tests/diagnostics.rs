use std::f64::consts::PI;

use proptest::prelude::*;
use qnsch::diagnostics::{
    compute_bd_entropy, compute_energies, conservation_drift, energy_balance_residual, equi_integrability_tail,
    pressure_integrability, pressure_sample, psi_window, Recorder, TAIL_LADDER,
};
use qnsch::model::State;
use qnsch::potentials::{Params, ParamsSpec, PotentialPack};
use qnsch::solver::{SchemeConfig, Stepper};
use qnsch::spectral::{Field, Grid, Torus, VectorField};
use qnsch::{Error, Level};

fn setup(n: usize) -> (Torus, PotentialPack) {
    let pack = PotentialPack::new(Params::new(ParamsSpec::default()).unwrap()).unwrap();
    (Torus::new(Grid::new(2, n).unwrap()), pack)
}

#[test]
fn energies_of_a_uniform_translation() {
    let (torus, pack) = setup(16);
    let rho = 0.7;
    let u = VectorField::from_fn(torus.grid(), |a, _| if a == 0 { 0.3 } else { -0.4 });
    let s = State::new(u, Field::constant(torus.grid(), rho), 0.0).unwrap();
    let e = compute_energies(&torus, &pack, &s, Level::SigmaDelta).unwrap();
    assert!((e.kinetic - 0.5 * rho * 0.25).abs() < 1e-14);
    assert!(e.gradient.abs() < 1e-20 && e.hyper.abs() < 1e-20 && e.confinement == 0.0);
    let f = pack.tilde_f_sigma(rho).value;
    assert!((e.potential - f).abs() < 1e-12 * f.abs().max(1.0));
}

#[test]
fn gradient_energy_of_a_single_mode() {
    let (torus, pack) = setup(32);
    let a = 0.02;
    let rho = Field::from_fn(torus.grid(), |x| 0.7 + a * (2.0 * PI * x[0]).cos());
    let s = State::new(VectorField::zeros(torus.grid()), rho, 0.0).unwrap();
    let e = compute_energies(&torus, &pack, &s, Level::Target).unwrap();
    let ell2 = pack.params().ell().powi(2);
    // ∫|∇ρ|² = (2πa)²/2
    let exact = 0.5 * ell2 * (2.0 * PI * a).powi(2) / 2.0;
    assert!((e.gradient - exact).abs() < 1e-12 * exact);
    assert_eq!(e.hyper, 0.0);
    let bd = compute_bd_entropy(&torus, &pack, &s, Level::Target).unwrap();
    assert!((bd.grouped - bd.expanded).abs() < 1e-10 * bd.grouped.abs());
}

#[test]
fn target_energies_reject_out_of_band_density() {
    let (torus, pack) = setup(8);
    let s = State::uniform(torus.grid(), 1.1);
    assert!(compute_energies(&torus, &pack, &s, Level::Target).is_err());
    assert!(compute_energies(&torus, &pack, &s, Level::SigmaDelta).is_ok());
}

proptest! {
    #[test]
    fn psi_window_is_a_trapezoid(t in 0.0f64..1.0, m in 2u32..50) {
        let v = psi_window(t, 0.0, 1.0, m);
        prop_assert!((0.0..=1.0).contains(&v));
        let ramp = 1.0 / m as f64;
        if t >= ramp && t <= 1.0 - ramp {
            prop_assert_eq!(v, 1.0);
        }
        prop_assert!((v - psi_window(1.0 - t, 0.0, 1.0, m)).abs() < 1e-12);
    }

    #[test]
    fn tail_table_is_monotone(amp in 0.01f64..0.3, seed in 0u64..100) {
        let (torus, pack) = setup(16);
        let noise = qnsch::model::seeded_noise(torus.grid(), seed, 4);
        let mut samples = Vec::new();
        for k in 0..3 {
            let rho = noise.map(|v| 0.66 + amp * (1.0 + k as f64) * v / 3.0);
            samples.push(pressure_sample(&pack, &rho, Level::SigmaDelta, k as f64 * 0.1, &TAIL_LADDER).unwrap());
        }
        let t = equi_integrability_tail(&samples).unwrap();
        prop_assert!(t.monotone);
        prop_assert!(t.domination_ratio <= 1.0 + 1e-12);
        let p = pressure_integrability(&samples, 10).unwrap();
        prop_assert!(p.p_l1 >= t.rows[0].integral - 1e-15);
    }
}

#[test]
fn single_sample_is_insufficient() {
    let (torus, pack) = setup(8);
    let rho = Field::constant(torus.grid(), 0.7);
    let s = pressure_sample(&pack, &rho, Level::Target, 0.0, &TAIL_LADDER).unwrap();
    assert!(matches!(
        equi_integrability_tail(&[s]),
        Err(Error::InsufficientHistory { need: 2, have: 1 })
    ));
    assert!(energy_balance_residual(&[]).is_err());
}

#[test]
fn recorder_tracks_conservation_and_balance() {
    let (torus, pack) = setup(16);
    let rho = Field::from_fn(torus.grid(), |x| 0.66 + 0.03 * (2.0 * PI * (x[0] + x[1])).sin());
    let u = VectorField::from_fn(torus.grid(), |a, x| 0.2 * (2.0 * PI * x[1 - a]).cos());
    let mut s = State::new(u, rho, 0.0).unwrap();
    let config = SchemeConfig::default();
    let mut stepper = Stepper::new(&torus, &pack, config).unwrap();
    let mut rec = Recorder::new(&torus, &pack, config.level);
    let mut records = vec![rec.record(&s, true).unwrap()];
    for _ in 0..20 {
        s = stepper.step(&s).unwrap();
        records.push(rec.record(&s, true).unwrap());
    }
    assert_eq!(records[0].energy_defect, 0.0);
    let d = conservation_drift(&records).unwrap();
    assert!(d.mass_rho < 1e-13 && d.mass_phi < 1e-13);
    let e = energy_balance_residual(&records).unwrap();
    assert_eq!(e.len(), 20);
    for (k, v) in e.iter().enumerate() {
        assert_eq!(*v, records[k + 1].energy_defect);
    }
    assert_eq!(rec.pressure_samples().len(), 21);
    assert!(records.iter().all(|r| r.d_visc >= 0.0 && r.d_mup >= 0.0));
}
