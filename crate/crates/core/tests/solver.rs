use std::f64::consts::PI;

use qnsch::model::State;
use qnsch::potentials::{ConfinementSpec, Params, ParamsSpec, PotentialPack};
use qnsch::solver::{stability_budget, ExactSnapshot, ManufacturedForcing, SchemeConfig, SchemeKind, Stepper};
use qnsch::spectral::{Field, Grid, Torus, VectorField};
use qnsch::{Error, Level};

const TAU: f64 = 2.0 * PI;

fn setup(n: usize) -> (Torus, PotentialPack) {
    let pack = PotentialPack::new(Params::new(ParamsSpec::default()).unwrap()).unwrap();
    (Torus::new(Grid::new(2, n).unwrap()), pack)
}

fn exact(grid: Grid, mid: f64) -> impl Fn(f64) -> ExactSnapshot + Sync {
    move |t: f64| {
        let (c, s) = (t.cos(), t.sin());
        ExactSnapshot {
            rho: Field::from_fn(grid, |x| {
                mid + 0.05 * (TAU * x[0]).cos() * (1.0 + 0.5 * s) + 0.03 * (TAU * (x[0] + x[1])).sin() * c
            }),
            drho_dt: Field::from_fn(grid, |x| {
                0.025 * (TAU * x[0]).cos() * c - 0.03 * (TAU * (x[0] + x[1])).sin() * s
            }),
            m: VectorField::from_fn(grid, |a, x| {
                if a == 0 {
                    0.2 * (TAU * x[1]).sin() * c + 0.05
                } else {
                    0.1 * (TAU * x[0]).cos() * (1.0 + s)
                }
            }),
            dm_dt: VectorField::from_fn(grid, |a, x| {
                if a == 0 {
                    -0.2 * (TAU * x[1]).sin() * s
                } else {
                    0.1 * (TAU * x[0]).cos() * c
                }
            }),
        }
    }
}

fn observed_orders(scheme: SchemeKind, level: Level) -> Vec<f64> {
    let (torus, pack) = setup(16);
    let forcing = ManufacturedForcing::new(&torus, &pack, level, exact(torus.grid(), pack.params().rho_mid()));
    let t_final = 0.05;
    let mut errors = Vec::new();
    for k in 0..3 {
        let dt = 2e-3 / 2f64.powi(k);
        let config = SchemeConfig {
            dt,
            scheme,
            level,
            ..Default::default()
        };
        let mut stepper = Stepper::new(&torus, &pack, config).unwrap().with_forcing(&forcing);
        let mut s = forcing.state_at(0.0).unwrap();
        for _ in 0..(t_final / dt).round() as usize {
            s = stepper.step(&s).unwrap();
        }
        let e = forcing.state_at(s.time).unwrap();
        errors.push((&s.rho - &e.rho).l2_norm());
    }
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn euler_converges_at_first_order() {
    for level in [Level::Target, Level::SigmaDelta] {
        let orders = observed_orders(SchemeKind::ImexEuler, level);
        assert!(orders.iter().all(|&p| (0.85..1.3).contains(&p)), "{level}: {orders:?}");
    }
}

#[test]
fn bdf2_converges_at_second_order() {
    let orders = observed_orders(SchemeKind::ImexBdf2, Level::Target);
    assert!(orders.iter().all(|&p| p > 1.8), "{orders:?}");
}

#[test]
fn fluid_at_rest_stays_at_rest() {
    let (torus, pack) = setup(16);
    for scheme in [SchemeKind::ImexEuler, SchemeKind::ImexBdf2] {
        let config = SchemeConfig {
            scheme,
            ..Default::default()
        };
        let mut stepper = Stepper::new(&torus, &pack, config).unwrap();
        let s0 = State::uniform(torus.grid(), 0.7);
        let mut s = s0.clone();
        for _ in 0..10 {
            s = stepper.step(&s).unwrap();
        }
        assert_eq!(s.step, 10);
        assert!(s.rho.max_abs_diff(&s0.rho) < 1e-14);
        assert!(s.u.max_abs() < 1e-14);
    }
}

#[test]
fn leaving_the_band_aborts_unless_disabled() {
    let params = Params::new(ParamsSpec::default()).unwrap();
    let pack = PotentialPack::new(params)
        .unwrap()
        .with_confinement(ConfinementSpec::with_steep_level(&params, 1.0));
    let torus = Torus::new(Grid::new(2, 16).unwrap());
    let hi = 1.0 + params.theta();
    let rho = Field::from_fn(torus.grid(), |x| hi + 0.01 * (1.0 + (TAU * x[0]).cos()));
    let s = State::new(VectorField::zeros(torus.grid()), rho, 0.0).unwrap();

    let mut stepper = Stepper::new(&torus, &pack, SchemeConfig::default()).unwrap();
    let e = stepper.step(&s).unwrap_err();
    assert!(matches!(e, Error::Confinement { .. }), "{e}");
    assert_eq!(e.exit_code(), 2);

    let lenient = SchemeConfig {
        abort_on_confinement: false,
        ..Default::default()
    };
    let mut stepper = Stepper::new(&torus, &pack, lenient).unwrap();
    assert!(stepper.step(&s).is_ok());
}

#[test]
fn invalid_scheme_settings_are_rejected() {
    let (torus, pack) = setup(8);
    for config in [
        SchemeConfig { dt: 0.0, ..Default::default() },
        SchemeConfig { dt: f64::NAN, ..Default::default() },
        SchemeConfig { cfl_safety: 1.5, ..Default::default() },
    ] {
        assert!(Stepper::new(&torus, &pack, config).is_err(), "{config:?}");
    }
}

#[test]
fn budget_is_positive_and_shrinks_with_speed() {
    let (torus, pack) = setup(32);
    let config = SchemeConfig::default();
    let rho = Field::from_fn(torus.grid(), |x| 0.66 + 0.05 * (TAU * x[0]).cos());
    let slow = State::new(VectorField::from_fn(torus.grid(), |_, _| 0.1), rho.clone(), 0.0).unwrap();
    let fast = State::new(VectorField::from_fn(torus.grid(), |_, _| 10.0), rho, 0.0).unwrap();
    let a = stability_budget(&torus, &pack, &slow, &config).unwrap();
    let b = stability_budget(&torus, &pack, &fast, &config).unwrap();
    assert!(a > 0.0 && b > 0.0 && b < a);
}

#[test]
fn bdf2_history_must_match_the_grid() {
    let (torus, pack) = setup(8);
    let config = SchemeConfig {
        scheme: SchemeKind::ImexBdf2,
        ..Default::default()
    };
    let mut stepper = Stepper::new(&torus, &pack, config).unwrap();
    let other = State::uniform(Grid::new(2, 16).unwrap(), 0.7);
    assert!(stepper.set_previous_state(Some(other)).is_err());
    assert!(stepper.set_previous_state(None).is_ok());
}
