use proptest::prelude::*;
use qnsch::potentials::{c_star, concave, ConfinementSpec, Params, ParamsSpec, PotentialPack, SingularProfile};
use qnsch::{Error, Level};

fn pack() -> PotentialPack {
    PotentialPack::new(Params::new(ParamsSpec::default()).unwrap()).unwrap()
}

// closed forms of (1 − φ²)^(−β)
fn fc(beta: f64, p: f64) -> [f64; 3] {
    let s = 1.0 - p * p;
    [
        s.powf(-beta),
        2.0 * beta * p * s.powf(-beta - 1.0),
        2.0 * beta * s.powf(-beta - 1.0) + 4.0 * beta * (beta + 1.0) * p * p * s.powf(-beta - 2.0),
    ]
}

#[test]
fn derived_constants() {
    let p = Params::new(ParamsSpec::default()).unwrap();
    assert!((p.alpha() - 0.5).abs() < 1e-15);
    assert!((p.ell() - 3.0).abs() < 1e-14);
    assert!((p.rho_lower() - 1.0 / 3.0).abs() < 1e-14);
    assert!((p.theta() - p.rho_lower() / 2.0).abs() < 1e-15);
    // the band edges map to φ = ±1
    assert!((p.phi_of_rho(1.0) + 1.0).abs() < 1e-14);
    assert!((p.phi_of_rho(p.rho_lower()) - 1.0).abs() < 1e-14);

    let q = Params::new(ParamsSpec { rho1: 0.5, ..Default::default() }).unwrap();
    assert!((q.alpha() - 1.0 / 3.0).abs() < 1e-15);
    assert!((q.ell() - 4.0).abs() < 1e-14);
}

#[test]
fn invalid_parameters_are_rejected() {
    for spec in [
        ParamsSpec { rho1: 1.0, ..Default::default() },
        ParamsSpec { rho1: 0.0, ..Default::default() },
        ParamsSpec { beta: 0.5, ..Default::default() },
        ParamsSpec { sigma: 0.5, ..Default::default() },
        ParamsSpec { delta: -1.0, ..Default::default() },
        ParamsSpec { dim: 4, ..Default::default() },
    ] {
        assert!(matches!(Params::new(spec), Err(Error::InvalidParameter { .. })), "{spec:?}");
    }
}

proptest! {
    #[test]
    fn affine_map_roundtrip(rho in 0.0f64..2.0) {
        let p = Params::new(ParamsSpec::default()).unwrap();
        prop_assert!((p.rho_of_phi(p.phi_of_rho(rho)) - rho).abs() < 1e-14);
    }

    #[test]
    fn singular_profile_matches_closed_form(beta in 1.0f64..3.0, p in -0.99f64..0.99) {
        let t = SingularProfile::new(beta).fc(p).unwrap();
        let e = fc(beta, p);
        prop_assert!((t.value - e[0]).abs() <= 1e-12 * e[0]);
        prop_assert!((t.d1 - e[1]).abs() <= 1e-12 * e[1].abs().max(1.0));
        prop_assert!((t.d2 - e[2]).abs() <= 1e-12 * e[2]);
    }

    #[test]
    fn truncation_is_c2_and_quadratic_outside(beta in 1.0f64..3.0, sigma in 1e-3f64..0.2, h in 0.0f64..2.0) {
        let prof = SingularProfile::new(beta);
        let a = 1.0 - sigma;
        for sign in [1.0, -1.0] {
            let e = fc(beta, sign * a);
            let inside = prof.fc_sigma(sign * a, sigma);
            prop_assert!((inside.value - e[0]).abs() <= 1e-12 * e[0]);
            prop_assert!((inside.d1 - e[1]).abs() <= 1e-10 * e[1].abs());
            prop_assert!((inside.d2 - e[2]).abs() <= 1e-10 * e[2]);
            let out = prof.fc_sigma(sign * (a + h), sigma);
            let taylor = e[0] + sign * e[1] * h + 0.5 * e[2] * h * h;
            prop_assert!((out.value - taylor).abs() <= 1e-10 * taylor.abs());
            prop_assert!((out.d2 - e[2]).abs() <= 1e-10 * e[2]);
        }
    }

    #[test]
    fn truncated_potential_is_bounded_below(r in -5.0f64..5.0, omega in 0.0f64..40.0) {
        let prof = SingularProfile::new(1.5);
        let cs = c_star(&prof, omega, 0.1).unwrap();
        for sigma in [1e-1, 1e-2, 1e-3] {
            prop_assert!(prof.f_sigma(r, sigma, omega).value >= -cs - 1e-12);
        }
    }
}

#[test]
fn singular_potential_rejects_out_of_domain() {
    let prof = SingularProfile::new(1.5);
    assert!(matches!(prof.fc(1.0), Err(Error::SingularDomain { .. })));
    assert!(matches!(prof.fc(-1.2), Err(Error::SingularDomain { .. })));
    assert!(pack().tilde_f(0.2).is_err());
    assert!(pack().tilde_f(0.5).is_ok());
}

#[test]
fn concave_part_is_quadratic() {
    let t = concave(0.4, 3.0);
    assert!((t.value + 3.0 * 0.16 / 2.0).abs() < 1e-15);
    assert!((t.d1 + 1.2).abs() < 1e-15);
    assert!((t.d2 + 3.0).abs() < 1e-15);
}

#[test]
fn pressure_derivative_is_density_times_curvature() {
    let pk = pack();
    let ell: f64 = 3.0;
    for &r in &[0.4, 0.5, 2.0 / 3.0, 0.8, 0.95] {
        let phi = -ell * r + ell - 1.0;
        let f2 = fc(1.5, phi)[2] - 3.0;
        let exact = r * ell * ell * f2;
        let got = pk.p_tilde(r).unwrap().1;
        assert!((got - exact).abs() <= 1e-10 * exact.abs().max(1.0), "ρ={r}: {got} vs {exact}");
    }
}

#[test]
fn rho_star_is_a_root_with_sign_change() {
    let pk = pack();
    let s = pk.rho_star();
    let p = pk.params();
    assert!(s > p.rho_mid() && s < 1.0);
    assert!(pk.p_tilde_c(s).unwrap().0.abs() < 1e-12);
    assert!(pk.p_tilde_c(s - 1e-3).unwrap().0 < 0.0);
    assert!(pk.p_tilde_c(s + 1e-3).unwrap().0 > 0.0);
}

#[test]
fn confinement_vanishes_in_band_and_grows_outside() {
    let params = Params::new(ParamsSpec::default()).unwrap();
    let spec = ConfinementSpec::with_steep_level(&params, 1e6);
    for r in [params.rho_lower() + 1e-3, 0.5, 0.999] {
        let w = spec.w_delta(r);
        assert_eq!((w.value, w.d1, w.d2), (0.0, 0.0, 0.0));
    }
    let above = [1.01, 1.05, 1.1].map(|r| spec.w_delta(r).value);
    assert!(above.windows(2).all(|w| w[1] > w[0]) && above[0] > 0.0);
    let below = spec.w_delta(params.rho_lower() - 0.05);
    assert!(below.value > 0.0 && below.d1 < 0.0 && below.d2 > 0.0);
}

#[test]
fn level_selects_band_and_potential() {
    let pk = pack();
    let p = *pk.params();
    let (lo, hi) = pk.band(Level::Target);
    assert!((lo - p.rho_lower()).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    let (lo, hi) = pk.band(Level::SigmaDelta);
    assert!(lo < p.rho_lower() && hi > 1.0);
    // outside (ρ̲, 1) only the truncated level is defined
    assert!(pk.free_energy(Level::Target, 1.02).is_err());
    assert!(pk.free_energy(Level::SigmaDelta, 1.02).is_ok());
    let a = pk.free_energy(Level::Target, 0.6).unwrap().value;
    let b = pk.free_energy(Level::SigmaDelta, 0.6).unwrap().value;
    assert!((a - b).abs() < 1e-12);
}
