use std::f64::consts::PI;

use deltanls::analytic::*;
use deltanls::datum::InitialDatum;
use deltanls::specfun::EULER_GAMMA;
use deltanls::{Complex64, Dim, Error};
use proptest::prelude::*;

#[test]
fn bound_state_amplitudes() {
    assert!((bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap().q_amp - 8f64.sqrt()).abs() < 1e-14);
    assert!((bound_state(Dim::Three, -1.0 / (4.0 * PI), 1.0, 1.0).unwrap().q_amp - 1.0).abs() < 1e-14);
    let w = 4.0 * (-2.0 * EULER_GAMMA - 2.0 * PI).exp();
    assert!((bound_state(Dim::Two, 1.0, 1.0, w).unwrap().q_amp - 0.707_106_8).abs() < 1e-7);
}

#[test]
fn bound_state_admissibility() {
    assert!(matches!(bound_state(Dim::One, 1.0, 1.0, 1.0), Err(Error::Inadmissible(_))));
    assert!(matches!(bound_state(Dim::Three, -1.0, 1.0, 0.0), Err(Error::Inadmissible(_))));
    // the branch frequency itself is excluded in d = 2
    assert!(bound_state(Dim::Two, 1.0, 1.0, d2_branch_frequency()).is_err());
    assert!(bound_state(Dim::Two, -1.0, 1.0, 2.0 * d2_branch_frequency()).is_ok());
    assert!(bound_state(Dim::One, -1.0, 0.0, 1.0).is_err());
}

#[test]
fn bound_mass_and_energy() {
    for omega in [0.1, 1.0, 7.0] {
        let u = bound_state(Dim::One, -1.0, 1.0, omega).unwrap();
        assert!((bound_mass(&u) - 2.0).abs() < 1e-13);
        assert!(bound_energy(&u).abs() < 1e-13);
        let u = bound_state(Dim::Three, -1.0, 1.0, omega).unwrap();
        assert!((bound_mass(&u) - 1.0 / (32.0 * PI * PI)).abs() < 1e-16);
    }
}

#[test]
fn bound_energy_matches_direct_integral_in_d1() {
    // E = ½‖u'‖² + β|u(0)|^{2σ+2}/(2σ+2) with u = q_amp e^{−√ω|x|}/(2√ω)
    let u = bound_state(Dim::One, -1.5, 2.0, 0.8).unwrap();
    let s = u.omega.sqrt();
    let h = 1e-5;
    let mut grad = 0.0;
    for i in 0..4_000_000 {
        let x = (i as f64 + 0.5) * h;
        grad += 2.0 * (0.5 * u.q_amp * (-s * x).exp()).powi(2) * h;
    }
    let u0 = u.profile(0.0).unwrap();
    let e = 0.5 * grad + u.beta * u0.powi(6) / 6.0;
    assert!((bound_energy(&u) - e).abs() < 1e-9 * e.abs());
}

#[test]
fn critical_mass_values() {
    assert_eq!(critical_mass(Dim::One, -1.0), Some(2.0));
    assert!((critical_mass(Dim::Three, -1.0).unwrap() - 0.003_166_3).abs() < 1e-7);
    assert_eq!(critical_mass(Dim::Two, -1.0), None);
    assert_eq!(critical_mass(Dim::One, 1.0), None);
}

#[test]
fn energy_threshold_values() {
    assert_eq!(energy_threshold(Dim::One, -1.0, 2.0).unwrap(), 0.0);
    assert!((energy_threshold(Dim::Two, -1.0, 1.0).unwrap() + 1.0 / (32.0 * PI * PI)).abs() < 1e-16);
    assert_eq!(energy_threshold(Dim::Three, -5.0, 3.0).unwrap(), 0.0);
    assert!(energy_threshold(Dim::One, 1.0, 1.0).is_err());
}

#[test]
fn rate_constants() {
    assert_eq!(sigma_c(2.0), 0.75);
    assert_eq!(rate_exponent(2.0), 0.125);
}

#[test]
fn exact_blowup_values() {
    let v = exact_blowup_solution(Dim::One, -1.0, 1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
    assert!((v - Complex64::from_polar(2f64.sqrt(), 1.0)).norm() < 1e-14);
    let q1 = exact_blowup_charge(Dim::One, -1.0, 1.0, 0.0, 1.0, 0.99).unwrap();
    let q4 = exact_blowup_charge(Dim::One, -1.0, 1.0, 0.0, 1.0, 0.96).unwrap();
    assert!((q1.norm() / q4.norm() - 2.0).abs() < 1e-12);
    assert!(exact_blowup_solution(Dim::One, -1.0, 1.0, 0.0, 1.0, 1.0, 0.0).is_err());
    assert!(exact_blowup_solution(Dim::Two, -1.0, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());

    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let datum = InitialDatum::Pseudoconformal { state: u, phase: 0.0, blowup_time: 1.0 };
    assert!((datum.mass(Dim::One).unwrap() - 2.0).abs() < 1e-13);
    let v0 = datum.value(Dim::One, 0.37).unwrap();
    let ve = exact_blowup_solution(Dim::One, -1.0, 1.0, 0.0, 1.0, 0.0, 0.37).unwrap();
    assert!((v0 - ve).norm() < 1e-13);
}

#[test]
fn pseudoconformal_map_of_standing_wave_is_exact_blowup() {
    for d in [Dim::One, Dim::Three] {
        let beta = if d == Dim::One { -1.0 } else { -0.3 };
        let (omega, th, big_t) = (1.3, 0.4, 0.8);
        let u = bound_state(d, beta, 1.0, omega).unwrap();
        let wave = |t: f64, r: f64| Ok(Complex64::from_polar(u.profile(r)?, omega * t + th));
        for (t, r) in [(0.0, 0.2), (0.3, 1.0), (0.7, 0.05)] {
            let a = pseudoconformal_map(wave, big_t, d, t, r).unwrap();
            let b = exact_blowup_solution(d, beta, omega, th, big_t, t, r).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm(), "d = {d}, t = {t}, r = {r}");
        }
    }
}

#[test]
fn pseudoconformal_map_composes_to_a_time_translate() {
    // P_{T2} ∘ P_0 ψ(t, x) = e^{−iπd/2} ψ(t − T2, x), for any ψ
    let g = InitialDatum::gaussian(Complex64::new(0.9, 0.2), 1.1);
    for d in [Dim::One, Dim::Three] {
        let psi = |t: f64, r: f64| Ok(g.free_evolution(d, t, r)?.0);
        let inner = |s: f64, r: f64| pseudoconformal_map(psi, 0.0, d, s, r);
        let big_t2 = -1.0;
        for (t, r) in [(0.0, 0.3), (0.4, 1.2), (1.5, 2.0)] {
            let lhs = pseudoconformal_map(inner, big_t2, d, t, r).unwrap();
            let rhs = Complex64::from_polar(1.0, -0.5 * PI * d.as_f64()) * psi(t - big_t2, r).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1e-3), "d = {d}, t = {t}");
        }
    }
}

#[test]
fn standing_wave_curve_skips_inadmissible_frequencies() {
    let w0 = d2_branch_frequency();
    let curve = standing_wave_curve(Dim::Two, 1.0, 1.0, &[0.5 * w0, w0, 2.0 * w0]);
    assert_eq!(curve.len(), 1);
    assert_eq!(curve[0].omega, 0.5 * w0);
}

proptest! {
    #[test]
    fn critical_mass_identity(beta in -5.0f64..-0.1, omega in 0.01f64..100.0) {
        for d in [Dim::One, Dim::Three] {
            let u = bound_state(d, beta, 1.0, omega).unwrap();
            let m = critical_mass(d, beta).unwrap();
            prop_assert!((bound_mass(&u) - m).abs() < 1e-12 * m);
        }
    }

    #[test]
    fn critical_d1_waves_have_zero_energy(beta in -5.0f64..-0.1, omega in 0.01f64..100.0) {
        let u = bound_state(Dim::One, beta, 1.0, omega).unwrap();
        let scale = u.q_amp * u.q_amp / omega.sqrt();
        prop_assert!(bound_energy(&u).abs() < 1e-13 * scale);
    }

    #[test]
    fn profile_solves_the_boundary_condition(beta in -3.0f64..-0.1, sigma in 0.3f64..3.0, omega in 0.1f64..10.0) {
        // d = 1 jump: u'(0+) − u'(0−) = α u(0) with α = β|u(0)|^{2σ}
        let u = bound_state(Dim::One, beta, sigma, omega).unwrap();
        let u0 = u.profile(0.0).unwrap();
        let jump = -u.q_amp;
        prop_assert!((jump - beta * u0.powf(2.0 * sigma) * u0).abs() < 1e-10 * u0.abs().max(1.0));
    }
}
