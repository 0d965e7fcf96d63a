use std::f64::consts::PI;

use deltanls::analytic::{bound_mass, bound_state};
use deltanls::charge::{solve_linear, solve_nonlinear, DEFAULT_BLOWUP_GUARD};
use deltanls::datum::InitialDatum;
use deltanls::field::*;
use deltanls::linear_delta::DeltaModel;
use deltanls::{Complex64, Dim, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn zero_datum_gives_zero_field() {
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::gaussian(0.0, 1.0);
    let tr = solve_nonlinear(m, &d, 0.2, 1e-2, DEFAULT_BLOWUP_GUARD).unwrap();
    let s = reconstruct(&tr, &d, 0.2, SpatialGrid::line(10.0, 0.5, 8)).unwrap();
    assert!(s.values.iter().all(|v| *v == c(0.0, 0.0)));
    assert_eq!(mass(&s), 0.0);
    assert_eq!(moment_of_inertia(&s), 0.0);
    assert_eq!(energy(&s, &m, 1.0).unwrap(), 0.0);
}

#[test]
fn zero_coupling_reconstructs_the_free_gaussian() {
    let m = DeltaModel::linear(Dim::One, 0.0).unwrap();
    let d = InitialDatum::gaussian(c(1.0, 0.2), 0.8);
    let tr = solve_linear(m, &d, 0.6, 1e-2).unwrap();
    let grid = SpatialGrid::uniform(-4.0, 4.0, 81).unwrap();
    let s = reconstruct(&tr, &d, 0.6, grid).unwrap();
    // U(t) of A e^{−x²/(2a²)} is A (a²/(a²+2it))^{1/2} e^{−x²/(2(a²+2it))}
    let a2 = 0.64;
    for (x, v) in s.grid.points.iter().zip(&s.values) {
        let z = c(a2, 2.0 * 0.6);
        let exact = c(1.0, 0.2) * (a2 / z).sqrt() * (-x * x / (2.0 * z)).exp();
        assert!((v - exact).norm() < 1e-6, "x = {x}");
    }
}

#[test]
fn gaussian_mass_and_moment_at_time_zero() {
    let m = DeltaModel::linear(Dim::One, 1.0).unwrap();
    let d = InitialDatum::gaussian(1.0, 1.0);
    let tr = solve_linear(m, &d, 0.1, 1e-2).unwrap();
    let s = reconstruct(&tr, &d, 0.0, SpatialGrid::line(20.0, 0.5, 16)).unwrap();
    assert!((mass(&s) - PI.sqrt()).abs() < 1e-10);
    assert!((moment_of_inertia(&s) - 0.5 * PI.sqrt()).abs() < 1e-10);
    // ‖ψ'‖² = ∫x²e^{−x²} as well
    assert!((gradient_norm_sq(&s).unwrap() - 0.5 * PI.sqrt()).abs() < 1e-10);
}

#[test]
fn d1_standing_wave_profile_and_energy() {
    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::BoundState { state: u, phase: 0.0 };
    let tr = solve_nonlinear(m, &d, 0.5, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    let s = reconstruct(&tr, &d, 0.5, SpatialGrid::line(40.0, 0.5, 16)).unwrap();
    for (x, v) in s.grid.points.iter().zip(&s.values) {
        if x.abs() <= 5.0 {
            assert!((v.norm() - u.profile(x.abs()).unwrap()).abs() < 1e-3, "x = {x}");
        }
    }
    assert!(energy(&s, &m, 1.0).unwrap().abs() < 1e-4);
    assert!((mass(&s) - 2.0).abs() < 1e-4);
}

#[test]
fn d3_standing_wave_mass() {
    let beta = -1.0 / (4.0 * PI);
    let u = bound_state(Dim::Three, beta, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::Three, beta, 1.0).unwrap();
    let d = InitialDatum::BoundState { state: u, phase: 0.0 };
    let tr = solve_nonlinear(m, &d, 0.5, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    let s = reconstruct(&tr, &d, 0.5, SpatialGrid::radial(30.0, 0.5, 16)).unwrap();
    let target = bound_mass(&u);
    assert!((mass(&s) - target).abs() < 1e-4 * target, "{} vs {target}", mass(&s));
}

#[test]
fn virial_rhs_examples() {
    let m = DeltaModel::nonlinear(Dim::One, -3.0, 1.0).unwrap();
    assert_eq!(virial_rhs(0.0, c(0.6, 0.8), &m).unwrap(), 0.0);
    let m = DeltaModel::nonlinear(Dim::Three, -1.0, 2.0).unwrap();
    assert!((virial_rhs(0.0, c(1.0, 0.0), &m).unwrap() + 4.0 / 3.0).abs() < 1e-15);
    let m = DeltaModel::nonlinear(Dim::Two, -1.0, 1.0).unwrap();
    let v = virial_rhs(0.0, c(0.0, 1.0), &m).unwrap();
    assert!((v - 2.0 * (1.0 / PI + 2.0)).abs() < 1e-14);
    assert!((v - 4.636_619_8).abs() < 1e-7);
    assert_eq!(virial_rhs(0.5, c(1.0, 0.0), &m).unwrap() + 4.0, virial_rhs_derived(0.5, c(1.0, 0.0), &m).unwrap());
    assert!(virial_rhs(0.0, c(1.0, 0.0), &DeltaModel::linear(Dim::One, 1.0).unwrap()).is_err());
}

#[test]
fn standing_wave_has_no_rate_fit() {
    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::BoundState { state: u, phase: 0.0 };
    let tr = solve_nonlinear(m, &d, 1.0, 1e-2, DEFAULT_BLOWUP_GUARD).unwrap();
    assert!(matches!(blowup_rate_fit(&tr, (0.5, 0.95)), Err(Error::FitDegenerate(_))));
}

#[test]
fn exact_blowup_rate_on_a_uniform_grid() {
    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::Pseudoconformal { state: u, phase: 0.0, blowup_time: 1.0 };
    let tr = solve_nonlinear(m, &d, 0.9, 1e-4, DEFAULT_BLOWUP_GUARD).unwrap();
    let fit = blowup_rate_fit(&tr, (0.5, 0.9)).unwrap();
    assert!((fit.exponent + 0.5).abs() < 0.05, "{fit:?}");
    assert!((fit.t_est - 1.0).abs() < 0.01, "{fit:?}");
}

#[test]
fn exact_blowup_moment_is_decreasing_and_convex() {
    // |ψ|² = (T−t)^{−1}|u(x/(T−t))|², so the moment is (T−t)² M(0)
    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::Pseudoconformal { state: u, phase: 0.0, blowup_time: 1.0 };
    let tr = solve_nonlinear(m, &d, 0.8, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    let moments: Vec<f64> = [0.0, 0.2, 0.4, 0.6, 0.8]
        .iter()
        .map(|&t| moment_of_inertia(&reconstruct(&tr, &d, t, SpatialGrid::line(40.0, 0.5, 16)).unwrap()))
        .collect();
    for (k, mk) in moments.iter().enumerate() {
        let t = 0.2 * k as f64;
        assert!((mk - moments[0] * (1.0 - t).powi(2)).abs() < 1e-3 * moments[0], "t = {t}");
    }
    assert!(moments.windows(2).all(|w| w[1] < w[0]));
    assert!(moments.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] > 0.0));
}

#[test]
fn dichotomy_examples() {
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 2.0).unwrap();
    let u = bound_state(Dim::One, -1.0, 2.0, 1.0).unwrap();
    assert!((dichotomy_eta(&InitialDatum::BoundState { state: u, phase: 0.3 }, &m).unwrap() - 1.0).abs() < 1e-12);

    let small = InitialDatum::gaussian(0.2, 1.0);
    assert!(dichotomy_eta(&small, &m).unwrap() < 1.0);
    let tr = solve_nonlinear(m, &small, 1.0, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    assert!(tr.blown_up.is_none());

    // E = ½‖ψ'‖² − |ψ(0)|⁶/6 = √π/2·A²/2 − A⁶/6 < 0 for A = 2
    let large = InitialDatum::gaussian(2.0, 1.0);
    let e = 0.5 * large.gradient_norm_sq_1d().unwrap() - 64.0 / 6.0;
    assert!(e < 0.0);
    assert!(dichotomy_eta(&large, &m).unwrap() > 1.0);

    assert!(dichotomy_eta(&small, &DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap()).is_err());
    assert!(dichotomy_eta(&small, &DeltaModel::nonlinear(Dim::Three, -1.0, 2.0).unwrap()).is_err());
}

#[test]
fn d3_gradient_norm_is_unsupported() {
    let m = DeltaModel::linear(Dim::Three, 0.5).unwrap();
    let d = InitialDatum::gaussian(1.0, 1.0);
    let tr = solve_linear(m, &d, 0.1, 1e-2).unwrap();
    let s = reconstruct(&tr, &d, 0.1, SpatialGrid::radial(10.0, 0.5, 8)).unwrap();
    assert!(matches!(gradient_norm_sq(&s), Err(Error::Unsupported(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn observables_are_gauge_invariant(phase in -3.0f64..3.0) {
        let m = DeltaModel::nonlinear(Dim::One, 1.0, 1.0).unwrap();
        let d0 = InitialDatum::gaussian(1.0, 1.0);
        let d1 = InitialDatum::gaussian(Complex64::from_polar(1.0, phase), 1.0);
        let obs = |d: &InitialDatum| {
            let tr = solve_nonlinear(m, d, 0.2, 1e-2, DEFAULT_BLOWUP_GUARD).unwrap();
            let s = reconstruct(&tr, d, 0.2, SpatialGrid::line(20.0, 0.5, 8)).unwrap();
            (mass(&s), energy(&s, &m, 1.0).unwrap(), moment_of_inertia(&s))
        };
        let (a, b) = (obs(&d0), obs(&d1));
        prop_assert!((a.0 - b.0).abs() <= 1e-12 * a.0);
        prop_assert!((a.1 - b.1).abs() <= 1e-12 * a.1.abs());
        prop_assert!((a.2 - b.2).abs() <= 1e-12 * a.2);
    }
}
