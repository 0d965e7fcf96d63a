use std::f64::consts::PI;

use deltanls::analytic::bound_state;
use deltanls::charge::*;
use deltanls::datum::{GaussianPart, InitialDatum};
use deltanls::field::blowup_rate_fit;
use deltanls::linear_delta::DeltaModel;
use deltanls::{Complex64, Dim, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sup_diff(a: &ChargeTrajectory, b: &ChargeTrajectory) -> f64 {
    // b on a grid twice as fine
    (0..a.len()).map(|n| (a.values[n] - b.values[2 * n]).norm()).fold(0.0, f64::max)
}

#[test]
fn kernel_values() {
    assert!((kernel(Dim::One, 4.0).unwrap() - 0.5).abs() < 1e-15);
    assert!((kernel(Dim::Three, 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((kernel(Dim::Two, 1.0).unwrap() - 2.807_770_2).abs() < 1e-7);
    assert!(kernel(Dim::One, 0.0).is_err());
}

#[test]
fn coupling_constants() {
    let v = coupling_const(Dim::One, 1.0);
    assert!((v - c(0.199_471_1, 0.199_471_1)).norm() < 1e-7);
    let v = coupling_const(Dim::Three, 1.0);
    assert!((v - c(5.013_256_5, 5.013_256_5)).norm() < 1e-7);
    let v = coupling_const(Dim::Two, 0.0);
    let re = 2.0 * (0.5f64.ln() + deltanls::specfun::EULER_GAMMA);
    assert!((v - c(re, -PI / 2.0)).norm() < 1e-14);
    assert!((re + 0.231_863).abs() < 1e-6);
    assert_eq!(m_const(Dim::One), c(1.0, 0.0));
    assert!((m_const(Dim::Two) - c(4.0 * PI, 0.0)).norm() < 1e-15);
    assert_eq!(m_const(Dim::Three), coupling_const(Dim::Three, 1.0));
}

#[test]
fn forcing_examples() {
    let g = InitialDatum::gaussian(1.0, 1.0);
    assert!((forcing(&g, Dim::One, 0.1, 0.01).unwrap()[0] - 1.0).norm() < 1e-15);
    let f3 = forcing(&g, Dim::Three, 0.01, 1e-4).unwrap();
    assert_eq!(f3[0], c(0.0, 0.0));
    // leading order 2√t, with relative correction O(t)
    let t: f64 = 1e-4 * 10.0;
    assert!((f3[10] - 2.0 * t.sqrt()).norm() < 3.0 * t * 2.0 * t.sqrt());
}

#[test]
fn d3_green_forcing_is_nonzero_at_the_origin() {
    // the singular part of U(s)G_λ(0) ~ s^{−1/2} makes ∫(t−s)^{−1/2}… tend to π c, not 0
    let g = InitialDatum::Green { charge: c(1.0, 0.0), lambda: 1.0, regular: None };
    let f = forcing(&g, Dim::Three, 0.01, 1e-3).unwrap();
    assert!((f[0] * m_const(Dim::Three) - 1.0).norm() < 1e-14);
}

#[test]
fn d3_gaussian_forcing_matches_product_integration() {
    // m₃f₃ = m₃ ∫_0^t (t−s)^{−1/2} (U(s)ψ₀)(0) ds, checked with a substitution s = t − u²
    let g = InitialDatum::gaussian(c(0.7, 0.2), 1.2);
    let f = forcing(&g, Dim::Three, 0.5, 0.05).unwrap();
    let t: f64 = 0.5;
    let n = 20_000;
    let h = t.sqrt() / n as f64;
    let mut s = c(0.0, 0.0);
    for i in 0..n {
        let u = (i as f64 + 0.5) * h;
        s += 2.0 * g.free_evolution_at_origin(Dim::Three, t - u * u).unwrap() * h;
    }
    assert!((f[10] - s).norm() < 1e-8);
}

#[test]
fn zero_coupling_charge_is_the_free_forcing() {
    let g = InitialDatum::gaussian(c(1.0, 0.3), 0.9);
    let m = DeltaModel::linear(Dim::One, 0.0).unwrap();
    let tr = solve_linear(m, &g, 1.0, 1e-2).unwrap();
    let f = forcing(&g, Dim::One, 1.0, 1e-2).unwrap();
    assert_eq!(tr.values, f);
}

#[test]
fn d3_linear_self_convergence() {
    let g = InitialDatum::gaussian(1.0, 1.0);
    let m = DeltaModel::linear(Dim::Three, 1.0).unwrap();
    // |c₃(1)|² h ≈ 1 at h = 0.02, so the sequence starts at h = 0.01
    let hs = [0.01, 0.005, 0.0025, 0.00125];
    let tr: Vec<_> = hs.iter().map(|&h| solve_linear(m, &g, 1.0, h).unwrap()).collect();
    let d: Vec<f64> = tr.windows(2).map(|w| sup_diff(&w[0], &w[1])).collect();
    assert!(d[0] / d[1] >= 2.5, "{d:?}");
    assert!(d[1] / d[2] >= 2.5, "{d:?}");
}

#[test]
fn d3_weak_coupling_converges_at_second_order() {
    let g = InitialDatum::gaussian(1.0, 1.0);
    let m = DeltaModel::linear(Dim::Three, 0.1).unwrap();
    let tr: Vec<_> = [0.02, 0.01, 0.005].iter().map(|&h| solve_linear(m, &g, 1.0, h).unwrap()).collect();
    let ratio = sup_diff(&tr[0], &tr[1]) / sup_diff(&tr[1], &tr[2]);
    assert!(ratio > 3.5, "{ratio}");
}

#[test]
fn d1_eigenstate_phase() {
    let m = DeltaModel::linear(Dim::One, -2.0).unwrap();
    let g = InitialDatum::Green { charge: c(2.0, 0.0), lambda: 1.0, regular: None };
    let tr = solve_linear(m, &g, 1.0, 1e-3).unwrap();
    assert!((tr.values[0] - 1.0).norm() < 1e-15);
    for n in (0..tr.len()).step_by(50) {
        let e = Complex64::from_polar(1.0, tr.time(n));
        assert!((tr.values[n] - e).norm() < 1e-4);
    }
    assert!(interpolant_residual(&tr, &g).unwrap() < 1e-5);
}

#[test]
fn defocusing_run_is_not_flagged() {
    let m = DeltaModel::nonlinear(Dim::One, 1.0, 1.0).unwrap();
    let tr = solve_nonlinear(m, &InitialDatum::gaussian(1.0, 1.0), 2.0, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    assert!(tr.blown_up.is_none());
    assert_eq!(tr.len(), 2001);
}

#[test]
fn standing_wave_charge_rotates() {
    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::BoundState { state: u, phase: 0.0 };
    let tr = solve_nonlinear(m, &d, 1.0, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    let q0 = tr.values[0];
    for n in 0..tr.len() {
        let e = q0 * Complex64::from_polar(1.0, tr.time(n));
        assert!((tr.values[n] - e).norm() < 1e-3 * q0.norm());
    }
}

#[test]
fn exact_blowup_datum_on_a_graded_mesh() {
    let u = bound_state(Dim::One, -1.0, 1.0, 1.0).unwrap();
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 1.0).unwrap();
    let d = InitialDatum::Pseudoconformal { state: u, phase: 0.0, blowup_time: 1.0 };
    let cfg = GradedConfig { h_max: 1e-4, max_rotation: 2.5e-3, max_growth: 2.5e-3, ..GradedConfig::default() };
    let tr = solve_graded(m, &d, 0.98, &cfg).unwrap();
    assert!(!tr.is_uniform());
    let fit = blowup_rate_fit(&tr, (0.5, 0.95)).unwrap();
    assert!((fit.exponent + 0.5).abs() < 0.05, "{fit:?}");
    assert!((fit.t_est - 1.0).abs() < 0.01, "{fit:?}");
    // the exact charge is (T − t)^{−1/2} u(0) e^{i(1/(T−t))}
    let n = tr.times.partition_point(|&t| t < 0.9);
    let exact = deltanls::analytic::exact_blowup_charge(Dim::One, -1.0, 1.0, 0.0, 1.0, tr.time(n)).unwrap();
    assert!((tr.values[n] - exact).norm() < 1e-2 * exact.norm());
}

#[test]
fn graded_and_uniform_agree_on_smooth_runs() {
    let m = DeltaModel::nonlinear(Dim::Three, 0.5, 1.0).unwrap();
    let d = InitialDatum::Green { charge: c(0.5, 0.0), lambda: 1.0, regular: Some(GaussianPart { amplitude: c(0.2, 0.0), width: 1.0 }) };
    let uni = solve_nonlinear(m, &d, 0.5, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    let cfg = GradedConfig { h_max: 1e-3, ..GradedConfig::default() };
    let gr = solve_graded(m, &d, 0.5, &cfg).unwrap();
    assert!(uni.blown_up.is_none() && gr.blown_up.is_none());
    let end_u = uni.values[uni.len() - 1];
    let end_g = gr.values[gr.len() - 1];
    assert!((end_u - end_g).norm() < 1e-3 * end_u.norm());
    assert!(solve_graded(DeltaModel::linear(Dim::Two, 0.0).unwrap(), &d, 0.5, &cfg).is_err());
}

#[test]
fn focusing_blowup_is_flagged() {
    let m = DeltaModel::nonlinear(Dim::One, -1.0, 2.0).unwrap();
    let tr = solve_nonlinear(m, &InitialDatum::gaussian(1.0, 1.0), 1.0, 1e-3, DEFAULT_BLOWUP_GUARD).unwrap();
    let b = tr.blown_up.expect("amplitude one collapses before t = 1");
    assert!(b.last_time < 0.3);
}

#[test]
fn constant_law_hook_reproduces_linear_solve() {
    let g = InitialDatum::gaussian(1.0, 1.0);
    for d in [Dim::One, Dim::Two, Dim::Three] {
        let lin = DeltaModel::linear(d, 0.4).unwrap();
        let nl = DeltaModel::nonlinear(d, 0.4, 1.0).unwrap();
        let a = solve_linear(lin, &g, 0.2, 1e-2).unwrap();
        let b = solve_with_law(nl, &ConstantLaw(0.4), &g, 0.2, 1e-2, f64::INFINITY).unwrap();
        assert_eq!(a.values, b.values);
    }
}

#[test]
fn step_must_divide_the_horizon() {
    let m = DeltaModel::linear(Dim::One, 0.0).unwrap();
    assert!(matches!(solve_linear(m, &InitialDatum::gaussian(1.0, 1.0), 1.0, 0.3), Err(Error::Domain { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn defocusing_d1_charge_stays_below_free_bound(amp in 0.1f64..2.0, width in 0.5f64..2.0) {
        let m = DeltaModel::nonlinear(Dim::One, 1.0, 1.0).unwrap();
        let g = InitialDatum::gaussian(amp, width);
        let tr = solve_nonlinear(m, &g, 0.5, 1e-2, DEFAULT_BLOWUP_GUARD).unwrap();
        prop_assert!(tr.blown_up.is_none());
        // H¹ ⊂ L^∞ in d = 1 and both mass and energy are bounded by the data
        let mass = g.mass(Dim::One).unwrap();
        let energy = 0.5 * g.gradient_norm_sq_1d().unwrap() + 0.25 * amp.powi(4);
        let bound = (mass * 2.0 * energy).sqrt().sqrt() * 2f64.sqrt();
        for v in &tr.values {
            prop_assert!(v.norm() <= bound * 1.01);
        }
    }

    #[test]
    fn zero_alpha_in_d3_gives_the_scaled_forcing(amp in -2.0f64..2.0, width in 0.3f64..3.0) {
        let g = InitialDatum::gaussian(amp, width);
        let m = DeltaModel::linear(Dim::Three, 0.0).unwrap();
        let tr = solve_linear(m, &g, 0.1, 1e-2).unwrap();
        let f = forcing(&g, Dim::Three, 0.1, 1e-2).unwrap();
        for (q, f) in tr.values.iter().zip(&f) {
            prop_assert!((q - f * m_const(Dim::Three)).norm() <= 1e-14 * f.norm().max(1e-300) * 10.0);
        }
    }
}
