//! Acceptance checks. Each criterion runs a fixed scenario, compares against an
//! oracle and reports the measured discrepancies next to their tolerances.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{bound_mass, bound_state, critical_mass};
use crate::approx1d::{compare_to_delta, ComparisonConfig, PotentialProfile};
use crate::charge::{solve_graded, solve_linear, solve_nonlinear, ChargeTrajectory, GradedConfig, DEFAULT_BLOWUP_GUARD};
use crate::datum::{GaussianPart, InitialDatum};
use crate::error::Result;
use crate::field::{
    blowup_rate_fit, dichotomy_eta, energy, mass, moment_of_inertia, reconstruct, virial_rhs, virial_rhs_derived,
    SpatialGrid,
};
use crate::linear_delta::{
    eigenstate_norm_const, eigenvalue, quadratic_form, ClosedTerm, DecomposedState, DeltaModel, RegularPart,
};
use crate::quad;
use crate::specfun::{ln_volterra_kernel, EULER_GAMMA};
use crate::Dim;

/// Tolerance profile: `Strict` divides every tolerance by ten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Default,
    Strict,
}

impl Profile {
    fn tol(self, t: f64) -> f64 {
        match self {
            Profile::Default => t,
            Profile::Strict => 0.1 * t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
    Below,
}

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub passed: bool,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, bound, kind: Bound::AtMost, passed: value <= bound }
    }

    pub fn at_least(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, bound, kind: Bound::AtLeast, passed: value >= bound }
    }

    pub fn below(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, bound, kind: Bound::Below, passed: value < bound }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Below => "<",
        };
        write!(f, "{}={:.3e} ({} {:.1e})", self.label, self.value, op, self.bound)
    }
}

/// Result of one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn failed(id: &str, title: &str, err: impl fmt::Display) -> Self {
        Self { id: id.into(), title: title.into(), checks: Vec::new(), note: Some(format!("error: {err}")) }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{}] {}", self.id, self.title)?;
        for c in &self.checks {
            write!(f, "; {c}")?;
        }
        if let Some(n) = &self.note {
            write!(f, " -- {n}")?;
        }
        Ok(())
    }
}

/// Identifiers accepted by [`run`], in suite order.
pub const CRITERIA: [&str; 12] = ["1", "2", "3", "4", "5", "6", "7", "7d", "8", "9", "10", "11"];

/// Runs the named criteria in the given order.
pub fn run(ids: &[&str], profile: Profile) -> Vec<Outcome> {
    ids.iter().map(|id| criterion(id, profile)).collect()
}

pub fn run_all(profile: Profile) -> Vec<Outcome> {
    run(&CRITERIA, profile)
}

pub fn criterion(id: &str, p: Profile) -> Outcome {
    let (title, res) = match id {
        "1" => ("spectrum closed forms and eigenstate quadratic form", spectrum(p)),
        "2" => ("linear propagation of the d=1 eigenstate", linear_propagation(p)),
        "3" => ("standing-wave stationarity", stationarity(p)),
        "4" => ("defocusing conservation", conservation(p)),
        "5" => ("critical-mass identity", critical_mass_identity(p)),
        "6" => ("exact blow-up tracking", blowup_tracking(p)),
        "7" => ("virial identity, 8E0 + g", virial(p, false)),
        "7d" => ("virial identity, 16E0 + g", virial(p, true)),
        "8" => ("lambda-independence in d=3", lambda_independence(p)),
        "9" => ("point-limit convergence", point_limit(p)),
        "10" => ("d=2 kernel and eigenstate phase", d2_kernel(p)),
        "11" => ("dichotomy functional at the bound state", dichotomy(p)),
        _ => ("unknown criterion", Err(crate::Error::Unsupported(format!("no criterion {id:?}")))),
    };
    match res {
        Ok((checks, note)) => Outcome { id: id.into(), title: title.into(), checks, note },
        Err(e) => Outcome::failed(id, title, e),
    }
}

type Measured = Result<(Vec<Check>, Option<String>)>;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// max_n |q(t_n) − q(0) e^{iνt_n}| / |q(0)|.
fn phase_error(traj: &ChargeTrajectory, nu: f64) -> f64 {
    let q0 = traj.values[0];
    (0..traj.len())
        .map(|n| (traj.values[n] - q0 * Complex64::from_polar(1.0, nu * traj.time(n))).norm())
        .fold(0.0, f64::max)
        / q0.norm()
}

fn spectrum(p: Profile) -> Measured {
    let mut ev_err = 0.0f64;
    let mut existence_mismatch = 0.0f64;
    let mut qf_err = 0.0f64;
    let grids = [(Dim::One, -5.0, 5.0), (Dim::Two, -1.0, 1.0), (Dim::Three, -1.0, 1.0)];
    for (d, a, b) in grids {
        for alpha in linspace(a, b, 50) {
            let exact = match d {
                Dim::One => (alpha < 0.0).then(|| -alpha * alpha / 4.0),
                Dim::Two => Some(-4.0 * (-4.0 * PI * alpha - 2.0 * EULER_GAMMA).exp()),
                Dim::Three => (alpha < 0.0).then(|| -16.0 * PI * PI * alpha * alpha),
            };
            match (eigenvalue(d, alpha), exact) {
                (Some(l), Some(e)) => {
                    ev_err = ev_err.max(rel(l, e));
                    let model = DeltaModel::linear(d, alpha)?;
                    let qf = quadratic_form(&DecomposedState::eigenstate(&model)?, &model)?;
                    qf_err = qf_err.max(rel(qf, e));
                }
                (None, None) => {}
                _ => existence_mismatch = 1.0,
            }
        }
    }
    Ok((
        vec![
            Check::at_most("eigenvalue_rel_err", ev_err, p.tol(1e-12)),
            Check::at_most("existence_mismatch", existence_mismatch, 0.0),
            Check::at_most("quadratic_form_rel_err", qf_err, p.tol(1e-6)),
        ],
        None,
    ))
}

fn linear_propagation(p: Profile) -> Measured {
    let model = DeltaModel::linear(Dim::One, -2.0)?;
    let lambda = -eigenvalue(Dim::One, -2.0).expect("bound state exists");
    let datum = InitialDatum::Green {
        charge: Complex64::new(eigenstate_norm_const(Dim::One, lambda)?, 0.0),
        lambda,
        regular: None,
    };
    let trajs = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&h| solve_linear(model, &datum, 1.0, h))
        .collect::<Result<Vec<_>>>()?;
    let err = phase_error(&trajs[2], lambda);
    // differences sampled on the coarsest grid
    let diff = |a: &ChargeTrajectory, sa: usize, b: &ChargeTrajectory, sb: usize| {
        (0..trajs[0].len()).map(|n| (a.values[sa * n] - b.values[sb * n]).norm()).fold(0.0, f64::max)
    };
    let e12 = diff(&trajs[0], 1, &trajs[1], 2);
    let e23 = diff(&trajs[1], 2, &trajs[2], 4);
    let order = (e12 / e23).log2();
    Ok((
        vec![
            Check::at_most("phase_rel_err", err, p.tol(1e-4)),
            Check::at_least("self_convergence_order", order, 1.5),
        ],
        None,
    ))
}

fn stationarity(p: Profile) -> Measured {
    let cases = [(Dim::One, -1.0, linspace(-5.0, 5.0, 201)), (Dim::Three, -1.0 / (4.0 * PI), linspace(0.05, 5.0, 100))];
    let mut checks = Vec::new();
    for (d, beta, xs) in cases {
        let state = bound_state(d, beta, 1.0, 1.0)?;
        let model = DeltaModel::nonlinear(d, beta, 1.0)?;
        let datum = InitialDatum::BoundState { state, phase: 0.0 };
        let traj = solve_nonlinear(model, &datum, 1.0, 1e-3, DEFAULT_BLOWUP_GUARD)?;
        checks.push(Check::at_most(format!("d{d}_phase_rel_err"), phase_error(&traj, state.omega), p.tol(1e-3)));
        let grid = SpatialGrid { points: xs.clone(), weights: vec![0.0; xs.len()], tail_from: None };
        let snap = reconstruct(&traj, &datum, 0.5, grid)?;
        let mut sup = 0.0f64;
        for (x, v) in xs.iter().zip(&snap.values) {
            sup = sup.max((v.norm() - state.profile(x.abs())?).abs());
        }
        checks.push(Check::at_most(format!("d{d}_profile_sup_err"), sup, p.tol(1e-3)));
    }
    Ok((checks, None))
}

fn conservation(p: Profile) -> Measured {
    let model = DeltaModel::nonlinear(Dim::One, 1.0, 1.0)?;
    let datum = InitialDatum::gaussian(1.0, 1.0);
    let traj = solve_nonlinear(model, &datum, 1.0, 1e-3, DEFAULT_BLOWUP_GUARD)?;
    if traj.blown_up.is_some() {
        return Ok((vec![Check::at_most("blown_up", 1.0, 0.0)], None));
    }
    let mut masses = Vec::new();
    let mut energies = Vec::new();
    for t in linspace(0.0, 1.0, 11) {
        let s = reconstruct(&traj, &datum, t, SpatialGrid::line(40.0, 0.5, 16))?;
        masses.push(mass(&s));
        energies.push(energy(&s, &model, 1.0)?);
    }
    let drift = |v: &[f64]| v.iter().map(|x| rel(*x, v[0])).fold(0.0, f64::max);
    Ok((
        vec![
            Check::at_most("mass_drift", drift(&masses), p.tol(1e-4)),
            Check::at_most("energy_drift", drift(&energies), p.tol(1e-3)),
        ],
        None,
    ))
}

fn critical_mass_identity(p: Profile) -> Measured {
    let mut err = 0.0f64;
    for d in [Dim::One, Dim::Three] {
        for beta in linspace(-5.0, -0.1, 20) {
            let mc = critical_mass(d, beta).expect("critical mass exists for beta < 0");
            for omega in logspace(1e-2, 1e2, 20) {
                err = err.max(rel(bound_mass(&bound_state(d, beta, 1.0, omega)?), mc));
            }
        }
    }
    Ok((vec![Check::at_most("mass_rel_err", err, p.tol(1e-12))], None))
}

fn blowup_tracking(p: Profile) -> Measured {
    let state = bound_state(Dim::One, -1.0, 1.0, 1.0)?;
    let model = DeltaModel::nonlinear(Dim::One, -1.0, 1.0)?;
    let datum = InitialDatum::Pseudoconformal { state, phase: 0.0, blowup_time: 1.0 };
    let cfg = GradedConfig { h_max: 1e-4, max_rotation: 2.5e-3, max_growth: 2.5e-3, ..GradedConfig::default() };
    let traj = solve_graded(model, &datum, 0.98, &cfg)?;
    let fit = blowup_rate_fit(&traj, (0.5, 0.95))?;
    Ok((
        vec![
            Check::at_most("exponent_dev", (fit.exponent + 0.5).abs(), p.tol(0.05)),
            Check::at_most("t_est_dev", (fit.t_est - 1.0).abs(), p.tol(0.01)),
        ],
        Some(format!("graded mesh, {} steps, exponent {:.4}, T {:.5}", traj.len(), fit.exponent, fit.t_est)),
    ))
}

fn virial(p: Profile, derived: bool) -> Measured {
    let model = DeltaModel::nonlinear(Dim::One, -1.0, 2.0)?;
    // amplitude 1 blows up near t = 0.16; 0.7 stays regular on [0, 1]
    let datum = InitialDatum::gaussian(0.7, 1.0);
    let q0 = datum.initial_charge(Dim::One)?.norm();
    let e0 = 0.5 * datum.gradient_norm_sq_1d()? - q0.powi(6) / 6.0;
    let traj = solve_nonlinear(model, &datum, 1.0, 1e-3, DEFAULT_BLOWUP_GUARD)?;
    let delta = 0.02;
    let moment = |t: f64| -> Result<f64> { Ok(moment_of_inertia(&reconstruct(&traj, &datum, t, SpatialGrid::line(40.0, 0.5, 16))?)) };
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let t = 0.08 * k as f64;
        let m2 = (moment(t + delta)? - 2.0 * moment(t)? + moment(t - delta)?) / (delta * delta);
        let q = traj.values[traj.index_of(t).expect("grid time")];
        let rhs = if derived { virial_rhs_derived(e0, q, &model)? } else { virial_rhs(e0, q, &model)? };
        worst = worst.max(rel(m2, rhs));
    }
    let note = (!derived).then(|| "the stated factor 8 on E0 disagrees with direct differentiation (16)".to_string());
    Ok((vec![Check::at_most("max_rel_err", worst, p.tol(1e-2))], note))
}

fn lambda_independence(p: Profile) -> Measured {
    let model = DeltaModel::nonlinear(Dim::Three, 1.0, 1.0)?;
    let datum = InitialDatum::Green {
        charge: Complex64::new(1.0, 0.0),
        lambda: 1.0,
        regular: Some(GaussianPart { amplitude: Complex64::new(0.5, 0.0), width: 1.0 }),
    };
    let traj = solve_nonlinear(model, &datum, 0.5, 1e-3, DEFAULT_BLOWUP_GUARD)?;
    let snap = reconstruct(&traj, &datum, 0.5, SpatialGrid::radial(30.0, 0.5, 16))?;
    let e_rel = rel(energy(&snap, &model, 2.0)?, energy(&snap, &model, 1.0)?);

    let lm = DeltaModel::linear(Dim::Three, -0.1)?;
    let st = DecomposedState {
        lambda: 1.0,
        singular: Complex64::new(1.0, 0.3),
        regular: RegularPart::Closed { terms: vec![ClosedTerm::Gaussian { amp: Complex64::new(0.4, 0.0), width: 1.0 }] },
    };
    let q1 = quadratic_form(&st, &lm)?;
    let q2 = quadratic_form(&st.redecompose(Dim::Three, 2.0)?, &lm)?;
    Ok((
        vec![
            Check::at_most("energy_rel_diff", e_rel, p.tol(1e-6)),
            Check::at_most("quadratic_form_rel_diff", rel(q2, q1), p.tol(1e-8)),
        ],
        None,
    ))
}

// the ordering test has no tolerance to scale
fn point_limit(_: Profile) -> Measured {
    let start = Instant::now();
    let rows = compare_to_delta(
        &PotentialProfile::gaussian(-1.0),
        &[0.4, 0.2, 0.1, 0.05],
        0.5,
        &InitialDatum::gaussian(1.0, 1.0),
        0.5,
        &ComparisonConfig::default(),
    )?;
    let elapsed = start.elapsed().as_secs_f64();
    let ratio = rows.windows(2).map(|w| w[1].sup_h1_error / w[0].sup_h1_error).fold(0.0, f64::max);
    let errs: Vec<String> = rows.iter().map(|r| format!("{:.3e}", r.sup_h1_error)).collect();
    Ok((
        vec![
            Check::below("max_successive_ratio", ratio, 1.0),
            Check::at_most("runtime_s", elapsed, 600.0),
        ],
        Some(format!("errors [{}]", errs.join(", "))),
    ))
}

/// ln K2(t) from K2(t) = e^t + ∫_0^∞ e^{−tx} / (π² + ln² x) dx, which needs
/// no Gamma function.
pub fn ln_volterra_kernel_oracle(t: f64) -> f64 {
    let f = |v: f64| (v - t * v.exp()).exp() / (PI * PI + v * v);
    let hi = (60.0 / t).ln();
    let mut rest = 0.0;
    let mut a = -60.0;
    while a < hi {
        let b = (a + 2.0).min(hi);
        rest += quad::adaptive(f, a, b, 0.0, 1e-15);
        a = b;
    }
    t + (rest * (-t).exp()).ln_1p()
}

fn d2_kernel(p: Profile) -> Measured {
    let mut kerr = 0.0f64;
    for t in logspace(1e-4, 1e3, 50) {
        kerr = kerr.max((ln_volterra_kernel(t)? - ln_volterra_kernel_oracle(t)).abs());
    }
    let model = DeltaModel::linear(Dim::Two, 0.0)?;
    let ell = eigenvalue(Dim::Two, 0.0).expect("d = 2 always has an eigenvalue");
    let lambda = -ell;
    let datum = InitialDatum::Green {
        charge: Complex64::new(eigenstate_norm_const(Dim::Two, lambda)?, 0.0),
        lambda,
        regular: None,
    };
    let traj = solve_linear(model, &datum, 0.5, 1e-3)?;
    Ok((
        vec![
            Check::at_most("kernel_rel_err", kerr, p.tol(1e-8)),
            Check::at_most("phase_rel_err", phase_error(&traj, -ell), p.tol(1e-2)),
        ],
        Some("kernel compared as |ln K2 - ln oracle|, since K2(1e3) exceeds f64".into()),
    ))
}

fn dichotomy(p: Profile) -> Measured {
    let state = bound_state(Dim::One, -1.0, 2.0, 1.0)?;
    let model = DeltaModel::nonlinear(Dim::One, -1.0, 2.0)?;
    let eta = dichotomy_eta(&InitialDatum::BoundState { state, phase: 0.0 }, &model)?;
    Ok((vec![Check::at_most("eta_minus_one", (eta - 1.0).abs(), p.tol(1e-12))], None))
}
