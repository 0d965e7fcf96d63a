//! Product-integration solver for the linear and nonlinear charge equations
//!
//!   q(t) + ∫_0^t K(t−s) c_d(α(q(s))) q(s) ds = m_d f_d(t)
//!
//! on a uniform grid, with y = c_d(α(q))q interpolated piecewise linearly.
//! In d = 1, 3 the first steps come from a refined solve and the rule carries
//! starting weights for the s^{1/2} behaviour of y at the origin.

mod forcing;
mod graded;
pub mod weights;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::datum::InitialDatum;
use crate::error::{domain, Error, Result};
use crate::linear_delta::{kappa, Coupling, DeltaModel};
use crate::specfun::{volterra_kernel, EULER_GAMMA};
use crate::Dim;

pub use graded::{solve_graded, GradedConfig};
pub use weights::{cell_weights, CellWeights};

/// Default modulus threshold flagging blow-up.
pub const DEFAULT_BLOWUP_GUARD: f64 = 1e6;
const MAX_ROOT_ITERATIONS: usize = 200;

pub fn kernel(d: Dim, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("kernel", format!("t = {t} must be positive")));
    }
    match d {
        Dim::One | Dim::Three => Ok(1.0 / t.sqrt()),
        Dim::Two => volterra_kernel(t),
    }
}

/// c_d(α).
pub fn coupling_const(d: Dim, alpha: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, 0.25 * PI);
    match d {
        Dim::One => e * alpha / (2.0 * PI.sqrt()),
        Dim::Two => 4.0 * PI * Complex64::new(alpha + (0.5f64.ln() + EULER_GAMMA) / (2.0 * PI), -0.125),
        Dim::Three => 4.0 * PI.sqrt() * e * alpha,
    }
}

/// m_d.
pub fn m_const(d: Dim) -> Complex64 {
    match d {
        Dim::One => Complex64::new(1.0, 0.0),
        Dim::Two => Complex64::new(4.0 * PI, 0.0),
        Dim::Three => coupling_const(Dim::Three, 1.0),
    }
}

/// The map r = |q| ↦ α used inside c_d; a constant law gives the linear equation.
pub trait CouplingLaw {
    fn alpha(&self, r: f64) -> f64;
    fn dalpha(&self, r: f64) -> f64;
    fn is_constant(&self) -> bool {
        false
    }
}

pub struct ConstantLaw(pub f64);

impl CouplingLaw for ConstantLaw {
    fn alpha(&self, _: f64) -> f64 {
        self.0
    }
    fn dalpha(&self, _: f64) -> f64 {
        0.0
    }
    fn is_constant(&self) -> bool {
        true
    }
}

/// α = β r^{2σ}.
pub struct PowerLaw {
    pub beta: f64,
    pub sigma: f64,
}

impl CouplingLaw for PowerLaw {
    fn alpha(&self, r: f64) -> f64 {
        self.beta * r.powf(2.0 * self.sigma)
    }
    fn dalpha(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        2.0 * self.sigma * self.beta * r.powf(2.0 * self.sigma - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowUpReason {
    /// |q| exceeded the guard
    Guard,
    /// one step changed q by more than a quarter of max |q|: the grid no
    /// longer resolves the solution (typically just before blow-up)
    Unresolved,
}

/// Where the run was stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUp {
    /// first index not stored
    pub index: usize,
    /// last resolved time
    pub last_time: f64,
    pub reason: BlowUpReason,
}

/// Step change of q beyond which a trajectory counts as unresolved.
pub(crate) fn unresolved(qn: Complex64, prev: Complex64, peak: f64) -> bool {
    (qn - prev).norm() > 0.25 * peak.max(qn.norm())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChargeTrajectory {
    pub model: DeltaModel,
    pub h: f64,
    pub guard: f64,
    /// t_n; n h on a uniform grid
    pub times: Vec<f64>,
    /// q_n at t_n
    pub values: Vec<Complex64>,
    /// m_d f_d(t_n)
    pub forcing: Vec<Complex64>,
    pub blown_up: Option<BlowUp>,
}

impl ChargeTrajectory {
    pub fn dim(&self) -> Dim {
        self.model.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, n: usize) -> f64 {
        self.times[n]
    }

    pub fn is_uniform(&self) -> bool {
        self.times.iter().enumerate().all(|(n, &t)| (t - n as f64 * self.h).abs() <= 1e-9 * self.h.max(t))
    }

    pub fn t_last(&self) -> f64 {
        self.time(self.values.len().saturating_sub(1))
    }

    /// Grid index of time t, if t lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let n = self.times.partition_point(|&s| s < t);
        [n.checked_sub(1), Some(n)]
            .into_iter()
            .flatten()
            .filter(|&k| k < self.values.len())
            .find(|&k| (self.times[k] - t).abs() <= 1e-9 * self.h.max(t.abs()))
    }

    /// α(q_n).
    pub fn alpha(&self, n: usize) -> f64 {
        self.model.alpha_at(self.values[n].norm())
    }

    /// κ_d(α(q_n)) q_n, the source of the Duhamel memory term.
    pub fn source(&self, n: usize) -> Complex64 {
        kappa(self.dim(), self.alpha(n)) * self.values[n]
    }
}

pub(crate) struct Step<'a> {
    pub(crate) law: &'a dyn CouplingLaw,
    pub(crate) c0: Complex64,
    pub(crate) c1: Complex64,
    pub(crate) w0: f64,
}

impl Step<'_> {
    pub(crate) fn denominator(&self, r: f64) -> Complex64 {
        1.0 + self.w0 * (self.c0 + self.c1 * self.law.alpha(r))
    }

    fn modulus_residual(&self, r: f64, target: f64) -> (f64, f64) {
        let den = self.denominator(r);
        let a = den.norm();
        let dden = self.w0 * self.c1 * self.law.dalpha(r);
        let da = if a > 0.0 { (den.conj() * dden).re / a } else { 0.0 };
        (r * a - target, a + r * da)
    }

    /// Root of r|D(r)| = target nearest the predictor; None when it exceeds the guard.
    pub(crate) fn solve_modulus(&self, target: f64, predictor: f64, guard: f64, step: usize) -> Result<Option<f64>> {
        let f = |r: f64| self.modulus_residual(r, target).0;
        let mut p = predictor.max(1e-300).min(guard);
        if !(p > 0.0) {
            p = 1e-300;
        }
        let (mut lo, mut hi);
        if f(p) < 0.0 {
            lo = p;
            hi = p;
            loop {
                hi = (hi * 1.5).max(hi + 1e-12);
                if hi >= guard {
                    if f(guard) < 0.0 {
                        return Ok(None);
                    }
                    hi = guard;
                    break;
                }
                if f(hi) >= 0.0 {
                    break;
                }
                lo = hi;
            }
        } else {
            hi = p;
            lo = p;
            loop {
                lo /= 1.5;
                if lo < 1e-300 {
                    lo = 0.0;
                    break;
                }
                if f(lo) < 0.0 {
                    break;
                }
                hi = lo;
            }
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..MAX_ROOT_ITERATIONS {
            let (g, dg) = self.modulus_residual(r, target);
            if g == 0.0 {
                return Ok(Some(r));
            }
            if g < 0.0 {
                lo = r;
            } else {
                hi = r;
            }
            let newton = r - g / dg;
            let next = if dg > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - r).abs() <= 4.0 * f64::EPSILON * r || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(Some(next));
            }
            r = next;
        }
        Err(Error::RootSolve { step, iterations: MAX_ROOT_ITERATIONS })
    }
}

/// Starting weights on y(0), y(t1), y(t2) added to the Abel product rule so
/// that it stays exact for 1 and s and becomes exact for s^{1/2}, the leading
/// singular term of the charge. `rule` is the uncorrected rule applied to s^{1/2}
/// at time t. Without t2 (first step) exactness for s is dropped.
pub(crate) fn sqrt_start_weights(t1: f64, t2: Option<f64>, t: f64, rule: f64) -> [f64; 3] {
    let err = 0.5 * PI * t - rule;
    match t2 {
        None => {
            let w1 = err / t1.sqrt();
            [-w1, w1, 0.0]
        }
        Some(t2) => {
            let w2 = err / (t2.sqrt() - t2 / t1.sqrt());
            let w1 = -w2 * t2 / t1;
            [-w1 - w2, w1, w2]
        }
    }
}

/// In d = 1, 3 the first START_STEPS steps come from a solve with steps
/// refined by START_REFINEMENT.
const START_STEPS: usize = 3;
const START_REFINEMENT: usize = 16;

/// Solves the charge equation for an arbitrary coupling law; this is the
/// single code path behind [`solve_linear`] and [`solve_nonlinear`].
pub fn solve_with_law(
    model: DeltaModel,
    law: &dyn CouplingLaw,
    datum: &InitialDatum,
    t_final: f64,
    h: f64,
    guard: f64,
) -> Result<ChargeTrajectory> {
    solve_uniform(model, law, datum, t_final, h, guard, true)
}

fn solve_uniform(
    model: DeltaModel,
    law: &dyn CouplingLaw,
    datum: &InitialDatum,
    t_final: f64,
    h: f64,
    guard: f64,
    refine_start: bool,
) -> Result<ChargeTrajectory> {
    if !(h > 0.0 && t_final > 0.0) {
        return Err(domain("solve", "T and h must be positive"));
    }
    if !(guard > 0.0) {
        return Err(domain("solve", "blow-up guard must be positive"));
    }
    let n_steps = (t_final / h).round() as usize;
    if ((n_steps as f64) * h - t_final).abs() > 1e-9 * t_final {
        return Err(domain("solve", format!("h = {h} does not divide T = {t_final}")));
    }
    let d = model.dim;
    let w = cell_weights(d, h, n_steps.max(1))?;
    let forcing = forcing::scaled_forcing(datum, d, &w, n_steps)?;
    let c0 = coupling_const(d, 0.0);
    let step = Step { law, c0, c1: coupling_const(d, 1.0) - c0, w0: w.left[0] };
    let node: Vec<f64> = (0..n_steps.max(1)).map(|k| w.interior(k)).collect();
    let abel = d != Dim::Two;
    let root: Vec<f64> = (0..=n_steps).map(|j| (j as f64 * h).sqrt()).collect();

    let mut q: Vec<Complex64> = Vec::with_capacity(n_steps + 1);
    let mut y: Vec<Complex64> = Vec::with_capacity(n_steps + 1);
    let c_of = |r: f64| c0 + step.c1 * law.alpha(r);
    let mut blown_up = None;
    let mut peak = forcing[0].norm();
    q.push(forcing[0]);
    y.push(c_of(forcing[0].norm()) * forcing[0]);
    if forcing[0].norm() > guard {
        return Err(domain("solve", "initial charge exceeds the blow-up guard"));
    }
    // q ~ √t near 0, so the first steps are taken on a finer grid
    let mut first = 1;
    if abel && refine_start && n_steps > START_STEPS {
        let t0 = START_STEPS as f64 * h;
        let fine = solve_uniform(model, law, datum, t0, h / START_REFINEMENT as f64, guard, false)?;
        if fine.blown_up.is_none() {
            for k in 1..=START_STEPS {
                let qk = fine.values[k * START_REFINEMENT];
                peak = peak.max(qk.norm());
                q.push(qk);
                y.push(c_of(qk.norm()) * qk);
            }
            first = START_STEPS + 1;
        }
    }
    for n in first..=n_steps {
        // memory from nodes j < n
        let mut s = w.right[n - 1] * y[0];
        let mut rule = w.left[0] * root[n];
        for j in 1..n {
            s += node[n - j] * y[j];
            rule += node[n - j] * root[j];
        }
        let mut step = Step { w0: w.left[0], ..step };
        if abel {
            let cw = sqrt_start_weights(h, if n >= 2 { Some(2.0 * h) } else { None }, n as f64 * h, rule);
            s += cw[0] * y[0];
            match n {
                1 => step.w0 += cw[1],
                2 => {
                    s += cw[1] * y[1];
                    step.w0 += cw[2];
                }
                _ => s += cw[1] * y[1] + cw[2] * y[2],
            }
        }
        let rhs = forcing[n] - s;
        let target = rhs.norm();
        let r = if law.is_constant() {
            target / step.denominator(0.0).norm()
        } else if target == 0.0 {
            0.0
        } else {
            let last = q[n - 1].norm();
            let pred = if n >= 2 { (2.0 * last - q[n - 2].norm()).max(0.5 * last) } else { last };
            match step.solve_modulus(target, pred, guard, n)? {
                Some(r) => r,
                None => {
                    blown_up = Some(BlowUp { index: n, last_time: (n - 1) as f64 * h, reason: BlowUpReason::Guard });
                    break;
                }
            }
        };
        let den = step.denominator(r);
        if den.norm() == 0.0 {
            return Err(Error::Degenerate { step: n });
        }
        let qn = rhs / den;
        if qn.norm() > guard || !qn.re.is_finite() || !qn.im.is_finite() {
            blown_up = Some(BlowUp { index: n, last_time: (n - 1) as f64 * h, reason: BlowUpReason::Guard });
            break;
        }
        if !law.is_constant() && unresolved(qn, q[n - 1], peak) {
            blown_up = Some(BlowUp { index: n, last_time: (n - 1) as f64 * h, reason: BlowUpReason::Unresolved });
            break;
        }
        peak = peak.max(qn.norm());
        q.push(qn);
        y.push(c_of(qn.norm()) * qn);
    }
    let len = q.len();
    let mut forcing = forcing;
    forcing.truncate(len);
    let times = (0..len).map(|n| n as f64 * h).collect();
    Ok(ChargeTrajectory { model, h, guard, times, values: q, forcing, blown_up })
}

pub fn solve_linear(model: DeltaModel, datum: &InitialDatum, t_final: f64, h: f64) -> Result<ChargeTrajectory> {
    let alpha = match model.coupling {
        Coupling::Linear { alpha } => alpha,
        _ => return Err(Error::Unsupported("solve_linear needs a linear coupling".into())),
    };
    solve_with_law(model, &ConstantLaw(alpha), datum, t_final, h, f64::INFINITY)
}

pub fn solve_nonlinear(
    model: DeltaModel,
    datum: &InitialDatum,
    t_final: f64,
    h: f64,
    guard: f64,
) -> Result<ChargeTrajectory> {
    let (beta, sigma) = model.beta_sigma()?;
    solve_with_law(model, &PowerLaw { beta, sigma }, datum, t_final, h, guard)
}

/// Samples of f_d(t_n) (without the factor m_d).
pub fn forcing(datum: &InitialDatum, d: Dim, t_final: f64, h: f64) -> Result<Vec<Complex64>> {
    let n = (t_final / h).round() as usize;
    let w = cell_weights(d, h, n.max(1))?;
    let m = m_const(d);
    Ok(forcing::scaled_forcing(datum, d, &w, n)?.into_iter().map(|v| v / m).collect())
}

/// Largest residual of the continuous equation at the cell midpoints, for the
/// piecewise-linear interpolant of the computed trajectory.
pub fn interpolant_residual(traj: &ChargeTrajectory, datum: &InitialDatum) -> Result<f64> {
    let d = traj.dim();
    let n = traj.len() - 1;
    if !traj.is_uniform() {
        return Err(Error::Unsupported("the interpolant residual needs a uniform grid".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let h2 = 0.5 * traj.h;
    let w = cell_weights(d, h2, 2 * n)?;
    let f = forcing::scaled_forcing(datum, d, &w, 2 * n)?;
    let c0 = coupling_const(d, 0.0);
    let c1 = coupling_const(d, 1.0) - c0;
    let y: Vec<Complex64> = (0..=n).map(|j| (c0 + c1 * traj.alpha(j)) * traj.values[j]).collect();
    let fine = |i: usize| -> Complex64 {
        if i % 2 == 0 {
            y[i / 2]
        } else {
            0.5 * (y[i / 2] + y[i / 2 + 1])
        }
    };
    let mut worst: f64 = 0.0;
    for m in 0..n {
        let i = 2 * m + 1;
        let qi = 0.5 * (traj.values[m] + traj.values[m + 1]);
        let mem = w.integrate(|k| fine(i - k), i);
        worst = worst.max((qi + mem - f[i]).norm());
    }
    Ok(worst)
}
