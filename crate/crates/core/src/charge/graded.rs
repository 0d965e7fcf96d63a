//! Abel-kernel product integration on a nonuniform time mesh. The step follows
//! the rotation and growth of q, so the mesh refines toward a blow-up time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::forcing::pointwise;
use super::{coupling_const, unresolved, BlowUp, BlowUpReason, ChargeTrajectory, ConstantLaw, CouplingLaw, PowerLaw, Step};
use crate::datum::InitialDatum;
use crate::error::{domain, Error, Result};
use crate::linear_delta::{Coupling, DeltaModel};
use crate::Dim;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradedConfig {
    pub h_max: f64,
    pub h_min: f64,
    /// largest phase increment of q per step (radians)
    pub max_rotation: f64,
    /// largest relative change of |q| per step
    pub max_growth: f64,
    pub guard: f64,
}

impl Default for GradedConfig {
    fn default() -> Self {
        Self { h_max: 1e-3, h_min: 1e-9, max_rotation: 5e-3, max_growth: 5e-3, guard: super::DEFAULT_BLOWUP_GUARD }
    }
}

/// Weights (left node t_j, right node t_{j+1}) of ∫_{t_j}^{t_{j+1}} (t − s)^{−1/2} · hat ds.
fn abel_cell(t: f64, tj: f64, tj1: f64) -> (f64, f64) {
    let (a, b) = ((t - tj).sqrt(), (t - tj1).max(0.0).sqrt());
    let dt = tj1 - tj;
    let sum = a + b;
    let i0 = 2.0 * dt / sum;
    let right = (2.0 / 3.0) * dt * (2.0 * a + b) / (sum * sum);
    (i0 - right, right)
}

/// Solves the charge equation on a mesh adapted to q. Only d = 1, 3 with a
/// forcing available in closed form.
pub fn solve_graded(model: DeltaModel, datum: &InitialDatum, t_final: f64, cfg: &GradedConfig) -> Result<ChargeTrajectory> {
    let d = model.dim;
    if d == Dim::Two {
        return Err(Error::Unsupported("graded meshes use the Abel kernel (d = 1, 3)".into()));
    }
    if !(t_final > 0.0 && cfg.h_max > 0.0 && cfg.h_min > 0.0 && cfg.h_min <= cfg.h_max) {
        return Err(domain("solve_graded", "need T > 0 and 0 < h_min ≤ h_max"));
    }
    if !(cfg.max_rotation > 0.0 && cfg.max_growth > 0.0) {
        return Err(domain("solve_graded", "step controls must be positive"));
    }
    let law: Box<dyn CouplingLaw> = match model.coupling {
        Coupling::Linear { alpha } => Box::new(ConstantLaw(alpha)),
        Coupling::Nonlinear { beta, sigma } => Box::new(PowerLaw { beta, sigma }),
    };
    let c0 = coupling_const(d, 0.0);
    let c1 = coupling_const(d, 1.0) - c0;
    let c_of = |r: f64| c0 + c1 * law.alpha(r);

    let f0 = pointwise(datum, d, 0.0)?;
    if f0.norm() > cfg.guard {
        return Err(domain("solve_graded", "initial charge exceeds the blow-up guard"));
    }
    let mut times = vec![0.0];
    let mut q = vec![f0];
    let mut y = vec![c_of(f0.norm()) * f0];
    let mut forcing = vec![f0];
    let mut blown_up = None;
    let mut h = cfg.h_max;
    let mut peak = f0.norm();
    while times[times.len() - 1] < t_final {
        let n = times.len();
        let last = times[n - 1];
        let t = if t_final - last <= h * (1.0 + 1e-9) { t_final } else { last + h };
        let f = pointwise(datum, d, t)?;
        let mut s = Complex64::new(0.0, 0.0);
        let mut w_last = 0.0;
        for j in 0..n {
            let tj1 = if j + 1 < n { times[j + 1] } else { t };
            let (l, r) = abel_cell(t, times[j], tj1);
            s += l * y[j];
            if j + 1 < n {
                s += r * y[j + 1];
            } else {
                w_last = r;
            }
        }
        let rhs = f - s;
        let step = Step { law: law.as_ref(), c0, c1, w0: w_last };
        let target = rhs.norm();
        let r = if law.is_constant() {
            target / step.denominator(0.0).norm()
        } else if target == 0.0 {
            0.0
        } else {
            let prev = q[n - 1].norm();
            match step.solve_modulus(target, prev, cfg.guard, n)? {
                Some(r) => r,
                None => {
                    blown_up = Some(BlowUp { index: n, last_time: last, reason: BlowUpReason::Guard });
                    break;
                }
            }
        };
        let den = step.denominator(r);
        if den.norm() == 0.0 {
            return Err(Error::Degenerate { step: n });
        }
        let qn = rhs / den;
        if qn.norm() > cfg.guard || !qn.re.is_finite() || !qn.im.is_finite() {
            blown_up = Some(BlowUp { index: n, last_time: last, reason: BlowUpReason::Guard });
            break;
        }
        let prev = q[n - 1];
        if !law.is_constant() && unresolved(qn, prev, peak) {
            blown_up = Some(BlowUp { index: n, last_time: last, reason: BlowUpReason::Unresolved });
            break;
        }
        // next step from the observed rotation and growth
        let dt = t - last;
        if prev.norm() > 0.0 && qn.norm() > 0.0 {
            // measured against a floor of 0.1 max|q| so that a passage near
            // q = 0 does not stall the mesh
            let scale = prev.norm().max(0.1 * peak);
            let rot = (qn / prev).arg().abs() * (prev.norm() / scale);
            let grow = (qn.norm() - prev.norm()).abs() / scale;
            let ratio = (cfg.max_rotation / rot.max(1e-300)).min(cfg.max_growth / grow.max(1e-300));
            let want = dt * ratio.clamp(0.5, 1.5);
            if want < cfg.h_min && t < t_final {
                return Err(Error::Resolution(format!("step size fell below h_min = {} at t = {t}", cfg.h_min)));
            }
            h = want.min(cfg.h_max);
        }
        peak = peak.max(qn.norm());
        times.push(t);
        q.push(qn);
        y.push(c_of(qn.norm()) * qn);
        forcing.push(f);
    }
    Ok(ChargeTrajectory { model, h: cfg.h_max, guard: cfg.guard, times, values: q, forcing, blown_up })
}
