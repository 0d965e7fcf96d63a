//! Duhamel reconstruction of ψ(t, x) from a charge trajectory, and the
//! observables built on it.
//!
//!   ψ(t) = U(t)ψ₀ + i ∫_0^t U(t−s) κ_d(α(q(s))) q(s) ds
//!
//! The memory term is integrated exactly against the piecewise-linear source,
//! using closed-form primitives of U_d(τ, r) and τ U_d(τ, r) in τ.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{bound_state, sigma_c};
use crate::charge::ChargeTrajectory;
use crate::datum::InitialDatum;
use crate::error::{domain, Error, Result};
use crate::linear_delta::{green, green_radial_derivative, theta, Coupling, DeltaModel};
use crate::quad::gauss_legendre;
use crate::specfun::{expint_e1, faddeeva};
use crate::Dim;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Spatial points with quadrature weights (surface factors excluded).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Half-width of a symmetric d = 1 quadrature grid, enabling the
    /// far-field tail correction.
    pub tail_from: Option<f64>,
}

fn panel_breaks(inner: f64, outer: f64, panel: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut r = inner;
    while r < 1.0f64.min(outer) {
        b.push(r);
        r *= 2.0;
    }
    let mut r = 1.0f64.min(outer);
    while r < outer - 1e-12 {
        b.push(r);
        r += panel;
    }
    b.push(outer);
    b
}

fn gl_on(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let mut p = Vec::new();
    let mut w = Vec::new();
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        for (x, wt) in gx.iter().zip(&gw) {
            p.push(0.5 * (a + b) + 0.5 * (b - a) * x);
            w.push(0.5 * (b - a) * wt);
        }
    }
    (p, w)
}

impl SpatialGrid {
    /// Uniform points on [a, b] with trapezoidal weights.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(domain("SpatialGrid::uniform", "need n ≥ 2 and b > a"));
        }
        let dx = (b - a) / (n - 1) as f64;
        let points = (0..n).map(|j| a + j as f64 * dx).collect();
        let mut weights = vec![dx; n];
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        Ok(Self { points, weights, tail_from: None })
    }

    /// Gauss-Legendre panels on [−L, 0] ∪ [0, L], graded toward the origin.
    pub fn line(half_width: f64, panel: f64, order: usize) -> Self {
        let (p, w) = gl_on(&panel_breaks(1e-3, half_width, panel), order);
        let mut points: Vec<f64> = p.iter().rev().map(|x| -x).collect();
        let mut weights: Vec<f64> = w.iter().rev().copied().collect();
        points.extend_from_slice(&p);
        weights.extend_from_slice(&w);
        Self { points, weights, tail_from: Some(half_width) }
    }

    /// Gauss-Legendre panels on (r_min, R] graded toward the origin (d = 2, 3).
    pub fn radial(outer: f64, panel: f64, order: usize) -> Self {
        let mut breaks = panel_breaks(1e-8, outer, panel);
        breaks.remove(0);
        let (points, weights) = gl_on(&breaks, order);
        Self { points, weights, tail_from: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub t: f64,
    pub dim: Dim,
    pub model: DeltaModel,
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
    /// ∂_x ψ in d = 1, ∂_r ψ in d = 2, 3
    pub gradient: Vec<Complex64>,
    pub charge_at_t: Complex64,
    /// Effective far-field source for the d = 1 tail correction.
    pub tail_source: Complex64,
}

// Remainders of the large-argument expansions, evaluated without the
// cancellation of their leading terms:
//   r1 = 1 + i√π ζ w(ζ),  r2 = 1 + 2ζ² r1,  for arg ζ = π/4
fn chirp_remainders(zeta: Complex64, w: Complex64) -> (Complex64, Complex64) {
    if zeta.norm() > 6.0 {
        let u = 1.0 / (2.0 * zeta * zeta);
        let (mut r1, mut r2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        // term_k = (2k−1)!! u^k
        let mut term = u;
        for k in 1..80 {
            let next = term * (2 * k + 1) as f64;
            r1 -= term;
            r2 -= next;
            if next.norm() < 1e-18 * r2.norm() {
                break;
            }
            term = next * u;
        }
        (r1, r2)
    } else {
        let r1 = 1.0 + I * PI.sqrt() * zeta * w;
        (r1, 1.0 + 2.0 * zeta * zeta * r1)
    }
}

// 1 − z e^z E1(z) for z on the imaginary axis, and e^z E1(z)
fn e1_remainder(z: Complex64) -> (Complex64, Complex64) {
    let g = z.exp() * expint_e1(z);
    if z.norm() > 40.0 {
        let mut s = Complex64::new(0.0, 0.0);
        let mut term = 1.0 / z;
        for k in 1..60 {
            s += term;
            let next = -term * k as f64 / z;
            if next.norm() < 1e-18 * s.norm() {
                break;
            }
            term = next;
        }
        (s, g)
    } else {
        (1.0 - z * g, g)
    }
}

/// [M0, M1, ∂_r M0, ∂_r M1] with M_j(τ) = ∫_0^τ σ^j U_d(σ, r) dσ.
fn primitives(d: Dim, tau: f64, r: f64) -> [Complex64; 4] {
    let b = 0.25 * r * r;
    let ph = Complex64::from_polar(1.0, b / tau);
    let e8 = Complex64::from_polar(1.0, 0.25 * PI);
    let sp = PI.sqrt();
    match d {
        Dim::Two => {
            let a = 1.0 / (4.0 * PI * I);
            let (rem, g) = e1_remainder(Complex64::new(0.0, -b / tau));
            let e1 = ph * g;
            [a * e1, a * tau * ph * rem, a * (-2.0 / r) * ph, a * (I * r / 2.0) * e1]
        }
        _ => {
            // erfc(z) with z = r e^{-iπ/4}/(2√τ), as e^{ib/τ} w(ζ), ζ = iz
            let zeta = Complex64::from_polar(r / (2.0 * tau.sqrt()), 0.25 * PI);
            let w = faddeeva(zeta);
            let e = ph * w;
            let (r1, r2) = chirp_remainders(zeta, w);
            let im = 2.0 * tau.sqrt() * ph * r1;
            if d == Dim::One {
                let a = (4.0 * PI * I).powf(-0.5);
                [
                    a * im,
                    a * (2.0 / 3.0) * tau.powf(1.5) * ph * r2,
                    a * I * sp * e8 * e,
                    a * (I * r / 2.0) * im,
                ]
            } else {
                let a = (4.0 * PI * I).powf(-1.5);
                [
                    a * (2.0 * sp * e8 / r) * e,
                    a * im,
                    a * (-2.0 * sp * e8 * e / (r * r) - 2.0 * ph / (r * tau.sqrt())),
                    a * I * sp * e8 * e,
                ]
            }
        }
    }
}

/// i ∫_0^{t_n} U(τ, r) g(t_n − τ) dτ and its r-derivative, g piecewise linear
/// between the trajectory times.
fn memory_at(d: Dim, times: &[f64], g: &[Complex64], n: usize, r: f64) -> (Complex64, Complex64) {
    let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut prev = [Complex64::new(0.0, 0.0); 4];
    let t_n = times[n];
    for k in 0..n {
        // cell [a, b] in τ = t_n − s, between nodes n−k and n−k−1
        let (a, bnd) = (t_n - times[n - k], t_n - times[n - k - 1]);
        let h = bnd - a;
        let cur = primitives(d, bnd, r);
        let dm0 = cur[0] - prev[0];
        let dm1 = cur[1] - prev[1];
        let dd0 = cur[2] - prev[2];
        let dd1 = cur[3] - prev[3];
        let (gl, gr) = (g[n - k], g[n - k - 1]);
        v += (gl * (bnd * dm0 - dm1) + gr * (dm1 - a * dm0)) / h;
        dv += (gl * (bnd * dd0 - dd1) + gr * (dd1 - a * dd0)) / h;
        prev = cur;
    }
    (I * v, I * dv)
}

/// Jump of ψ₀′ at the origin (d = 1), which enters the far-field tail.
fn datum_kink(datum: &InitialDatum) -> Complex64 {
    match datum {
        InitialDatum::BoundState { .. } | InitialDatum::Green { .. } => -datum.singular_part().expect("singular").0,
        InitialDatum::Pseudoconformal { state, phase, blowup_time } => {
            -Complex64::from_polar(state.q_amp * blowup_time.powf(-1.5), state.omega / blowup_time + phase)
        }
        _ => Complex64::new(0.0, 0.0),
    }
}

/// ψ(t, ·) on the given points; t must lie on the trajectory grid.
pub fn reconstruct(traj: &ChargeTrajectory, datum: &InitialDatum, t: f64, grid: SpatialGrid) -> Result<FieldSnapshot> {
    let d = traj.dim();
    let n = traj.index_of(t).ok_or_else(|| domain("reconstruct", format!("t = {t} is not a resolved grid time")))?;
    if d != Dim::One && grid.points.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Singular { op: "reconstruct", d: d.as_u8() });
    }
    let g: Vec<Complex64> = (0..=n).map(|j| traj.source(j)).collect();
    let t_n = traj.time(n);
    let rows: Vec<Result<(Complex64, Complex64)>> = grid
        .points
        .par_iter()
        .map(|&x| {
            let (f, df) = datum.free_evolution(d, t_n, x)?;
            let r = x.abs();
            let (m, dm) = if n == 0 {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            } else if r == 0.0 {
                // d = 1 origin: the derivative is two-sided; report the mean (zero memory slope)
                (memory_at(d, &traj.times, &g, n, 0.0).0, Complex64::new(0.0, 0.0))
            } else {
                memory_at(d, &traj.times, &g, n, r)
            };
            let sign = if d == Dim::One && x < 0.0 { -1.0 } else { 1.0 };
            Ok((f + m, df + sign * dm))
        })
        .collect();
    let mut values = Vec::with_capacity(rows.len());
    let mut gradient = Vec::with_capacity(rows.len());
    for row in rows {
        let (v, dv) = row?;
        values.push(v);
        gradient.push(dv);
    }
    let tail_source = if d == Dim::One { traj.source(0) + datum_kink(datum) } else { Complex64::new(0.0, 0.0) };
    Ok(FieldSnapshot {
        t: t_n,
        dim: d,
        model: traj.model,
        grid,
        values,
        gradient,
        charge_at_t: traj.values[n],
        tail_source,
    })
}

fn surface(d: Dim, r: f64) -> f64 {
    match d {
        Dim::One => 1.0,
        Dim::Two => 2.0 * PI * r,
        Dim::Three => 4.0 * PI * r * r,
    }
}

/// Far-field tails beyond |x| = L of (|ψ|², |ψ_x|², x²|ψ|²) in d = 1, from
/// ψ ≈ −(4πi)^{−1/2} 4 t^{3/2} g e^{ix²/(4t)} / x².
fn tails(s: &FieldSnapshot) -> (f64, f64, f64) {
    match (s.dim, s.grid.tail_from) {
        (Dim::One, Some(l)) => {
            let g2 = s.tail_source.norm_sqr();
            let t = s.t;
            (
                8.0 * t.powi(3) * g2 / (3.0 * PI * l.powi(3)),
                2.0 * t * g2 / (PI * l),
                8.0 * t.powi(3) * g2 / (PI * l),
            )
        }
        _ => (0.0, 0.0, 0.0),
    }
}

impl FieldSnapshot {
    fn integrate(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        self.grid
            .points
            .iter()
            .zip(&self.grid.weights)
            .enumerate()
            .map(|(i, (&x, &w))| w * surface(self.dim, x.abs()) * f(i, x))
            .sum()
    }

    /// Share of the mass in the outer tenth of the grid.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let outer = self.grid.points.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let edge = self.integrate(|i, x| if x.abs() > 0.9 * outer { self.values[i].norm_sqr() } else { 0.0 });
        let total = self.integrate(|i, _| self.values[i].norm_sqr());
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }
}

pub fn mass(s: &FieldSnapshot) -> f64 {
    s.integrate(|i, _| s.values[i].norm_sqr()) + tails(s).0
}

pub fn moment_of_inertia(s: &FieldSnapshot) -> f64 {
    s.integrate(|i, x| x * x * s.values[i].norm_sqr()) + tails(s).2
}

/// ‖∇ψ‖² (d = 1 only; in d = 2, 3 the gradient is not square integrable).
pub fn gradient_norm_sq(s: &FieldSnapshot) -> Result<f64> {
    if s.dim != Dim::One {
        return Err(Error::Unsupported("‖∇ψ‖² is finite only in d = 1".into()));
    }
    Ok(s.integrate(|i, _| s.gradient[i].norm_sqr()) + tails(s).1)
}

/// Energy of the snapshot; λ is the decomposition parameter in d = 2, 3.
pub fn energy(s: &FieldSnapshot, model: &DeltaModel, lambda: f64) -> Result<f64> {
    let q = s.charge_at_t;
    let r = q.norm();
    // α inside the point term: β|q|^{2σ}/(σ+1) for the power law
    let (alpha_e, point_1d) = match model.coupling {
        Coupling::Linear { alpha } => (alpha, 0.5 * alpha * r * r),
        Coupling::Nonlinear { beta, sigma } => {
            (beta * r.powf(2.0 * sigma) / (sigma + 1.0), beta * r.powf(2.0 * sigma + 2.0) / (2.0 * sigma + 2.0))
        }
    };
    match s.dim {
        Dim::One => Ok(0.5 * gradient_norm_sq(s)? + point_1d),
        d => {
            let mut grad = 0.0;
            let mut diff = 0.0;
            for (i, (&x, &w)) in s.grid.points.iter().zip(&s.grid.weights).enumerate() {
                let g = green(d, lambda, x)?;
                let dg = green_radial_derivative(d, lambda, x)?;
                let phi = s.values[i] - q * g;
                let dphi = s.gradient[i] - q * dg;
                let ws = w * surface(d, x);
                grad += dphi.norm_sqr() * ws;
                diff += (phi.norm_sqr() - s.values[i].norm_sqr()) * ws;
            }
            Ok(0.5 * grad + 0.5 * lambda * diff + 0.5 * theta(d, lambda, alpha_e)? * r * r)
        }
    }
}

fn virial_g(q: Complex64, model: &DeltaModel) -> Result<f64> {
    let (beta, sigma) = model.beta_sigma()?;
    let y = q.norm_sqr();
    Ok(match model.dim {
        Dim::One | Dim::Three => 4.0 * beta * (sigma - 1.0) / (sigma + 1.0) * y.powf(sigma + 1.0),
        Dim::Two => 2.0 * (1.0 / PI - 4.0 * beta * sigma * y.powf(sigma) / (sigma + 1.0)) * y,
    })
}

/// 8E₀ + g(|q|²), the Virial right-hand side in its stated normalization.
pub fn virial_rhs(e0: f64, q: Complex64, model: &DeltaModel) -> Result<f64> {
    Ok(8.0 * e0 + virial_g(q, model)?)
}

/// 16E₀ + g(|q|²). With E = ½‖∇ψ‖² + point term and iψ_t = Hψ, direct
/// differentiation of ∫|x|²|ψ|² gives this factor; it is the one the
/// d = 1 numerics reproduce.
pub fn virial_rhs_derived(e0: f64, q: Complex64, model: &DeltaModel) -> Result<f64> {
    Ok(16.0 * e0 + virial_g(q, model)?)
}

/// Result of fitting |q(t)| ≈ C (T − t)^p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub t_est: f64,
    pub exponent: f64,
    pub prefactor: f64,
    pub rms_residual: f64,
}

// weighted least squares y ≈ c + m x; returns (c, m, weighted mean square residual)
fn linear_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let mse = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (y - icpt - slope * x).powi(2)).sum::<f64>() / sw;
    (icpt, slope, mse)
}

/// Least-squares fit of ln|q| against ln(T − t) on the window, T free. Samples
/// carry trapezoid weights in t, so graded meshes are not biased toward T.
pub fn blowup_rate_fit(traj: &ChargeTrajectory, window: (f64, f64)) -> Result<RateFit> {
    let idx: Vec<usize> = (0..traj.len()).filter(|&n| {
        let t = traj.time(n);
        t >= window.0 - 1e-12 && t <= window.1 + 1e-12
    }).collect();
    if idx.len() < 4 {
        return Err(Error::FitDegenerate("fewer than four samples in the window".into()));
    }
    let ts: Vec<f64> = idx.iter().map(|&n| traj.time(n)).collect();
    let ys: Vec<f64> = idx.iter().map(|&n| traj.values[n].norm().ln()).collect();
    let rise = ys[ys.len() - 1] - ys[0];
    if ys.windows(2).any(|w| w[1] <= w[0]) || rise < 1e-6 {
        return Err(Error::FitDegenerate("|q| is not increasing on the window".into()));
    }
    let m = ts.len();
    let ws: Vec<f64> = (0..m)
        .map(|i| 0.5 * (ts[(i + 1).min(m - 1)] - ts[i.saturating_sub(1)]))
        .collect();
    let t_max = ts[m - 1];
    let span = t_max - ts[0];
    let sse = |ld: f64| {
        let big_t = t_max + ld.exp();
        let xs: Vec<f64> = ts.iter().map(|t| (big_t - t).ln()).collect();
        linear_fit(&xs, &ys, &ws).2
    };
    let (lo, hi) = ((1e-6 * span).ln(), (100.0 * span).ln());
    let m = 400;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=m {
        let ld = lo + (hi - lo) * i as f64 / m as f64;
        let v = sse(ld);
        if v < best.1 {
            best = (ld, v);
        }
    }
    let step = (hi - lo) / m as f64;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - gr * (b - a);
        let e = a + gr * (b - a);
        if sse(c) < sse(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let ld = 0.5 * (a + b);
    let big_t = t_max + ld.exp();
    let xs: Vec<f64> = ts.iter().map(|t| (big_t - t).ln()).collect();
    let (icpt, slope, mse) = linear_fit(&xs, &ys, &ws);
    Ok(RateFit { t_est: big_t, exponent: slope, prefactor: icpt.exp(), rms_residual: mse.sqrt() })
}

/// η(0) for d = 1, β = −1, σ > 1: the mass-weighted gradient norm of ψ₀
/// relative to the ω = 1 bound state.
pub fn dichotomy_eta(datum: &InitialDatum, model: &DeltaModel) -> Result<f64> {
    let (beta, sigma) = model.beta_sigma()?;
    if model.dim != Dim::One || beta != -1.0 || !(sigma > 1.0) {
        return Err(Error::Unsupported("η is defined for d = 1, β = −1, σ > 1".into()));
    }
    let e = (1.0 - sigma_c(sigma)) / sigma_c(sigma);
    let u = bound_state(Dim::One, -1.0, sigma, 1.0)?;
    let u_datum = InitialDatum::BoundState { state: u, phase: 0.0 };
    let quotient = |d: &InitialDatum| -> Result<f64> {
        Ok(d.mass(Dim::One)?.sqrt().powf(e) * d.gradient_norm_sq_1d()?.sqrt())
    };
    Ok(quotient(datum)? / quotient(&u_datum)?)
}
