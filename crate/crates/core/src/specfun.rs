//! Special functions: Gamma, modified Bessel K0/K1, the kernel K2 of the
//! two-dimensional charge equation, complex erfc / Faddeeva / E1 and the free
//! Schrödinger propagator.

use std::f64::consts::PI;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad;
use crate::Dim;

pub type ComplexScalar = Complex64;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
    }
}

/// Euler Gamma function on s > 0.
pub fn gamma(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("gamma", format!("s = {s} must be positive")));
    }
    if s > 171.6 {
        return Err(Error::Overflow("gamma"));
    }
    if s < 0.5 {
        return Ok(PI / ((PI * s).sin() * gamma(1.0 - s)?));
    }
    // exact factorials; products stay exact in f64 up to 22!
    if s.fract() == 0.0 && s <= 23.0 {
        return Ok((1..s as u32).map(f64::from).product());
    }
    let x = s - 1.0;
    let t = x + LANCZOS_G + 0.5;
    // split the power so that large s does not overflow before exp(-t)
    let p = t.powf(0.5 * (x + 0.5));
    Ok((2.0 * PI).sqrt() * p * (-t).exp() * p * lanczos_sum(x))
}

fn check_bessel_arg(op: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(op, format!("x = {x} must be positive and finite")));
    }
    Ok(())
}

// Trapezoidal rule for ∫_0^∞ e^{-x(cosh t - 1)} cosh(n t) dt. The integrand is
// analytic in a strip, so the rule converges geometrically; the step shrinks
// like x^{-1/2} to follow the width of the peak.
fn bessel_k_integral(x: f64, order: i32) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.2);
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let e = x * (t.cosh() - 1.0);
        if e > 60.0 {
            break;
        }
        sum += (-e).exp() * if order == 0 { 1.0 } else { t.cosh() };
        k += 1;
    }
    h * sum * (-x).exp()
}

/// Modified Bessel function K0. Underflows to zero beyond x ≈ 745.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_bessel_arg("bessel_k0", x)?;
    if x >= 2.0 {
        return Ok(bessel_k_integral(x, 0));
    }
    let y = 0.25 * x * x;
    let (mut term, mut harmonic) = (1.0, 0.0);
    let (mut i0, mut rest) = (1.0, 0.0);
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        rest += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    Ok(-((0.5 * x).ln() + EULER_GAMMA) * i0 + rest)
}

/// Modified Bessel function K1. Underflows to zero beyond x ≈ 745.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_bessel_arg("bessel_k1", x)?;
    if x >= 2.0 {
        return Ok(bessel_k_integral(x, 1));
    }
    let y = 0.25 * x * x;
    // term_k = y^k / (k! (k+1)!), psi_k = ψ(k+1) + ψ(k+2)
    let mut term = 1.0;
    let mut psi = 1.0 - 2.0 * EULER_GAMMA;
    let (mut i1, mut rest) = (1.0, psi);
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * (kf + 1.0));
        psi += 1.0 / kf + 1.0 / (kf + 1.0);
        i1 += term;
        rest += term * psi;
        if term < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    Ok(1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * rest)
}

/// ln ∫_{-∞}^{∞} e^{φ(u)} du for a unimodal log-integrand on a bounded window.
fn log_quad(phi: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let step = 0.25;
    let n = ((hi - lo) / step).ceil() as usize;
    let (mut best_u, mut best) = (lo, f64::NEG_INFINITY);
    for i in 0..=n {
        let u = lo + i as f64 * step;
        let v = phi(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    // golden-section refinement of the peak
    let (mut a, mut b) = (best_u - step, best_u + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d);
        }
    }
    let peak = 0.5 * (a + b);
    let top = phi(peak).max(best);
    let drop = 48.0;
    let mut left = peak;
    while left > lo - 200.0 && phi(left) > top - drop {
        left -= 0.5;
    }
    let mut right = peak;
    while right < hi + 200.0 && phi(right) > top - drop {
        right += 0.5;
    }
    let f = |u: f64| (phi(u) - top).exp();
    let i1: f64 = quad::adaptive(f, left, peak, 0.0, 1e-14);
    let i2: f64 = quad::adaptive(f, peak, right, 0.0, 1e-14);
    top + (i1 + i2).ln()
}

const S_LOG_LO: f64 = -60.0;
const S_LOG_HI: f64 = 9.0;

/// ln K2(t), where K2(t) = ∫_0^∞ t^{s-1}/Γ(s) ds; finite for every t > 0.
pub fn ln_volterra_kernel(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("volterra_kernel", format!("t = {t} must be positive")));
    }
    let lt = t.ln();
    // s = e^u, integrand s t^{s-1}/Γ(s)
    Ok(log_quad(
        |u| {
            let s = u.exp();
            u + (s - 1.0) * lt - ln_gamma(s)
        },
        S_LOG_LO,
        S_LOG_HI.max(lt.max(1.0).ln() + 2.0),
    ))
}

/// K2(t) = ∫_0^∞ t^{s-1}/Γ(s) ds. Overflows f64 for t above roughly 700;
/// use [`ln_volterra_kernel`] there.
pub fn volterra_kernel(t: f64) -> Result<f64> {
    let v = ln_volterra_kernel(t)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("volterra_kernel"))
    }
}

/// ν(τ) = ∫_0^τ K2 = ∫_0^∞ τ^s/Γ(s+1) ds.
pub fn volterra_primitive(tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(domain("volterra_primitive", format!("tau = {tau} must be positive")));
    }
    let lt = tau.ln();
    Ok(log_quad(|u| {
        let s = u.exp();
        u + s * lt - ln_gamma(s + 1.0)
    }, S_LOG_LO, S_LOG_HI)
    .exp())
}

/// ∫_0^τ σ K2(σ) dσ = ∫_0^∞ s τ^{s+1}/Γ(s+2) ds.
pub fn volterra_first_moment(tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(domain("volterra_first_moment", format!("tau = {tau} must be positive")));
    }
    let lt = tau.ln();
    Ok(log_quad(|u| {
        let s = u.exp();
        2.0 * u + (s + 1.0) * lt - ln_gamma(s + 2.0)
    }, S_LOG_LO, S_LOG_HI)
    .exp())
}

// ln(e^x − 1) for x > 0 without overflow
fn ln_expm1(x: f64) -> f64 {
    if x > 1.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// Increments of the two primitives over [a, b] with 0 < a < b, computed
/// without cancellation: (∫_a^b K2, ∫_a^b σ K2).
pub fn volterra_cell_moments(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > a) {
        return Err(domain("volterra_cell_moments", format!("need 0 < a < b, got [{a}, {b}]")));
    }
    let la = a.ln();
    let l = (b / a).ln();
    let m0 = log_quad(|u| {
        let s = u.exp();
        u + s * la + ln_expm1(s * l) - ln_gamma(s + 1.0)
    }, S_LOG_LO, S_LOG_HI)
    .exp();
    let m1 = log_quad(|u| {
        let s = u.exp();
        2.0 * u + (s + 1.0) * la + ln_expm1((s + 1.0) * l) - ln_gamma(s + 2.0)
    }, S_LOG_LO, S_LOG_HI)
    .exp();
    Ok((m0, m1))
}

/// Complementary error function on the complex plane.
pub fn erfc_complex(z: ComplexScalar) -> ComplexScalar {
    z.erfc()
}

/// Error function on the complex plane.
pub fn erf_complex(z: ComplexScalar) -> ComplexScalar {
    z.erf()
}

/// Faddeeva function w(z) = e^{-z²} erfc(-iz).
pub fn faddeeva(z: ComplexScalar) -> ComplexScalar {
    z.w()
}

/// e^{ix} erfc(√(ix)) for x ≥ 0, evaluated as w(i√(ix)) without overflow.
pub fn exp_erfc_sqrt_i(x: f64) -> ComplexScalar {
    let z = Complex64::from_polar(x.max(0.0).sqrt(), 0.75 * PI);
    faddeeva(z)
}

/// Exponential integral E1(z) on the principal branch.
pub fn expint_e1(z: ComplexScalar) -> ComplexScalar {
    let r = z.norm();
    if r < 2.5 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..200 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.norm() < 1e-17 * sum.norm().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() - sum
    } else {
        // modified Lentz for e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    }
}

/// (4iπt)^{d/2} on the principal branch.
pub fn propagator_norm(d: Dim, t: f64) -> ComplexScalar {
    let half_d = d.as_f64() / 2.0;
    let mag = (4.0 * PI * t.abs()).powf(half_d);
    let arg = if t > 0.0 { 0.5 * PI } else { -0.5 * PI } * half_d;
    Complex64::from_polar(mag, arg)
}

/// Free propagator U_d(t, x) = exp(-|x|²/(4it)) / (4iπt)^{d/2}; `r` = |x|.
pub fn free_propagator(d: Dim, t: f64, r: f64) -> Result<ComplexScalar> {
    if t == 0.0 || !t.is_finite() {
        return Err(domain("free_propagator", "t must be nonzero and finite"));
    }
    let phase = Complex64::from_polar(1.0, r * r / (4.0 * t));
    Ok(phase / propagator_norm(d, t))
}
