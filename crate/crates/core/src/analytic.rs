//! Closed-form objects: standing waves, critical mass, energy thresholds,
//! the pseudoconformal map and the exact blow-up solutions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linear_delta::{green, green_norm_sq, theta};
use crate::specfun::EULER_GAMMA;
use crate::Dim;

/// Frequency separating the two admissible branches in d = 2.
pub fn d2_branch_frequency() -> f64 {
    4.0 * (-2.0 * EULER_GAMMA).exp()
}

/// A standing wave e^{iωt} q_amp G_ω^d(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub dim: Dim,
    pub beta: f64,
    pub sigma: f64,
    pub omega: f64,
    pub q_amp: f64,
}

pub fn bound_state(d: Dim, beta: f64, sigma: f64, omega: f64) -> Result<BoundState> {
    if !(sigma > 0.0) {
        return Err(domain("bound_state", "sigma must be positive"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Inadmissible(format!("omega = {omega} must be positive")));
    }
    let base = match d {
        Dim::One => {
            if !(beta < 0.0) {
                return Err(Error::Inadmissible("d = 1 bound states need beta < 0".into()));
            }
            2f64.powf(2.0 * sigma + 1.0) * omega.powf(sigma + 0.5) / (-beta)
        }
        Dim::Two => {
            let w0 = d2_branch_frequency();
            let ok = (beta > 0.0 && omega < w0) || (beta < 0.0 && omega > w0);
            if !ok {
                return Err(Error::Inadmissible(format!(
                    "d = 2 needs beta > 0 with omega in (0, {w0}) or beta < 0 with omega > {w0}; got beta = {beta}, omega = {omega}"
                )));
            }
            ((0.5 * omega.sqrt()).ln() + EULER_GAMMA) / (-2.0 * PI * beta)
        }
        Dim::Three => {
            if !(beta < 0.0) {
                return Err(Error::Inadmissible("d = 3 bound states need beta < 0".into()));
            }
            omega.sqrt() / (-4.0 * PI * beta)
        }
    };
    Ok(BoundState { dim: d, beta, sigma, omega, q_amp: base.powf(1.0 / (2.0 * sigma)) })
}

impl BoundState {
    /// u(x) = q_amp G_ω(x).
    pub fn profile(&self, r: f64) -> Result<f64> {
        Ok(self.q_amp * green(self.dim, self.omega, r)?)
    }

    /// The charge of u: u(0) in d = 1, q_amp in d = 2, 3.
    pub fn charge(&self) -> f64 {
        match self.dim {
            Dim::One => self.q_amp / (2.0 * self.omega.sqrt()),
            _ => self.q_amp,
        }
    }
}

pub fn bound_mass(state: &BoundState) -> f64 {
    state.q_amp * state.q_amp * green_norm_sq(state.dim, state.omega)
}

/// Energy of the standing wave; in d = 2, 3 evaluated with λ = ω, where the
/// regular part vanishes.
pub fn bound_energy(state: &BoundState) -> f64 {
    let BoundState { dim, beta, sigma, omega, q_amp } = *state;
    let q2 = q_amp * q_amp;
    match dim {
        Dim::One => {
            let u0 = state.charge();
            0.5 * q2 / (4.0 * omega.sqrt()) + beta * u0.powf(2.0 * sigma + 2.0) / (2.0 * sigma + 2.0)
        }
        _ => {
            let alpha = beta * q_amp.powf(2.0 * sigma) / (sigma + 1.0);
            let th = theta(dim, omega, alpha).expect("omega > 0");
            -0.5 * omega * q2 * green_norm_sq(dim, omega) + 0.5 * th * q2
        }
    }
}

/// The L²-critical mass (σ = 1); undefined in d = 2.
pub fn critical_mass(d: Dim, beta: f64) -> Option<f64> {
    if !(beta < 0.0) {
        return None;
    }
    match d {
        Dim::One => Some(-2.0 / beta),
        Dim::Two => None,
        Dim::Three => Some(1.0 / (-32.0 * PI * PI * beta)),
    }
}

/// Energy threshold below which focusing data blow up: 0 in d = 1, 3 and
/// −σ/(4π(σ+1)(−4πσβ)^{1/σ}) in d = 2.
pub fn energy_threshold(d: Dim, beta: f64, sigma: f64) -> Result<f64> {
    if !(beta < 0.0) {
        return Err(domain("energy_threshold", "meaningful only for beta < 0"));
    }
    if !(sigma > 0.0) {
        return Err(domain("energy_threshold", "sigma must be positive"));
    }
    Ok(match d {
        Dim::One | Dim::Three => 0.0,
        Dim::Two => -sigma / (4.0 * PI * (sigma + 1.0) * (-4.0 * PI * sigma * beta).powf(1.0 / sigma)),
    })
}

/// (T−t)^{−d/2} on the principal branch (complex when T < t).
fn amplitude(d: Dim, s: f64) -> Complex64 {
    Complex64::new(s, 0.0).powf(-0.5 * d.as_f64())
}

/// Ψ_T(t,x) = e^{−i|x|²/(4(T−t))} (T−t)^{−d/2} ψ(1/(T−t), x/(T−t)), for a
/// radial solution ψ(t, r). Any real T ≠ t is accepted; for T < t the
/// amplitude takes the principal branch.
pub fn pseudoconformal_map(
    psi: impl Fn(f64, f64) -> Result<Complex64>,
    big_t: f64,
    d: Dim,
    t: f64,
    r: f64,
) -> Result<Complex64> {
    if d == Dim::Two {
        return Err(Error::Unsupported("the pseudoconformal map is a symmetry only in d = 1, 3".into()));
    }
    let s = big_t - t;
    if s == 0.0 {
        return Err(domain("pseudoconformal_map", "evaluation at t = T"));
    }
    let chirp = Complex64::from_polar(1.0, -r * r / (4.0 * s));
    // sign of the spatial argument is irrelevant for radial ψ
    Ok(chirp * amplitude(d, s) * psi(1.0 / s, r / s.abs())?)
}

/// Exact blow-up solution of the σ = 1 problem in d = 1, 3.
pub fn exact_blowup_solution(
    d: Dim,
    beta: f64,
    omega: f64,
    theta_phase: f64,
    t_star: f64,
    t: f64,
    r: f64,
) -> Result<Complex64> {
    if d == Dim::Two {
        return Err(Error::Unsupported("exact blow-up solutions exist for d = 1, 3".into()));
    }
    if !(t < t_star) {
        return Err(domain("exact_blowup_solution", format!("t = {t} must precede T* = {t_star}")));
    }
    let u = bound_state(d, beta, 1.0, omega)?;
    let s = t_star - t;
    let phase = -r * r / (4.0 * s) + omega / s + theta_phase;
    Ok(Complex64::from_polar(s.powf(-0.5 * d.as_f64()) * u.profile(r / s)?, phase))
}

/// Charge of the exact blow-up solution.
pub fn exact_blowup_charge(d: Dim, beta: f64, omega: f64, theta_phase: f64, t_star: f64, t: f64) -> Result<Complex64> {
    if !(t < t_star) {
        return Err(domain("exact_blowup_charge", "t must precede T*"));
    }
    let u = bound_state(d, beta, 1.0, omega)?;
    let s = t_star - t;
    Ok(Complex64::from_polar(s.powf(-0.5) * u.charge(), omega / s + theta_phase))
}

/// One sample of the (ω, mass, energy) curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub omega: f64,
    pub q_amp: f64,
    pub mass: f64,
    pub energy: f64,
}

/// Mass and energy along an ω grid; inadmissible frequencies are skipped.
pub fn standing_wave_curve(d: Dim, beta: f64, sigma: f64, omegas: &[f64]) -> Vec<CurvePoint> {
    omegas
        .iter()
        .filter_map(|&w| bound_state(d, beta, sigma, w).ok())
        .map(|s| CurvePoint { omega: s.omega, q_amp: s.q_amp, mass: bound_mass(&s), energy: bound_energy(&s) })
        .collect()
}

/// σ_c = (σ+1)/(2σ).
pub fn sigma_c(sigma: f64) -> f64 {
    (sigma + 1.0) / (2.0 * sigma)
}

/// Exponent (1 − σ_c)/2 of the blow-up rate bound.
pub fn rate_exponent(sigma: f64) -> f64 {
    0.5 * (1.0 - sigma_c(sigma))
}
