//! Initial data and their exact free Schrödinger evolution.
//!
//! Every variant is radial (or, for [`GridDatum`], one-dimensional), so the
//! evolution is evaluated at a radial coordinate `r`; in d = 1 a signed `x`
//! is accepted everywhere.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analytic::{bound_mass, BoundState};
use crate::error::{domain, Error, Result};
use crate::linear_delta::{green, green_norm_sq, green_radial_derivative};
use crate::quad::{self, Rule};
use crate::specfun::{expint_e1, exp_erfc_sqrt_i, faddeeva};
use crate::Dim;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A ψ₀ sampled on x_j = x0 + j·dx (d = 1 only).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDatum {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
    #[serde(skip)]
    spectrum: Arc<OnceLock<Vec<Complex64>>>,
}

impl GridDatum {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0) || values.len() < 4 {
            return Err(domain("GridDatum", "need dx > 0 and at least 4 samples"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(domain("GridDatum", "non-finite sample"));
        }
        Ok(Self { x0, dx, values, spectrum: Arc::new(OnceLock::new()) })
    }

    /// Samples a closed-form datum on a uniform grid covering [−half_width, half_width).
    pub fn sample(datum: &InitialDatum, half_width: f64, n: usize) -> Result<Self> {
        let dx = 2.0 * half_width / n as f64;
        let values = (0..n)
            .map(|j| datum.value(Dim::One, -half_width + j as f64 * dx))
            .collect::<Result<Vec<_>>>()?;
        Self::new(-half_width, dx, values)
    }

    fn padded_len(&self) -> usize {
        (2 * self.values.len()).next_power_of_two()
    }

    // DFT of the zero-padded samples, normalized by the padded length.
    fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let m = self.padded_len();
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            buf[..self.values.len()].copy_from_slice(&self.values);
            FftPlanner::new().plan_fft_forward(m).process(&mut buf);
            for v in &mut buf {
                *v /= m as f64;
            }
            buf
        })
    }

    fn wavenumber(&self, k: usize) -> f64 {
        let m = self.padded_len();
        let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        2.0 * PI * kk / (m as f64 * self.dx)
    }

    /// Trigonometric interpolant of U(t)ψ₀ and its derivative at x.
    pub fn evolve(&self, t: f64, x: f64) -> (Complex64, Complex64) {
        let spec = self.spectrum();
        let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (k, c) in spec.iter().enumerate() {
            let kw = self.wavenumber(k);
            let term = c * Complex64::from_polar(1.0, kw * (x - self.x0) - kw * kw * t);
            v += term;
            dv += I * kw * term;
        }
        (v, dv)
    }

    /// U(t)ψ₀ on the (padded) sample grid, returned for the original points.
    pub fn evolve_on_grid(&self, t: f64) -> Vec<Complex64> {
        let spec = self.spectrum();
        let m = spec.len();
        let mut buf: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let kw = self.wavenumber(k);
                c * Complex64::from_polar(1.0, -kw * kw * t)
            })
            .collect();
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        buf.truncate(self.values.len());
        buf
    }

    pub fn mass(&self) -> f64 {
        self.dx * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// Regular Gaussian component A·exp(−r²/(2a²)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPart {
    pub amplitude: Complex64,
    pub width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDatum {
    Gaussian { amplitude: Complex64, width: f64 },
    /// e^{i·phase} times a standing-wave profile.
    BoundState { state: BoundState, phase: f64 },
    /// charge·G_λ plus an optional Gaussian regular part.
    Green { charge: Complex64, lambda: f64, regular: Option<GaussianPart> },
    Grid1D(GridDatum),
    /// Initial value of the exact blow-up solution with blow-up time T
    /// (σ = 1, d = 1, 3): e^{−i|x|²/(4T)} T^{−d/2} e^{i(ω/T + phase)} u(x/T).
    Pseudoconformal { state: BoundState, phase: f64, blowup_time: f64 },
}

fn gaussian_evolution(d: Dim, amp: Complex64, a: f64, t: f64, r: f64) -> (Complex64, Complex64) {
    let den = Complex64::new(a * a, 2.0 * t);
    let pref = amp * (Complex64::new(a * a, 0.0) / den).powf(0.5 * d.as_f64());
    let v = pref * (-r * r / (2.0 * den)).exp();
    (v, v * (-r / den))
}

/// e^{iλt}e^{∓√λ r}erfc(z∓) pieces of the free evolution of G_λ in d = 1:
/// returns (A−, A+) with z± = √(iλt) ± r/(2√(it)).
fn green_pieces(lambda: f64, t: f64, r: f64) -> (Complex64, Complex64) {
    let s = lambda.sqrt();
    let rt = Complex64::from_polar(t.sqrt(), 0.25 * PI);
    let a = Complex64::from_polar((lambda * t).sqrt(), 0.25 * PI);
    let zp = a + r / (2.0 * rt);
    let zm = a - r / (2.0 * rt);
    let chirp = Complex64::from_polar(1.0, r * r / (4.0 * t));
    let ap = chirp * faddeeva(I * zp);
    let am = if zm.re >= 0.0 {
        chirp * faddeeva(I * zm)
    } else {
        2.0 * Complex64::from_polar((-s * r).exp(), lambda * t) - chirp * faddeeva(-I * zm)
    };
    (am, ap)
}

/// U(t)G_λ^d at distance r > 0 (or any x in d = 1) and its radial derivative, t > 0.
pub fn green_evolution(d: Dim, lambda: f64, t: f64, r: f64) -> Result<(Complex64, Complex64)> {
    let r = r.abs();
    match d {
        Dim::One => {
            let (am, ap) = green_pieces(lambda, t, r);
            Ok(((am + ap) / (4.0 * lambda.sqrt()), (ap - am) / 4.0))
        }
        Dim::Three => {
            if r == 0.0 {
                return Err(Error::Singular { op: "green_evolution", d: 3 });
            }
            let (am, ap) = green_pieces(lambda, t, r);
            let g1 = (am + ap) / (4.0 * lambda.sqrt());
            let d1 = (ap - am) / 4.0;
            let d1p = lambda * g1
                - Complex64::from_polar(1.0, r * r / (4.0 * t)) / (2.0 * (PI * t).sqrt() * Complex64::from_polar(1.0, 0.25 * PI));
            let v = -d1 / (2.0 * PI * r);
            Ok((v, d1 / (2.0 * PI * r * r) - d1p / (2.0 * PI * r)))
        }
        Dim::Two => {
            if r == 0.0 {
                return Err(Error::Singular { op: "green_evolution", d: 2 });
            }
            Ok(subordinated_green(d, lambda, t, r))
        }
    }
}

/// U(t)G_λ = ∫_0^∞ e^{−λσ}(4π(σ+it))^{−d/2} e^{−r²/(4(σ+it))} dσ, integrated
/// in u = ln σ.
pub fn subordinated_green(d: Dim, lambda: f64, t: f64, r: f64) -> (Complex64, Complex64) {
    let half_d = 0.5 * d.as_f64();
    let kernel = |u: f64| {
        let sig = u.exp();
        let z = Complex64::new(sig, t);
        let v = sig * (-lambda * sig).exp() * (4.0 * PI * z).powf(-half_d) * (-r * r / (4.0 * z)).exp();
        (v, v * (-r / (2.0 * z)))
    };
    let hi = (80.0 / lambda).ln();
    let lo = (1e-14 * t.min(r * r).max(1e-300)).ln().max(hi - 120.0);
    let v: Complex64 = quad::adaptive(|u| kernel(u).0, lo, hi, 1e-15, 1e-12);
    let dv: Complex64 = quad::adaptive(|u| kernel(u).1, lo, hi, 1e-15, 1e-12);
    (v, dv)
}

/// (U(t)G_λ^d)(0) for t > 0; d = 1 is finite at t = 0 as well.
pub fn green_evolution_at_origin(d: Dim, lambda: f64, t: f64) -> Result<Complex64> {
    let e = exp_erfc_sqrt_i(lambda * t);
    match d {
        Dim::One => Ok(e / (2.0 * lambda.sqrt())),
        _ if t <= 0.0 => Err(Error::Singular { op: "green_evolution_at_origin", d: d.as_u8() }),
        Dim::Two => Ok(Complex64::from_polar(1.0, lambda * t) * expint_e1(Complex64::new(0.0, lambda * t)) / (4.0 * PI)),
        Dim::Three => Ok(1.0 / (4.0 * PI.powf(1.5) * Complex64::from_polar(t.sqrt(), 0.25 * PI))
            - lambda.sqrt() / (4.0 * PI) * e),
    }
}

impl InitialDatum {
    pub fn gaussian(amplitude: impl Into<Complex64>, width: f64) -> Self {
        InitialDatum::Gaussian { amplitude: amplitude.into(), width }
    }

    /// Checks the variant against the dimension.
    pub fn validate(&self, d: Dim) -> Result<()> {
        match self {
            InitialDatum::Gaussian { width, .. } if !(*width > 0.0) => Err(domain("datum", "Gaussian width must be positive")),
            InitialDatum::Green { lambda, regular, .. } => {
                if !(*lambda > 0.0) {
                    return Err(domain("datum", "Green datum needs lambda > 0"));
                }
                if let Some(g) = regular {
                    if !(g.width > 0.0) {
                        return Err(domain("datum", "Gaussian width must be positive"));
                    }
                }
                Ok(())
            }
            InitialDatum::BoundState { state, .. } if state.dim != d => {
                Err(Error::Unsupported(format!("bound state built for d = {}, used in d = {d}", state.dim)))
            }
            InitialDatum::Grid1D(_) if d != Dim::One => Err(Error::Unsupported("Grid1D data exist only in d = 1".into())),
            InitialDatum::Pseudoconformal { state, blowup_time, .. } => {
                if state.dim != d || d == Dim::Two || state.sigma != 1.0 {
                    return Err(Error::Unsupported("the blow-up datum needs sigma = 1 and d = 1, 3 matching the state".into()));
                }
                if !(*blowup_time > 0.0) {
                    return Err(domain("datum", "blow-up time must be positive"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Coefficient of G_λ in ψ₀ and its λ, for variants with a singular part.
    pub fn singular_part(&self) -> Option<(Complex64, f64)> {
        match self {
            InitialDatum::BoundState { state, phase } => Some((Complex64::from_polar(state.q_amp, *phase), state.omega)),
            InitialDatum::Green { charge, lambda, .. } => Some((*charge, *lambda)),
            _ => None,
        }
    }

    /// (U_d(t)ψ₀)(x) and its derivative (∂_x in d = 1, ∂_r otherwise).
    pub fn free_evolution(&self, d: Dim, t: f64, x: f64) -> Result<(Complex64, Complex64)> {
        self.validate(d)?;
        if t < 0.0 {
            return Err(domain("free_evolution", "t must be nonnegative"));
        }
        let r = x.abs();
        let sign = if d == Dim::One && x < 0.0 { -1.0 } else { 1.0 };
        let (v, dv) = match self {
            InitialDatum::Gaussian { amplitude, width } => gaussian_evolution(d, *amplitude, *width, t, r),
            InitialDatum::BoundState { .. } | InitialDatum::Green { .. } => {
                let (c, lambda) = self.singular_part().expect("singular variant");
                let (g, dg) = if t == 0.0 {
                    (
                        Complex64::new(green(d, lambda, r)?, 0.0),
                        if r == 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(green_radial_derivative(d, lambda, r)?, 0.0) },
                    )
                } else {
                    green_evolution(d, lambda, t, r)?
                };
                let (mut v, mut dv) = (c * g, c * dg);
                if let InitialDatum::Green { regular: Some(gp), .. } = self {
                    let (a, b) = gaussian_evolution(d, gp.amplitude, gp.width, t, r);
                    v += a;
                    dv += b;
                }
                (v, dv)
            }
            InitialDatum::Grid1D(g) => return Ok(g.evolve(t, x)),
            InitialDatum::Pseudoconformal { state, phase, blowup_time } => {
                let big_t = *blowup_time;
                if t >= big_t {
                    return Err(domain("free_evolution", "t must precede the blow-up time"));
                }
                let s = big_t - t;
                let tau = t / (big_t * s);
                let p = Complex64::from_polar(state.q_amp, state.omega / big_t + phase);
                let rs = r / s;
                let (g, dg) = if tau == 0.0 {
                    (
                        Complex64::new(green(d, state.omega, rs)?, 0.0),
                        if rs == 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(green_radial_derivative(d, state.omega, rs)?, 0.0) },
                    )
                } else {
                    green_evolution(d, state.omega, tau, rs)?
                };
                let chirp = Complex64::from_polar(s.powf(-0.5 * d.as_f64()), -r * r / (4.0 * s));
                let v = chirp * p * g;
                let dv = chirp * p * (dg / s) + v * (-I * r / (2.0 * s));
                (v, dv)
            }
        };
        Ok((v, sign * dv))
    }

    /// (U_d(t)ψ₀)(0).
    pub fn free_evolution_at_origin(&self, d: Dim, t: f64) -> Result<Complex64> {
        self.validate(d)?;
        if t < 0.0 {
            return Err(domain("free_evolution_at_origin", "t must be nonnegative"));
        }
        match self {
            InitialDatum::Gaussian { amplitude, width } => Ok(gaussian_evolution(d, *amplitude, *width, t, 0.0).0),
            InitialDatum::BoundState { .. } | InitialDatum::Green { .. } => {
                let (c, lambda) = self.singular_part().expect("singular variant");
                let mut v = c * green_evolution_at_origin(d, lambda, t)?;
                if let InitialDatum::Green { regular: Some(gp), .. } = self {
                    v += gaussian_evolution(d, gp.amplitude, gp.width, t, 0.0).0;
                }
                Ok(v)
            }
            InitialDatum::Grid1D(g) => Ok(g.evolve(t, 0.0).0),
            InitialDatum::Pseudoconformal { state, phase, blowup_time } => {
                let big_t = *blowup_time;
                if t >= big_t {
                    return Err(domain("free_evolution_at_origin", "t must precede the blow-up time"));
                }
                let s = big_t - t;
                let tau = t / (big_t * s);
                let p = Complex64::from_polar(state.q_amp * s.powf(-0.5 * d.as_f64()), state.omega / big_t + phase);
                Ok(p * green_evolution_at_origin(d, state.omega, tau)?)
            }
        }
    }

    pub fn value(&self, d: Dim, x: f64) -> Result<Complex64> {
        Ok(self.free_evolution(d, 0.0, x)?.0)
    }

    /// The charge carried by ψ₀: ψ₀(0) in d = 1, the coefficient of the
    /// 1/(4π|x|) or −ln|x|/(2π) singularity in d = 3, 2.
    pub fn initial_charge(&self, d: Dim) -> Result<Complex64> {
        match d {
            Dim::One => self.value(d, 0.0),
            _ => Ok(match self {
                InitialDatum::BoundState { .. } | InitialDatum::Green { .. } => self.singular_part().expect("singular").0,
                InitialDatum::Pseudoconformal { state, phase, blowup_time } => {
                    Complex64::from_polar(state.q_amp / blowup_time.sqrt(), state.omega / blowup_time + phase)
                }
                _ => Complex64::new(0.0, 0.0),
            }),
        }
    }

    /// ‖ψ₀‖².
    pub fn mass(&self, d: Dim) -> Result<f64> {
        self.validate(d)?;
        let gauss = |amp: Complex64, a: f64| amp.norm_sqr() * (PI * a * a).powf(0.5 * d.as_f64());
        Ok(match self {
            InitialDatum::Gaussian { amplitude, width } => gauss(*amplitude, *width),
            InitialDatum::BoundState { state, .. } | InitialDatum::Pseudoconformal { state, .. } => bound_mass(state),
            InitialDatum::Green { charge, lambda, regular } => {
                let mut m = charge.norm_sqr() * green_norm_sq(d, *lambda);
                if let Some(g) = regular {
                    m += gauss(g.amplitude, g.width);
                    let scale = g.width.min(1.0 / lambda.sqrt());
                    let extent = (12.0 * g.width).max(72.0 / lambda.sqrt());
                    let rule = Rule::radial(extent, 0.5 * scale, 20);
                    let cross = rule.integrate(|r| {
                        let surf = match d {
                            Dim::One => 2.0,
                            Dim::Two => 2.0 * PI * r,
                            Dim::Three => 4.0 * PI * r * r,
                        };
                        surf * green(d, *lambda, r).unwrap_or(0.0) * (-r * r / (2.0 * g.width * g.width)).exp()
                    });
                    m += 2.0 * (charge.conj() * g.amplitude).re * cross;
                }
                m
            }
            InitialDatum::Grid1D(g) => g.mass(),
        })
    }

    /// ‖∂_x ψ₀‖² in d = 1.
    pub fn gradient_norm_sq_1d(&self) -> Result<f64> {
        self.validate(Dim::One)?;
        match self {
            InitialDatum::Gaussian { amplitude, width } => Ok(amplitude.norm_sqr() * PI.sqrt() / (2.0 * width)),
            InitialDatum::BoundState { state, .. } => Ok(state.q_amp * state.q_amp / (4.0 * state.omega.sqrt())),
            InitialDatum::Grid1D(g) => {
                let spec = g.spectrum();
                let m = spec.len() as f64;
                Ok(spec.iter().enumerate().map(|(k, c)| (g.wavenumber(k) * c.norm()).powi(2)).sum::<f64>() * m * g.dx)
            }
            _ => {
                let extent = 200.0;
                let rule = Rule::radial(extent, 0.05, 20);
                let mut s = 0.0;
                for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
                    s += 2.0 * w * self.free_evolution(Dim::One, 0.0, r)?.1.norm_sqr();
                }
                Ok(s)
            }
        }
    }
}
