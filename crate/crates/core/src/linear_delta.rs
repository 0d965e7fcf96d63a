//! The linear point interaction: coupling constants, Green's functions,
//! spectra and the quadratic form on decomposed states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::Rule;
use crate::specfun::{bessel_k0, bessel_k1, EULER_GAMMA};
use crate::Dim;

/// Strength of the point interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coupling {
    Linear { alpha: f64 },
    /// α = β|q|^{2σ}
    Nonlinear { beta: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaModel {
    pub dim: Dim,
    pub coupling: Coupling,
}

impl DeltaModel {
    pub fn linear(dim: Dim, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(domain("DeltaModel", "alpha must be finite"));
        }
        Ok(Self { dim, coupling: Coupling::Linear { alpha } })
    }

    pub fn nonlinear(dim: Dim, beta: f64, sigma: f64) -> Result<Self> {
        if !(beta != 0.0 && beta.is_finite()) {
            return Err(domain("DeltaModel", "beta must be finite and nonzero"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain("DeltaModel", "sigma must be positive"));
        }
        Ok(Self { dim, coupling: Coupling::Nonlinear { beta, sigma } })
    }

    /// Interaction strength felt by a charge of modulus `r`.
    pub fn alpha_at(&self, r: f64) -> f64 {
        match self.coupling {
            Coupling::Linear { alpha } => alpha,
            Coupling::Nonlinear { beta, sigma } => beta * r.powf(2.0 * sigma),
        }
    }

    pub fn beta_sigma(&self) -> Result<(f64, f64)> {
        match self.coupling {
            Coupling::Nonlinear { beta, sigma } => Ok((beta, sigma)),
            Coupling::Linear { .. } => Err(Error::Unsupported("operation needs a nonlinear coupling".into())),
        }
    }
}

pub fn kappa(d: Dim, alpha: f64) -> f64 {
    match d {
        Dim::One => -alpha,
        Dim::Two | Dim::Three => 1.0,
    }
}

/// θ_λ^d(α). In d = 1 the boundary condition reads θ φ_λ(0) = q.
pub fn theta(d: Dim, lambda: f64, alpha: f64) -> Result<f64> {
    check_lambda("theta", lambda)?;
    let s = lambda.sqrt();
    match d {
        Dim::One => {
            let den = alpha + 2.0 * s;
            if den == 0.0 {
                return Err(Error::Pole(format!("theta: alpha = -2 sqrt(lambda) = {alpha}")));
            }
            Ok(2.0 * s / den)
        }
        Dim::Two => Ok(alpha + ((0.5 * s).ln() + EULER_GAMMA) / (2.0 * PI)),
        Dim::Three => Ok(alpha + s / (4.0 * PI)),
    }
}

fn check_lambda(op: &'static str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(op, format!("lambda = {lambda} must be positive")));
    }
    Ok(())
}

/// G_λ^d at distance `r` from the origin.
pub fn green(d: Dim, lambda: f64, r: f64) -> Result<f64> {
    check_lambda("green", lambda)?;
    let s = lambda.sqrt();
    let r = r.abs();
    match d {
        Dim::One => Ok((-s * r).exp() / (2.0 * s)),
        _ if r == 0.0 => Err(Error::Singular { op: "green", d: d.as_u8() }),
        Dim::Two => Ok(bessel_k0(s * r)? / (2.0 * PI)),
        Dim::Three => Ok((-s * r).exp() / (4.0 * PI * r)),
    }
}

/// Radial derivative ∂_r G_λ^d for r > 0 (in d = 1, the derivative on x > 0).
pub fn green_radial_derivative(d: Dim, lambda: f64, r: f64) -> Result<f64> {
    check_lambda("green_radial_derivative", lambda)?;
    if !(r > 0.0) {
        return Err(Error::Singular { op: "green_radial_derivative", d: d.as_u8() });
    }
    let s = lambda.sqrt();
    match d {
        Dim::One => Ok(-0.5 * (-s * r).exp()),
        Dim::Two => Ok(-s * bessel_k1(s * r)? / (2.0 * PI)),
        Dim::Three => Ok(-(-s * r).exp() * (1.0 + s * r) / (4.0 * PI * r * r)),
    }
}

/// G_0^d, defined for d = 2, 3.
pub fn green_zero(d: Dim, r: f64) -> Result<f64> {
    let r = r.abs();
    if r == 0.0 {
        return Err(Error::Singular { op: "green_zero", d: d.as_u8() });
    }
    match d {
        Dim::One => Err(Error::Unsupported("green_zero is defined only for d = 2, 3".into())),
        Dim::Two => Ok(-r.ln() / (2.0 * PI)),
        Dim::Three => Ok(1.0 / (4.0 * PI * r)),
    }
}

/// ‖G_λ^d‖² in L².
pub fn green_norm_sq(d: Dim, lambda: f64) -> f64 {
    match d {
        Dim::One => 1.0 / (4.0 * lambda.powf(1.5)),
        Dim::Two => 1.0 / (4.0 * PI * lambda),
        Dim::Three => 1.0 / (8.0 * PI * lambda.sqrt()),
    }
}

/// The negative eigenvalue, when it exists.
pub fn eigenvalue(d: Dim, alpha: f64) -> Option<f64> {
    match d {
        Dim::One if alpha < 0.0 => Some(-0.25 * alpha * alpha),
        Dim::Two => Some(-4.0 * (-4.0 * PI * alpha - 2.0 * EULER_GAMMA).exp()),
        Dim::Three if alpha < 0.0 => Some(-16.0 * PI * PI * alpha * alpha),
        _ => None,
    }
}

/// f_d(λ): the multiple of G_λ^d with unit L² norm.
pub fn eigenstate_norm_const(d: Dim, lambda: f64) -> Result<f64> {
    check_lambda("eigenstate_norm_const", lambda)?;
    Ok(match d {
        Dim::One => 2.0 * lambda.powf(0.75),
        Dim::Two => 2.0 * (PI * lambda).sqrt(),
        Dim::Three => 2.0 * (4.0 * PI * PI * lambda).powf(0.25),
    })
}

/// A closed-form radial building block of a regular part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedTerm {
    /// amp · exp(-r²/(2 width²))
    Gaussian { amp: Complex64, width: f64 },
    /// coef · G_λ^d(r); only combinations whose coefficients sum to zero are
    /// regular in d = 2, 3.
    Green { coef: Complex64, lambda: f64 },
}

impl ClosedTerm {
    pub fn value(&self, d: Dim, r: f64) -> Result<Complex64> {
        match *self {
            ClosedTerm::Gaussian { amp, width } => Ok(amp * (-r * r / (2.0 * width * width)).exp()),
            ClosedTerm::Green { coef, lambda } => Ok(coef * green(d, lambda, r)?),
        }
    }

    pub fn radial_derivative(&self, d: Dim, r: f64) -> Result<Complex64> {
        match *self {
            ClosedTerm::Gaussian { amp, width } => {
                let w2 = width * width;
                Ok(amp * (-r / w2) * (-r * r / (2.0 * w2)).exp())
            }
            ClosedTerm::Green { coef, lambda } => Ok(coef * green_radial_derivative(d, lambda, r)?),
        }
    }

    /// Distance beyond which the term is below 1e-30 of its scale.
    fn extent(&self) -> f64 {
        match *self {
            ClosedTerm::Gaussian { width, .. } => 12.0 * width,
            ClosedTerm::Green { lambda, .. } => 72.0 / lambda.sqrt(),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            ClosedTerm::Gaussian { width, .. } => width,
            ClosedTerm::Green { lambda, .. } => 1.0 / lambda.sqrt(),
        }
    }
}

/// Representation of the regular part φ_λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularPart {
    Zero,
    Closed { terms: Vec<ClosedTerm> },
    /// Uniform 1-d grid x_j = x0 + j dx.
    Grid1D { x0: f64, dx: f64, values: Vec<Complex64> },
    /// Uniform radial grid r_j = j dr, j ≥ 0 (d = 2, 3).
    Radial { dr: f64, values: Vec<Complex64> },
}

/// u = φ_λ + w·G_λ^d. For d = 2, 3 the singular weight w is the charge q; for
/// d = 1 the charge is u(0) = φ_λ(0) + w/(2√λ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposedState {
    pub lambda: f64,
    pub singular: Complex64,
    pub regular: RegularPart,
}

impl DecomposedState {
    pub fn zero(lambda: f64) -> Self {
        Self { lambda, singular: Complex64::new(0.0, 0.0), regular: RegularPart::Zero }
    }

    /// f_d(-ℓ)·G_{-ℓ}^d for the model's eigenvalue ℓ.
    pub fn eigenstate(model: &DeltaModel) -> Result<Self> {
        let alpha = match model.coupling {
            Coupling::Linear { alpha } => alpha,
            _ => return Err(Error::Unsupported("eigenstate needs a linear coupling".into())),
        };
        let ell = eigenvalue(model.dim, alpha)
            .ok_or_else(|| Error::Inadmissible(format!("no eigenvalue for d = {}, alpha = {alpha}", model.dim)))?;
        let lambda = -ell;
        Ok(Self {
            lambda,
            singular: Complex64::new(eigenstate_norm_const(model.dim, lambda)?, 0.0),
            regular: RegularPart::Zero,
        })
    }

    /// The same function decomposed at another λ.
    pub fn redecompose(&self, d: Dim, lambda: f64) -> Result<Self> {
        check_lambda("redecompose", lambda)?;
        let w = self.singular;
        let extra = [
            ClosedTerm::Green { coef: w, lambda: self.lambda },
            ClosedTerm::Green { coef: -w, lambda },
        ];
        let regular = match &self.regular {
            RegularPart::Zero => RegularPart::Closed { terms: extra.to_vec() },
            RegularPart::Closed { terms } => {
                let mut t = terms.clone();
                t.extend_from_slice(&extra);
                RegularPart::Closed { terms: t }
            }
            RegularPart::Grid1D { x0, dx, values } => {
                let mut v = values.clone();
                for (j, val) in v.iter_mut().enumerate() {
                    let x = x0 + j as f64 * dx;
                    for t in &extra {
                        *val += t.value(d, x)?;
                    }
                }
                RegularPart::Grid1D { x0: *x0, dx: *dx, values: v }
            }
            RegularPart::Radial { dr, values } => {
                let mut v = values.clone();
                for (j, val) in v.iter_mut().enumerate().skip(1) {
                    for t in &extra {
                        *val += t.value(d, j as f64 * dr)?;
                    }
                }
                // r = 0: limit of the Green difference
                if let Some(first) = v.first_mut() {
                    *first += w * green_difference_at_origin(d, self.lambda, lambda);
                }
                RegularPart::Radial { dr: *dr, values: v }
            }
        };
        Ok(Self { lambda, singular: w, regular })
    }

    /// φ_λ(0).
    pub fn regular_at_origin(&self, d: Dim) -> Result<Complex64> {
        match &self.regular {
            RegularPart::Zero => Ok(Complex64::new(0.0, 0.0)),
            RegularPart::Closed { terms } => {
                let mut v = Complex64::new(0.0, 0.0);
                let mut green_sum = Complex64::new(0.0, 0.0);
                for t in terms {
                    match *t {
                        ClosedTerm::Gaussian { amp, .. } => v += amp,
                        ClosedTerm::Green { coef, lambda } => match d {
                            Dim::One => v += coef * green(d, lambda, 0.0)?,
                            _ => {
                                green_sum += coef;
                                v += coef * green_difference_at_origin(d, lambda, 1.0);
                            }
                        },
                    }
                }
                if d != Dim::One && green_sum.norm() > 1e-12 * (1.0 + v.norm()) {
                    return Err(Error::Singular { op: "regular_at_origin", d: d.as_u8() });
                }
                Ok(v)
            }
            RegularPart::Grid1D { x0, dx, values } => {
                let p = -x0 / dx;
                let j = p.floor();
                if j < 0.0 || j as usize + 1 >= values.len() {
                    return Err(domain("regular_at_origin", "grid does not contain the origin"));
                }
                let f = p - j;
                let j = j as usize;
                Ok(values[j] * (1.0 - f) + values[j + 1] * f)
            }
            RegularPart::Radial { values, .. } => values
                .first()
                .copied()
                .ok_or_else(|| domain("regular_at_origin", "empty radial grid")),
        }
    }

    /// The charge q: u(0) in d = 1, the singular weight in d = 2, 3.
    pub fn charge(&self, d: Dim) -> Result<Complex64> {
        match d {
            Dim::One => Ok(self.regular_at_origin(d)? + self.singular / (2.0 * self.lambda.sqrt())),
            _ => Ok(self.singular),
        }
    }

    /// Residual of the operator-domain boundary condition: φ_λ(0) − θq for
    /// d = 2, 3. In d = 1, θφ_λ(0) = q is used multiplied through by
    /// α + 2√λ, which stays finite at the pole of θ.
    pub fn boundary_residual(&self, d: Dim, alpha: f64) -> Result<Complex64> {
        let phi0 = self.regular_at_origin(d)?;
        let q = self.charge(d)?;
        match d {
            Dim::One => {
                check_lambda("boundary_residual", self.lambda)?;
                let s = 2.0 * self.lambda.sqrt();
                Ok(s * phi0 - (alpha + s) * q)
            }
            _ => Ok(phi0 - theta(d, self.lambda, alpha)? * q),
        }
    }
}

/// lim_{r→0} G_μ(r) − G_ν(r) in d = 2, 3.
fn green_difference_at_origin(d: Dim, mu: f64, nu: f64) -> f64 {
    match d {
        Dim::One => 1.0 / (2.0 * mu.sqrt()) - 1.0 / (2.0 * nu.sqrt()),
        Dim::Two => -(mu / nu).ln() / (4.0 * PI),
        Dim::Three => (nu.sqrt() - mu.sqrt()) / (4.0 * PI),
    }
}

fn surface(d: Dim, r: f64) -> f64 {
    match d {
        Dim::One => 2.0,
        Dim::Two => 2.0 * PI * r,
        Dim::Three => 4.0 * PI * r * r,
    }
}

/// ‖∇(φ + w G_λ)‖² and ∫ φ̄ G_λ for a closed-form regular part; `w` is the
/// singular weight folded into the gradient (zero in d = 2, 3).
struct ClosedIntegrals {
    grad: f64,
    cross_green: Complex64,
}

fn closed_integrals(d: Dim, terms: &[ClosedTerm], lambda: f64, singular_in_grad: Complex64) -> Result<ClosedIntegrals> {
    let green_term = ClosedTerm::Green { coef: Complex64::new(1.0, 0.0), lambda };
    let extent = terms.iter().chain(std::iter::once(&green_term)).map(|t| t.extent()).fold(0.0, f64::max);
    let scale = terms.iter().chain(std::iter::once(&green_term)).map(|t| t.scale()).fold(f64::INFINITY, f64::min);
    let rule = Rule::radial(extent, 0.5 * scale, 20);
    let (mut grad, mut cross) = (0.0, Complex64::new(0.0, 0.0));
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = singular_in_grad * green_radial_derivative(d, lambda, r)?;
        for t in terms {
            v += t.value(d, r)?;
            dv += t.radial_derivative(d, r)?;
        }
        let s = surface(d, r) * w;
        grad += dv.norm_sqr() * s;
        cross += v.conj() * green(d, lambda, r)? * s;
    }
    Ok(ClosedIntegrals { grad, cross_green: cross })
}

/// Q_α^d(u) on a decomposed state, for a linear coupling.
pub fn quadratic_form(state: &DecomposedState, model: &DeltaModel) -> Result<f64> {
    let alpha = match model.coupling {
        Coupling::Linear { alpha } => alpha,
        _ => return Err(Error::Unsupported("quadratic_form needs a linear coupling".into())),
    };
    let d = model.dim;
    let lambda = state.lambda;
    check_lambda("quadratic_form", lambda)?;
    let w = state.singular;
    match d {
        Dim::One => {
            // ‖u′‖² + α|u(0)|², with the singular part folded into the gradient
            let grad = match &state.regular {
                RegularPart::Zero => w.norm_sqr() / (4.0 * lambda.sqrt()),
                RegularPart::Closed { terms } => closed_integrals(d, terms, lambda, w)?.grad,
                RegularPart::Grid1D { x0, dx, values } => grid1d_gradient(*x0, *dx, values, lambda, w)?,
                RegularPart::Radial { .. } => {
                    return Err(Error::Unsupported("radial regular part in d = 1".into()))
                }
            };
            let q = state.charge(d)?;
            Ok(grad + alpha * q.norm_sqr())
        }
        Dim::Two | Dim::Three => {
            let th = theta(d, lambda, alpha)?;
            let (grad, cross) = match &state.regular {
                RegularPart::Zero => (0.0, Complex64::new(0.0, 0.0)),
                RegularPart::Closed { terms } => {
                    let c = closed_integrals(d, terms, lambda, Complex64::new(0.0, 0.0))?;
                    (c.grad, c.cross_green)
                }
                RegularPart::Radial { dr, values } => radial_integrals(d, *dr, values, lambda)?,
                RegularPart::Grid1D { .. } => {
                    return Err(Error::Unsupported("1-d grid regular part in d = 2, 3".into()))
                }
            };
            // ‖φ‖² − ‖u‖²
            let diff = -2.0 * (cross * w).re - w.norm_sqr() * green_norm_sq(d, lambda);
            Ok(grad + lambda * diff + th * w.norm_sqr())
        }
    }
}

fn grid1d_gradient(x0: f64, dx: f64, values: &[Complex64], lambda: f64, w: Complex64) -> Result<f64> {
    let n = values.len();
    if n < 5 {
        return Err(Error::Resolution("1-d grid needs at least 5 points".into()));
    }
    let mut sum = 0.0;
    for j in 0..n {
        let x = x0 + j as f64 * dx;
        let dphi = if j == 0 {
            (values[1] - values[0]) / dx
        } else if j == n - 1 {
            (values[n - 1] - values[n - 2]) / dx
        } else {
            (values[j + 1] - values[j - 1]) / (2.0 * dx)
        };
        let dg = if x == 0.0 {
            0.0
        } else {
            x.signum() * green_radial_derivative(Dim::One, lambda, x.abs())?
        };
        let weight = if j == 0 || j == n - 1 { 0.5 * dx } else { dx };
        sum += (dphi + w * dg).norm_sqr() * weight;
    }
    Ok(sum)
}

fn radial_integrals(d: Dim, dr: f64, values: &[Complex64], lambda: f64) -> Result<(f64, Complex64)> {
    let n = values.len();
    if n < 5 {
        return Err(Error::Resolution("radial grid needs at least 5 points".into()));
    }
    let (mut grad, mut cross) = (0.0, Complex64::new(0.0, 0.0));
    for j in 1..n {
        let r = j as f64 * dr;
        let dphi = if j == n - 1 {
            (values[j] - values[j - 1]) / dr
        } else {
            (values[j + 1] - values[j - 1]) / (2.0 * dr)
        };
        let weight = if j == n - 1 { 0.5 * dr } else { dr } * surface(d, r);
        grad += dphi.norm_sqr() * weight;
        cross += values[j].conj() * green(d, lambda, r)? * weight;
    }
    Ok((grad, cross))
}
