//! Samples of m_d f_d(t_n): the free evolution at the origin in d = 1, its
//! convolution with the kernel in d = 2, 3.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::weights::CellWeights;
use super::m_const;
use crate::datum::{GaussianPart, InitialDatum};
use crate::error::{Error, Result};
use crate::specfun::exp_erfc_sqrt_i;
use crate::Dim;

/// Product-integrated ∫_0^{t_n} K(t_n − s) b(s) ds for all n ≤ N, with b sampled on the grid.
fn convolve(w: &CellWeights, b: &[Complex64]) -> Vec<Complex64> {
    (0..b.len()).map(|n| w.integrate(|k| b[n - k], n)).collect()
}

/// m_3 f_3 for a Gaussian: m_3 A·2√t/(1 + 2it/a²).
fn gaussian_d3(g: &GaussianPart, t: f64) -> Complex64 {
    m_const(Dim::Three) * g.amplitude * 2.0 * t.sqrt() / Complex64::new(1.0, 2.0 * t / (g.width * g.width))
}

/// m_d f_d(t_n), n = 0..=N.
pub fn scaled_forcing(datum: &InitialDatum, d: Dim, w: &CellWeights, n_steps: usize) -> Result<Vec<Complex64>> {
    datum.validate(d)?;
    let h = w.h;
    let times: Vec<f64> = (0..=n_steps).map(|n| n as f64 * h).collect();
    match d {
        Dim::One => times.iter().map(|&t| datum.free_evolution_at_origin(d, t)).collect(),
        Dim::Three => {
            let mut out = vec![Complex64::new(0.0, 0.0); times.len()];
            match datum {
                InitialDatum::Gaussian { amplitude, width } => {
                    let g = GaussianPart { amplitude: *amplitude, width: *width };
                    for (o, &t) in out.iter_mut().zip(&times) {
                        *o = gaussian_d3(&g, t);
                    }
                }
                InitialDatum::BoundState { .. } | InitialDatum::Green { .. } => {
                    let (c, lambda) = datum.singular_part().expect("singular variant");
                    for (o, &t) in out.iter_mut().zip(&times) {
                        *o = c * exp_erfc_sqrt_i(lambda * t);
                    }
                    if let InitialDatum::Green { regular: Some(g), .. } = datum {
                        for (o, &t) in out.iter_mut().zip(&times) {
                            *o += gaussian_d3(g, t);
                        }
                    }
                }
                InitialDatum::Pseudoconformal { state, phase, blowup_time } => {
                    // the s^{-1/2} part of U(s)D(0) convolves in closed form;
                    // the bounded remainder is product-integrated
                    let big_t = *blowup_time;
                    let p = Complex64::from_polar(state.q_amp, state.omega / big_t + phase);
                    let rw = state.omega.sqrt();
                    let b: Vec<Complex64> = times
                        .iter()
                        .map(|&s| {
                            let tau = s / (big_t * (big_t - s));
                            -p * (big_t - s).powf(-1.5) * rw / (4.0 * PI) * exp_erfc_sqrt_i(state.omega * tau)
                        })
                        .collect();
                    let conv = convolve(w, &b);
                    let m = m_const(Dim::Three);
                    for (n, o) in out.iter_mut().enumerate() {
                        *o = p / (big_t - times[n]).sqrt() + m * conv[n];
                    }
                }
                InitialDatum::Grid1D(_) => return Err(Error::Unsupported("Grid1D data exist only in d = 1".into())),
            }
            Ok(out)
        }
        Dim::Two => {
            let m = m_const(Dim::Two);
            let gaussian_part = |g: &GaussianPart| -> Vec<Complex64> {
                let b: Vec<Complex64> = times
                    .iter()
                    .map(|&s| g.amplitude / Complex64::new(1.0, 2.0 * s / (g.width * g.width)))
                    .collect();
                convolve(w, &b).into_iter().map(|v| m * v).collect()
            };
            match datum {
                InitialDatum::Gaussian { amplitude, width } => Ok(gaussian_part(&GaussianPart { amplitude: *amplitude, width: *width })),
                InitialDatum::BoundState { .. } | InitialDatum::Green { .. } => {
                    // m_2 f_2 = c[e^{iλt} − (ln λ + iπ/2) ∫ K2(t−s) e^{iλs} ds]
                    let (c, lambda) = datum.singular_part().expect("singular variant");
                    let b: Vec<Complex64> = times.iter().map(|&s| Complex64::from_polar(1.0, lambda * s)).collect();
                    let conv = convolve(w, &b);
                    let k = Complex64::new(lambda.ln(), 0.5 * PI);
                    let mut out: Vec<Complex64> = times
                        .iter()
                        .zip(&conv)
                        .map(|(&t, cv)| c * (Complex64::from_polar(1.0, lambda * t) - k * cv))
                        .collect();
                    if let InitialDatum::Green { regular: Some(g), .. } = datum {
                        for (o, v) in out.iter_mut().zip(gaussian_part(g)) {
                            *o += v;
                        }
                    }
                    Ok(out)
                }
                _ => Err(Error::Unsupported("datum variant not available in d = 2".into())),
            }
        }
    }
}

/// m_d f_d(t) at a single time, for data whose forcing needs no convolution.
pub(super) fn pointwise(datum: &InitialDatum, d: Dim, t: f64) -> Result<Complex64> {
    match (d, datum) {
        (Dim::One, _) => datum.free_evolution_at_origin(d, t),
        (Dim::Three, InitialDatum::Gaussian { amplitude, width }) => {
            Ok(gaussian_d3(&GaussianPart { amplitude: *amplitude, width: *width }, t))
        }
        (Dim::Three, InitialDatum::BoundState { .. } | InitialDatum::Green { .. }) => {
            let (c, lambda) = datum.singular_part().expect("singular variant");
            let mut v = c * exp_erfc_sqrt_i(lambda * t);
            if let InitialDatum::Green { regular: Some(g), .. } = datum {
                v += gaussian_d3(g, t);
            }
            Ok(v)
        }
        _ => Err(Error::Unsupported(format!("pointwise forcing is not available for this datum in d = {d}"))),
    }
}
