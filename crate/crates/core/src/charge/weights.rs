//! Product-integration weights for the convolution ∫_0^{t_n} K(τ) y(t_n − τ) dτ
//! with y piecewise linear on a uniform grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Result;
use crate::specfun::{volterra_cell_moments, volterra_first_moment, volterra_primitive};
use crate::Dim;

/// Per-cell hat integrals: for cell [kh, (k+1)h], `left[k]` is the weight of
/// the node τ = kh and `right[k]` that of τ = (k+1)h.
#[derive(Debug, Clone)]
pub struct CellWeights {
    pub h: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl CellWeights {
    pub fn cells(&self) -> usize {
        self.left.len()
    }

    /// Weight of the node τ = kh (1 ≤ k < n) in a sum up to τ = nh; node 0
    /// gets `left[0]`, node n gets `right[n-1]`.
    pub fn interior(&self, k: usize) -> f64 {
        if k == 0 {
            self.left[0]
        } else {
            self.left[k] + self.right[k - 1]
        }
    }

    /// ∫_0^{nh} K(τ) g(τ) dτ for g linear between the given node values g(kh), k = 0..=n.
    pub fn integrate(&self, g: impl Fn(usize) -> num_complex::Complex64, n: usize) -> num_complex::Complex64 {
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        if n == 0 {
            return s;
        }
        for k in 0..n {
            s += self.interior(k) * g(k);
        }
        s + self.right[n - 1] * g(n)
    }
}

fn abel_cells(h: f64, n: usize) -> CellWeights {
    let sh = h.sqrt();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        let d = 1.0 / ((kf + 1.0).sqrt() + kf.sqrt());
        let s = (kf * (kf + 1.0)).sqrt();
        let shift = if k == 0 { 0.0 } else { kf / (s + kf) };
        let r = sh * d * (2.0 / 3.0) * (1.0 + shift);
        right.push(r);
        left.push(2.0 * sh * d - r);
    }
    CellWeights { h, left, right }
}

fn volterra_cell(h: f64, k: usize) -> Result<(f64, f64)> {
    let (m0, m1, a) = if k == 0 {
        (volterra_primitive(h)?, volterra_first_moment(h)?, 0.0)
    } else {
        let a = k as f64 * h;
        let (m0, m1) = volterra_cell_moments(a, a + h)?;
        (m0, m1, a)
    };
    let r = (m1 - a * m0) / h;
    Ok((m0 - r, r))
}

type Cache = Mutex<HashMap<u64, Arc<CellWeights>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Weights for `n` cells of width `h` for the kernel of dimension `d`. The
/// d = 2 moments are computed by quadrature once per step size and extended
/// on demand.
pub fn cell_weights(d: Dim, h: f64, n: usize) -> Result<Arc<CellWeights>> {
    match d {
        Dim::One | Dim::Three => Ok(Arc::new(abel_cells(h, n))),
        Dim::Two => {
            let key = h.to_bits();
            let have = cache().lock().expect("weight cache").get(&key).cloned();
            if let Some(w) = &have {
                if w.cells() >= n {
                    return Ok(w.clone());
                }
            }
            let mut w = have.map(|w| (*w).clone()).unwrap_or(CellWeights { h, left: vec![], right: vec![] });
            for k in w.cells()..n {
                let (l, r) = volterra_cell(h, k)?;
                w.left.push(l);
                w.right.push(r);
            }
            let w = Arc::new(w);
            cache().lock().expect("weight cache").insert(key, w.clone());
            Ok(w)
        }
    }
}
