//! Nonlinear Schrödinger equation with a point-concentrated nonlinearity in
//! dimensions one, two and three.
//!
//! The whole dynamics is driven by a scalar charge q(t) solving a weakly
//! singular Volterra equation ([`charge`]); the wave function is rebuilt from
//! it through the Duhamel formula ([`field`]).

pub mod analytic;
pub mod approx1d;
pub mod charge;
pub mod datum;
pub mod error;
pub mod export;
pub mod field;
pub mod linear_delta;
pub mod quad;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

use serde::{Deserialize, Serialize};

/// Spatial dimension; point interactions are defined only for d = 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dim {
    One,
    Two,
    Three,
}

impl Dim {
    pub fn as_u8(self) -> u8 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_u8() as f64
    }
}

impl TryFrom<u8> for Dim {
    type Error = String;
    fn try_from(d: u8) -> std::result::Result<Self, String> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(format!(
                "dimension {d} not supported: point interactions are defined only for d = 1, 2, 3"
            )),
        }
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.as_u8()
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}
