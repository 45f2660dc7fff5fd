//! Validated parameters for rays of the binomial triangle.
//!
//! A ray is the integer sequence `C_j = C(n + ja, k + jb)` for `j = 0, 1, 2, …`,
//! obtained by stepping through the triangle with slope `(a, b)`. Two slope
//! regimes admit a useful theory and are the only ones this crate accepts:
//!
//! * `b > a > 0` with `k < b`: the ray eventually leaves the triangle, so the
//!   sequence has finite support. This is the regime where total positivity
//!   and real-rootedness apply.
//! * `a > b > 0`: the ray stays inside the triangle forever and the interest
//!   shifts to where log-concavity hands over to log-convexity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The slope regime a validated quadruple belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `b > a > 0` and `k < b`: finite ray, Pólya-frequency machinery applies.
    PolyaFrequency,
    /// `a > b > 0`: infinite ray with a log-concavity transition.
    Transition,
}

/// Errors raised while validating a quadruple.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("k = {k} exceeds n = {n}")]
    KExceedsN { n: u64, k: u64 },
    #[error("both slopes must be positive, got a = {a}, b = {b}")]
    ZeroSlope { a: u64, b: u64 },
    #[error("a = b = {a} is a constant ray, outside both supported regimes")]
    EqualSlopes { a: u64 },
    #[error("k = {k} must be smaller than b = {b} when b > a")]
    KNotBelowB { k: u64, b: u64 },
}

/// A validated quadruple `(n, k, a, b)` with its inferred [`Regime`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RayParams {
    n: u64,
    k: u64,
    a: u64,
    b: u64,
    regime: Regime,
}

impl RayParams {
    /// Validates `(n, k, a, b)` and infers the regime from the slope order.
    pub fn new(n: u64, k: u64, a: u64, b: u64) -> Result<Self, ParamsError> {
        if k > n {
            return Err(ParamsError::KExceedsN { n, k });
        }
        if a == 0 || b == 0 {
            return Err(ParamsError::ZeroSlope { a, b });
        }
        if a == b {
            return Err(ParamsError::EqualSlopes { a });
        }
        let regime = if b > a {
            if k >= b {
                return Err(ParamsError::KNotBelowB { k, b });
            }
            Regime::PolyaFrequency
        } else {
            Regime::Transition
        };
        Ok(RayParams { n, k, a, b, regime })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Last step index at which the ray can be nonzero, i.e. the largest `j`
    /// with `n + ja >= k + jb`. Only finite in the Pólya-frequency regime.
    pub fn cutoff(&self) -> Option<u64> {
        match self.regime {
            Regime::PolyaFrequency => Some((self.n - self.k) / (self.b - self.a)),
            Regime::Transition => None,
        }
    }
}

impl std::fmt::Display for RayParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(n={}, k={}, a={}, b={})",
            self.n, self.k, self.a, self.b
        )
    }
}
