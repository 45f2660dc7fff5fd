//! Exact integer kernels: binomial coefficients, Delannoy numbers, and the
//! ray sequences built from them.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::params::{RayParams, Regime};

/// Errors from sequence construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("Delannoy rays are only defined in the Pólya-frequency regime")]
    DelannoyNeedsPolyaFrequency,
    #[error("ray argument n + j*a = {0} does not fit in 64 bits")]
    ArgumentOverflow(u128),
}

/// Binomial coefficient `C(n, k)`, with `C(n, k) = 0` for `k < 0` or `k > n`.
///
/// Computed by the running product `C(n, k) = prod_{i=1..k} (n - k + i) / i`,
/// dividing at every step. Each partial product is itself a binomial
/// coefficient, so every division is exact and intermediates never exceed the
/// final value.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Memo table for Delannoy numbers, shared across one chain of calls.
///
/// `D(n, k)` counts lattice paths from the origin to `(k, n)` using east,
/// north and north-east steps: `D(n, k) = D(n-1, k) + D(n, k-1) + D(n-1, k-1)`
/// with `D(n, 0) = D(0, k) = 1`. Since `D` is symmetric, entries are keyed by
/// `(min, max)` to halve the table.
#[derive(Default)]
pub struct DelannoyTable {
    memo: HashMap<(u64, u64), BigUint>,
}

impl DelannoyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: u64, k: u64) -> BigUint {
        // Iterative dependency resolution: recursion depth would otherwise be
        // n + k, which callers are allowed to make large.
        let mut stack = vec![(n, k)];
        while let Some(&(i, j)) = stack.last() {
            if i == 0 || j == 0 || self.memo.contains_key(&(i.min(j), i.max(j))) {
                stack.pop();
                continue;
            }
            let deps = [(i - 1, j), (i, j - 1), (i - 1, j - 1)];
            let missing: Vec<(u64, u64)> = deps
                .iter()
                .copied()
                .filter(|&(x, y)| {
                    x != 0 && y != 0 && !self.memo.contains_key(&(x.min(y), x.max(y)))
                })
                .collect();
            if missing.is_empty() {
                let v = self.lookup(i - 1, j) + self.lookup(i, j - 1) + self.lookup(i - 1, j - 1);
                self.memo.insert((i.min(j), i.max(j)), v);
                stack.pop();
            } else {
                stack.extend(missing);
            }
        }
        self.lookup(n, k)
    }

    fn lookup(&self, n: u64, k: u64) -> BigUint {
        if n == 0 || k == 0 {
            BigUint::one()
        } else {
            self.memo[&(n.min(k), n.max(k))].clone()
        }
    }
}

/// Delannoy number `D(n, k)` with a memo table scoped to this call.
pub fn delannoy(n: u64, k: u64) -> BigUint {
    DelannoyTable::new().get(n, k)
}

/// Which counting function a ray samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// `C_j = C(n + ja, k + jb)`.
    Binomial,
    /// `D_j = D(n - k + (a-b)j, k + jb)`, zero once the first argument would
    /// turn negative. Only defined for `b > a`.
    Delannoy,
}

/// A materialized prefix of a ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySequence {
    params: RayParams,
    kind: SequenceKind,
    values: Vec<BigUint>,
    last_nonzero: Option<usize>,
}

impl RaySequence {
    pub fn params(&self) -> &RayParams {
        &self.params
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the last nonzero entry. Present exactly in the
    /// Pólya-frequency regime, where the ray terminates.
    pub fn last_nonzero(&self) -> Option<usize> {
        self.last_nonzero
    }
}

/// Materializes `length` entries of the ray selected by `params`.
pub fn ray_sequence(
    params: &RayParams,
    kind: SequenceKind,
    length: usize,
) -> Result<RaySequence, ExactError> {
    let (n, k, a, b) = (params.n(), params.k(), params.a(), params.b());
    let mut values = Vec::with_capacity(length);
    match kind {
        SequenceKind::Binomial => {
            for j in 0..length as u64 {
                let top = n as u128 + j as u128 * a as u128;
                let top = u64::try_from(top).map_err(|_| ExactError::ArgumentOverflow(top))?;
                let bottom = k as i128 + j as i128 * b as i128;
                let bottom = i64::try_from(bottom)
                    .map_err(|_| ExactError::ArgumentOverflow(bottom as u128))?;
                values.push(binomial(top, bottom));
            }
        }
        SequenceKind::Delannoy => {
            if params.regime() != Regime::PolyaFrequency {
                return Err(ExactError::DelannoyNeedsPolyaFrequency);
            }
            let mut table = DelannoyTable::new();
            let cutoff = params.cutoff().expect("finite in this regime");
            for j in 0..length as u64 {
                if j > cutoff {
                    values.push(BigUint::zero());
                } else {
                    values.push(table.get(n - k - (b - a) * j, k + b * j));
                }
            }
        }
    }
    let last_nonzero = match params.regime() {
        Regime::PolyaFrequency => values.iter().rposition(|v| !v.is_zero()),
        Regime::Transition => None,
    };
    Ok(RaySequence {
        params: *params,
        kind,
        values,
        last_nonzero,
    })
}
