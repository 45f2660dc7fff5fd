//! Totally positive Toeplitz windows: exact minor evaluation and
//! Pólya-frequency verification up to a chosen order and window.
//!
//! A nonnegative sequence `u_0..u_m` induces the Toeplitz matrix with entry
//! `(i, j) = u_{j-i}` (zero off the band). The sequence is a Pólya frequency
//! sequence exactly when every minor of that matrix is nonnegative. Since the
//! matrix is infinite, [`is_pf_upto`] checks all minors up to a caller-chosen
//! order inside a caller-chosen leading window and labels the verdict with
//! that pair; the exact complementary certificate for finite sequences is
//! real-rootedness of the generating polynomial (see [`crate::roots`]).

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Default cap on the number of minors one [`is_pf_upto`] call may examine.
pub const DEFAULT_MINOR_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToeplitzError {
    #[error("minor spec must select at least one row and one column")]
    EmptySpec,
    #[error("minor spec must select as many rows as columns")]
    ShapeMismatch,
    #[error("minor spec indices must be strictly increasing")]
    NotIncreasing,
    #[error("minor spec index {index} is outside the window of size {window}")]
    OutOfRange { index: usize, window: usize },
    #[error("max order {max_order} exceeds the window size {window}")]
    OrderExceedsWindow { max_order: usize, window: usize },
    #[error("minor budget of {budget} exhausted after examining {examined} minors")]
    BudgetExceeded { budget: u64, examined: u64 },
}

/// A `window × window` leading section of the Toeplitz matrix of a sequence.
#[derive(Clone, Debug)]
pub struct ToeplitzWindow {
    source: Vec<BigUint>,
    /// `source` lowered to machine words when every entry fits, enabling the
    /// overflow-checked `i128` elimination fast path.
    small: Option<Vec<u64>>,
    size: usize,
}

impl ToeplitzWindow {
    pub fn new(source: &[BigUint], size: usize) -> Self {
        let small = source
            .iter()
            .map(u64::try_from)
            .collect::<Result<_, _>>()
            .ok();
        ToeplitzWindow {
            source: source.to_vec(),
            small,
            size,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn source(&self) -> &[BigUint] {
        &self.source
    }

    /// Entry `(i, j) = u_{j-i}`, zero when `j - i` falls outside the band.
    pub fn entry(&self, i: usize, j: usize) -> BigUint {
        if j >= i && j - i < self.source.len() {
            self.source[j - i].clone()
        } else {
            BigUint::zero()
        }
    }

    fn entry_small(small: &[u64], i: usize, j: usize) -> i128 {
        if j >= i && j - i < small.len() {
            small[j - i] as i128
        } else {
            0
        }
    }

    /// True when fraction-free elimination of an `r × r` submatrix cannot
    /// overflow `i128`: every intermediate is a minor of the submatrix, so a
    /// Hadamard bound `r^(r/2) * M^r` on minors (squared by the cross
    /// products, plus one bit for the subtraction) must stay below 2^127.
    fn small_path_fits(&self, r: usize) -> bool {
        match &self.small {
            None => false,
            Some(small) => {
                let m = small.iter().copied().max().unwrap_or(0).max(1) as f64;
                let r = r as f64;
                r / 2.0 * r.log2() + r * (m + 1.0).log2() <= 62.0
            }
        }
    }
}

/// Row and column selection for a minor: strictly increasing index lists of
/// equal nonzero length, all inside the window.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MinorSpec {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self, ToeplitzError> {
        if rows.is_empty() || cols.is_empty() {
            return Err(ToeplitzError::EmptySpec);
        }
        if rows.len() != cols.len() {
            return Err(ToeplitzError::ShapeMismatch);
        }
        for list in [&rows, &cols] {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ToeplitzError::NotIncreasing);
            }
        }
        Ok(MinorSpec { rows, cols })
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    fn check_window(&self, window: usize) -> Result<(), ToeplitzError> {
        for &index in self.rows.iter().chain(&self.cols) {
            if index >= window {
                return Err(ToeplitzError::OutOfRange { index, window });
            }
        }
        Ok(())
    }
}

/// Exact determinant of the submatrix selected by `spec`, by fraction-free
/// (Bareiss) elimination. The sign is meaningful.
pub fn minor(window: &ToeplitzWindow, spec: &MinorSpec) -> Result<BigInt, ToeplitzError> {
    spec.check_window(window.size)?;
    Ok(minor_unchecked(window, &spec.rows, &spec.cols))
}

fn minor_unchecked(window: &ToeplitzWindow, rows: &[usize], cols: &[usize]) -> BigInt {
    let r = rows.len();
    if window.small_path_fits(r) {
        let small = window.small.as_ref().expect("small path checked");
        let mut mat: Vec<i128> = Vec::with_capacity(r * r);
        for &i in rows {
            for &j in cols {
                mat.push(ToeplitzWindow::entry_small(small, i, j));
            }
        }
        BigInt::from(bareiss_i128(&mut mat, r))
    } else {
        let mut mat: Vec<BigInt> = Vec::with_capacity(r * r);
        for &i in rows {
            for &j in cols {
                mat.push(BigInt::from(window.entry(i, j)));
            }
        }
        bareiss_bigint(&mut mat, r)
    }
}

/// Exact determinant of a row-major `n × n` integer matrix, for callers with
/// non-Toeplitz windows (e.g. path matrices). Same elimination as [`minor`].
pub fn exact_det(mut mat: Vec<BigInt>, n: usize) -> BigInt {
    assert_eq!(mat.len(), n * n, "matrix must be square and row-major");
    bareiss_bigint(&mut mat, n)
}

/// Fraction-free elimination on a row-major `n × n` matrix. Every
/// intermediate entry is itself a minor of the input, so all divisions are
/// exact. Zero pivots trigger a row search; an empty pivot column means the
/// determinant is exactly zero.
fn bareiss_i128(mat: &mut [i128], n: usize) -> i128 {
    let mut sign = 1i128;
    let mut prev = 1i128;
    for t in 0..n.saturating_sub(1) {
        if mat[t * n + t] == 0 {
            match (t + 1..n).find(|&r| mat[r * n + t] != 0) {
                None => return 0,
                Some(r) => {
                    for c in 0..n {
                        mat.swap(t * n + c, r * n + c);
                    }
                    sign = -sign;
                }
            }
        }
        let pivot = mat[t * n + t];
        for i in t + 1..n {
            for j in t + 1..n {
                mat[i * n + j] = (mat[i * n + j] * pivot - mat[i * n + t] * mat[t * n + j]) / prev;
            }
            mat[i * n + t] = 0;
        }
        prev = pivot;
    }
    sign * mat[n * n - 1]
}

fn bareiss_bigint(mat: &mut [BigInt], n: usize) -> BigInt {
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for t in 0..n.saturating_sub(1) {
        if mat[t * n + t].is_zero() {
            match (t + 1..n).find(|&r| !mat[r * n + t].is_zero()) {
                None => return BigInt::zero(),
                Some(r) => {
                    for c in 0..n {
                        mat.swap(t * n + c, r * n + c);
                    }
                    sign = -sign;
                }
            }
        }
        let pivot = mat[t * n + t].clone();
        for i in t + 1..n {
            let head = std::mem::take(&mut mat[i * n + t]);
            for j in t + 1..n {
                let cross = &mat[i * n + j] * &pivot - &head * &mat[t * n + j];
                mat[i * n + j] = cross / &prev;
            }
        }
        prev = pivot;
    }
    let det = std::mem::take(&mut mat[n * n - 1]);
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Outcome of a bounded Pólya-frequency check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PfVerdict {
    Pass,
    Fail { witness: MinorSpec, value: BigInt },
}

impl PfVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, PfVerdict::Pass)
    }
}

/// Checks every minor of order `1..=max_order` inside the `window × window`
/// leading section of the Toeplitz matrix of `values`.
///
/// Returns `Pass` when all such minors are nonnegative, otherwise `Fail` with
/// the first negative minor in deterministic enumeration order: order
/// ascending, then rows lexicographic, then columns lexicographic (indices
/// are 0-based). Examining more than `budget` minors aborts with
/// [`ToeplitzError::BudgetExceeded`], which is distinct from a `Fail`.
pub fn is_pf_upto(
    values: &[BigUint],
    max_order: usize,
    window: usize,
    budget: u64,
) -> Result<PfVerdict, ToeplitzError> {
    if max_order > window {
        return Err(ToeplitzError::OrderExceedsWindow { max_order, window });
    }
    let tw = ToeplitzWindow::new(values, window);
    let band = values.len();
    let mut examined: u64 = 0;
    let mut rows_buf = Vec::new();
    let mut cols_buf = Vec::new();
    for order in 1..=max_order {
        let combos = combinations(window, order);
        for rows in &combos {
            for cols in &combos {
                examined += 1;
                if examined > budget {
                    return Err(ToeplitzError::BudgetExceeded { budget, examined });
                }
                // A selected row (or column) that misses the band entirely
                // makes the minor structurally zero; zero passes, so skip
                // the elimination.
                let row_in_band = rows
                    .iter()
                    .all(|&i| cols.iter().any(|&j| j >= i && j - i < band));
                let col_in_band = cols
                    .iter()
                    .all(|&j| rows.iter().any(|&i| j >= i && j - i < band));
                if !row_in_band || !col_in_band {
                    continue;
                }
                let value = minor_unchecked(&tw, rows, cols);
                if value.is_negative() {
                    rows_buf.clone_from(rows);
                    cols_buf.clone_from(cols);
                    return Ok(PfVerdict::Fail {
                        witness: MinorSpec {
                            rows: rows_buf,
                            cols: cols_buf,
                        },
                        value,
                    });
                }
            }
        }
    }
    Ok(PfVerdict::Pass)
}

/// All `r`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations(r).collect()
}
