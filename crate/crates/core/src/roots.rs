//! Exact decision of whether an integer polynomial has only real zeros.
//!
//! The route is classical: reduce to the square-free part `q = p / gcd(p, p')`
//! by exact polynomial gcd, then count distinct real roots of `q` with a
//! Sturm chain over `(-B, B]` for a Cauchy root bound `B`, and compare the
//! count with `deg q`. All arithmetic is exact over the integers
//! (primitive-part pseudo-remainders); ray polynomials have huge coefficients
//! and floating point would misclassify them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::RaySequence;
use crate::params::Regime;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootsError {
    #[error("the sequence has infinite support; only terminating sequences have a polynomial")]
    InfiniteSupport,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
}

/// Dense integer polynomial. `coeffs[i]` is the coefficient of `x^i`; the
/// vector is empty exactly for the zero polynomial, otherwise the last
/// coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    /// The polynomial `Σ C_j x^j` of a terminating ray, truncated at the last
    /// nonzero value.
    pub fn from_sequence(seq: &RaySequence) -> Result<Self, RootsError> {
        if seq.params().regime() == Regime::Transition {
            return Err(RootsError::InfiniteSupport);
        }
        let coeffs = match seq.last_nonzero() {
            None => Vec::new(),
            Some(last) => seq.values()[..=last]
                .iter()
                .map(|v| BigInt::from(v.clone()))
                .collect(),
        };
        Ok(IntPolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> IntPolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        IntPolynomial::new(coeffs)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Divides out the content (gcd of coefficients); the sign of every
    /// coefficient is preserved.
    pub fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let content = self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| c / &content).collect(),
        }
    }

    fn negate(&self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn scale(&self, s: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_default();
                let b = other.coeffs.get(i).cloned().unwrap_or_default();
                a - b
            })
            .collect();
        IntPolynomial::new(coeffs)
    }

    /// `self * x^k`.
    fn shift(&self, k: usize) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }
}

impl From<Vec<i64>> for IntPolynomial {
    fn from(coeffs: Vec<i64>) -> Self {
        IntPolynomial::new(coeffs.into_iter().map(BigInt::from).collect())
    }
}

/// Remainder of `f` by `g` scaled to integer coefficients by a positive
/// rational multiple: computes the pseudo-remainder and corrects for the sign
/// of the accumulated `lead(g)` powers.
fn positive_rem(f: &IntPolynomial, g: &IntPolynomial) -> IntPolynomial {
    let lg = g.lead().clone();
    let dg = g.degree().expect("divisor nonzero");
    let mut r = f.clone();
    let mut negated = false;
    while let Some(dr) = r.degree() {
        if dr < dg {
            break;
        }
        // r := lg * r - lead(r) * x^(dr-dg) * g  cancels the leading term and
        // multiplies the eventual remainder by lg once.
        let head = r.lead().clone();
        r = r.scale(&lg).sub(&g.shift(dr - dg).scale(&head));
        if lg.is_negative() {
            negated = !negated;
        }
        debug_assert!(r.degree().is_none_or(|d| d < dr));
    }
    if negated {
        r.negate()
    } else {
        r
    }
}

/// Quotient of an exact polynomial division; `None` if `den` does not divide
/// `num` over the integers.
fn exact_div(num: &IntPolynomial, den: &IntPolynomial) -> Option<IntPolynomial> {
    let dd = den.degree().expect("divisor nonzero");
    let mut rem = num.clone();
    let mut quot = vec![BigInt::zero(); num.coeffs.len().saturating_sub(dd)];
    while let Some(dr) = rem.degree() {
        if dr < dd {
            return None;
        }
        let (q, r) = rem.lead().div_rem(den.lead());
        if !r.is_zero() {
            return None;
        }
        quot[dr - dd] = q.clone();
        let single = IntPolynomial::new(vec![q]).shift(dr - dd);
        rem = rem.sub(&mul(&single, den));
        if rem.is_zero() {
            return Some(IntPolynomial::new(quot));
        }
    }
    None
}

fn mul(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    if a.is_zero() || b.is_zero() {
        return IntPolynomial::new(Vec::new());
    }
    let mut coeffs = vec![BigInt::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, ca) in a.coeffs.iter().enumerate() {
        for (j, cb) in b.coeffs.iter().enumerate() {
            coeffs[i + j] += ca * cb;
        }
    }
    IntPolynomial::new(coeffs)
}

/// Polynomial gcd up to sign, as a primitive polynomial with positive leading
/// coefficient.
fn primitive_gcd(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let mut f = a.primitive_part();
    let mut g = b.primitive_part();
    if f.degree() < g.degree() {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        let r = positive_rem(&f, &g).primitive_part();
        f = g;
        g = r;
    }
    if f.lead().is_negative() {
        f.negate()
    } else {
        f
    }
}

/// Canonical Sturm chain: `p₀ = p`, `p₁ = p'`, `p_{i+1} = -rem(p_{i-1}, p_i)`
/// with each remainder cleared to integer coefficients by a positive rational
/// multiple (primitive-part normalization, sign preserved). The chain stops
/// at the last nonzero element.
pub fn sturm_chain(p: &IntPolynomial) -> Result<Vec<IntPolynomial>, RootsError> {
    if p.is_zero() {
        return Err(RootsError::ZeroPolynomial);
    }
    let mut chain = vec![p.clone()];
    let dp = p.derivative();
    if dp.is_zero() {
        return Ok(chain);
    }
    chain.push(dp);
    loop {
        let f = &chain[chain.len() - 2];
        let g = &chain[chain.len() - 1];
        if g.degree() == Some(0) {
            break;
        }
        let r = positive_rem(f, g);
        if r.is_zero() {
            break;
        }
        let next = r.negate().primitive_part();
        chain.push(next);
    }
    Ok(chain)
}

/// Sign variations of the chain evaluated at `x` (zero values skipped).
pub fn sign_variations_at(chain: &[IntPolynomial], x: &BigInt) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_negative() {
                -1
            } else if v.is_zero() {
                0
            } else {
                1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`,
/// assuming `chain` is the Sturm chain of a square-free polynomial.
pub fn distinct_real_roots_in(chain: &[IntPolynomial], lo: &BigInt, hi: &BigInt) -> usize {
    sign_variations_at(chain, lo) - sign_variations_at(chain, hi)
}

/// Integer `B` with every root `z` satisfying `|z| < B`: the Cauchy bound
/// `1 + max_i |c_i| / |c_deg|`, rounded up. (Strictness: a root with
/// `|z| ≥ 1 + M/|lead|` would need `|z|^d ≤ M(|z|^d - 1)/((|z|-1)|lead|)
/// ≤ |z|^d - 1`.)
pub fn cauchy_bound(p: &IntPolynomial) -> Result<BigInt, RootsError> {
    let d = p.degree().ok_or(RootsError::ZeroPolynomial)?;
    let lead = p.lead().abs();
    let max = p.coeffs[..d]
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(BigInt::zero);
    Ok(1 + (max + &lead - 1) / lead)
}

/// True iff every complex root of `p` is real (counting multiplicity):
/// the Sturm count of distinct real roots of the square-free part `q` must
/// reach `deg q`.
pub fn all_roots_real(p: &IntPolynomial) -> Result<bool, RootsError> {
    let d = match p.degree() {
        None => return Err(RootsError::ZeroPolynomial),
        Some(0) => return Ok(true),
        Some(d) => d,
    };
    let q = square_free_part(p);
    debug_assert!(q.degree().is_some_and(|dq| dq >= 1 && dq <= d));
    let chain = sturm_chain(&q).expect("square-free part is nonzero");
    let bound = cauchy_bound(&q)?;
    let count = distinct_real_roots_in(&chain, &(-bound.clone()), &bound);
    Ok(count == q.degree().expect("nonconstant"))
}

/// The square-free part `p / gcd(p, p')`, normalized primitive with positive
/// leading coefficient. Root set (ignoring multiplicity) is preserved.
pub fn square_free_part(p: &IntPolynomial) -> IntPolynomial {
    let num = {
        let pp = p.primitive_part();
        if pp.lead().is_negative() {
            pp.negate()
        } else {
            pp
        }
    };
    let g = primitive_gcd(&num, &num.derivative());
    exact_div(&num, &g)
        .expect("gcd divides the primitive part exactly")
        .primitive_part()
}
