//! Exact classification of the log-concave → log-convex transition for rays
//! with `a > b`, plus the analytic machinery that explains it.
//!
//! The exact side works on the integers `Q_j = C_{j+1}² − C_j C_{j+2}`: their
//! signs, the first non-positive index `m`, and whether the sign list makes a
//! single transition. The analytic side studies `g(x) = log Γ(n+ax+1) −
//! log Γ(k+bx+1) − log Γ(n−k+(a−b)x+1)` (the continuous interpolation of
//! `log C_x`): `g″` via trigamma, the same quantity via adaptive quadrature
//! of `g″(x) = ∫₀^∞ a² t e^{−(ax+n+1)t} h(t, u) dt` with the kernel
//! `h(t, u) = 1/(1−e^{−t}) − e^{−(u+1)pt}/(1−e^{−pt}) − e^{uqt}/(1−e^{−qt})`,
//! root location for both, and Watson-type large-`x` asymptotics
//! `g″(x) ≈ a²/(2(ax+n+1)²)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::{ray_sequence, ExactError, SequenceKind};
use crate::params::{RayParams, Regime};

#[derive(Debug, Error, PartialEq)]
pub enum TransitionError {
    #[error("transition analysis requires the a > b regime")]
    WrongRegime,
    #[error("window length {j_max} is too small; need at least 3")]
    WindowTooSmall { j_max: u64 },
    #[error("argument {x} is outside the domain")]
    Domain { x: f64 },
    #[error("regime not applicable: u = {u} is outside [-1, 0]")]
    NotApplicable { u: String },
    #[error("{count} sign changes of {what} detected; expected at most one")]
    MultipleSignChanges { what: &'static str, count: usize },
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate}")]
    QuadratureDidNotConverge { estimate: f64, error_estimate: f64 },
    #[error(transparent)]
    Sequence(#[from] ExactError),
}

/// Exact sign of `c1² − c0·c2` for nonnegative integers (compared as
/// products; no subtraction, no rounding).
pub fn log_concavity_sign(
    c0: &num_bigint::BigUint,
    c1: &num_bigint::BigUint,
    c2: &num_bigint::BigUint,
) -> i8 {
    match (c1 * c1).cmp(&(c0 * c2)) {
        Ordering::Greater => 1,
        Ordering::Equal => 0,
        Ordering::Less => -1,
    }
}

/// The exact sign profile of `Q_j = C_{j+1}² − C_j C_{j+2}` over a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionProfile {
    params: RayParams,
    j_max: u64,
    signs: Vec<i8>,
    m: u64,
    monotone_ok: bool,
}

impl TransitionProfile {
    pub fn params(&self) -> &RayParams {
        &self.params
    }

    pub fn j_max(&self) -> u64 {
        self.j_max
    }

    /// `signs[j] = sign(C_{j+1}² − C_j C_{j+2})` for `j = 0..=j_max`.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Smallest `j` with `signs[j] ≤ 0`; the sentinel `j_max + 1` when every
    /// sign in the window is positive.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// True exactly when the sign list is nonincreasing, i.e. matches the
    /// single-transition pattern `+* 0* -*`.
    pub fn monotone_ok(&self) -> bool {
        self.monotone_ok
    }

    /// Run-length encoding of the sign list as `(sign, run)` pairs.
    pub fn signs_rle(&self) -> Vec<(i8, u64)> {
        let mut rle: Vec<(i8, u64)> = Vec::new();
        for &s in &self.signs {
            match rle.last_mut() {
                Some((prev, run)) if *prev == s => *run += 1,
                _ => rle.push((s, 1)),
            }
        }
        rle
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "params": {
                "n": self.params.n(),
                "k": self.params.k(),
                "a": self.params.a(),
                "b": self.params.b(),
            },
            "j_max": self.j_max,
            "signs_rle": self.signs_rle(),
            "m": self.m,
            "monotone_ok": self.monotone_ok,
        })
    }
}

/// Computes the exact sign profile of the ray over `j = 0..=j_max`, the
/// transition index `m`, and the single-transition flag. Uses exact values
/// through index `j_max + 2`.
pub fn classify(params: &RayParams, j_max: u64) -> Result<TransitionProfile, TransitionError> {
    if params.regime() != Regime::Transition {
        return Err(TransitionError::WrongRegime);
    }
    if j_max < 3 {
        return Err(TransitionError::WindowTooSmall { j_max });
    }
    let seq = ray_sequence(params, SequenceKind::Binomial, j_max as usize + 3)?;
    let v = seq.values();
    let signs: Vec<i8> = (0..=j_max as usize)
        .map(|j| log_concavity_sign(&v[j], &v[j + 1], &v[j + 2]))
        .collect();
    let m = signs
        .iter()
        .position(|&s| s <= 0)
        .map_or(j_max + 1, |p| p as u64);
    let monotone_ok = signs.windows(2).all(|w| w[0] >= w[1]);
    Ok(TransitionProfile {
        params: *params,
        j_max,
        signs,
        m,
        monotone_ok,
    })
}

/// Checks the log-convexity statement on its own turf: requires
/// `-1 ≤ u ≤ 0` exactly and passes iff every sign in the window is ≤ 0.
pub fn theorem1_check(params: &RayParams, j_max: u64) -> Result<bool, TransitionError> {
    let ap = AnalyticParams::new(params)?;
    let u = ap.u();
    if *u < BigRational::from_integer(BigInt::from(-1)) || *u > BigRational::zero() {
        return Err(TransitionError::NotApplicable { u: u.to_string() });
    }
    let profile = classify(params, j_max)?;
    Ok(profile.signs().iter().all(|&s| s <= 0))
}

/// The exact rational constants of the analytic side:
/// `u = k − (n+1)b/a`, `p = a/b`, `q = a/(a−b)`, with `1/p + 1/q = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticParams {
    u: BigRational,
    p: BigRational,
    q: BigRational,
    u_f: f64,
    p_f: f64,
    q_f: f64,
}

impl AnalyticParams {
    pub fn new(params: &RayParams) -> Result<Self, TransitionError> {
        if params.regime() != Regime::Transition {
            return Err(TransitionError::WrongRegime);
        }
        let (n, k, a, b) = (
            BigInt::from(params.n()),
            BigInt::from(params.k()),
            BigInt::from(params.a()),
            BigInt::from(params.b()),
        );
        let u = BigRational::new(&k * &a - (&n + 1) * &b, a.clone());
        let p = BigRational::new(a.clone(), b.clone());
        let q = BigRational::new(a.clone(), &a - &b);
        debug_assert!(p.recip() + q.recip() == BigRational::one());
        let (u_f, p_f, q_f) = (
            u.to_f64().expect("finite rational"),
            p.to_f64().expect("finite rational"),
            q.to_f64().expect("finite rational"),
        );
        Ok(AnalyticParams {
            u,
            p,
            q,
            u_f,
            p_f,
            q_f,
        })
    }

    pub fn u(&self) -> &BigRational {
        &self.u
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn u_f64(&self) -> f64 {
        self.u_f
    }

    pub fn p_f64(&self) -> f64 {
        self.p_f
    }

    pub fn q_f64(&self) -> f64 {
        self.q_f
    }
}

/// Trigamma `ψ₁(x)` for `x > 0` to at least 12 significant digits: upward
/// recurrence `ψ₁(x) = ψ₁(x+1) + 1/x²` until `x ≥ 10`, then the asymptotic
/// series with Bernoulli coefficients through the `x⁻¹¹` term.
pub fn trigamma(x: f64) -> Result<f64, TransitionError> {
    if x.is_nan() || x <= 0.0 {
        return Err(TransitionError::Domain { x });
    }
    let mut acc = 0.0;
    let mut x = x;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/(2x²) + 1/(6x³) − 1/(30x⁵) + 1/(42x⁷) − 1/(30x⁹) + 5/(66x¹¹)
    let tail = inv
        * (1.0
            + inv
                * (0.5
                    + inv
                        * (1.0 / 6.0
                            + inv2
                                * (-1.0 / 30.0
                                    + inv2
                                        * (1.0 / 42.0
                                            + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0)))))));
    Ok(acc + tail)
}

/// `g″(x) = a²ψ₁(n+ax+1) − b²ψ₁(k+bx+1) − (a−b)²ψ₁(n−k+(a−b)x+1)`.
pub fn g_second(params: &RayParams, x: f64) -> Result<f64, TransitionError> {
    if params.regime() != Regime::Transition {
        return Err(TransitionError::WrongRegime);
    }
    if x.is_nan() || x < 0.0 {
        return Err(TransitionError::Domain { x });
    }
    let (n, k, a, b) = (
        params.n() as f64,
        params.k() as f64,
        params.a() as f64,
        params.b() as f64,
    );
    Ok(a * a * trigamma(n + a * x + 1.0)?
        - b * b * trigamma(k + b * x + 1.0)?
        - (a - b) * (a - b) * trigamma(n - k + (a - b) * x + 1.0)?)
}

/// `g″(x)` scaled by the reciprocal of its leading asymptotic term
/// `a²/(2(ax+n+1)²)`; tends to 1 as `x → ∞`.
pub fn watson_ratio(params: &RayParams, x: f64) -> Result<f64, TransitionError> {
    let w = params.a() as f64 * x + params.n() as f64 + 1.0;
    Ok(g_second(params, x)? * 2.0 * w * w / ((params.a() * params.a()) as f64))
}

/// Cubic Taylor polynomials of `s·(e^{−βs}/(1−e^{−s}) − 1/s)` at `s = 0`,
/// evaluated coefficient-wise: the `t^i` coefficient of each of the three
/// kernel terms is `rate^i · Fi(β)` for the term's rate and shift.
fn f1(beta: f64) -> f64 {
    beta * beta / 2.0 + beta / 2.0 + 1.0 / 12.0
}

fn f2(beta: f64) -> f64 {
    beta.powi(3) / 6.0 + beta * beta / 4.0 + beta / 12.0
}

fn f3(beta: f64) -> f64 {
    beta.powi(4) / 24.0 + beta.powi(3) / 12.0 + beta * beta / 24.0 - 1.0 / 720.0
}

/// Series form of `h` for small `t`: the three `1/t` poles cancel exactly
/// because `1/p + 1/q = 1`, leaving `1/2 + c₁t + c₂t² + c₃t³`.
fn h_series(t: f64, u: f64, p: f64, q: f64) -> f64 {
    let c1 = f1(0.0) - p * f1(-u - 1.0) - q * f1(u);
    let c2 = f2(0.0) - p * p * f2(-u - 1.0) - q * q * f2(u);
    let c3 = f3(0.0) - p.powi(3) * f3(-u - 1.0) - q.powi(3) * f3(u);
    0.5 + t * (c1 + t * (c2 + t * c3))
}

/// Switchover point between the series and the direct form of `h`.
const H_SERIES_CUTOFF: f64 = 1e-3;

fn h_raw(t: f64, u: f64, p: f64, q: f64) -> f64 {
    if t < H_SERIES_CUTOFF {
        return h_series(t, u, p, q);
    }
    // -expm1(-s) = 1 - e^{-s}, stable for small and large s alike.
    1.0 / -f64::exp_m1(-t)
        - f64::exp(-(u + 1.0) * p * t) / -f64::exp_m1(-p * t)
        - f64::exp(u * q * t) / -f64::exp_m1(-q * t)
}

/// Numerically stable evaluation of the kernel
/// `h(t, u) = 1/(1−e^{−t}) − e^{−(u+1)pt}/(1−e^{−pt}) − e^{uqt}/(1−e^{−qt})`
/// for `t > 0`; approaches `1/2` as `t → 0⁺`.
pub fn h_eval(ap: &AnalyticParams, t: f64) -> f64 {
    assert!(t > 0.0, "h is evaluated on t > 0");
    h_raw(t, ap.u_f, ap.p_f, ap.q_f)
}

// 15-point Gauss–Kronrod nodes and weights on [-1, 1] (7-point Gauss
// embedded). The classical tables carry guard digits beyond f64; keep them
// as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// One Gauss–Kronrod 15(7) rule application: returns the Kronrod value and a
/// conservative error estimate `|K15 − G7|`.
fn gk15(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, &xi) in XGK.iter().enumerate().take(7) {
        let dx = half * xi;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

#[derive(PartialEq)]
struct Segment {
    err: f64,
    lo: f64,
    hi: f64,
    value: f64,
}

impl Eq for Segment {}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Globally adaptive bisection quadrature on `[lo, hi]`, splitting the
/// segment with the largest error estimate first.
fn adaptive_quadrature(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_floor: f64,
    max_segments: usize,
) -> Result<f64, TransitionError> {
    let (value, err) = gk15(f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err, lo, hi, value });
    let mut total_value = value;
    let mut total_err = err;
    while total_err > f64::max(rel_tol * total_value.abs(), abs_floor) {
        if heap.len() >= max_segments {
            return Err(TransitionError::QuadratureDidNotConverge {
                estimate: total_value,
                error_estimate: total_err,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(f, worst.lo, mid);
        let (v2, e2) = gk15(f, mid, worst.hi);
        total_value += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            err: e1,
            lo: worst.lo,
            hi: mid,
            value: v1,
        });
        heap.push(Segment {
            err: e2,
            lo: mid,
            hi: worst.hi,
            value: v2,
        });
    }
    Ok(total_value)
}

/// `g″(x)` by adaptive quadrature of its integral representation, the dual
/// route to [`g_second`].
///
/// The integrand is evaluated with the `e^{−(ax+n+1)t}` factor folded into
/// each kernel term, so every exponent is strictly negative:
/// `a² t (e^{−wt}/(1−e^{−t}) − e^{−s₂t}/(1−e^{−pt}) − e^{−s₃t}/(1−e^{−qt}))`
/// with `w = ax+n+1`, `s₂ = ax + a(k+1)/b`, `s₃ = ax + a(n+1−k)/(a−b)`, all
/// positive. The truncation point `T` grows until the per-term exponential
/// tail bound drops below `10⁻¹²` of the integral scale.
pub fn g_second_quadrature(params: &RayParams, x: f64) -> Result<f64, TransitionError> {
    let ap = AnalyticParams::new(params)?;
    if x.is_nan() || x < 0.0 {
        return Err(TransitionError::Domain { x });
    }
    let (n, k, a, b) = (
        params.n() as f64,
        params.k() as f64,
        params.a() as f64,
        params.b() as f64,
    );
    let (u, p, q) = (ap.u_f, ap.p_f, ap.q_f);
    let w = a * x + n + 1.0;
    let s2 = a * x + a * (k + 1.0) / b;
    let s3 = a * x + a * (n + 1.0 - k) / (a - b);
    debug_assert!(w > 0.0 && s2 > 0.0 && s3 > 0.0);

    let integrand = move |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t < H_SERIES_CUTOFF {
            return a * a * t * f64::exp(-w * t) * h_series(t, u, p, q);
        }
        a * a
            * t
            * (f64::exp(-w * t) / -f64::exp_m1(-t)
                - f64::exp(-s2 * t) / -f64::exp_m1(-p * t)
                - f64::exp(-s3 * t) / -f64::exp_m1(-q * t))
    };

    // ∫_T^∞ t e^{−st} dt = e^{−sT}(Ts+1)/s²; each term's denominator is at
    // least its value at T.
    let tail_bound = |t_end: f64| -> f64 {
        [(w, 1.0), (s2, p), (s3, q)]
            .iter()
            .map(|&(s, rate)| {
                a * a * f64::exp(-s * t_end) * (t_end * s + 1.0)
                    / (s * s * -f64::exp_m1(-rate * t_end))
            })
            .sum()
    };

    // Integral scale for the tail target: the leading asymptotic term is a
    // safe positive proxy even where g″ itself crosses zero.
    let scale = a * a / (2.0 * w * w);
    let mut t_end = 10.0f64.min(60.0 / w).max(1.0);
    for _ in 0..200 {
        if tail_bound(t_end) <= 1e-12 * scale {
            break;
        }
        t_end *= 1.5;
    }
    adaptive_quadrature(&integrand, 0.0, t_end, 1e-11, 1e-16 * scale, 4000)
}

/// Absolute scale of the three kernel terms at `t`; `h` values smaller than
/// roughly machine epsilon times this are numerical noise. (At the regime
/// boundaries `u ∈ {−1, 0}` the true kernel decays like `e^{−t}` while its
/// constituent terms stay `O(1)`, so beyond `t ≈ 36` the sign of the
/// computed value carries no information.)
fn h_term_scale(t: f64, u: f64, p: f64, q: f64) -> f64 {
    if t < H_SERIES_CUTOFF {
        return 1.0;
    }
    1.0 / -f64::exp_m1(-t)
        + f64::exp(-(u + 1.0) * p * t) / -f64::exp_m1(-p * t)
        + f64::exp(u * q * t) / -f64::exp_m1(-q * t)
}

/// Noise floor below which a computed `h` value is not sign-trustworthy.
fn h_noise_floor(t: f64, u: f64, p: f64, q: f64) -> f64 {
    64.0 * f64::EPSILON * h_term_scale(t, u, p, q)
}

/// Locations where a sampled function changes sign: returns the bracketing
/// grid pairs. A grid value of exactly zero is treated as its own location.
fn sign_change_brackets(values: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut brackets = Vec::new();
    let mut last_nonzero: Option<(f64, f64)> = None;
    for &(x, v) in values {
        if v == 0.0 {
            brackets.push((x, x));
            continue;
        }
        if let Some((px, pv)) = last_nonzero {
            if (pv > 0.0) != (v > 0.0) {
                brackets.push((px, x));
            }
        }
        last_nonzero = Some((x, v));
    }
    brackets
}

/// Bisects a sign-change bracket of `f` to width `1e-10`.
fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let mut f_lo = f(lo);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_lo > 0.0) == (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const SCAN_SAMPLES: usize = 2000;

/// Unique root of `h(·, u)` on `(0, t_max]` if it changes sign there,
/// located by bisection to width `1e-10`; `None` when no sign change occurs.
/// More than one sign change on the scan grid is reported as an error — it
/// would contradict the kernel's single-crossing behavior.
pub fn h_root(ap: &AnalyticParams, t_max: f64) -> Result<Option<f64>, TransitionError> {
    assert!(t_max > 0.0, "scan window must be positive");
    let grid = h_scan_grid(ap, t_max, SCAN_SAMPLES);
    let brackets = sign_change_brackets(&grid);
    match brackets.len() {
        0 => Ok(None),
        1 => {
            let f = |t: f64| h_eval(ap, t);
            Ok(Some(bisect(&f, brackets[0].0, brackets[0].1)))
        }
        count => Err(TransitionError::MultipleSignChanges { what: "h", count }),
    }
}

/// Unique sign-change location `x*` of `g″` on `(0, x_max]`, by linear-grid
/// scan and bisection to width `1e-10`; `None` when `g″` keeps one sign.
/// Multiple sign changes are reported as an error — the Laplace-transform
/// variation-diminishing argument allows at most one.
pub fn predict_transition(params: &RayParams, x_max: f64) -> Result<Option<f64>, TransitionError> {
    if params.regime() != Regime::Transition {
        return Err(TransitionError::WrongRegime);
    }
    assert!(x_max > 0.0, "scan window must be positive");
    let mut grid = Vec::with_capacity(SCAN_SAMPLES);
    for i in 1..=SCAN_SAMPLES {
        let x = x_max * i as f64 / SCAN_SAMPLES as f64;
        grid.push((x, g_second(params, x)?));
    }
    let brackets = sign_change_brackets(&grid);
    match brackets.len() {
        0 => Ok(None),
        1 => {
            let f = |x: f64| g_second(params, x).expect("domain checked");
            Ok(Some(bisect(&f, brackets[0].0, brackets[0].1)))
        }
        count => Err(TransitionError::MultipleSignChanges { what: "g''", count }),
    }
}

/// Number of sign changes of `g″` on a linear grid over `(0, x_max]`.
pub fn g_sign_changes(
    params: &RayParams,
    x_max: f64,
    samples: usize,
) -> Result<usize, TransitionError> {
    let mut grid = Vec::with_capacity(samples);
    for i in 1..=samples {
        let x = x_max * i as f64 / samples as f64;
        grid.push((x, g_second(params, x)?));
    }
    Ok(sign_change_brackets(&grid).len())
}

/// Samples `h` on a log grid over `(0, t_max]`, dropping points whose value
/// sits below the numerical noise floor.
fn h_scan_grid(ap: &AnalyticParams, t_max: f64, samples: usize) -> Vec<(f64, f64)> {
    let lo = 1e-6f64.min(t_max / 2.0);
    (0..=samples)
        .filter_map(|i| {
            let t = lo * (t_max / lo).powf(i as f64 / samples as f64);
            let v = h_eval(ap, t);
            (v.abs() > h_noise_floor(t, ap.u_f, ap.p_f, ap.q_f)).then_some((t, v))
        })
        .collect()
}

/// Number of sign changes of `h(·, u)` on a log grid over `(0, t_max]`.
pub fn h_sign_changes(ap: &AnalyticParams, t_max: f64, samples: usize) -> usize {
    sign_change_brackets(&h_scan_grid(ap, t_max, samples)).len()
}

/// `f(s) = s e^{−s}/(1−e^{−s})`, evaluated stably as `s/(e^s − 1)`.
pub fn aux_f(s: f64) -> f64 {
    s / f64::exp_m1(s)
}

/// `l(s) = s² e^{−s}/(1−e^{−s})²`.
pub fn aux_l(s: f64) -> f64 {
    let d = -f64::exp_m1(-s);
    s * s * f64::exp(-s) / (d * d)
}

/// Central-difference estimate of `∂²h/∂t∂u` at `(t, u)`.
fn mixed_partial_h(t: f64, u: f64, p: f64, q: f64) -> f64 {
    let (dt, du) = (1e-4, 1e-4);
    (h_raw(t + dt, u + du, p, q) - h_raw(t + dt, u - du, p, q) - h_raw(t - dt, u + du, p, q)
        + h_raw(t - dt, u - du, p, q))
        / (4.0 * dt * du)
}

/// Outcome of the auxiliary monotonicity checks.
#[derive(Clone, Debug)]
pub struct AuxReport {
    pub f_strictly_decreasing: bool,
    pub l_strictly_decreasing: bool,
    pub mixed_partial_negative: bool,
    /// Smallest drop between consecutive grid values (positive = monotone).
    pub min_f_drop: f64,
    pub min_l_drop: f64,
    /// Largest sampled value of `∂²h/∂t∂u` over the `u ≥ 0` grid
    /// (negative = check holds).
    pub max_mixed_partial: f64,
    /// Human-readable locations of any violated samples.
    pub violations: Vec<String>,
}

impl AuxReport {
    pub fn passed(&self) -> bool {
        self.f_strictly_decreasing && self.l_strictly_decreasing && self.mixed_partial_negative
    }
}

/// Samples `f` and `l` on a 1000-point log grid over `[10⁻⁶, 50]` asserting
/// strict decrease, and the mixed partial `∂²h/∂t∂u` on a `(t, u)` grid with
/// `u ≥ 0` asserting negativity; reports margins and any violations.
pub fn aux_monotone_checks() -> AuxReport {
    const POINTS: usize = 1000;
    let grid: Vec<f64> = (0..POINTS)
        .map(|i| 1e-6 * (50.0f64 / 1e-6).powf(i as f64 / (POINTS - 1) as f64))
        .collect();

    let mut report = AuxReport {
        f_strictly_decreasing: true,
        l_strictly_decreasing: true,
        mixed_partial_negative: true,
        min_f_drop: f64::INFINITY,
        min_l_drop: f64::INFINITY,
        max_mixed_partial: f64::NEG_INFINITY,
        violations: Vec::new(),
    };

    for pair in grid.windows(2) {
        let f_drop = aux_f(pair[0]) - aux_f(pair[1]);
        report.min_f_drop = report.min_f_drop.min(f_drop);
        if f_drop <= 0.0 {
            report.f_strictly_decreasing = false;
            report
                .violations
                .push(format!("f not decreasing at s={}", pair[1]));
        }
        let l_drop = aux_l(pair[0]) - aux_l(pair[1]);
        report.min_l_drop = report.min_l_drop.min(l_drop);
        if l_drop <= 0.0 {
            report.l_strictly_decreasing = false;
            report
                .violations
                .push(format!("l not decreasing at s={}", pair[1]));
        }
    }

    for &p in &[1.25, 1.5, 2.0, 3.0, 5.0] {
        let q = p / (p - 1.0);
        for &t in &[0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
            for &u in &[0.0, 0.25, 0.5, 1.0, 2.0, 5.0] {
                let d = mixed_partial_h(t, u, p, q);
                report.max_mixed_partial = report.max_mixed_partial.max(d);
                if d >= 0.0 {
                    report.mixed_partial_negative = false;
                    report
                        .violations
                        .push(format!("mixed partial {d} >= 0 at t={t}, u={u}, p={p}"));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(n: u64, k: u64, a: u64, b: u64) -> RayParams {
        RayParams::new(n, k, a, b).unwrap()
    }

    /// Independent evaluation of the sign profile: binomials built by the
    /// Pascal addition rule (no multiplication or division), compared
    /// exactly.
    fn signs_oracle(n: u64, k: u64, a: u64, b: u64, j_max: u64) -> Vec<i8> {
        let top = (n + (j_max + 2) * a) as usize;
        let mut row: Vec<BigUint> = vec![BigUint::from(1u32)];
        let mut rows: Vec<Vec<BigUint>> = vec![row.clone()];
        for _ in 0..top {
            let mut next = vec![BigUint::from(1u32)];
            for w in row.windows(2) {
                next.push(&w[0] + &w[1]);
            }
            next.push(BigUint::from(1u32));
            rows.push(next.clone());
            row = next;
        }
        let binom = |nn: u64, kk: u64| -> BigUint {
            if kk > nn {
                BigUint::from(0u32)
            } else {
                rows[nn as usize][kk as usize].clone()
            }
        };
        let vals: Vec<BigUint> = (0..=j_max + 2)
            .map(|j| binom(n + j * a, k + j * b))
            .collect();
        (0..=j_max as usize)
            .map(
                |j| match (&vals[j + 1] * &vals[j + 1]).cmp(&(&vals[j] * &vals[j + 2])) {
                    Ordering::Greater => 1,
                    Ordering::Equal => 0,
                    Ordering::Less => -1,
                },
            )
            .collect()
    }

    #[test]
    fn classify_central_binomials() {
        let profile = classify(&params(0, 0, 2, 1), 20).unwrap();
        assert!(profile.signs().iter().all(|&s| s <= 0));
        assert_eq!(profile.m(), 0);
        assert!(profile.monotone_ok());
        assert_eq!(profile.signs(), &signs_oracle(0, 0, 2, 1, 20)[..]);
    }

    #[test]
    fn classify_boundary_case() {
        let profile = classify(&params(3, 1, 2, 1), 20).unwrap();
        assert_eq!(profile.m(), 0);
        assert!(profile.signs().iter().all(|&s| s <= 0));
        assert_eq!(profile.signs(), &signs_oracle(3, 1, 2, 1, 20)[..]);
    }

    #[test]
    fn classify_finds_late_transition() {
        let profile = classify(&params(10, 0, 3, 1), 60).unwrap();
        assert!(profile.monotone_ok());
        assert_eq!(profile.m(), 27);
        assert_eq!(&profile.signs()[..41], &signs_oracle(10, 0, 3, 1, 40)[..]);
    }

    #[test]
    fn classify_rejects_bad_input() {
        assert_eq!(
            classify(&params(4, 1, 1, 2), 20).unwrap_err(),
            TransitionError::WrongRegime
        );
        assert_eq!(
            classify(&params(3, 1, 2, 1), 2).unwrap_err(),
            TransitionError::WindowTooSmall { j_max: 2 }
        );
    }

    #[test]
    fn profile_rle_roundtrip() {
        let profile = classify(&params(10, 0, 3, 1), 60).unwrap();
        let rle = profile.signs_rle();
        let expanded: Vec<i8> = rle
            .iter()
            .flat_map(|&(s, run)| std::iter::repeat_n(s, run as usize))
            .collect();
        assert_eq!(expanded, profile.signs());
        assert_eq!(rle.len(), 2, "single transition means two runs");
    }

    proptest! {
        /// Scaling all three values by a common positive integer never
        /// changes the exact sign.
        #[test]
        fn sign_is_scale_invariant(
            c0 in 0u64..1000, c1 in 0u64..1000, c2 in 0u64..1000, s in 1u64..1000
        ) {
            let raw = log_concavity_sign(
                &BigUint::from(c0), &BigUint::from(c1), &BigUint::from(c2));
            let scaled = log_concavity_sign(
                &BigUint::from(c0 * s), &BigUint::from(c1 * s), &BigUint::from(c2 * s));
            prop_assert_eq!(raw, scaled);
        }
    }

    #[test]
    fn analytic_params_identities() {
        for (n, k, a, b) in [(3, 1, 2, 1), (10, 0, 3, 1), (12, 12, 5, 4), (7, 3, 4, 3)] {
            let ap = AnalyticParams::new(&params(n, k, a, b)).unwrap();
            assert_eq!(
                ap.p().recip() + ap.q().recip(),
                BigRational::one(),
                "1/p + 1/q = 1"
            );
            assert!(*ap.p() > BigRational::one());
            assert!(*ap.q() > BigRational::one());
            // u = (ka - (n+1)b)/a assembled independently.
            let want = BigRational::new(
                BigInt::from(k * a) - BigInt::from((n + 1) * b),
                BigInt::from(a),
            );
            assert_eq!(*ap.u(), want);
        }
        assert_eq!(
            AnalyticParams::new(&params(4, 1, 1, 2)).unwrap_err(),
            TransitionError::WrongRegime
        );
    }

    #[test]
    fn theorem1_examples() {
        assert!(theorem1_check(&params(0, 0, 2, 1), 50).unwrap());
        assert!(theorem1_check(&params(3, 1, 2, 1), 50).unwrap());
        assert!(matches!(
            theorem1_check(&params(10, 0, 3, 1), 50).unwrap_err(),
            TransitionError::NotApplicable { .. }
        ));
    }

    #[test]
    fn trigamma_reference_values() {
        // ψ₁(1) = π²/6 and ψ₁(2) = π²/6 − 1.
        let target = PI * PI / 6.0;
        assert!((trigamma(1.0).unwrap() - target).abs() / target < 1e-13);
        assert!((trigamma(2.0).unwrap() - (target - 1.0)).abs() < 1e-13);
        // x ψ₁(x) → 1.
        let x = 1e6;
        assert!((x * trigamma(x).unwrap() - 1.0).abs() < 1e-5);
        assert!(matches!(trigamma(0.0), Err(TransitionError::Domain { .. })));
        assert!(matches!(
            trigamma(-1.5),
            Err(TransitionError::Domain { .. })
        ));
    }

    #[test]
    fn trigamma_reflection_identity() {
        // ψ₁(x) + ψ₁(1−x) = π²/sin²(πx): an identity the recurrence and
        // asymptotic series do not build in, so it cross-checks both.
        for x in [0.1, 0.25, 0.3, 0.4, 0.75, 0.9] {
            let lhs = trigamma(x).unwrap() + trigamma(1.0 - x).unwrap();
            let rhs = PI * PI / (PI * x).sin().powi(2);
            assert!((lhs - rhs).abs() / rhs < 1e-12, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn trigamma_recurrence_consistency() {
        for x in [0.3, 1.7, 5.5, 9.9, 25.0] {
            let lhs = trigamma(x).unwrap();
            let rhs = trigamma(x + 1.0).unwrap() + 1.0 / (x * x);
            assert!((lhs - rhs).abs() / lhs < 1e-13, "x={x}");
        }
    }

    /// The three-term form evaluated literally, with no series switchover —
    /// the reference the series must reproduce wherever both are accurate.
    fn h_direct(t: f64, u: f64, p: f64, q: f64) -> f64 {
        1.0 / -f64::exp_m1(-t)
            - f64::exp(-(u + 1.0) * p * t) / -f64::exp_m1(-p * t)
            - f64::exp(u * q * t) / -f64::exp_m1(-q * t)
    }

    #[test]
    fn h_limit_and_switchover() {
        for (n, k, a, b) in [(3, 1, 2, 1), (10, 0, 3, 1), (12, 12, 5, 4), (0, 0, 2, 1)] {
            let ap = AnalyticParams::new(&params(n, k, a, b)).unwrap();
            let (u, p, q) = (ap.u_f64(), ap.p_f64(), ap.q_f64());
            // Approach to the limit 1/2: at t = 1e-8 the true deviation
            // |c1|·t is below 1e-6 even for the steepest sample here
            // (c1 ≈ −22), and the direct form still carries ~8 digits.
            assert!(
                (h_direct(1e-8, u, p, q) - 0.5).abs() < 1e-6,
                "({n},{k},{a},{b})"
            );
            // The linear departure from 1/2 is c1·t; check the series'
            // leading coefficient against two direct evaluations.
            let c1 = (h_direct(2e-4, u, p, q) - h_direct(1e-4, u, p, q)) / 1e-4;
            let c1_series = (h_series(2e-4, u, p, q) - h_series(1e-4, u, p, q)) / 1e-4;
            assert!(
                (c1 - c1_series).abs() < 1e-4 * c1.abs().max(1.0),
                "({n},{k},{a},{b}): slope {c1} vs {c1_series}"
            );
            // Series and direct forms agree at the switchover point.
            let series = h_series(1e-3, u, p, q);
            let direct = h_direct(1e-3, u, p, q);
            assert!(
                (series - direct).abs() / direct.abs() < 1e-7,
                "({n},{k},{a},{b}): {series} vs {direct}"
            );
        }
    }

    #[test]
    fn h_positivity_for_balanced_u() {
        // -1 ≤ u ≤ 0 keeps h strictly positive. The scan stops at t = 30:
        // at the boundary values u ∈ {−1, 0} the true kernel decays like
        // e^{−t}, which beyond t ≈ 36 is smaller than the f64 roundoff of
        // the O(1) terms it is assembled from.
        for (n, k, a, b) in [(0, 0, 2, 1), (3, 1, 2, 1), (11, 8, 4, 3)] {
            let ap = AnalyticParams::new(&params(n, k, a, b)).unwrap();
            let u = ap.u().to_f64().unwrap();
            assert!((-1.0..=0.0).contains(&u), "sample picked inside [-1,0]");
            for i in 0..200 {
                let t = 1e-4 * (30.0f64 / 1e-4).powf(i as f64 / 199.0);
                assert!(h_eval(&ap, t) > 0.0, "h({t}) for ({n},{k},{a},{b})");
            }
        }
    }

    #[test]
    fn h_decreasing_in_t_for_nonnegative_u() {
        for &(p, u) in &[(1.25, 0.0), (2.0, 0.5), (2.0, 2.0), (5.0, 1.0)] {
            let q = p / (p - 1.0);
            let mut prev = h_raw(1e-4, u, p, q);
            for i in 1..300 {
                let t = 1e-4 * (30.0f64 / 1e-4).powf(i as f64 / 299.0);
                let cur = h_raw(t, u, p, q);
                assert!(cur < prev, "h not decreasing at t={t} (u={u}, p={p})");
                prev = cur;
            }
        }
    }

    #[test]
    fn quadrature_matches_trigamma_route() {
        let cases = [(0, 0, 2, 1), (3, 1, 2, 1), (10, 0, 3, 1), (12, 12, 5, 4)];
        for (n, k, a, b) in cases {
            let pr = params(n, k, a, b);
            for x in [0.0, 0.5, 1.0, 2.0, 10.0] {
                let direct = g_second(&pr, x).unwrap();
                let quad = g_second_quadrature(&pr, x).unwrap();
                assert!(
                    (direct - quad).abs() <= 1e-8 * direct.abs().max(1e-12),
                    "({n},{k},{a},{b}) x={x}: {direct} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn quadrature_at_zero_is_the_trigamma_combination() {
        let pr = params(3, 1, 2, 1);
        let want = 4.0 * trigamma(4.0).unwrap() - trigamma(2.0).unwrap() - trigamma(3.0).unwrap();
        let quad = g_second_quadrature(&pr, 0.0).unwrap();
        assert!((want - quad).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn watson_ratio_approaches_one() {
        // Quadruples with a small asymptotic-drift constant reach the 1%
        // bracket already at x = 1000; the ratio from the quadrature route
        // must agree too.
        for (n, k, a, b) in [(0, 0, 2, 1), (3, 1, 2, 1)] {
            let pr = params(n, k, a, b);
            let ratio = watson_ratio(&pr, 1e3).unwrap();
            assert!((ratio - 1.0).abs() < 0.01, "({n},{k},{a},{b}): {ratio}");
            let w = a as f64 * 1e3 + n as f64 + 1.0;
            let quad_ratio =
                g_second_quadrature(&pr, 1e3).unwrap() * 2.0 * w * w / ((a * a) as f64);
            assert!((quad_ratio - 1.0).abs() < 0.01, "quad ratio {quad_ratio}");
        }
    }

    #[test]
    fn h_root_cases() {
        // u in [-1, 0]: h stays positive, no root.
        let ap = AnalyticParams::new(&params(3, 1, 2, 1)).unwrap();
        assert_eq!(h_root(&ap, 50.0).unwrap(), None);

        // u > 0: h starts at 1/2 and decreases through zero.
        let ap = AnalyticParams::new(&params(12, 12, 5, 4)).unwrap();
        assert!(ap.u().to_f64().unwrap() > 0.0);
        let root = h_root(&ap, 50.0).unwrap().expect("root exists");
        assert!(h_eval(&ap, root - 1e-6) > 0.0);
        assert!(h_eval(&ap, root + 1e-6) < 0.0);
        // A window inside the all-positive prefix sees no root.
        assert_eq!(h_root(&ap, root / 10.0).unwrap(), None);
    }

    #[test]
    fn predict_transition_cases() {
        assert_eq!(predict_transition(&params(0, 0, 2, 1), 50.0).unwrap(), None);

        let x_star = predict_transition(&params(10, 0, 3, 1), 100.0)
            .unwrap()
            .expect("transition exists");
        assert!((x_star - 27.77).abs() < 0.1, "x* = {x_star}");
        // Window below the crossing: no sign change.
        assert_eq!(predict_transition(&params(10, 0, 3, 1), 5.0).unwrap(), None);
    }

    #[test]
    fn aux_checks_pass_with_margins() {
        let report = aux_monotone_checks();
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.min_f_drop > 0.0);
        assert!(report.min_l_drop > 0.0);
        assert!(report.max_mixed_partial < 0.0);
        // Endpoint values of f and l.
        assert!((aux_f(1e-6) - 1.0).abs() < 1e-5);
        assert!((aux_f(50.0) - 50.0 * (-50.0f64).exp()).abs() < 1e-20);
        assert!((aux_l(1e-6) - 1.0).abs() < 1e-5);
        assert!(aux_l(50.0) < 1e-17);
        // Spot mixed partial.
        assert!(mixed_partial_h(1.0, 0.0, 2.0, 2.0) < 0.0);
    }

    #[test]
    fn variation_diminishing_spot_check() {
        // Sign changes of g″ never exceed those of h on matched windows.
        for (n, k, a, b) in [(0, 0, 2, 1), (3, 1, 2, 1), (10, 0, 3, 1), (12, 12, 5, 4)] {
            let pr = params(n, k, a, b);
            let ap = AnalyticParams::new(&pr).unwrap();
            let g_changes = g_sign_changes(&pr, 100.0, 500).unwrap();
            let h_changes = h_sign_changes(&ap, 100.0, 500);
            assert!(
                g_changes <= h_changes,
                "({n},{k},{a},{b}): {g_changes} > {h_changes}"
            );
        }
    }
}
