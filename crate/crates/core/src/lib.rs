//! Exact and numeric analysis of rays of Pascal's triangle: the sequences
//! `C_j = C(n + ja, k + jb)` obtained by stepping through the triangle with
//! a fixed increment `(a, b)`.
//!
//! Two regimes with very different behavior are covered:
//!
//! * **`b > a`** (steeper than the diagonal, with `k < b`): the ray is a
//!   Pólya frequency sequence. The crate verifies this three independent
//!   ways — exact minors of the Toeplitz window ([`toeplitz`]), real-
//!   rootedness of the generating polynomial by Sturm chains ([`roots`]),
//!   and Lindström–Gessel–Viennot path counts on an explicit planar lattice
//!   network ([`network`]).
//!
//! * **`a > b`** (shallower than the diagonal): the ray starts log-concave
//!   and turns log-convex exactly once. The [`transition`] module locates
//!   that switch exactly (integer arithmetic on `C_{j+1}² − C_j C_{j+2}`)
//!   and analytically (trigamma and quadrature evaluations of `g″` for the
//!   interpolating function `g(x) = log C_x`).
//!
//! All combinatorial quantities are exact big integers; floating point only
//! enters the analytic layer, where every value is obtainable by two
//! independent routes.

pub mod exact;
pub mod network;
pub mod params;
pub mod roots;
pub mod toeplitz;
pub mod transition;

pub use exact::{binomial, delannoy, ray_sequence, RaySequence, SequenceKind};
pub use network::{build_network, disjoint_families, export_dot, verify_lgv, LatticeNetwork};
pub use params::{RayParams, Regime};
pub use roots::{all_roots_real, sturm_chain, IntPolynomial};
pub use toeplitz::{is_pf_upto, minor, MinorSpec, PfVerdict, ToeplitzWindow};
pub use transition::{
    aux_monotone_checks, classify, g_second, g_second_quadrature, h_eval, h_root,
    predict_transition, theorem1_check, trigamma, AnalyticParams, TransitionProfile,
};
