//! The planar lattice network whose path matrix realizes a binomial ray, and
//! the Lindström–Gessel–Viennot (LGV) verification built on it.
//!
//! For parameters `(n, k, a, b)` with `b > a` the vertex set is the band
//! `V = {(i, j) : i ≥ 0, 0 ≤ (b-a)i + bj ≤ bn - ak}` with edges one step
//! east `(i+1, j)` and north `(i, j+1)` (plus northeast `(i+1, j+1)` in
//! Delannoy mode), sources `s_i = (bi, (a-b)i)` on the lower boundary line
//! and sinks `t_i = (k + bi, n - k + (a-b)i)` on the upper one. The number of
//! paths `s_i → t_j` is `C_{j-i}` (resp. `D_{j-i}`), so minors of the path
//! matrix — which by the LGV lemma count vertex-disjoint path families, hence
//! are nonnegative — witness total positivity of the ray's Toeplitz matrix.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{ray_sequence, ExactError, SequenceKind};
use crate::params::{RayParams, Regime};
use crate::toeplitz::exact_det;

/// Default cap on backtracking nodes for one disjoint-family enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("the network is only defined in the Pólya-frequency regime")]
    WrongRegime,
    #[error("source and sink index lists must have equal nonzero length")]
    ShapeMismatch,
    #[error("source and sink index lists must be strictly increasing")]
    NotIncreasing,
    #[error("endpoint index {index} is outside the materialized range {range}")]
    IndexOutOfRange { index: usize, range: usize },
    #[error("enumeration budget of {budget} nodes exhausted")]
    BudgetExceeded { budget: u64 },
    #[error(transparent)]
    Sequence(#[from] ExactError),
}

/// A materialized finite portion of the band network.
#[derive(Clone, Debug)]
pub struct LatticeNetwork {
    params: RayParams,
    source_count: usize,
    delannoy_mode: bool,
    /// Vertices sorted by the topological key `(i + j, i)`; every edge
    /// strictly increases `i + j`.
    vertices: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
    sources: Vec<(i64, i64)>,
    sinks: Vec<(i64, i64)>,
}

/// Builds the network materialized for sources `s_0..s_{source_count-1}` and
/// the matching sinks. Vertices east of the last sink cannot lie on any
/// counted path (edges never decrease coordinates), so the builder clips
/// there; inside the clip the band membership test is exact.
pub fn build_network(
    params: &RayParams,
    source_count: usize,
    delannoy_mode: bool,
) -> Result<LatticeNetwork, NetworkError> {
    if params.regime() != Regime::PolyaFrequency {
        return Err(NetworkError::WrongRegime);
    }
    let (k, b) = (params.k() as i64, params.b() as i64);
    let mut vertices = Vec::new();
    if source_count > 0 {
        let i_max = k + b * (source_count as i64 - 1);
        for i in 0..=i_max {
            let mut j = lower_j(params, i);
            while band_position(params, i, j).is_some() {
                vertices.push((i, j));
                j += 1;
            }
        }
    }
    vertices.sort_by_key(|&(i, j)| (i + j, i));
    let index = vertices
        .iter()
        .enumerate()
        .map(|(idx, &v)| (v, idx))
        .collect();
    let net = LatticeNetwork {
        params: *params,
        source_count,
        delannoy_mode,
        vertices,
        index,
        sources: (0..source_count as i64)
            .map(|r| (b * r, (params.a() as i64 - b) * r))
            .collect(),
        sinks: (0..source_count as i64)
            .map(|r| {
                (
                    k + b * r,
                    params.n() as i64 - k + (params.a() as i64 - b) * r,
                )
            })
            .collect(),
    };
    debug_assert!(net
        .sources
        .iter()
        .chain(&net.sinks)
        .all(|&(i, j)| net.contains(i, j)));
    Ok(net)
}

/// Smallest `j` with `(b-a)i + bj ≥ 0`.
fn lower_j(params: &RayParams, i: i64) -> i64 {
    let (a, b) = (params.a() as i64, params.b() as i64);
    -((b - a) * i).div_euclid(b)
}

/// `Some(ℓ)` with `ℓ = (b-a)i + bj` when `(i, j)` satisfies the band
/// inequalities, `None` otherwise.
fn band_position(params: &RayParams, i: i64, j: i64) -> Option<i64> {
    let (n, k, a, b) = (
        params.n() as i64,
        params.k() as i64,
        params.a() as i64,
        params.b() as i64,
    );
    let l = (b - a) * i + b * j;
    (i >= 0 && l >= 0 && l <= b * n - a * k).then_some(l)
}

impl LatticeNetwork {
    pub fn params(&self) -> &RayParams {
        &self.params
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn delannoy_mode(&self) -> bool {
        self.delannoy_mode
    }

    /// Exact membership test for the full (unclipped) vertex set `V`.
    pub fn contains(&self, i: i64, j: i64) -> bool {
        band_position(&self.params, i, j).is_some()
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn source(&self, r: usize) -> (i64, i64) {
        self.sources[r]
    }

    pub fn sink(&self, r: usize) -> (i64, i64) {
        self.sinks[r]
    }

    /// Materialized successors of a vertex, in deterministic order: east,
    /// north, then the Delannoy diagonal.
    fn successors(&self, (i, j): (i64, i64), out: &mut Vec<usize>) {
        out.clear();
        let mut push = |v: (i64, i64)| {
            if let Some(&idx) = self.index.get(&v) {
                out.push(idx);
            }
        };
        push((i + 1, j));
        push((i, j + 1));
        if self.delannoy_mode {
            push((i + 1, j + 1));
        }
    }

    /// Number of directed paths `s_i → t_j` by a forward dynamic-programming
    /// sweep in topological order.
    pub fn path_count(&self, i: usize, j: usize) -> BigUint {
        assert!(
            i < self.source_count && j < self.source_count,
            "endpoint index out of materialized range"
        );
        self.counts_from_source(i)[self.index[&self.sinks[j]]].clone()
    }

    /// The same quantity computed by the reverse sweep (sink-to-source
    /// dynamic programming); used to cross-check `path_count`.
    pub fn path_count_reverse(&self, i: usize, j: usize) -> BigUint {
        assert!(
            i < self.source_count && j < self.source_count,
            "endpoint index out of materialized range"
        );
        let mut dp = vec![BigUint::zero(); self.vertices.len()];
        dp[self.index[&self.sinks[j]]] = BigUint::one();
        let mut succ = Vec::new();
        for idx in (0..self.vertices.len()).rev() {
            self.successors(self.vertices[idx], &mut succ);
            for &u in &succ {
                let add = dp[u].clone();
                dp[idx] += add;
            }
        }
        // The sink contributes its own "empty path" seed; subtract nothing —
        // dp[v] counts paths v → sink, including the trivial one at v = sink.
        dp[self.index[&self.sources[i]]].clone()
    }

    fn counts_from_source(&self, i: usize) -> Vec<BigUint> {
        let mut dp = vec![BigUint::zero(); self.vertices.len()];
        dp[self.index[&self.sources[i]]] = BigUint::one();
        let mut succ = Vec::new();
        for idx in 0..self.vertices.len() {
            if dp[idx].is_zero() {
                continue;
            }
            self.successors(self.vertices[idx], &mut succ);
            for &u in &succ {
                let add = dp[idx].clone();
                dp[u] += add;
            }
        }
        dp
    }

    /// The full `w × w` path matrix, `w` = number of materialized sources.
    pub fn path_matrix(&self) -> PathMatrixWindow {
        let entries = (0..self.source_count)
            .map(|i| {
                let dp = self.counts_from_source(i);
                (0..self.source_count)
                    .map(|j| dp[self.index[&self.sinks[j]]].clone())
                    .collect()
            })
            .collect();
        PathMatrixWindow {
            size: self.source_count,
            entries,
        }
    }
}

/// Path counts `w(i, j)` = number of paths `s_i → t_j` for indices below the
/// window size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMatrixWindow {
    size: usize,
    entries: Vec<Vec<BigUint>>,
}

impl PathMatrixWindow {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i][j]
    }

    /// JSON dump with arbitrary-precision entries rendered as decimal
    /// strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "size": self.size,
            "entries": self
                .entries
                .iter()
                .map(|row| row.iter().map(BigUint::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Exact count of vertex-disjoint path families: one path `s_{I_r} → t_{J_r}`
/// for each rank `r` (the order-preserving endpoint matching of the LGV
/// statement), no two paths sharing a vertex. Exhaustive backtracking with a
/// node budget; exceeding it is an error distinct from any count.
pub fn disjoint_families(
    net: &LatticeNetwork,
    sources: &[usize],
    sinks: &[usize],
    budget: u64,
) -> Result<BigUint, NetworkError> {
    if sources.is_empty() || sources.len() != sinks.len() {
        return Err(NetworkError::ShapeMismatch);
    }
    for list in [sources, sinks] {
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NetworkError::NotIncreasing);
        }
        if let Some(&index) = list.iter().find(|&&r| r >= net.source_count) {
            return Err(NetworkError::IndexOutOfRange {
                index,
                range: net.source_count,
            });
        }
    }
    let mut state = Backtrack {
        net,
        sinks,
        sources,
        visited: vec![false; net.vertices.len()],
        nodes: 0,
        budget,
        count: BigUint::zero(),
    };
    state.place_path(0)?;
    Ok(state.count)
}

struct Backtrack<'a> {
    net: &'a LatticeNetwork,
    sources: &'a [usize],
    sinks: &'a [usize],
    visited: Vec<bool>,
    nodes: u64,
    budget: u64,
    count: BigUint,
}

impl Backtrack<'_> {
    /// Starts path `r` at its source and explores all extensions.
    fn place_path(&mut self, r: usize) -> Result<(), NetworkError> {
        let start = self.net.index[&self.net.sources[self.sources[r]]];
        if self.visited[start] {
            return Ok(());
        }
        self.extend(r, start)
    }

    fn extend(&mut self, r: usize, at: usize) -> Result<(), NetworkError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(NetworkError::BudgetExceeded {
                budget: self.budget,
            });
        }
        let target = self.net.sinks[self.sinks[r]];
        let here = self.net.vertices[at];
        if here == target {
            if r + 1 == self.sources.len() {
                self.count += 1u32;
                return Ok(());
            }
            self.visited[at] = true;
            let res = self.place_path(r + 1);
            self.visited[at] = false;
            return res;
        }
        self.visited[at] = true;
        let mut succ = Vec::new();
        self.net.successors(here, &mut succ);
        let mut res = Ok(());
        for u in succ {
            let (ui, uj) = self.net.vertices[u];
            // Paths never decrease a coordinate, so the sink is reachable
            // from (ui, uj) exactly when both coordinates are still below it
            // (the band contains the whole rectangle between them).
            if self.visited[u] || ui > target.0 || uj > target.1 {
                continue;
            }
            res = self.extend(r, u);
            if res.is_err() {
                break;
            }
        }
        self.visited[at] = false;
        res
    }
}

/// Outcome of one LGV verification run.
#[derive(Clone, Debug)]
pub struct LgvReport {
    pub window_size: usize,
    pub max_order: usize,
    pub delannoy_mode: bool,
    /// First cell where the path matrix disagrees with the ray's Toeplitz
    /// window: `(i, j, path_value, ray_value)`.
    pub window_mismatch: Option<(usize, usize, BigUint, BigUint)>,
    /// Minor-vs-enumeration comparisons performed / skipped for budget.
    pub pairs_checked: u64,
    pub pairs_skipped: u64,
    /// Pairs where the minor differs from the disjoint-family count
    /// (first few): `(rows, cols, minor, families)`.
    pub family_mismatches: Vec<(Vec<usize>, Vec<usize>, BigInt, BigUint)>,
    /// Negative minors of the path matrix (first few).
    pub negative_minors: Vec<(Vec<usize>, Vec<usize>, BigInt)>,
}

impl LgvReport {
    /// True when every performed check passed. Skipped pairs are reported,
    /// not passed.
    pub fn passed(&self) -> bool {
        self.window_mismatch.is_none()
            && self.family_mismatches.is_empty()
            && self.negative_minors.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "window_size": self.window_size,
            "max_order": self.max_order,
            "delannoy_mode": self.delannoy_mode,
            "passed": self.passed(),
            "window_mismatch": self.window_mismatch.as_ref().map(|(i, j, p, r)| {
                serde_json::json!({
                    "i": i, "j": j,
                    "path_value": p.to_string(),
                    "ray_value": r.to_string(),
                })
            }),
            "pairs_checked": self.pairs_checked,
            "pairs_skipped": self.pairs_skipped,
            "family_mismatches": self.family_mismatches.iter().map(|(i, j, m, f)| {
                serde_json::json!({
                    "rows": i, "cols": j,
                    "minor": m.to_string(),
                    "families": f.to_string(),
                })
            }).collect::<Vec<_>>(),
            "negative_minors": self.negative_minors.iter().map(|(i, j, m)| {
                serde_json::json!({
                    "rows": i, "cols": j,
                    "minor": m.to_string(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Runs the three LGV identities for one parameter set: (i) the path matrix
/// window equals the Toeplitz window of the exact ray; (ii) every minor of
/// order ≤ `max_order` equals the backtracking disjoint-family count;
/// (iii) all such minors are nonnegative.
///
/// Pairs whose minor value already exceeds the node budget are skipped
/// (enumeration could not finish) and reported in `pairs_skipped`.
pub fn verify_lgv(
    params: &RayParams,
    window_size: usize,
    max_order: usize,
    delannoy_mode: bool,
    budget: u64,
) -> Result<LgvReport, NetworkError> {
    use itertools::Itertools;

    let net = build_network(params, window_size, delannoy_mode)?;
    let matrix = net.path_matrix();
    let kind = if delannoy_mode {
        SequenceKind::Delannoy
    } else {
        SequenceKind::Binomial
    };
    let ray = ray_sequence(params, kind, window_size)?;

    let mut report = LgvReport {
        window_size,
        max_order,
        delannoy_mode,
        window_mismatch: None,
        pairs_checked: 0,
        pairs_skipped: 0,
        family_mismatches: Vec::new(),
        negative_minors: Vec::new(),
    };

    'window: for i in 0..window_size {
        for j in 0..window_size {
            let ray_value = if j >= i {
                ray.values()[j - i].clone()
            } else {
                BigUint::zero()
            };
            if *matrix.entry(i, j) != ray_value {
                report.window_mismatch = Some((i, j, matrix.entry(i, j).clone(), ray_value));
                break 'window;
            }
        }
    }

    const KEEP: usize = 8;
    for order in 1..=max_order.min(window_size) {
        for rows in (0..window_size).combinations(order) {
            for cols in (0..window_size).combinations(order) {
                let mut mat: Vec<BigInt> = Vec::with_capacity(order * order);
                for &i in &rows {
                    for &j in &cols {
                        mat.push(BigInt::from(matrix.entry(i, j).clone()));
                    }
                }
                let minor = exact_det(mat, order);
                if minor.is_negative() && report.negative_minors.len() < KEEP {
                    report
                        .negative_minors
                        .push((rows.clone(), cols.clone(), minor.clone()));
                }
                // Preflight: every counted family costs at least its summed
                // path lengths in search nodes, so a pair whose minor times
                // that lower bound already exceeds the node budget cannot be
                // confirmed by enumeration — skip it instead of timing out.
                let len_bound: u64 = rows
                    .iter()
                    .zip(&cols)
                    .map(|(&r, &c)| {
                        let s = net.source(r);
                        let t = net.sink(c);
                        let (di, dj) = ((t.0 - s.0).max(0), (t.1 - s.1).max(0));
                        let steps = if delannoy_mode { di.max(dj) } else { di + dj };
                        steps.max(1) as u64
                    })
                    .sum();
                if minor.magnitude() * BigUint::from(len_bound) > BigUint::from(budget) {
                    report.pairs_skipped += 1;
                    continue;
                }
                match disjoint_families(&net, &rows, &cols, budget) {
                    Ok(families) => {
                        report.pairs_checked += 1;
                        if BigInt::from(families.clone()) != minor
                            && report.family_mismatches.len() < KEEP
                        {
                            report.family_mismatches.push((
                                rows.clone(),
                                cols.clone(),
                                minor,
                                families,
                            ));
                        }
                    }
                    Err(NetworkError::BudgetExceeded { .. }) => {
                        report.pairs_skipped += 1;
                    }
                    Err(other) => return Err(other),
                }
            }
        }
    }
    Ok(report)
}

/// Deterministic DOT rendering: one node per materialized vertex positioned
/// at its coordinates (first coordinate horizontal), sources labeled `s_i`,
/// sinks labeled `t_i`. Byte-identical for identical inputs.
pub fn export_dot(net: &LatticeNetwork) -> String {
    use std::fmt::Write;

    let mut labels: HashMap<(i64, i64), String> = HashMap::new();
    for (r, &s) in net.sources.iter().enumerate() {
        labels.insert(s, format!("s{r}"));
    }
    for (r, &t) in net.sinks.iter().enumerate() {
        labels
            .entry(t)
            .and_modify(|l| *l = format!("{l}/t{r}"))
            .or_insert_with(|| format!("t{r}"));
    }

    let mut sorted: Vec<(i64, i64)> = net.vertices.clone();
    sorted.sort_unstable();

    let mut out = String::from("digraph lattice {\n  node [shape=point];\n");
    for &(i, j) in &sorted {
        let label = labels.get(&(i, j)).cloned().unwrap_or_default();
        writeln!(
            out,
            "  \"v{i}_{j}\" [pos=\"{i},{j}!\", xlabel=\"{label}\"];"
        )
        .expect("writing to String cannot fail");
    }
    let mut succ = Vec::new();
    for &(i, j) in &sorted {
        net.successors((i, j), &mut succ);
        let mut targets: Vec<(i64, i64)> = succ.iter().map(|&u| net.vertices[u]).collect();
        targets.sort_unstable();
        for (ti, tj) in targets {
            writeln!(out, "  \"v{i}_{j}\" -> \"v{ti}_{tj}\";")
                .expect("writing to String cannot fail");
        }
    }
    out.push_str("}\n");
    out
}
