//! Resumable parameter sweeps persisted as JSON Lines.
//!
//! Each output record is keyed by `(check, params, budgets)`. Rerunning a
//! sweep skips keys already present in the output file, so an interrupted
//! sweep resumes without recomputing or duplicating records. Quadruples are
//! visited in a fixed nested order (n, then k, then a, then b) and all JSON
//! objects serialize with sorted keys, so identical invocations append
//! byte-identical records; wall-clock data lives only in the `meta` field.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;
use raypf_core::exact::{ray_sequence, SequenceKind};
use raypf_core::network::verify_lgv;
use raypf_core::params::{RayParams, Regime};
use raypf_core::roots::{all_roots_real, IntPolynomial};
use raypf_core::toeplitz::{is_pf_upto, PfVerdict, ToeplitzError};
use raypf_core::transition::{classify, theorem1_check, TransitionError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{params_json, usage, Failure};

#[derive(Args)]
pub struct SweepArgs {
    /// Path to a JSON sweep specification.
    #[arg(long)]
    spec: PathBuf,
    /// Write records here instead of the path named in the spec.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// On-disk sweep specification.
///
/// `n`, `k`, `a`, `b` are inclusive `[lo, hi]` ranges. Quadruples that fail
/// validation (k > n, equal slopes, k ≥ b in the b > a regime) are silently
/// skipped; the `regime` filter restricts the rest.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    n: [u64; 2],
    k: [u64; 2],
    a: [u64; 2],
    b: [u64; 2],
    #[serde(default)]
    regime: RegimeFilter,
    #[serde(default)]
    budgets: Budgets,
    output: PathBuf,
}

#[derive(Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum RegimeFilter {
    #[default]
    Any,
    PolyaFrequency,
    Transition,
}

impl RegimeFilter {
    fn admits(self, regime: Regime) -> bool {
        match self {
            RegimeFilter::Any => true,
            RegimeFilter::PolyaFrequency => regime == Regime::PolyaFrequency,
            RegimeFilter::Transition => regime == Regime::Transition,
        }
    }
}

/// Per-check budgets; every field may be omitted in the spec.
#[derive(Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
struct Budgets {
    /// Toeplitz / path-matrix window side length.
    window: usize,
    /// Largest minor order examined.
    max_order: usize,
    /// Number of log-concavity signs per transition ray.
    j_max: u64,
    /// Node budget for disjoint-path enumeration.
    enumeration: u64,
    /// Cap on the number of minors per positivity check.
    minor: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            window: 6,
            max_order: 3,
            j_max: 300,
            enumeration: 1_000_000,
            minor: 1_000_000,
        }
    }
}

/// Checks scheduled for a quadruple, in recording order.
fn checks_for(regime: Regime) -> &'static [&'static str] {
    match regime {
        Regime::PolyaFrequency => &["pf", "roots", "lgv"],
        Regime::Transition => &["classify", "theorem1"],
    }
}

/// Canonical resume key. `serde_json` maps have sorted keys, so equal
/// (check, params, budgets) triples always render identically.
fn key_of(check: &str, params: &Value, budgets: &Value) -> String {
    json!({ "check": check, "params": params, "budgets": budgets }).to_string()
}

fn record_key(record: &Value) -> Result<String, Failure> {
    let field = |name: &str| {
        record
            .get(name)
            .cloned()
            .ok_or_else(|| usage(format!("existing record is missing the {name} field")))
    };
    let check = field("check")?;
    let check = check
        .as_str()
        .ok_or_else(|| usage("existing record has a non-string check field"))?;
    Ok(key_of(check, &field("params")?, &field("budgets")?))
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Runs one check and reports `(status, detail)`. Statuses are `pass`,
/// `fail`, `budget-exceeded`, and `not-applicable`; only genuine input or
/// I/O problems abort the sweep.
fn run_check(
    check: &str,
    params: &RayParams,
    budgets: &Budgets,
) -> Result<(String, Value), Failure> {
    match check {
        "pf" => {
            let seq =
                ray_sequence(params, SequenceKind::Binomial, budgets.window).map_err(usage)?;
            match is_pf_upto(
                seq.values(),
                budgets.max_order,
                budgets.window,
                budgets.minor,
            ) {
                Ok(PfVerdict::Pass) => Ok(("pass".into(), json!({}))),
                Ok(PfVerdict::Fail { witness, value }) => Ok((
                    "fail".into(),
                    json!({
                        "witness": {
                            "rows": witness.rows(),
                            "cols": witness.cols(),
                            "minor": value.to_string(),
                        },
                    }),
                )),
                Err(err @ ToeplitzError::BudgetExceeded { .. }) => Ok((
                    "budget-exceeded".into(),
                    json!({ "error": err.to_string() }),
                )),
                Err(err) => Err(usage(err)),
            }
        }
        "roots" => {
            let len = params.cutoff().expect("finite in this regime") as usize + 2;
            let seq = ray_sequence(params, SequenceKind::Binomial, len).map_err(usage)?;
            let poly = IntPolynomial::from_sequence(&seq).map_err(usage)?;
            let real_rooted = all_roots_real(&poly).map_err(usage)?;
            let status = if real_rooted { "pass" } else { "fail" };
            Ok((
                status.into(),
                json!({ "degree": poly.degree(), "real_rooted": real_rooted }),
            ))
        }
        "lgv" => {
            let report = verify_lgv(
                params,
                budgets.window,
                budgets.max_order,
                false,
                budgets.enumeration,
            )
            .map_err(usage)?;
            let status = if report.passed() { "pass" } else { "fail" };
            Ok((status.into(), report.to_json()))
        }
        "classify" => {
            let profile = classify(params, budgets.j_max).map_err(usage)?;
            let status = if profile.monotone_ok() {
                "pass"
            } else {
                "fail"
            };
            Ok((status.into(), profile.to_json()))
        }
        "theorem1" => match theorem1_check(params, budgets.j_max) {
            Ok(all_nonpositive) => {
                let status = if all_nonpositive { "pass" } else { "fail" };
                Ok((
                    status.into(),
                    json!({ "all_signs_nonpositive": all_nonpositive }),
                ))
            }
            Err(TransitionError::NotApplicable { u }) => {
                Ok(("not-applicable".into(), json!({ "u": u })))
            }
            Err(err) => Err(usage(err)),
        },
        other => Err(usage(format!("unknown check {other}"))),
    }
}

pub fn run(args: &SweepArgs) -> Result<(), Failure> {
    let raw = fs::read_to_string(&args.spec)
        .map_err(|err| usage(format!("cannot read {}: {err}", args.spec.display())))?;
    let spec: SweepSpec =
        serde_json::from_str(&raw).map_err(|err| usage(format!("invalid sweep spec: {err}")))?;
    for (name, [lo, hi]) in [("n", spec.n), ("k", spec.k), ("a", spec.a), ("b", spec.b)] {
        if lo > hi {
            return Err(usage(format!("empty range for {name}: [{lo}, {hi}]")));
        }
    }
    let output = args.output.clone().unwrap_or_else(|| spec.output.clone());

    // Statuses of already-recorded keys, for resuming.
    let mut existing: BTreeMap<String, String> = BTreeMap::new();
    if output.exists() {
        let file = fs::File::open(&output)
            .map_err(|err| usage(format!("cannot read {}: {err}", output.display())))?;
        for (index, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(usage)?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Value = serde_json::from_str(&line).map_err(|err| {
                usage(format!(
                    "corrupt record on line {} of {}: {err}",
                    index + 1,
                    output.display()
                ))
            })?;
            let status = record["status"].as_str().unwrap_or_default().to_string();
            existing.insert(record_key(&record)?, status);
        }
    }

    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&output)
        .map_err(|err| usage(format!("cannot open {}: {err}", output.display())))?;
    let budgets_json = serde_json::to_value(&spec.budgets).map_err(usage)?;

    let (mut computed, mut resumed, mut failures) = (0u64, 0u64, 0u64);
    for n in spec.n[0]..=spec.n[1] {
        for k in spec.k[0]..=spec.k[1] {
            for a in spec.a[0]..=spec.a[1] {
                for b in spec.b[0]..=spec.b[1] {
                    let Ok(params) = RayParams::new(n, k, a, b) else {
                        continue;
                    };
                    if !spec.regime.admits(params.regime()) {
                        continue;
                    }
                    let pj = params_json(&params);
                    for &check in checks_for(params.regime()) {
                        let key = key_of(check, &pj, &budgets_json);
                        if let Some(status) = existing.get(&key) {
                            resumed += 1;
                            if status == "fail" {
                                failures += 1;
                            }
                            continue;
                        }
                        let (status, detail) = run_check(check, &params, &spec.budgets)?;
                        if status == "fail" {
                            failures += 1;
                        }
                        let record = json!({
                            "check": check,
                            "params": pj,
                            "budgets": budgets_json,
                            "status": status,
                            "detail": detail,
                            "meta": { "unix_time": unix_time() },
                        });
                        writeln!(file, "{record}").map_err(|err| {
                            usage(format!("cannot write {}: {err}", output.display()))
                        })?;
                        computed += 1;
                    }
                }
            }
        }
    }
    println!(
        "sweep: {computed} new, {resumed} resumed, {failures} failing -> {}",
        output.display()
    );
    if failures > 0 {
        Err(Failure::Math(format!("{failures} sweep checks failed")))
    } else {
        Ok(())
    }
}
