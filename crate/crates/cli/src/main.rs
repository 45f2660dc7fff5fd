//! `raypf` — command-line laboratory for rays of Pascal's triangle.
//!
//! A ray is the sequence `C_j = C(n + ja, k + jb)` read along a line through
//! the triangle. The tool generates rays exactly, certifies Pólya-frequency
//! behaviour (Toeplitz minors, real-rootedness, lattice-path counts) when
//! `b > a`, and classifies the log-concavity transition when `a > b`.
//!
//! Exit status: `0` — all requested checks pass; `1` — a mathematical check
//! failed (a witness is printed on stdout); `2` — usage errors, wrong regime
//! for the requested operation, I/O problems, or an exhausted budget.

mod sweep;

use std::fmt::Display;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use raypf_core::exact::{ray_sequence, RaySequence, SequenceKind};
use raypf_core::network::{build_network, export_dot, verify_lgv, DEFAULT_ENUM_BUDGET};
use raypf_core::params::{RayParams, Regime};
use raypf_core::roots::{all_roots_real, IntPolynomial};
use raypf_core::toeplitz::{is_pf_upto, PfVerdict, DEFAULT_MINOR_BUDGET};
use raypf_core::transition::{
    aux_monotone_checks, classify, g_second, g_second_quadrature, h_root, predict_transition,
    watson_ratio, AnalyticParams, TransitionError,
};
use serde_json::json;

/// Relative tolerance for agreement between the trigamma and quadrature
/// routes to `g''` in the `analytic` subcommand.
const G_SECOND_REL_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "raypf",
    version,
    about = "Exact and analytic checks for rays of Pascal's triangle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print ray values C(n + ja, k + jb) for j = 0..len-1.
    Gen(GenArgs),
    /// Check nonnegativity of all Toeplitz-window minors up to an order.
    PfCheck(PfCheckArgs),
    /// Decide real-rootedness of the ray's generating polynomial.
    Roots(RootsArgs),
    /// Cross-check window minors against disjoint lattice-path families.
    Lgv(LgvArgs),
    /// Compute the exact log-concavity sign profile of a ray with a > b.
    Classify(ClassifyArgs),
    /// Compare analytic routes to the transition and report diagnostics.
    Analytic(AnalyticArgs),
    /// Run a persisted, resumable sweep over a parameter grid.
    Sweep(sweep::SweepArgs),
}

/// How a subcommand can end unsuccessfully.
pub(crate) enum Failure {
    /// A mathematical check failed; details were printed with the report.
    Math(String),
    /// Bad input, wrong regime, I/O trouble, or an exhausted budget.
    Usage(String),
}

pub(crate) fn usage(err: impl Display) -> Failure {
    Failure::Usage(err.to_string())
}

pub(crate) fn math(err: impl Display) -> Failure {
    Failure::Math(err.to_string())
}

/// Scan errors: several sign changes on a grid is a genuine mathematical
/// anomaly (exit 1); everything else is a usage problem.
fn scan_err(err: TransitionError) -> Failure {
    match err {
        TransitionError::MultipleSignChanges { .. } => math(err),
        other => usage(other),
    }
}

/// Budget precedence: explicit flag, then the `RAYPF_BUDGET` environment
/// variable, then the built-in default.
fn resolve_budget(flag: Option<u64>, default: u64) -> Result<u64, Failure> {
    if let Some(value) = flag {
        return Ok(value);
    }
    match std::env::var("RAYPF_BUDGET") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "RAYPF_BUDGET must be an unsigned integer, got {raw:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(default),
        Err(err) => Err(usage(err)),
    }
}

/// Shared `--n --k --a --b` quadruple.
#[derive(Args)]
struct ParamArgs {
    /// Base row n of the ray.
    #[arg(long)]
    n: u64,
    /// Base column k of the ray.
    #[arg(long)]
    k: u64,
    /// Row slope a.
    #[arg(long)]
    a: u64,
    /// Column slope b.
    #[arg(long)]
    b: u64,
}

impl ParamArgs {
    fn build(&self) -> Result<RayParams, Failure> {
        RayParams::new(self.n, self.k, self.a, self.b).map_err(usage)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// C(n + ja, k + jb).
    Binomial,
    /// D(n - k + (a-b)j, k + jb); requires b > a.
    Delannoy,
}

impl KindArg {
    fn name(self) -> &'static str {
        match self {
            KindArg::Binomial => "binomial",
            KindArg::Delannoy => "delannoy",
        }
    }
}

impl From<KindArg> for SequenceKind {
    fn from(kind: KindArg) -> SequenceKind {
        match kind {
            KindArg::Binomial => SequenceKind::Binomial,
            KindArg::Delannoy => SequenceKind::Delannoy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    /// Two columns `j,value` with a header row.
    Csv,
    /// One JSON object with params, kind, and values (as decimal strings).
    Json,
    /// The bare values on one comma-separated line.
    List,
}

pub(crate) fn params_json(params: &RayParams) -> serde_json::Value {
    json!({
        "n": params.n(),
        "k": params.k(),
        "a": params.a(),
        "b": params.b(),
    })
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of entries to produce (indices j = 0..len-1).
    #[arg(long)]
    len: usize,
    /// Which counting function the ray samples.
    #[arg(long, value_enum, default_value_t = KindArg::Binomial)]
    kind: KindArg,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

fn sequence_json(seq: &RaySequence, kind: KindArg) -> serde_json::Value {
    json!({
        "params": params_json(seq.params()),
        "kind": kind.name(),
        "values": seq.values().iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

fn run_gen(args: &GenArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    let seq = ray_sequence(&params, args.kind.into(), args.len).map_err(usage)?;
    match args.format {
        FormatArg::Csv => {
            let mut out = String::from("j,value\n");
            for (j, value) in seq.values().iter().enumerate() {
                let _ = writeln!(out, "{j},{value}");
            }
            print!("{out}");
        }
        FormatArg::List => {
            let row: Vec<String> = seq.values().iter().map(ToString::to_string).collect();
            println!("{}", row.join(","));
        }
        FormatArg::Json => println!("{}", sequence_json(&seq, args.kind)),
    }
    Ok(())
}

#[derive(Args)]
struct PfCheckArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Largest minor order to examine.
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Side length of the leading Toeplitz window.
    #[arg(long, default_value_t = 8)]
    window: usize,
    /// Which counting function the ray samples.
    #[arg(long, value_enum, default_value_t = KindArg::Binomial)]
    kind: KindArg,
    /// Cap on the number of minors examined (default 10^6; RAYPF_BUDGET overrides).
    #[arg(long)]
    budget: Option<u64>,
}

fn run_pf_check(args: &PfCheckArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    let budget = resolve_budget(args.budget, DEFAULT_MINOR_BUDGET)?;
    // Only the first `window` entries can appear inside the window, so the
    // check is meaningful in both regimes.
    let seq = ray_sequence(&params, args.kind.into(), args.window).map_err(usage)?;
    let verdict = is_pf_upto(seq.values(), args.order, args.window, budget).map_err(usage)?;
    let verdict_json = match &verdict {
        PfVerdict::Pass => json!({ "status": "pass" }),
        PfVerdict::Fail { witness, value } => json!({
            "status": "fail",
            "witness": {
                "rows": witness.rows(),
                "cols": witness.cols(),
                "minor": value.to_string(),
            },
        }),
    };
    println!(
        "{}",
        json!({
            "params": params_json(&params),
            "kind": args.kind.name(),
            "order": args.order,
            "window": args.window,
            "verdict": verdict_json,
        })
    );
    match verdict {
        PfVerdict::Pass => Ok(()),
        PfVerdict::Fail { witness, value } => Err(math(format!(
            "negative minor {value} at rows {:?}, cols {:?}",
            witness.rows(),
            witness.cols()
        ))),
    }
}

#[derive(Args)]
struct RootsArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Which counting function the ray samples.
    #[arg(long, value_enum, default_value_t = KindArg::Binomial)]
    kind: KindArg,
}

fn run_roots(args: &RootsArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    if params.regime() != Regime::PolyaFrequency {
        return Err(usage(
            "the generating polynomial is finite only when b > a and k < b",
        ));
    }
    let len = params.cutoff().expect("finite in this regime") as usize + 2;
    let seq = ray_sequence(&params, args.kind.into(), len).map_err(usage)?;
    let poly = IntPolynomial::from_sequence(&seq).map_err(usage)?;
    let real_rooted = all_roots_real(&poly).map_err(usage)?;
    println!(
        "{}",
        json!({
            "params": params_json(&params),
            "kind": args.kind.name(),
            "degree": poly.degree(),
            "real_rooted": real_rooted,
        })
    );
    if real_rooted {
        Ok(())
    } else {
        Err(math("the generating polynomial has a non-real root"))
    }
}

#[derive(Args)]
struct LgvArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of sources and sinks materialized (window side length).
    #[arg(long, default_value_t = 6)]
    window: usize,
    /// Largest minor order cross-checked by explicit enumeration.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Count E/N/NE lattice paths instead of E/N only.
    #[arg(long)]
    delannoy: bool,
    /// Node budget for path enumeration (default 10^7; RAYPF_BUDGET overrides).
    #[arg(long)]
    budget: Option<u64>,
    /// Also write the materialized network in DOT format to this path.
    #[arg(long)]
    dot: Option<PathBuf>,
}

fn run_lgv(args: &LgvArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    let budget = resolve_budget(args.budget, DEFAULT_ENUM_BUDGET)?;
    if let Some(path) = &args.dot {
        let net = build_network(&params, args.window, args.delannoy).map_err(usage)?;
        std::fs::write(path, export_dot(&net))
            .map_err(|err| usage(format!("cannot write {}: {err}", path.display())))?;
    }
    let report =
        verify_lgv(&params, args.window, args.order, args.delannoy, budget).map_err(usage)?;
    println!("{}", report.to_json());
    if report.passed() {
        Ok(())
    } else {
        Err(math(
            "path-count window disagrees with the exact ray; see report",
        ))
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of log-concavity signs computed (j = 0..=jmax).
    #[arg(long, default_value_t = 300)]
    jmax: u64,
}

fn run_classify(args: &ClassifyArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    let profile = classify(&params, args.jmax).map_err(usage)?;
    println!("{}", profile.to_json());
    if profile.monotone_ok() {
        Ok(())
    } else {
        Err(math(
            "sign profile is not a single concave-to-convex transition",
        ))
    }
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Evaluation points for the two g'' routes (repeatable).
    #[arg(long = "x", default_values_t = [0.0, 1.0, 10.0])]
    xs: Vec<f64>,
    /// Upper end of the scan for the zero of g''.
    #[arg(long, default_value_t = 400.0)]
    xmax: f64,
    /// Upper end of the scan for the zero of h in t.
    #[arg(long, default_value_t = 50.0)]
    tmax: f64,
    /// Evaluation point for the Watson-ratio normalization check.
    #[arg(long, default_value_t = 1e3)]
    watson_x: f64,
}

fn run_analytic(args: &AnalyticArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    let ap = AnalyticParams::new(&params).map_err(usage)?;
    let mut rows = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for &x in &args.xs {
        let direct = g_second(&params, x).map_err(usage)?;
        let quadrature = g_second_quadrature(&params, x).map_err(usage)?;
        let scale = direct.abs().max(quadrature.abs()).max(f64::MIN_POSITIVE);
        let rel_gap = (direct - quadrature).abs() / scale;
        worst_rel = worst_rel.max(rel_gap);
        rows.push(json!({
            "x": x,
            "trigamma_route": direct,
            "quadrature_route": quadrature,
            "rel_gap": rel_gap,
        }));
    }
    let x_star = predict_transition(&params, args.xmax).map_err(scan_err)?;
    let t_root = h_root(&ap, args.tmax).map_err(scan_err)?;
    let watson = watson_ratio(&params, args.watson_x).map_err(usage)?;
    let aux = aux_monotone_checks();
    println!(
        "{}",
        json!({
            "params": params_json(&params),
            "u": ap.u().to_string(),
            "p": ap.p().to_string(),
            "q": ap.q().to_string(),
            "g_second": rows,
            "x_star": x_star,
            "h_root": t_root,
            "watson": { "x": args.watson_x, "ratio": watson },
            "aux": {
                "f_strictly_decreasing": aux.f_strictly_decreasing,
                "l_strictly_decreasing": aux.l_strictly_decreasing,
                "mixed_partial_negative": aux.mixed_partial_negative,
                "max_mixed_partial": aux.max_mixed_partial,
            },
        })
    );
    if worst_rel > G_SECOND_REL_TOL {
        return Err(math(format!(
            "g'' routes disagree: relative gap {worst_rel:.3e} exceeds {G_SECOND_REL_TOL:.0e}"
        )));
    }
    if !aux.passed() {
        return Err(math(format!(
            "auxiliary monotonicity violated: {:?}",
            aux.violations
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::PfCheck(args) => run_pf_check(args),
        Command::Roots(args) => run_roots(args),
        Command::Lgv(args) => run_lgv(args),
        Command::Classify(args) => run_classify(args),
        Command::Analytic(args) => run_analytic(args),
        Command::Sweep(args) => sweep::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
