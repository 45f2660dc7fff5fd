//! End-to-end acceptance suite: one test per headline property, each
//! printing a single PASS line (run with `--nocapture` to see them) and
//! failing loudly otherwise.
//!
//! Suites 1–5 are exact (zero tolerance); suite 6 cross-checks the two
//! analytic routes at stated tolerances; suite 7 reports how well the
//! analytic crossing predicts the exact transition index without gating
//! the build on the heuristic bound.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use raypf_core::exact::{delannoy, ray_sequence, SequenceKind};
use raypf_core::network::verify_lgv;
use raypf_core::params::RayParams;
use raypf_core::roots::{all_roots_real, IntPolynomial};
use raypf_core::toeplitz::{is_pf_upto, PfVerdict, DEFAULT_MINOR_BUDGET};
use raypf_core::transition::{
    classify, g_second, g_second_quadrature, g_sign_changes, h_eval, h_sign_changes,
    predict_transition, theorem1_check, watson_ratio, AnalyticParams,
};

/// Every (n, k, a, b) with b > a (Pólya-frequency regime) on the stated grid.
fn pf_grid(n_max: u64) -> Vec<RayParams> {
    let mut grid = Vec::new();
    for b in 2..=5u64 {
        for a in 1..b {
            for n in 0..=n_max {
                for k in 0..=n.min(b - 1) {
                    grid.push(RayParams::new(n, k, a, b).unwrap());
                }
            }
        }
    }
    grid
}

/// Every (n, k, a, b) with a > b (transition regime) on the stated grid.
fn transition_grid(n_max: u64) -> Vec<RayParams> {
    let mut grid = Vec::new();
    for a in 2..=5u64 {
        for b in 1..a {
            for n in 0..=n_max {
                for k in 0..=n {
                    grid.push(RayParams::new(n, k, a, b).unwrap());
                }
            }
        }
    }
    grid
}

fn ray_values(params: &RayParams) -> Vec<BigUint> {
    let len = params.cutoff().expect("finite support") as usize + 2;
    ray_sequence(params, SequenceKind::Binomial, len)
        .unwrap()
        .values()
        .to_vec()
}

/// Node budget per source/sink pair for the disjoint-family enumerations.
/// 10⁶ confirms ~94% of all pairs on the n ≤ 8 grid exactly and keeps the
/// two enumeration suites to a couple of minutes; pairs whose family count
/// is provably beyond the budget are skipped and reported, never passed.
const ENUM_BUDGET: u64 = 1_000_000;

/// Twenty transition quadruples used for the analytic cross-checks. They are
/// spread over all (a, b) slopes and chosen inside the region where the
/// leading Watson term already dominates at x = 10³ (the correction scales
/// with ((n+1)²/a − k(k+1)/b − (n−k)(n−k+1)/(a−b)) / x, so quadruples with a
/// huge constant would need a larger x to land in the 1% bracket).
const ANALYTIC_SAMPLE: [(u64, u64, u64, u64); 20] = [
    (12, 6, 2, 1),
    (12, 5, 2, 1),
    (12, 4, 3, 1),
    (11, 2, 3, 1),
    (12, 8, 3, 2),
    (11, 6, 3, 2),
    (12, 3, 4, 1),
    (12, 1, 4, 1),
    (12, 6, 4, 2),
    (12, 4, 4, 2),
    (12, 9, 4, 3),
    (10, 6, 4, 3),
    (12, 2, 5, 1),
    (10, 0, 5, 1),
    (12, 5, 5, 2),
    (8, 1, 5, 2),
    (12, 7, 5, 3),
    (10, 4, 5, 3),
    (12, 10, 5, 4),
    (8, 5, 5, 4),
];

/// Twenty transition quadruples with exact transition index m ≥ 1, used for
/// the coupling report between m and the analytic crossing x*.
const COUPLING_SAMPLE: [(u64, u64, u64, u64); 20] = [
    (2, 0, 2, 1),
    (12, 0, 2, 1),
    (1, 1, 3, 1),
    (12, 12, 3, 1),
    (1, 0, 3, 2),
    (12, 0, 3, 2),
    (1, 1, 4, 1),
    (12, 12, 4, 1),
    (2, 0, 4, 2),
    (12, 0, 4, 2),
    (1, 0, 4, 3),
    (12, 0, 4, 3),
    (1, 1, 5, 1),
    (12, 12, 5, 1),
    (2, 2, 5, 2),
    (12, 12, 5, 2),
    (2, 0, 5, 3),
    (12, 0, 5, 3),
    (1, 0, 5, 4),
    (12, 0, 5, 4),
];

#[test]
fn suite_1_rays_are_polya_frequency() {
    let grid = pf_grid(10);
    for params in &grid {
        let values = ray_values(params);
        let poly = IntPolynomial::from_sequence(
            &ray_sequence(params, SequenceKind::Binomial, values.len()).unwrap(),
        )
        .unwrap();
        assert!(
            all_roots_real(&poly).unwrap(),
            "{params}: generating polynomial must be real-rooted"
        );
        let verdict = is_pf_upto(&values, 4, 8, DEFAULT_MINOR_BUDGET).unwrap();
        assert_eq!(
            verdict,
            PfVerdict::Pass,
            "{params}: Toeplitz window has a negative minor"
        );
    }
    println!(
        "suite 1: PASS — {} rays real-rooted and minor-positive (order ≤ 4, window 8), exact",
        grid.len()
    );
}

#[test]
fn suite_2_lgv_path_counts_match_minors() {
    let grid = pf_grid(8);
    let mut pairs_checked = 0u64;
    let mut pairs_skipped = 0u64;
    for params in &grid {
        let report = verify_lgv(params, 6, 3, false, ENUM_BUDGET).unwrap();
        assert!(
            report.passed(),
            "{params}: {}",
            serde_json::to_string(&report.to_json()).unwrap()
        );
        pairs_checked += report.pairs_checked;
        pairs_skipped += report.pairs_skipped;
    }
    println!(
        "suite 2: PASS — {} networks, {} minor/family pairs equal exactly ({} beyond enumeration budget, skipped)",
        grid.len(),
        pairs_checked,
        pairs_skipped
    );
}

#[test]
fn suite_3_delannoy_rays() {
    assert_eq!(delannoy(1, 1), BigUint::from(3u32), "D(1,1)");
    assert_eq!(delannoy(3, 3), BigUint::from(63u32), "D(3,3)");

    let grid = pf_grid(8);
    let mut pairs_checked = 0u64;
    let mut pairs_skipped = 0u64;
    for params in &grid {
        let report = verify_lgv(params, 6, 3, true, ENUM_BUDGET).unwrap();
        assert!(
            report.passed(),
            "{params}: {}",
            serde_json::to_string(&report.to_json()).unwrap()
        );
        pairs_checked += report.pairs_checked;
        pairs_skipped += report.pairs_skipped;

        let len = params.cutoff().expect("finite support") as usize + 2;
        let seq = ray_sequence(params, SequenceKind::Delannoy, len).unwrap();
        let poly = IntPolynomial::from_sequence(&seq).unwrap();
        assert!(
            all_roots_real(&poly).unwrap(),
            "{params}: Delannoy generating polynomial must be real-rooted"
        );
    }
    println!(
        "suite 3: PASS — {} Delannoy networks: windows equal, {} minor/family pairs exact ({} skipped), rays real-rooted, spot values D(1,1)=3 D(3,3)=63",
        grid.len(),
        pairs_checked,
        pairs_skipped
    );
}

#[test]
fn suite_4_log_convexity_for_balanced_u() {
    let mut count = 0;
    for params in transition_grid(12) {
        let ap = AnalyticParams::new(&params).unwrap();
        let u = ap.u();
        if *u < BigRational::from_integer((-1).into()) || *u > BigRational::zero() {
            continue;
        }
        assert!(
            theorem1_check(&params, 300).unwrap(),
            "{params}: expected every sign ≤ 0"
        );
        count += 1;
    }
    assert!(count > 0, "grid must contain balanced-u quadruples");
    println!(
        "suite 4: PASS — {count} quadruples with u ∈ [−1, 0]: all signs ≤ 0 over j ≤ 300, exact"
    );
}

#[test]
fn suite_5_single_transition_everywhere() {
    let grid = transition_grid(12);
    for params in &grid {
        let profile = classify(params, 300).unwrap();
        assert!(
            profile.monotone_ok(),
            "{params}: sign profile is not a single transition: {:?}",
            profile.signs_rle()
        );
    }
    println!(
        "suite 5: PASS — {} transition quadruples: sign profile is +*0*−* over j ≤ 300, exact",
        grid.len()
    );
}

/// The three-term kernel evaluated literally (no series branch): the
/// series-free reference for the stability check.
fn h_direct(t: f64, u: f64, p: f64, q: f64) -> f64 {
    1.0 / -f64::exp_m1(-t)
        - f64::exp(-(u + 1.0) * p * t) / -f64::exp_m1(-p * t)
        - f64::exp(u * q * t) / -f64::exp_m1(-q * t)
}

#[test]
fn suite_6_analytic_cross_checks() {
    let sample: Vec<RayParams> = ANALYTIC_SAMPLE
        .iter()
        .map(|&(n, k, a, b)| RayParams::new(n, k, a, b).unwrap())
        .collect();

    // Trigamma route vs quadrature route at six x values per quadruple.
    let xs = [0.0, 0.5, 1.0, 2.0, 10.0, 100.0];
    let mut worst_rel = 0.0f64;
    for params in &sample {
        for &x in &xs {
            let direct = g_second(params, x).unwrap();
            let quad = g_second_quadrature(params, x).unwrap();
            let rel = (direct - quad).abs() / direct.abs();
            worst_rel = worst_rel.max(rel);
            assert!(
                rel <= 1e-8,
                "{params} at x={x}: routes disagree, rel={rel:.3e} ({direct} vs {quad})"
            );
        }
    }

    // The kernel's t → 0⁺ limit is 1/2. Two pins per quadruple: the computed
    // value approaches 1/2 within 1e-6 (checked at t = 1e-8, where the true
    // linear departure c₁t is below that tolerance for every sample), and at
    // t = 1e-4 the series branch agrees with the series-free three-term form
    // to 1e-6 (no cancellation damage at the scale of the stated tolerance).
    for params in &sample {
        let ap = AnalyticParams::new(params).unwrap();
        let limit_gap = (h_eval(&ap, 1e-8) - 0.5).abs();
        assert!(
            limit_gap <= 1e-6,
            "{params}: h(1e-8) is {limit_gap:.3e} from 1/2"
        );
        let stability_gap =
            (h_eval(&ap, 1e-4) - h_direct(1e-4, ap.u_f64(), ap.p_f64(), ap.q_f64())).abs();
        assert!(
            stability_gap <= 1e-6,
            "{params}: series and direct forms differ by {stability_gap:.3e} at t=1e-4"
        );
    }

    // Kernel positivity for u ∈ [−1, 0] at every sampled grid point. The t
    // grid stops at 30: at the boundary values u ∈ {−1, 0} the true kernel
    // decays like e^{−t}, which beyond t ≈ 36 falls under the roundoff of
    // the O(1) terms it is assembled from.
    let mut positivity_points = 0u64;
    let mut positivity_quads = 0u64;
    for params in transition_grid(12) {
        let ap = AnalyticParams::new(&params).unwrap();
        if *ap.u() < BigRational::from_integer((-1).into()) || *ap.u() > BigRational::zero() {
            continue;
        }
        positivity_quads += 1;
        for i in 0..200 {
            let t = 1e-4 * (30.0f64 / 1e-4).powf(i as f64 / 199.0);
            assert!(h_eval(&ap, t) > 0.0, "{params}: h({t}) ≤ 0");
            positivity_points += 1;
        }
    }

    // Kernel strictly decreasing in t for u ≥ 0 at every sampled grid point
    // (finite differences along the grid).
    let mut decreasing_quads = 0u64;
    for params in transition_grid(12) {
        let ap = AnalyticParams::new(&params).unwrap();
        if *ap.u() < BigRational::zero() {
            continue;
        }
        decreasing_quads += 1;
        let mut prev = h_eval(&ap, 1e-3);
        for i in 1..200 {
            let t = 1e-3 * (20.0f64 / 1e-3).powf(i as f64 / 199.0);
            let cur = h_eval(&ap, t);
            assert!(cur < prev, "{params}: h not strictly decreasing at t={t}");
            prev = cur;
        }
    }

    // Watson leading-term ratio at x = 10³.
    for params in &sample {
        let ratio = watson_ratio(params, 1e3).unwrap();
        assert!(
            (0.99..=1.01).contains(&ratio),
            "{params}: Watson ratio {ratio} outside [0.99, 1.01]"
        );
    }

    // Variation diminishing: sign changes of g″ never exceed those of h.
    for params in &sample {
        let ap = AnalyticParams::new(params).unwrap();
        let g_changes = g_sign_changes(params, 100.0, 2000).unwrap();
        let h_changes = h_sign_changes(&ap, 100.0, 2000);
        assert!(
            g_changes <= h_changes,
            "{params}: g″ changes sign {g_changes}× but h only {h_changes}×"
        );
    }

    println!(
        "suite 6: PASS — dual g″ routes agree to ≤ {worst_rel:.2e} (target 1e-8) on 20 quadruples × 6 x-values; kernel limit 1/2 within 1e-6; positivity at {positivity_points} grid points over {positivity_quads} balanced quadruples; monotone kernel on {decreasing_quads} quadruples with u ≥ 0; Watson ratio in [0.99, 1.01] at x=10³; sign-change inequality holds"
    );
}

#[test]
fn suite_7_coupling_report() {
    let mut within = 0;
    let mut findings = Vec::new();
    println!("suite 7: coupling between exact transition index m and analytic crossing x*");
    for &(n, k, a, b) in &COUPLING_SAMPLE {
        let params = RayParams::new(n, k, a, b).unwrap();
        let profile = classify(&params, 300).unwrap();
        let m = profile.m();
        assert!(m >= 1, "{params}: sample must have m ≥ 1");
        let x_star = predict_transition(&params, 400.0).unwrap();
        match x_star {
            Some(x) => {
                let gap = (x - m as f64).abs();
                let ok = gap <= 2.0;
                if ok {
                    within += 1;
                } else {
                    findings.push(format!("{params}: |x* − m| = {gap:.3}"));
                }
                println!(
                    "  {params}: m = {m}, x* = {x:.3}, |x* − m| = {gap:.3} {}",
                    if ok {
                        "(within 2)"
                    } else {
                        "(FINDING: exceeds 2)"
                    }
                );
            }
            None => {
                findings.push(format!("{params}: no crossing found for x ≤ 400, m = {m}"));
                println!("  {params}: m = {m}, x* not found in (0, 400] (FINDING)");
            }
        }
    }
    println!(
        "suite 7: REPORT — {within}/{} quadruples with |x* − m| ≤ 2; findings: {}",
        COUPLING_SAMPLE.len(),
        if findings.is_empty() {
            "none".to_string()
        } else {
            findings.join("; ")
        }
    );
}
