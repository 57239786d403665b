//! Acceptance target: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cleanlabel::classes::{finite_hollow_star_number, finite_vc_dimension, make_hollow_star_class, FiniteClass};
use cleanlabel::eval::{
    attacker_suite, geometry_suite, results_csv, run_config, svm_event_study, symmetry_suite, wilson_interval,
    EvalOptions, ExperimentConfig, ScenarioResult, SYMMETRY_FIRED_TARGET,
};
use cleanlabel::geometry::IDENTITY_TOL;

type Outcome = cleanlabel::Result<(bool, String)>;

const SEED: u64 = 2024;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"))
}

fn load(name: &str) -> ExperimentConfig {
    let text = std::fs::read_to_string(config_path(name)).expect("bundled config readable");
    ExperimentConfig::from_json(&text).expect("bundled config valid")
}

fn run(cfg: &ExperimentConfig) -> cleanlabel::Result<Vec<ScenarioResult>> {
    run_config(cfg, EvalOptions::default())
}

fn scenario<'a>(results: &'a [ScenarioResult], id: &str) -> &'a ScenarioResult {
    results.iter().find(|r| r.scenario.id == id).expect("scenario present")
}

fn violations(results: &[ScenarioResult]) -> u64 {
    results.iter().map(|r| r.report.audit.total()).sum()
}

const INTERVAL_POOL: &str = r#"{
  "experiment": "interval_pool",
  "seed": 13,
  "scenarios": [{
    "id": "min_interval_open_target",
    "class": { "kind": "interval", "target": { "kind": "open", "a": 0.3, "b": 0.6 } },
    "learner": { "kind": "fit_min_interval" },
    "attackers": [
      { "kind": "null_attacker" },
      { "kind": "interval_flood_attacker" },
      { "kind": "interval_flood_attacker", "resolution": 3 }
    ],
    "m": 100,
    "trials": 20,
    "test_points": 2000
  }]
}"#;

fn interval_flooding() -> Outcome {
    let res = run(&load("example1"))?;
    let (a1, a2) = (&scenario(&res, "A1").report, &scenario(&res, "A2").report);
    let pool = run(&ExperimentConfig::from_json(INTERVAL_POOL)?)?;
    let p = &pool[0].report;
    let ok = a1.atk_mean >= 0.98 && a2.atk_mean == 0.0 && p.atk_mean <= 0.10 && violations(&res) + violations(&pool) == 0;
    Ok((ok, format!("max_interval atk={:.4}, min_interval atk={}, open target pool atk={:.4}", a1.atk_mean, a2.atk_mean, p.atk_mean)))
}

fn svm_one_point() -> Outcome {
    let s = svm_event_study(1280, 0.01, 100, 200, SEED, EvalOptions::default())?;
    let ok = s.errors == 0 && s.fired > 0 && s.misclassified_when_fired == s.fired && s.fired_rate() >= 0.85;
    Ok((ok, format!("event fired {}/{} ({:.3}), misclassified when fired {}/{}", s.fired, s.trials, s.fired_rate(), s.misclassified_when_fired, s.fired)))
}

fn partition_majority() -> Outcome {
    let res = run(&load("alg1_robust"))?;
    let pm_min = &scenario(&res, "partition_majority_min").report;
    let pm_max = &scenario(&res, "partition_majority_max").report;
    let base = &scenario(&res, "baseline_max").report;
    let flips = pm_min.diagnostics.vote_errors + pm_max.diagnostics.vote_errors;
    let bad = pm_min.diagnostics.vote_invariant_violations + pm_max.diagnostics.vote_invariant_violations;
    let ok = pm_min.atk_mean <= 0.05
        && bad == 0
        && base.atk_mean >= 5.0 * pm_min.atk_mean
        && base.atk_mean > 0.0
        && violations(&res) == 0;
    Ok((ok, format!(
        "robust(min) atk={:.4}, robust(max) atk={:.4}, baseline max atk={:.4}, vote flips={flips}, invariant violations={bad}",
        pm_min.atk_mean, pm_max.atk_mean, base.atk_mean
    )))
}

fn circle_lower_bound() -> Outcome {
    const EPSILON: f64 = 0.006;
    let res = run(&load("thm6_lb"))?;
    let r = &res[0].report;
    let (mean, hw) = r.trial_level_atk();
    let ok = r.atk.lower >= EPSILON && mean - hw >= EPSILON && violations(&res) == 0;
    Ok((ok, format!("atk={:.5} Wilson lower={:.5}, trial-level lower={:.5}, target {EPSILON}", r.atk_mean, r.atk.lower, mean - hw)))
}

fn hollow_star() -> Outcome {
    let res = run(&load("hollow_star"))?;
    let r = &res[0].report;
    // Per-trial rates are estimates of multiples of 1/8; round to the lattice first.
    let above = r.per_trial_atk.iter().filter(|&&a| (a * 8.0).round() / 8.0 > 0.125).count() as u64;
    let n = r.per_trial_atk.len() as u64;
    let (lo, hi) = wilson_interval(above, n);
    let frac = above as f64 / n as f64;
    let ok = r.atk_mean >= 0.25 - 3.0 * r.atk_ci95 && frac >= 1.0 / 7.0 - (hi - lo) / 2.0 && violations(&res) == 0;
    Ok((ok, format!("atk={:.4} ± {:.4}, P[atk > 1/8]={frac:.4}", r.atk_mean, r.atk_ci95)))
}

fn margin_binary_search() -> Outcome {
    let res = run(&load("alg3_margin"))?;
    let r = &res[0];
    let d = &r.report.diagnostics;
    let ok = r.report.atk_mean <= 0.2
        && r.report.err_mean <= 0.2
        && d.search_steps > 0
        && d.search_violations == 0
        && violations(&res) == 0;
    Ok((ok, format!(
        "m={}, atk={:.4}, err={:.4}, search steps={}, violations={}",
        r.m, r.report.atk_mean, r.report.err_mean, d.search_steps, d.search_violations
    )))
}

fn covering() -> Outcome {
    let res = run(&load("covering"))?;
    let r = &res[0];
    let ok = r.report.atk_mean <= 0.2 && violations(&res) == 0;
    Ok((ok, format!("m={}, atk={:.4}, err={:.4}", r.m, r.report.atk_mean, r.report.err_mean)))
}

fn symmetry() -> Outcome {
    let s = symmetry_suite(SEED)?;
    let (tc, mg) = (&s.tangent_circle, &s.margin.audit);
    let target = SYMMETRY_FIRED_TARGET as u64;
    let ok = s.passed()
        && tc.fired >= target
        && mg.fired >= target
        && tc.max_deviation <= IDENTITY_TOL
        && mg.max_deviation <= IDENTITY_TOL;
    Ok((ok, format!(
        "tangent circle fired {} max dev {:.2e}; margin fired {} max dev {:.2e}",
        tc.fired, tc.max_deviation, mg.fired, mg.max_deviation
    )))
}

fn class_from(n: usize, rows: impl Iterator<Item = Vec<bool>>) -> cleanlabel::Result<FiniteClass> {
    let masks = rows.map(|r| r.iter().enumerate().fold(0u64, |m, (i, &b)| m | (b as u64) << i)).collect();
    FiniteClass::with_indexed_domain(n, masks)
}

fn combinatorial_oracles() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for k in [3, 5, 7] {
        let (class, _) = make_hollow_star_class(k)?;
        let got = finite_hollow_star_number(&class)?;
        ok &= got == Some(k);
        notes.push(format!("hollow star k={k}: {got:?}"));
    }
    let n = 8;
    let thresholds = class_from(n, (0..=n).map(|k| (0..n).map(|i| i >= k).collect()))?;
    let intervals = class_from(
        n,
        std::iter::once(vec![false; n])
            .chain((0..n).flat_map(|a| (a..n).map(move |b| (0..n).map(|i| a <= i && i <= b).collect()))),
    )?;
    let full_n = 6;
    let full = class_from(full_n, (0u32..1 << full_n).map(|m| (0..full_n).map(|i| m >> i & 1 == 1).collect()))?;
    let vc = [finite_vc_dimension(&thresholds)?, finite_vc_dimension(&intervals)?, finite_vc_dimension(&full)?];
    ok &= vc == [1, 2, full_n];
    notes.push(format!("VC thresholds/intervals/full = {vc:?}"));
    Ok((ok, notes.join("; ")))
}

const BUNDLED: [&str; 7] = ["example1", "thm5_svm", "thm6_lb", "alg1_robust", "hollow_star", "alg3_margin", "covering"];

fn universal_audits() -> Outcome {
    let attackers = attacker_suite(10_000, SEED, EvalOptions::default())?;
    let failed: Vec<&str> = attackers.iter().filter(|a| !a.passed()).map(|a| a.attacker.as_str()).collect();
    let geometry = geometry_suite(SEED)?;
    let geo_failed: Vec<&str> = geometry.iter().filter(|g| !g.passed()).map(|g| g.name).collect();
    let mut differing = Vec::new();
    for name in BUNDLED {
        let cfg = load(name);
        let a = results_csv(&cfg, &run_config(&cfg, EvalOptions { workers: 1 })?)?;
        let b = results_csv(&cfg, &run_config(&cfg, EvalOptions::default())?)?;
        if a != b {
            differing.push(name);
        }
    }
    let ok = failed.is_empty() && geo_failed.is_empty() && differing.is_empty();
    Ok((ok, format!(
        "{} attackers x 10^4 (failed {failed:?}), {} geometry checks (failed {geo_failed:?}), {} configs rerun (differing {differing:?})",
        attackers.len(),
        geometry.len(),
        BUNDLED.len()
    )))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 10] = [
        ("interval flooding", interval_flooding, Some(60)),
        ("one-point SVM attack", svm_one_point, Some(600)),
        ("partition-majority robustness", partition_majority, Some(300)),
        ("circle t-point lower bound", circle_lower_bound, Some(600)),
        ("hollow star", hollow_star, Some(60)),
        ("margin binary search", margin_binary_search, Some(300)),
        ("covering learner", covering, Some(120)),
        ("symmetry audits", symmetry, None),
        ("combinatorial oracles", combinatorial_oracles, None),
        ("universal audits", universal_audits, None),
    ];
    let mut failures = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|s| elapsed <= Duration::from_secs(s));
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        let budget = limit.map(|s| format!(" / {s}s")).unwrap_or_default();
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1}s{budget}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
