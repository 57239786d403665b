use std::sync::Arc;

use cleanlabel::attackers::{interval_flood_attacker, null_attacker};
use cleanlabel::base::{Attacker, RngStream, TargetedDistribution};
use cleanlabel::classes::{make_interval_experiment, DensitySpec, IntervalHypothesis};
use cleanlabel::eval::{
    attackable_rate, expected_attackable_rate, format_g17, mean_and_half_width, multiset_deviation, results_csv,
    run_config, wilson_interval, EvalOptions, ExperimentConfig, Proportion, Z95,
};
use cleanlabel::learners::{MaxInterval, MinInterval, PartitionMajority};
use proptest::prelude::*;

/// Wilson bounds as the roots of `(p̂ − p)² = z² p(1−p)/n`.
fn wilson_by_quadratic(k: u64, n: u64) -> (f64, f64) {
    let (n, ph, z2) = (n as f64, k as f64 / n as f64, Z95 * Z95);
    let a = 1.0 + z2 / n;
    let b = -(2.0 * ph + z2 / n);
    let c = ph * ph;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a))
}

#[test]
fn wilson_matches_published_and_quadratic_values() {
    // Published 95% Wilson intervals (Newcombe 1998 style tables).
    let (lo, hi) = wilson_interval(0, 10);
    assert!(lo == 0.0 && (hi - 0.2775).abs() < 1e-4);
    let (lo, hi) = wilson_interval(5, 10);
    assert!((lo - 0.2366).abs() < 1e-4 && (hi - 0.7634).abs() < 1e-4);
    for (k, n) in [(0, 1), (1, 10), (37, 100), (999, 1000), (1000, 1000)] {
        let (a, b) = wilson_interval(k, n);
        let (c, d) = wilson_by_quadratic(k, n);
        assert!((a - c.max(0.0)).abs() < 1e-12 && (b - d.min(1.0)).abs() < 1e-12, "{k}/{n}");
    }
    assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    let p = Proportion::new(5, 10);
    assert!((p.half_width() - (0.7634 - 0.2366) / 2.0).abs() < 1e-4);
}

#[test]
fn trial_level_interval() {
    let (m, h) = mean_and_half_width(&[0.0, 1.0, 0.0, 1.0]);
    // Sample sd = √(1/3); half-width = z·sd/2.
    assert_eq!(m, 0.5);
    assert!((h - Z95 * (1.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    assert!(mean_and_half_width(&[0.3]).1.is_infinite());
}

proptest! {
    #[test]
    fn g17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = format_g17(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        prop_assert!(!s.contains('.') || !s.split('e').next().unwrap().ends_with('0'));
    }

    #[test]
    fn wilson_contains_the_estimate(k in 0u64..500, extra in 0u64..500) {
        let n = k + extra;
        prop_assume!(n > 0);
        let (lo, hi) = wilson_interval(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-15 && p <= hi + 1e-15);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
    }
}

fn interval_factory(h: IntervalHypothesis) -> impl Fn(&mut RngStream) -> cleanlabel::Result<Arc<dyn TargetedDistribution>> {
    move |_| Ok(Arc::new(make_interval_experiment(h, DensitySpec::uniform())?) as Arc<dyn TargetedDistribution>)
}

#[test]
fn null_attacker_rate_equals_error_rate() {
    let factory = interval_factory(IntervalHypothesis::open(0.2, 0.7).unwrap());
    let pool: Vec<Arc<dyn Attacker>> = vec![Arc::new(null_attacker())];
    for learner in [&MaxInterval as &dyn cleanlabel::base::Learner, &MinInterval] {
        let r = expected_attackable_rate(learner, &pool, &factory, 20, 5, 300, 3, EvalOptions::default()).unwrap();
        assert_eq!(r.atk_mean, r.err_mean);
        assert_eq!(r.per_trial_atk, r.per_trial_err);
    }
    // Randomized learners share the learner stream between clean and poisoned fits.
    let pm = PartitionMajority { t: 1, base: Arc::new(MinInterval) };
    let r = expected_attackable_rate(&pm, &pool, &factory, 44, 3, 200, 3, EvalOptions::default()).unwrap();
    assert_eq!(r.atk_mean, r.err_mean);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let factory = interval_factory(IntervalHypothesis::empty());
    let pool: Vec<Arc<dyn Attacker>> = vec![Arc::new(interval_flood_attacker(1).unwrap())];
    let pm = PartitionMajority { t: 1, base: Arc::new(MaxInterval) };
    let runs: Vec<_> = [1, 2, 5]
        .iter()
        .map(|&w| expected_attackable_rate(&pm, &pool, &factory, 44, 6, 150, 11, EvalOptions { workers: w }).unwrap())
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.per_trial_atk, runs[0].per_trial_atk);
        assert_eq!(r.per_trial_err, runs[0].per_trial_err);
        assert_eq!(r.diagnostics, runs[0].diagnostics);
    }
}

#[test]
fn attack_rate_is_a_max_over_the_pool() {
    let dist: Arc<dyn TargetedDistribution> =
        Arc::new(make_interval_experiment(IntervalHypothesis::empty(), DensitySpec::uniform()).unwrap());
    let pool: Vec<Arc<dyn Attacker>> = vec![Arc::new(null_attacker()), Arc::new(interval_flood_attacker(1).unwrap())];
    let r = attackable_rate(&MaxInterval, &pool, dist, 50, 400, 1, EvalOptions::default()).unwrap();
    assert!(r.atk_mean >= r.per_attacker_atk[0] && r.atk_mean >= r.per_attacker_atk[1]);
    assert!(r.atk_mean <= r.per_attacker_atk[0] + r.per_attacker_atk[1]);
    assert_eq!(r.audit.total(), 0);
    assert!(attackable_rate(&MaxInterval, &[], Arc::new(make_interval_experiment(IntervalHypothesis::empty(), DensitySpec::uniform()).unwrap()), 5, 5, 1, EvalOptions::default()).is_err());
}

#[test]
fn multiset_deviation_matches_by_label() {
    use cleanlabel::base::{Dataset, LabeledExample, Point};
    let d = |v: &[(f64, u8)]| {
        Dataset::from_items(v.iter().map(|&(x, y)| LabeledExample::new(Point::scalar(x).unwrap(), y).unwrap()).collect())
            .unwrap()
    };
    assert_eq!(multiset_deviation(&d(&[(0.1, 1), (0.5, 0)]), &d(&[(0.5, 0), (0.1, 1)])), 0.0);
    assert!((multiset_deviation(&d(&[(0.1, 1)]), &d(&[(0.3, 1)])) - 0.2).abs() < 1e-15);
    assert!(multiset_deviation(&d(&[(0.1, 1)]), &d(&[(0.1, 0)])).is_infinite());
    assert!(multiset_deviation(&d(&[(0.1, 1)]), &d(&[])).is_infinite());
}

const SMALL: &str = r#"{
  "experiment": "small",
  "seed": 4,
  "scenarios": [
    {
      "id": "s1",
      "class": { "kind": "interval", "target": { "kind": "open", "a": 0.3, "b": 0.6 } },
      "learner": { "kind": "fit_min_interval" },
      "attackers": [{ "kind": "null_attacker" }, { "kind": "interval_flood_attacker", "resolution": 2 }],
      "m": 40,
      "trials": 3,
      "test_points": 50
    }
  ]
}"#;

#[test]
fn config_round_trip_and_csv_determinism() {
    let cfg = ExperimentConfig::from_json(SMALL).unwrap();
    let a = results_csv(&cfg, &run_config(&cfg, EvalOptions { workers: 1 }).unwrap()).unwrap();
    let b = results_csv(&cfg, &run_config(&cfg, EvalOptions { workers: 3 }).unwrap()).unwrap();
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment_id,class,learner,attacker,n,d,t,gamma,epsilon,m,trials,test_points,atk_mean,atk_ci95,err_mean,audit_violations,seed"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "small/s1");
    assert_eq!(row[3], "null_attacker+interval_flood(resolution=2)");
    assert_eq!(row[9], "40");
    assert_eq!(row[16], "4");
    let json = serde_json::to_string(&cfg).unwrap();
    assert_eq!(ExperimentConfig::from_json(&json).unwrap(), cfg);
}

#[test]
fn config_errors_name_the_offending_key() {
    let bad = SMALL.replace("fit_min_interval", "fit_mystery");
    let err = ExperimentConfig::from_json(&bad).unwrap_err().to_string();
    assert!(err.contains("fit_mystery"), "{err}");
    let bad = SMALL.replace("\"trials\": 3", "\"trials\": 3, \"colour\": 1");
    assert!(ExperimentConfig::from_json(&bad).unwrap_err().to_string().contains("colour"));
    assert!(ExperimentConfig::from_json("{").is_err());
    let bad = SMALL.replace("\"m\": 40", "\"m\": { \"kind\": \"margin_bound\", \"epsilon\": 0.2, \"delta\": 0.1 }");
    assert!(ExperimentConfig::from_json(&bad).is_err());
    let bad = SMALL.replace("fit_min_interval\" }", "fit_consistent_row\" }");
    assert!(ExperimentConfig::from_json(&bad).is_err());
    let bad = SMALL.replace("\"test_points\": 50", "\"test_points\": 0");
    assert!(ExperimentConfig::from_json(&bad).is_err());
}

#[test]
fn seed_changes_results_deterministically() {
    let cfg = ExperimentConfig::from_json(SMALL).unwrap();
    let mut other = cfg.clone();
    other.seed = 5;
    let a = run_config(&cfg, EvalOptions::default()).unwrap();
    let b = run_config(&other, EvalOptions::default()).unwrap();
    assert_ne!(a[0].report.per_trial_err, b[0].report.per_trial_err);
    let c = run_config(&other, EvalOptions::default()).unwrap();
    assert_eq!(b[0].report.per_trial_err, c[0].report.per_trial_err);
}
