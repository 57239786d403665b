use std::sync::Arc;

use cleanlabel::attackers::{
    boundary_flood_attacker, budget_wrapper, circle_tpoint_attacker, hollow_star_attacker, interval_flood_attacker,
    label_flip_attacker, linear_reflection_attacker, null_attacker, sphere_reflection_attacker, subdivision_count,
    svm_one_point_attacker, AttackContext,
};
use cleanlabel::base::{Attacker, Budget, Dataset, Hypothesis, Point, RngStream, TargetedDistribution};
use cleanlabel::classes::{
    make_circles_experiment, make_halfsphere_experiment, make_hollow_star_experiment, make_interval_experiment,
    make_linear_margin_experiment, make_tangent_circle_experiment, DensitySpec, IntervalHypothesis,
};
use cleanlabel::geometry::vector::{dist, norm};
use cleanlabel::learners::{fit_consistent_row, fit_max_interval, fit_min_interval, fit_svm};
use proptest::prelude::*;

fn clean(dist: &dyn TargetedDistribution, p: &Dataset) -> bool {
    p.iter().all(|e| dist.target().predict(&e.x) == e.y)
}

fn scalar(x: f64) -> Point {
    Point::scalar(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn interval_flood_defeats_the_maximal_interval(s in any::<u64>(), m in 1usize..80, z in 0.0f64..1.0) {
        let exp = make_interval_experiment(IntervalHypothesis::empty(), DensitySpec::uniform()).unwrap();
        let mut rng = RngStream::from_seed(s);
        let train = exp.sample_dataset(m, &mut rng);
        let x0 = scalar(z);
        let a = interval_flood_attacker(1).unwrap();
        let p = a.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
        prop_assert!(clean(&exp, &p));
        let seen = train.iter().any(|e| e.x == x0);
        if !seen && z > 0.0 && z < 1.0 {
            let h = fit_max_interval(&train.union(&p).unwrap()).unwrap();
            prop_assert!(h.contains(z), "x0 {} left outside {:?}", z, h);
            prop_assert!(fit_min_interval(&train.union(&p).unwrap()).unwrap().is_empty());
        }
    }

    #[test]
    fn subdivision_parts_are_strictly_shorter(gap in 1e-6f64..1.0, target in 1e-6f64..1.0) {
        let k = subdivision_count(gap, target);
        if k == 1 {
            prop_assert!(gap < target);
        } else {
            prop_assert!(gap / k as f64 <= target * (1.0 - 1e-6) + 1e-15);
            prop_assert!(gap / (k - 1) as f64 >= target * (1.0 - 1e-6) || k == 2);
        }
    }

    #[test]
    fn budget_wrapper_truncates_to_its_budget(s in any::<u64>(), t in 0usize..6) {
        let exp = make_interval_experiment(IntervalHypothesis::open(0.3, 0.6).unwrap(), DensitySpec::uniform()).unwrap();
        let mut rng = RngStream::from_seed(s);
        let train = exp.sample_dataset(30, &mut rng);
        let x0 = exp.sample(&mut rng).x;
        let inner: Arc<dyn Attacker> = Arc::new(interval_flood_attacker(1).unwrap());
        let full = inner.poison(exp.target(), exp.context(), &train, &x0, &mut rng.clone()).unwrap();
        let w = budget_wrapper(inner, t);
        prop_assert_eq!(w.budget(), Budget::Finite(t));
        let p = w.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
        prop_assert_eq!(p.len(), full.len().min(t));
        let canon = full.canonical();
        prop_assert!(p.iter().zip(canon.iter()).all(|(a, b)| a == b));
    }

    #[test]
    fn linear_attackers_stay_clean_and_inside_the_ball(s in any::<u64>()) {
        let mut rng = RngStream::from_seed(s);
        let exp = make_linear_margin_experiment(2, 0.25, &mut rng).unwrap();
        let train = exp.sample_dataset(60, &mut rng);
        let x0 = exp.sample(&mut rng).x;
        for a in [
            Box::new(boundary_flood_attacker(16)) as Box<dyn Attacker>,
            Box::new(linear_reflection_attacker()),
        ] {
            let p = a.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
            prop_assert!(clean(&exp, &p));
            prop_assert!(a.budget().allows(p.len()));
            prop_assert!(p.iter().all(|e| norm(e.x.coords()) <= 1.0 + 1e-12));
        }
    }
}

#[test]
fn null_and_label_flip_controls() {
    let exp = make_interval_experiment(IntervalHypothesis::open(0.3, 0.6).unwrap(), DensitySpec::uniform()).unwrap();
    let mut rng = RngStream::from_seed(0);
    let train = exp.sample_dataset(10, &mut rng);
    let x0 = scalar(0.45);
    let n = null_attacker().poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
    assert!(n.is_empty());
    assert_eq!(null_attacker().budget(), Budget::Finite(0));
    let f = label_flip_attacker().poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
    assert_eq!(f.len(), 1);
    assert!(!clean(&exp, &f));
}

#[test]
fn svm_one_point_flips_the_max_margin_separator_on_the_sphere() {
    let exp = make_halfsphere_experiment(64, 0.01).unwrap();
    let a = svm_one_point_attacker();
    let mut flipped = 0;
    let trials = 50;
    for t in 0..trials {
        let mut rng = RngStream::from_seed(t);
        let train = exp.sample_dataset(100, &mut rng);
        let x0 = exp.sample_sphere_part(&mut rng).x;
        let p = a.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
        assert!(clean(&exp, &p));
        assert!(p.len() <= 1);
        let h = fit_svm(&train.union(&p).unwrap()).unwrap();
        flipped += (h.predict(&x0) == 0) as usize;
    }
    // In 64 dimensions the sufficient event holds in nearly every trial.
    assert!(flipped >= 40, "{flipped}/{trials}");
}

#[test]
fn sphere_reflection_emits_points_on_the_mirrored_circle() {
    let eta = 1e-3;
    let a = sphere_reflection_attacker(eta).unwrap();
    assert!(sphere_reflection_attacker(0.2).is_err());
    let mut fired = 0;
    for t in 0..200 {
        let mut rng = RngStream::from_seed(t);
        let exp = make_tangent_circle_experiment(eta, &mut rng).unwrap();
        let train = exp.sample_dataset(5, &mut rng);
        let x0 = exp.sample(&mut rng).x;
        let p = a.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
        assert!(clean(&exp, &p));
        if !p.is_empty() {
            fired += 1;
            assert_eq!(p.len(), train.len());
            // Images have unit norm and sit at distance 1 from the reflected circle axis.
            let w = exp.w().coords();
            let x0c = x0.coords();
            let c = 2.0 * cleanlabel::geometry::vector::dot(w, x0c);
            let w_mirror: Vec<f64> = (0..3).map(|i| c * x0c[i] - w[i]).collect();
            for e in p.iter() {
                assert!((norm(e.x.coords()) - 1.0).abs() < 1e-9);
                assert!((dist(e.x.coords(), &w_mirror) - 1.0).abs() < 1e-9);
                assert_eq!(e.y, 1 - exp.positive() as u8);
            }
        }
    }
    assert!(fired > 150, "{fired}");
}

#[test]
fn circle_tpoint_respects_budget_and_labels() {
    let a = circle_tpoint_attacker(4);
    assert_eq!(a.budget(), Budget::Finite(4));
    let mut fired = 0;
    for t in 0..400 {
        let mut rng = RngStream::from_seed(t);
        let exp = make_circles_experiment(3, 4, 8, &mut rng).unwrap();
        let train = exp.sample_dataset(8, &mut rng);
        let x0 = exp.sample_on_circle((t % 3) as usize, &mut rng).x;
        let p = a.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
        assert!(clean(&exp, &p));
        assert!(p.len() <= 4);
        fired += (!p.is_empty()) as usize;
    }
    assert!(fired > 0);
}

#[test]
fn hollow_star_attack_hides_the_target_row() {
    let a = hollow_star_attacker();
    let k = 9;
    let mut hits = 0;
    let mut fired = 0;
    for t in 0..300 {
        let mut rng = RngStream::from_seed(t);
        let exp = make_hollow_star_experiment(k, &mut rng).unwrap();
        let AttackContext::HollowStar { class, target_row, .. } = exp.context().clone() else {
            panic!("hollow star context expected");
        };
        let train = exp.sample_dataset(4, &mut rng);
        let x0 = exp.sample(&mut rng).x;
        let p = a.poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
        assert!(clean(&exp, &p));
        if p.is_empty() {
            continue;
        }
        fired += 1;
        assert_eq!(p.len(), k - 2);
        assert!(p.iter().all(|e| e.x != x0 && e.x != class.point(target_row)));
        let row = fit_consistent_row(&train.union(&p).unwrap(), &class).unwrap();
        hits += (class.hypothesis(row).predict(&x0) != exp.target().predict(&x0)) as usize;
    }
    assert!(fired > 0 && hits > 0);
}

#[test]
fn boundary_flood_points_hug_the_boundary() {
    let mut rng = RngStream::from_seed(12);
    let exp = make_linear_margin_experiment(2, 0.5, &mut rng).unwrap();
    let train = exp.sample_dataset(40, &mut rng);
    let x0 = exp.sample(&mut rng).x;
    let p = boundary_flood_attacker(8).poison(exp.target(), exp.context(), &train, &x0, &mut rng).unwrap();
    assert!(!p.is_empty() && p.len() <= 8);
    for e in p.iter() {
        assert!(exp.linear_target().score(e.x.coords()).abs() <= 1e-6 + 1e-12);
    }
    // Without a linear context the attacker refuses.
    let interval = make_interval_experiment(IntervalHypothesis::empty(), DensitySpec::uniform()).unwrap();
    let r = boundary_flood_attacker(8).poison(
        interval.target(),
        interval.context(),
        &Dataset::new(),
        &scalar(0.5),
        &mut rng,
    );
    assert!(r.is_err());
}
