use std::collections::HashSet;

use cleanlabel::base::{Point, RngStream, TargetedDistribution};
use cleanlabel::classes::{
    find_hollow_star, finite_hollow_star_number, finite_star_number, finite_vc_dimension, make_circles_experiment,
    make_halfsphere_experiment, make_hollow_star_class, make_interval_experiment, make_linear_margin_experiment,
    DensityPiece, DensitySpec, FiniteClass, IntervalHypothesis,
};
use cleanlabel::geometry::vector::norm;
use proptest::prelude::*;

/// Rows as explicit 0/1 tables, independent of the crate's bit packing.
fn table(class: &FiniteClass) -> Vec<Vec<u8>> {
    (0..class.row_count()).map(|r| (0..class.domain_size()).map(|i| class.label(r, i)).collect()).collect()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn oracle_vc(t: &[Vec<u8>], n: usize) -> usize {
    subsets(n)
        .filter(|s| {
            let pats: HashSet<Vec<u8>> = t.iter().map(|r| s.iter().map(|&i| r[i]).collect()).collect();
            pats.len() == 1 << s.len()
        })
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
}

fn realizable(t: &[Vec<u8>], s: &[usize], y: &[u8]) -> bool {
    t.iter().any(|r| s.iter().zip(y).all(|(&i, &l)| r[i] == l))
}

fn oracle_hollow_star(t: &[Vec<u8>], n: usize) -> Option<usize> {
    let mut best = None;
    for s in subsets(n) {
        for lab in 0u32..(1 << s.len()) {
            let y: Vec<u8> = (0..s.len()).map(|j| (lab >> j & 1) as u8).collect();
            if realizable(t, &s, &y) {
                continue;
            }
            let all_neighbors = (0..s.len()).all(|j| {
                let mut z = y.clone();
                z[j] ^= 1;
                realizable(t, &s, &z)
            });
            if all_neighbors && best.is_none_or(|b| s.len() > b) {
                best = Some(s.len());
            }
        }
    }
    best
}

fn oracle_star(t: &[Vec<u8>], n: usize) -> usize {
    let mut best = 0;
    for h0 in t {
        for s in subsets(n) {
            let ok = s.iter().all(|&x| {
                t.iter().any(|h| s.iter().all(|&z| (h[z] != h0[z]) == (z == x)))
            });
            if ok {
                best = best.max(s.len());
            }
        }
    }
    best
}

fn class_from(rows: &[Vec<u8>]) -> FiniteClass {
    let n = rows[0].len();
    let masks = rows.iter().map(|r| r.iter().enumerate().fold(0u64, |m, (i, &b)| m | (b as u64) << i)).collect();
    FiniteClass::with_indexed_domain(n, masks).unwrap()
}

#[test]
fn vc_dimension_hand_values() {
    let n = 8;
    let thresholds: Vec<Vec<u8>> = (0..=n).map(|k| (0..n).map(|i| (i >= k) as u8).collect()).collect();
    assert_eq!(finite_vc_dimension(&class_from(&thresholds)).unwrap(), 1);

    let mut intervals: Vec<Vec<u8>> = vec![vec![0; n]];
    for a in 0..n {
        for b in a..n {
            intervals.push((0..n).map(|i| (a <= i && i <= b) as u8).collect());
        }
    }
    assert_eq!(finite_vc_dimension(&class_from(&intervals)).unwrap(), 2);

    let n = 6;
    let full: Vec<Vec<u8>> = (0u32..1 << n).map(|m| (0..n).map(|i| (m >> i & 1) as u8).collect()).collect();
    assert_eq!(finite_vc_dimension(&class_from(&full)).unwrap(), n);
}

#[test]
fn hollow_star_construction_has_hollow_star_number_k() {
    for k in [3, 5, 7] {
        let (class, star) = make_hollow_star_class(k).unwrap();
        assert_eq!(finite_hollow_star_number(&class).unwrap(), Some(k));
        assert_eq!(star, vec![0; k]);
        let found = find_hollow_star(&class).unwrap().unwrap();
        assert_eq!(found.labels, 0);
        assert_eq!(found.points.count_ones() as usize, k);
    }
    assert!(make_hollow_star_class(2).is_err());
}

#[test]
fn full_class_has_no_hollow_star() {
    let full: Vec<Vec<u8>> = (0u32..8).map(|m| (0..3).map(|i| (m >> i & 1) as u8).collect()).collect();
    assert_eq!(finite_hollow_star_number(&class_from(&full)).unwrap(), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn combinatorics_match_brute_force(n in 1usize..6, bits in prop::collection::vec(any::<u32>(), 1..10)) {
        let mut rows: Vec<Vec<u8>> = bits.iter().map(|b| (0..n).map(|i| (b >> i & 1) as u8).collect()).collect();
        rows.sort();
        rows.dedup();
        let class = class_from(&rows);
        let t = table(&class);
        prop_assert_eq!(finite_vc_dimension(&class).unwrap(), oracle_vc(&t, n));
        prop_assert_eq!(finite_hollow_star_number(&class).unwrap(), oracle_hollow_star(&t, n));
        prop_assert_eq!(finite_star_number(&class).unwrap(), oracle_star(&t, n));
    }
}

#[test]
fn finite_class_json_round_trips_and_validates() {
    let json = r#"{"domain":["a","b","c"],"table":[[0,1,0],[1,1,0]]}"#;
    let class: FiniteClass = serde_json::from_str(json).unwrap();
    assert_eq!(class.domain_size(), 3);
    assert_eq!(class.label(1, 0), 1);
    let back = serde_json::to_string(&class).unwrap();
    assert_eq!(serde_json::from_str::<FiniteClass>(&back).unwrap(), class);
    assert!(serde_json::from_str::<FiniteClass>(r#"{"domain":["a"],"table":[[2]]}"#).is_err());
    assert!(serde_json::from_str::<FiniteClass>(r#"{"domain":["a","b"],"table":[[1]]}"#).is_err());
}

#[test]
fn interval_semantics() {
    let open = IntervalHypothesis::open(0.3, 0.6).unwrap();
    let closed = IntervalHypothesis::closed(0.3, 0.6).unwrap();
    assert!(!open.contains(0.3) && closed.contains(0.3));
    assert!(open.contains(0.45));
    assert!(IntervalHypothesis::open(0.6, 0.3).is_err());
    assert!(IntervalHypothesis::closed(-0.1, 0.3).is_err());
    assert!(!IntervalHypothesis::empty().contains(0.0));
    assert!((open.length() - 0.3).abs() < 1e-15);
}

#[test]
fn piecewise_density_puts_the_declared_mass_on_each_piece() {
    let density = DensitySpec {
        pieces: vec![DensityPiece { lo: 0.0, hi: 0.1, mass: 0.7 }, DensityPiece { lo: 0.5, hi: 1.0, mass: 0.3 }],
    };
    let exp = make_interval_experiment(IntervalHypothesis::open(0.05, 0.7).unwrap(), density).unwrap();
    let mut rng = RngStream::from_seed(1);
    let draws = 20_000;
    let mut low = 0;
    for _ in 0..draws {
        let e = exp.sample(&mut rng);
        let x = e.x.coords()[0];
        assert!((0.0..0.1).contains(&x) || (0.5..1.0).contains(&x));
        assert_eq!(e.y, exp.target().predict(&e.x));
        low += (x < 0.1) as usize;
    }
    let p = low as f64 / draws as f64;
    // Binomial standard error is about 0.0032; allow 5 of them.
    assert!((p - 0.7).abs() < 0.017, "{p}");
    let bad = DensitySpec { pieces: vec![DensityPiece { lo: 0.0, hi: 1.0, mass: 0.5 }] };
    assert!(make_interval_experiment(IntervalHypothesis::empty(), bad).is_err());
}

#[test]
fn margin_samples_respect_the_margin() {
    let mut rng = RngStream::from_seed(2);
    let exp = make_linear_margin_experiment(3, 0.25, &mut rng).unwrap();
    for _ in 0..2000 {
        let e = exp.sample(&mut rng);
        let score = exp.linear_target().score(e.x.coords());
        assert!(score.abs() >= 0.125);
        assert!(norm(e.x.coords()) <= 1.0);
        assert_eq!(e.y, (score >= 0.0) as u8);
    }
}

#[test]
fn halfsphere_mass_split() {
    let exp = make_halfsphere_experiment(16, 0.01).unwrap();
    let mut rng = RngStream::from_seed(3);
    let draws = 40_000;
    let mut sphere = 0;
    for _ in 0..draws {
        let e = exp.sample(&mut rng);
        assert_eq!(e.y, exp.target().predict(&e.x));
        sphere += e.y as usize;
    }
    // 8ε = 0.08 of the mass sits on the half sphere; standard error ≈ 0.0014.
    let p = sphere as f64 / draws as f64;
    assert!((p - 0.08).abs() < 0.007, "{p}");
    assert!(make_halfsphere_experiment(2, 0.01).is_err());
    assert!(make_halfsphere_experiment(16, 0.2).is_err());
}

#[test]
fn circles_experiment_places_mass_zeta_per_circle() {
    let mut rng = RngStream::from_seed(4);
    let exp = make_circles_experiment(2, 4, 30, &mut rng).unwrap();
    // min(1/d, t/(8m)) = min(1/2, 4/240).
    assert!((exp.zeta() - 1.0 / 60.0).abs() < 1e-15);
    let origin = Point::new(vec![0.0; 3]).unwrap();
    let draws = 30_000;
    let mut off = 0;
    for _ in 0..draws {
        let e = exp.sample(&mut rng);
        assert_eq!(e.y, exp.target().predict(&e.x));
        off += (e.x != origin) as usize;
    }
    let p = off as f64 / draws as f64;
    assert!((p - 2.0 / 60.0).abs() < 0.006, "{p}");
}
