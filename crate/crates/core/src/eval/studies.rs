use rayon::prelude::*;
use serde::Serialize;

use super::engine::{with_workers, EvalOptions};
use crate::attackers::svm_one_point_attacker;
use crate::base::{Attacker, Hypothesis, RngStream, TargetedDistribution};
use crate::classes::make_halfsphere_experiment;
use crate::error::Result;
use crate::geometry::vector::dot;
use crate::geometry::{span_partner, UnitVector};
use crate::learners::fit_svm;

/// Per-trial outcome of the one-point attack on the max-margin separator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SvmEventStudy {
    pub trials: u64,
    /// Trials where the sufficient event for a successful attack holds.
    pub fired: u64,
    pub misclassified_when_fired: u64,
    pub misclassified: u64,
    pub errors: u64,
}

impl SvmEventStudy {
    pub fn fired_rate(&self) -> f64 {
        self.fired as f64 / self.trials as f64
    }
}

/// Whether the sufficient event holds for positives `pos`, test point `x0`
/// and training size `m`: either no positives and `⟨x0,e1⟩ < 1/√2`, or
/// between 1 and `32mε` positives, all with components at most 1/8 along
/// `e1` and the in-plane direction of `x0`, and `⟨x0,e1⟩ ≤ 1/8`.
pub fn svm_attack_event(pos: &[&[f64]], x0: &[f64], m: usize, epsilon: f64) -> bool {
    let e1 = UnitVector::basis(x0.len(), 0);
    let Ok(v2) = span_partner(x0, &e1) else {
        return false;
    };
    if pos.is_empty() {
        return x0[0] < std::f64::consts::FRAC_1_SQRT_2;
    }
    pos.len() as f64 <= 32.0 * m as f64 * epsilon
        && pos.iter().all(|x| x[0] <= 0.125 && dot(x, &v2) <= 0.125)
        && x0[0] <= 0.125
}

/// Draws `trials` (training set, half-sphere test point) pairs on the
/// half-sphere construction and records the event and the SVM outcome.
pub fn svm_event_study(n: usize, epsilon: f64, m: usize, trials: usize, seed: u64, opts: EvalOptions) -> Result<SvmEventStudy> {
    let exp = make_halfsphere_experiment(n, epsilon)?;
    let attacker = svm_one_point_attacker();
    let root = RngStream::from_seed(seed);
    let rows: Vec<(bool, bool, bool)> = with_workers(opts, || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let r = root.derive2("trial", t);
                let train = exp.sample_dataset(m, &mut r.derive("train"));
                let x0 = exp.sample_sphere_part(&mut r.derive("test")).x;
                let pos: Vec<&[f64]> = train.iter().filter(|e| e.y == 1).map(|e| e.x.coords()).collect();
                let fired = svm_attack_event(&pos, x0.coords(), m, epsilon);
                let outcome = attacker
                    .poison(exp.target(), exp.context(), &train, &x0, &mut r.derive("attack"))
                    .and_then(|p| train.union(&p))
                    .and_then(|u| fit_svm(&u));
                match outcome {
                    Ok(h) => (fired, h.predict(&x0) != 1, false),
                    Err(_) => (fired, false, true),
                }
            })
            .collect()
    })?;
    let mut s = SvmEventStudy { trials: trials as u64, ..Default::default() };
    for (fired, wrong, err) in rows {
        s.fired += fired as u64;
        s.misclassified += wrong as u64;
        s.misclassified_when_fired += (fired && wrong) as u64;
        s.errors += err as u64;
    }
    Ok(s)
}
