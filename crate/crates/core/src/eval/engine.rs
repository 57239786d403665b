use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{mean_and_half_width, Proportion};
use crate::base::{
    Attacker, Dataset, FitProbe, Hypothesis, Label, Learner, LearnerDiagnostics, RngStream, TargetedDistribution,
};
use crate::error::{Error, Result};

/// Builds the (target, distribution) pair of one training draw.
pub type DistributionFactory<'a> = dyn Fn(&mut RngStream) -> Result<Arc<dyn TargetedDistribution>> + Send + Sync + 'a;

/// Execution knobs that never change results.
#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    /// Worker threads; 0 uses rayon's default.
    pub workers: usize,
}

/// Violation counters; all zero on a passing run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditCounters {
    pub clean_label_violations: u64,
    pub budget_violations: u64,
    pub learner_invariant_violations: u64,
    pub trial_errors: u64,
}

impl AuditCounters {
    pub fn total(&self) -> u64 {
        self.clean_label_violations + self.budget_violations + self.learner_invariant_violations + self.trial_errors
    }

    fn merge(&mut self, o: &AuditCounters) {
        self.clean_label_violations += o.clean_label_violations;
        self.budget_violations += o.budget_violations;
        self.learner_invariant_violations += o.learner_invariant_violations;
        self.trial_errors += o.trial_errors;
    }
}

/// Monte-Carlo estimate of the attackable rate of one learner against an
/// attacker pool. `atk` at a test point is the maximum over pool members,
/// so it is a lower bound on the rate against all clean-label attackers.
#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub learner: String,
    pub attackers: Vec<String>,
    pub atk_mean: f64,
    /// Half-width of the Wilson 95% interval of `atk_mean`.
    pub atk_ci95: f64,
    pub err_mean: f64,
    pub err_ci95: f64,
    pub trials: usize,
    pub test_points_per_trial: usize,
    pub seed: u64,
    pub atk: Proportion,
    pub err: Proportion,
    /// Rate of each pool member on its own, in pool order.
    pub per_attacker_atk: Vec<f64>,
    pub per_trial_atk: Vec<f64>,
    pub per_trial_err: Vec<f64>,
    pub audit: AuditCounters,
    pub diagnostics: LearnerDiagnostics,
    /// First few trial error messages.
    pub trial_error_messages: Vec<String>,
}

impl AttackReport {
    /// Mean and 95% half-width treating trials as the independent unit.
    pub fn trial_level_atk(&self) -> (f64, f64) {
        mean_and_half_width(&self.per_trial_atk)
    }
}

const KEPT_ERROR_MESSAGES: usize = 8;

#[derive(Default)]
struct PointOutcome {
    clean_wrong: bool,
    attacker_wrong: Vec<bool>,
    audit: AuditCounters,
    diag: LearnerDiagnostics,
    errors: Vec<String>,
}

struct TrialOutcome {
    points: Vec<PointOutcome>,
    setup_error: Option<String>,
}

struct TrialSetup {
    dist: Arc<dyn TargetedDistribution>,
    train: Dataset,
    clean_fit: Option<Box<dyn Hypothesis>>,
}

fn fit_at(
    learner: &dyn Learner,
    data: &Dataset,
    poisoned: usize,
    x: &crate::base::Point,
    truth: Label,
    diag: &mut LearnerDiagnostics,
    rng: &RngStream,
) -> Result<Label> {
    let mut mask = vec![false; data.len() - poisoned];
    mask.resize(data.len(), true);
    let probe = FitProbe { poison_mask: &mask, x, truth };
    let h = learner.fit_probed(data, &probe, diag, &mut rng.clone())?;
    Ok(h.predict(x))
}

fn evaluate_point(
    learner: &dyn Learner,
    pool: &[Arc<dyn Attacker>],
    setup: &TrialSetup,
    trial_rng: &RngStream,
    index: usize,
) -> PointOutcome {
    let rp = trial_rng.derive2("point", index);
    let dist = setup.dist.as_ref();
    let test = dist.sample(&mut rp.derive("test"));
    let (x, truth) = (&test.x, test.y);
    let learner_rng = rp.derive("learner");
    let mut out = PointOutcome::default();

    let clean = match &setup.clean_fit {
        Some(h) => Ok(h.predict(x)),
        None => fit_at(learner, &setup.train, 0, x, truth, &mut out.diag, &learner_rng),
    };
    let clean = match clean {
        Ok(y) => Some(y),
        Err(e) => {
            out.errors.push(format!("clean fit: {e}"));
            None
        }
    };
    out.clean_wrong = clean != Some(truth);

    let target = dist.target();
    for (a, attacker) in pool.iter().enumerate() {
        let poison = attacker.poison(target, dist.context(), &setup.train, x, &mut rp.derive2("attack", a));
        let wrong = match poison {
            Err(e) => {
                out.errors.push(format!("{}: {e}", attacker.name()));
                true
            }
            Ok(p) => {
                let dirty = p.iter().filter(|e| target.predict(&e.x) != e.y).count() as u64;
                out.audit.clean_label_violations += dirty;
                if !attacker.budget().allows(p.len()) {
                    out.audit.budget_violations += 1;
                }
                if p.is_empty() {
                    out.clean_wrong
                } else {
                    let fitted = setup
                        .train
                        .union(&p)
                        .and_then(|u| fit_at(learner, &u, p.len(), x, truth, &mut out.diag, &learner_rng));
                    match fitted {
                        Ok(y) => y != truth,
                        Err(e) => {
                            out.errors.push(format!("{} poisoned fit: {e}", attacker.name()));
                            true
                        }
                    }
                }
            }
        };
        out.attacker_wrong.push(wrong);
    }
    out.audit.trial_errors += out.errors.len() as u64;
    out.audit.learner_invariant_violations += out.diag.violations();
    out
}

fn setup_trial(learner: &dyn Learner, factory: &DistributionFactory<'_>, m: usize, trial_rng: &RngStream) -> Result<TrialSetup> {
    let dist = factory(&mut trial_rng.derive("target"))?;
    let train = dist.sample_dataset(m, &mut trial_rng.derive("train"));
    let clean_fit = if learner.is_randomized() {
        None
    } else {
        Some(learner.fit(&train, &mut trial_rng.derive("clean"))?)
    };
    Ok(TrialSetup { dist, train, clean_fit })
}

fn run_trial(
    learner: &dyn Learner,
    pool: &[Arc<dyn Attacker>],
    factory: &DistributionFactory<'_>,
    m: usize,
    test_points: usize,
    root: &RngStream,
    t: usize,
) -> TrialOutcome {
    let trial_rng = root.derive2("trial", t);
    match setup_trial(learner, factory, m, &trial_rng) {
        Err(e) => TrialOutcome { points: Vec::new(), setup_error: Some(e.to_string()) },
        Ok(setup) => {
            let points = (0..test_points)
                .into_par_iter()
                .map(|i| evaluate_point(learner, pool, &setup, &trial_rng, i))
                .collect();
            TrialOutcome { points, setup_error: None }
        }
    }
}

pub(crate) fn with_workers<T: Send>(opts: EvalOptions, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Expected attackable rate over `training_draws` fresh (target,
/// distribution, training set) triples, `test_points` test draws each.
///
/// Each (draw, test point) pair uses its own derived stream, and the clean
/// fit and every poisoned fit at a point share the learner stream, so an
/// empty poison set reproduces the clean prediction exactly.
#[allow(clippy::too_many_arguments)]
pub fn expected_attackable_rate(
    learner: &dyn Learner,
    pool: &[Arc<dyn Attacker>],
    factory: &DistributionFactory<'_>,
    m: usize,
    training_draws: usize,
    test_points: usize,
    seed: u64,
    opts: EvalOptions,
) -> Result<AttackReport> {
    if m == 0 || test_points == 0 || training_draws == 0 {
        return Err(Error::InvalidParameter("m, training draws and test points must be ≥ 1".into()));
    }
    if pool.is_empty() {
        return Err(Error::InvalidParameter("attacker pool is empty".into()));
    }
    let root = RngStream::from_seed(seed);
    let trials: Vec<TrialOutcome> = with_workers(opts, || {
        (0..training_draws)
            .into_par_iter()
            .map(|t| run_trial(learner, pool, factory, m, test_points, &root, t))
            .collect()
    })?;

    let mut audit = AuditCounters::default();
    let mut diagnostics = LearnerDiagnostics::default();
    let mut messages = Vec::new();
    let mut atk_hits = 0u64;
    let mut err_hits = 0u64;
    let mut n = 0u64;
    let mut member_hits = vec![0u64; pool.len()];
    let mut per_trial_atk = Vec::with_capacity(trials.len());
    let mut per_trial_err = Vec::with_capacity(trials.len());
    for trial in &trials {
        if let Some(e) = &trial.setup_error {
            audit.trial_errors += 1;
            if messages.len() < KEPT_ERROR_MESSAGES {
                messages.push(format!("trial setup: {e}"));
            }
            continue;
        }
        let (mut ta, mut te) = (0u64, 0u64);
        for p in &trial.points {
            let attacked = p.attacker_wrong.iter().any(|&w| w);
            ta += attacked as u64;
            te += p.clean_wrong as u64;
            for (h, &w) in member_hits.iter_mut().zip(&p.attacker_wrong) {
                *h += w as u64;
            }
            audit.merge(&p.audit);
            diagnostics.merge(&p.diag);
            for e in &p.errors {
                if messages.len() < KEPT_ERROR_MESSAGES {
                    messages.push(e.clone());
                }
            }
        }
        let k = trial.points.len() as u64;
        atk_hits += ta;
        err_hits += te;
        n += k;
        per_trial_atk.push(ta as f64 / k as f64);
        per_trial_err.push(te as f64 / k as f64);
    }
    let atk = Proportion::new(atk_hits, n);
    let err = Proportion::new(err_hits, n);
    Ok(AttackReport {
        learner: learner.name(),
        attackers: pool.iter().map(|a| a.name()).collect(),
        atk_mean: atk.mean,
        atk_ci95: atk.half_width(),
        err_mean: err.mean,
        err_ci95: err.half_width(),
        trials: training_draws,
        test_points_per_trial: test_points,
        seed,
        atk,
        err,
        per_attacker_atk: member_hits.iter().map(|&h| if n == 0 { 0.0 } else { h as f64 / n as f64 }).collect(),
        per_trial_atk,
        per_trial_err,
        audit,
        diagnostics,
        trial_error_messages: messages,
    })
}

/// Attackable rate for one training draw from a fixed distribution.
pub fn attackable_rate(
    learner: &dyn Learner,
    pool: &[Arc<dyn Attacker>],
    dist: Arc<dyn TargetedDistribution>,
    m: usize,
    test_points: usize,
    seed: u64,
    opts: EvalOptions,
) -> Result<AttackReport> {
    let factory = move |_: &mut RngStream| Ok(dist.clone());
    expected_attackable_rate(learner, pool, &factory, m, 1, test_points, seed, opts)
}
