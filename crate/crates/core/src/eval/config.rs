//! JSON experiment configs and the registry that turns them into
//! learners, attacker pools and distribution factories.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::{expected_attackable_rate, AttackReport, DistributionFactory, EvalOptions};
use crate::attackers::{
    boundary_flood_attacker, budget_wrapper, circle_tpoint_attacker, hollow_star_attacker, interval_flood_attacker,
    linear_reflection_attacker, margin_reflection_attacker, null_attacker, sphere_reflection_attacker,
    svm_one_point_attacker, AttackContext,
};
use crate::base::{Attacker, Learner, RngStream, TargetedDistribution};
use crate::classes::{
    make_circles_experiment, make_halfsphere_experiment, make_hollow_star_class, make_interval_experiment,
    make_linear_margin_experiment, make_margin_lb_experiment, make_tangent_circle_experiment,
    hollow_star_experiment_with_target, DensitySpec, FiniteClass, FiniteExperiment, IntervalHypothesis,
};
use crate::error::{Error, Result};
use crate::learners::{
    covering_sample_size, margin_sample_size, projection_number, BinarySearch2d, CirclesErm, Closure, ClosureFamily,
    ConsistentRow, Covering, Lattice, MaxInterval, MinInterval, PartitionMajority, Projection, Subsample, Svm,
    TreeOrder, UnionIntervals, DEFAULT_MULTISET_BOUND,
};

/// A whole config file: one experiment with one or more scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub scenarios: Vec<ScenarioConfig>,
}

/// One (class, learner, attacker pool) combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub class: ClassSpec,
    pub learner: LearnerSpec,
    pub attackers: Vec<AttackerSpec>,
    pub m: SampleSize,
    pub trials: usize,
    pub test_points: usize,
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

/// Training-set size, fixed or given by a sample-complexity formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSize {
    Fixed(usize),
    Rule(SampleSizeRule),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSizeRule {
    /// Binary-search learner bound at the class margin.
    MarginBound { epsilon: f64, delta: f64 },
    /// Covering learner bound `|V| ln(|V|/δ)/ε` at the class margin.
    CoveringBound { epsilon: f64, delta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntervalSpec {
    Empty,
    Open { a: f64, b: f64 },
    Closed { a: f64, b: f64 },
}

impl IntervalSpec {
    pub fn build(&self) -> Result<IntervalHypothesis> {
        match *self {
            IntervalSpec::Empty => Ok(IntervalHypothesis::empty()),
            IntervalSpec::Open { a, b } => IntervalHypothesis::open(a, b),
            IntervalSpec::Closed { a, b } => IntervalHypothesis::closed(a, b),
        }
    }
}

/// Target and data distribution of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    Interval {
        target: IntervalSpec,
        #[serde(default)]
        density: Option<DensitySpec>,
    },
    Halfsphere { n: usize, epsilon: f64 },
    MarginLb { n: usize, epsilon: f64 },
    TangentCircle { eta: f64 },
    Circles { d: usize, t: usize },
    HollowStar { k: usize },
    Finite {
        class: FiniteClass,
        /// Drawn uniformly per training draw when absent.
        #[serde(default)]
        target_row: Option<usize>,
    },
    LinearMargin { n: usize, gamma: f64 },
}

impl ClassSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ClassSpec::Interval { .. } => "interval",
            ClassSpec::Halfsphere { .. } => "halfsphere",
            ClassSpec::MarginLb { .. } => "margin_lb",
            ClassSpec::TangentCircle { .. } => "tangent_circle",
            ClassSpec::Circles { .. } => "circles",
            ClassSpec::HollowStar { .. } => "hollow_star",
            ClassSpec::Finite { .. } => "finite",
            ClassSpec::LinearMargin { .. } => "linear_margin",
        }
    }

    /// Ambient dimension of the instances.
    pub fn dim(&self) -> usize {
        match self {
            ClassSpec::Interval { .. } | ClassSpec::HollowStar { .. } | ClassSpec::Finite { .. } => 1,
            ClassSpec::Halfsphere { n, .. } | ClassSpec::MarginLb { n, .. } | ClassSpec::LinearMargin { n, .. } => *n,
            ClassSpec::TangentCircle { .. } | ClassSpec::Circles { .. } => 3,
        }
    }

    /// Number of spheres of the circles construction.
    pub fn spheres(&self) -> Option<usize> {
        match self {
            ClassSpec::Circles { d, .. } => Some(*d),
            _ => None,
        }
    }

    fn margin(&self) -> Option<f64> {
        match self {
            ClassSpec::LinearMargin { gamma, .. } => Some(*gamma),
            ClassSpec::Halfsphere { .. } | ClassSpec::MarginLb { .. } => Some(crate::classes::CONSTRUCTION_GAMMA),
            _ => None,
        }
    }

    /// Finite class the scenario draws from, when there is one.
    pub fn finite_class(&self) -> Result<Option<Arc<FiniteClass>>> {
        match self {
            ClassSpec::HollowStar { k } => Ok(Some(Arc::new(make_hollow_star_class(*k)?.0))),
            ClassSpec::Finite { class, .. } => Ok(Some(Arc::new(class.clone()))),
            _ => Ok(None),
        }
    }

    /// Per-draw constructor of the target distribution.
    pub fn factory(&self, m: usize) -> Result<Box<DistributionFactory<'static>>> {
        Ok(match self.clone() {
            ClassSpec::Interval { target, density } => {
                let dist: Arc<dyn TargetedDistribution> =
                    Arc::new(make_interval_experiment(target.build()?, density.unwrap_or_else(DensitySpec::uniform))?);
                Box::new(move |_: &mut RngStream| Ok(dist.clone()))
            }
            ClassSpec::Halfsphere { n, epsilon } => {
                let dist: Arc<dyn TargetedDistribution> = Arc::new(make_halfsphere_experiment(n, epsilon)?);
                Box::new(move |_: &mut RngStream| Ok(dist.clone()))
            }
            ClassSpec::MarginLb { n, epsilon } => {
                make_margin_lb_experiment(n, epsilon, &mut RngStream::from_seed(0))?;
                Box::new(move |r: &mut RngStream| Ok(Arc::new(make_margin_lb_experiment(n, epsilon, r)?) as Arc<_>))
            }
            ClassSpec::TangentCircle { eta } => {
                make_tangent_circle_experiment(eta, &mut RngStream::from_seed(0))?;
                Box::new(move |r: &mut RngStream| Ok(Arc::new(make_tangent_circle_experiment(eta, r)?) as Arc<_>))
            }
            ClassSpec::Circles { d, t } => {
                make_circles_experiment(d, t, m, &mut RngStream::from_seed(0))?;
                Box::new(move |r: &mut RngStream| Ok(Arc::new(make_circles_experiment(d, t, m, r)?) as Arc<_>))
            }
            ClassSpec::HollowStar { k } => {
                let (class, star) = make_hollow_star_class(k)?;
                let class = Arc::new(class);
                Box::new(move |r: &mut RngStream| {
                    let i_star = r.random_range(0..k);
                    Ok(Arc::new(hollow_star_experiment_with_target(class.clone(), star.clone(), i_star)?) as Arc<_>)
                })
            }
            ClassSpec::Finite { class, target_row } => {
                let class = Arc::new(class);
                let support: Vec<usize> = (0..class.domain_size()).collect();
                if let Some(row) = target_row {
                    FiniteExperiment::new(class.clone(), row, support.clone(), AttackContext::None)?;
                }
                Box::new(move |r: &mut RngStream| {
                    let row = target_row.unwrap_or_else(|| r.random_range(0..class.row_count()));
                    Ok(Arc::new(FiniteExperiment::new(class.clone(), row, support.clone(), AttackContext::None)?)
                        as Arc<_>)
                })
            }
            ClassSpec::LinearMargin { n, gamma } => {
                make_linear_margin_experiment(n, gamma, &mut RngStream::from_seed(0))?;
                Box::new(move |r: &mut RngStream| Ok(Arc::new(make_linear_margin_experiment(n, gamma, r)?) as Arc<_>))
            }
        })
    }
}

/// Learner registry entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerSpec {
    FitMinInterval,
    FitMaxInterval,
    FitUnionIntervals { k: usize },
    FitClosure,
    FitVc1 { reference_row: usize },
    FitConsistentRow,
    FitLinear2d,
    FitCovering { gamma: f64 },
    FitSvm,
    FitCircles,
    FitPartitionMajority { t: usize, base: Box<LearnerSpec> },
    FitProjection {
        t: usize,
        base: Box<LearnerSpec>,
        #[serde(default)]
        multiset_bound: Option<usize>,
    },
    FitSubsample { t: usize, epsilon: f64, base: Box<LearnerSpec> },
}

fn require_finite(class: &ClassSpec, who: &str) -> Result<Arc<FiniteClass>> {
    class.finite_class()?.ok_or_else(|| Error::Config(format!("{who} needs a finite or hollow_star class")))
}

impl LearnerSpec {
    pub fn build(&self, class: &ClassSpec) -> Result<Arc<dyn Learner>> {
        Ok(match self {
            LearnerSpec::FitMinInterval => Arc::new(MinInterval),
            LearnerSpec::FitMaxInterval => Arc::new(MaxInterval),
            LearnerSpec::FitUnionIntervals { k } => Arc::new(UnionIntervals { k: *k }),
            LearnerSpec::FitClosure => {
                let family = match class {
                    ClassSpec::Interval { .. } => ClosureFamily::Intervals,
                    _ => ClosureFamily::Finite(require_finite(class, "fit_closure")?),
                };
                Arc::new(Closure { family })
            }
            LearnerSpec::FitVc1 { reference_row } => {
                Arc::new(TreeOrder { class: require_finite(class, "fit_vc1")?, reference_row: *reference_row })
            }
            LearnerSpec::FitConsistentRow => Arc::new(ConsistentRow { class: require_finite(class, "fit_consistent_row")? }),
            LearnerSpec::FitLinear2d => Arc::new(BinarySearch2d),
            LearnerSpec::FitCovering { gamma } => {
                Lattice::new(*gamma, class.dim())?;
                Arc::new(Covering { gamma: *gamma, n: class.dim() })
            }
            LearnerSpec::FitSvm => Arc::new(Svm),
            LearnerSpec::FitCircles => {
                let spheres = class.spheres().ok_or_else(|| Error::Config("fit_circles needs a circles class".into()))?;
                Arc::new(CirclesErm { spheres })
            }
            LearnerSpec::FitPartitionMajority { t, base } => {
                Arc::new(PartitionMajority { t: *t, base: base.build(class)? })
            }
            LearnerSpec::FitProjection { t, base, multiset_bound } => {
                let finite = require_finite(class, "fit_projection")?;
                let k_p = projection_number(&finite, multiset_bound.unwrap_or(DEFAULT_MULTISET_BOUND))?;
                Arc::new(Projection { t: *t, base: base.build(class)?, class: finite, k_p })
            }
            LearnerSpec::FitSubsample { t, epsilon, base } => {
                Arc::new(Subsample { t: *t, epsilon: *epsilon, base: base.build(class)? })
            }
        })
    }
}

/// Attacker registry entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackerSpec {
    NullAttacker,
    IntervalFloodAttacker {
        #[serde(default = "one")]
        resolution: usize,
    },
    SvmOnePointAttacker,
    SphereReflectionAttacker { eta: f64 },
    MarginReflectionAttacker,
    CircleTpointAttacker { t: usize },
    HollowStarAttacker,
    BudgetWrapper { inner: Box<AttackerSpec>, t: usize },
    BoundaryFlood { count: usize },
    LinearReflection,
}

fn one() -> usize {
    1
}

impl AttackerSpec {
    pub fn build(&self) -> Result<Arc<dyn Attacker>> {
        Ok(match self {
            AttackerSpec::NullAttacker => Arc::new(null_attacker()),
            AttackerSpec::IntervalFloodAttacker { resolution } => Arc::new(interval_flood_attacker(*resolution)?),
            AttackerSpec::SvmOnePointAttacker => Arc::new(svm_one_point_attacker()),
            AttackerSpec::SphereReflectionAttacker { eta } => Arc::new(sphere_reflection_attacker(*eta)?),
            AttackerSpec::MarginReflectionAttacker => Arc::new(margin_reflection_attacker()),
            AttackerSpec::CircleTpointAttacker { t } => Arc::new(circle_tpoint_attacker(*t)),
            AttackerSpec::HollowStarAttacker => Arc::new(hollow_star_attacker()),
            AttackerSpec::BudgetWrapper { inner, t } => Arc::new(budget_wrapper(inner.build()?, *t)),
            AttackerSpec::BoundaryFlood { count } => Arc::new(boundary_flood_attacker(*count)),
            AttackerSpec::LinearReflection => Arc::new(linear_reflection_attacker()),
        })
    }
}

impl ScenarioConfig {
    /// Training-set size after evaluating any sample-size rule.
    pub fn resolved_m(&self) -> Result<usize> {
        match &self.m {
            SampleSize::Fixed(m) => Ok(*m),
            SampleSize::Rule(rule) => {
                let gamma = self
                    .class
                    .margin()
                    .ok_or_else(|| Error::Config(format!("scenario {}: sample-size rule needs a margin class", self.id)))?;
                match *rule {
                    SampleSizeRule::MarginBound { epsilon, delta } => Ok(margin_sample_size(gamma, epsilon, delta)),
                    SampleSizeRule::CoveringBound { epsilon, delta } => {
                        Ok(covering_sample_size(&Lattice::new(gamma, self.class.dim())?, epsilon, delta))
                    }
                }
            }
        }
    }

    /// Checks that every component resolves, without running anything.
    pub fn validate(&self) -> Result<()> {
        let m = self.resolved_m()?;
        let _probe = self.class.factory(m)?;
        self.learner.build(&self.class)?;
        if self.attackers.is_empty() {
            return Err(Error::Config(format!("scenario {}: empty attacker pool", self.id)));
        }
        for a in &self.attackers {
            a.build()?;
        }
        if self.trials == 0 || self.test_points == 0 || m == 0 {
            return Err(Error::Config(format!("scenario {}: m, trials and test_points must be ≥ 1", self.id)));
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::Config("config has no scenarios".into()));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].iter().any(|o| o.id == s.id) {
                return Err(Error::Config(format!("duplicate scenario id {}", s.id)));
            }
            s.validate().map_err(|e| match e {
                Error::Config(msg) => Error::Config(msg),
                other => Error::Config(format!("scenario {}: {other}", s.id)),
            })?;
        }
        Ok(())
    }
}

/// A scenario together with its report.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioResult {
    pub scenario: ScenarioConfig,
    pub m: usize,
    pub report: AttackReport,
}

/// Seed of a scenario, derived from the experiment seed and the scenario id.
pub fn scenario_seed(seed: u64, id: &str) -> u64 {
    let key = RngStream::from_seed(seed).derive(id).key();
    u64::from_le_bytes(key[..8].try_into().expect("8 bytes"))
}

/// Runs every scenario of a config in order.
pub fn run_config(cfg: &ExperimentConfig, opts: EvalOptions) -> Result<Vec<ScenarioResult>> {
    cfg.scenarios
        .iter()
        .map(|s| {
            let m = s.resolved_m()?;
            let factory = s.class.factory(m)?;
            let learner = s.learner.build(&s.class)?;
            let pool = s.attackers.iter().map(|a| a.build()).collect::<Result<Vec<_>>>()?;
            let mut report = expected_attackable_rate(
                learner.as_ref(),
                &pool,
                factory.as_ref(),
                m,
                s.trials,
                s.test_points,
                scenario_seed(cfg.seed, &s.id),
                opts,
            )?;
            report.seed = cfg.seed;
            Ok(ScenarioResult { scenario: s.clone(), m, report })
        })
        .collect()
}

/// Hex SHA-256 of the raw config bytes.
pub fn config_digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
