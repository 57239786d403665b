use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::point::{Label, LabeledExample, Point};
use super::rng::RngStream;
use crate::attackers::AttackContext;
use crate::error::Result;

/// A deterministic binary predictor.
pub trait Hypothesis: Send + Sync + fmt::Debug {
    fn predict(&self, x: &Point) -> Label;
}

impl<T: Hypothesis + ?Sized> Hypothesis for Box<T> {
    fn predict(&self, x: &Point) -> Label {
        (**self).predict(x)
    }
}

impl<T: Hypothesis + ?Sized> Hypothesis for Arc<T> {
    fn predict(&self, x: &Point) -> Label {
        (**self).predict(x)
    }
}

/// A constant predictor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstantHypothesis(pub Label);

impl Hypothesis for ConstantHypothesis {
    fn predict(&self, _x: &Point) -> Label {
        self.0
    }
}

/// Where a fit is being evaluated, with provenance of each input item.
///
/// `poison_mask[i]` is true iff item `i` of the dataset passed alongside
/// came from the attacker.
#[derive(Clone, Copy, Debug)]
pub struct FitProbe<'a> {
    pub poison_mask: &'a [bool],
    pub x: &'a Point,
    pub truth: Label,
}

/// Counters filled by learners that check their own internal invariants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerDiagnostics {
    /// Halving steps taken by the 2D binary search.
    pub search_steps: u64,
    /// Steps where the bracket did not have exactly one feasible half.
    pub search_violations: u64,
    /// Probes misclassified by a block majority vote with at most `t` poison items.
    pub vote_errors: u64,
    /// Vote errors backed by fewer than `4t+1` erring clean blocks.
    pub vote_invariant_violations: u64,
}

impl LearnerDiagnostics {
    pub fn merge(&mut self, other: &LearnerDiagnostics) {
        self.search_steps += other.search_steps;
        self.search_violations += other.search_violations;
        self.vote_errors += other.vote_errors;
        self.vote_invariant_violations += other.vote_invariant_violations;
    }

    pub fn violations(&self) -> u64 {
        self.search_violations + self.vote_invariant_violations
    }
}

/// A (possibly randomized) map from datasets to hypotheses.
///
/// Implementations must depend on the dataset only as a multiset.
pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn fit(&self, data: &Dataset, rng: &mut RngStream) -> Result<Box<dyn Hypothesis>>;

    /// Same output as `fit`, additionally recording invariant checks at `probe`.
    fn fit_probed(
        &self,
        data: &Dataset,
        _probe: &FitProbe<'_>,
        _diag: &mut LearnerDiagnostics,
        rng: &mut RngStream,
    ) -> Result<Box<dyn Hypothesis>> {
        self.fit(data, rng)
    }

    /// True when `fit` consumes randomness.
    fn is_randomized(&self) -> bool {
        false
    }
}

/// Maximum poison size an attacker may emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Budget {
    Finite(usize),
    Unbounded,
}

impl Budget {
    pub fn allows(&self, n: usize) -> bool {
        match self {
            Budget::Finite(t) => n <= *t,
            Budget::Unbounded => true,
        }
    }

    pub fn as_option(&self) -> Option<usize> {
        match self {
            Budget::Finite(t) => Some(*t),
            Budget::Unbounded => None,
        }
    }
}

/// Maps (target, training set, test point) to a poison multiset.
pub trait Attacker: Send + Sync {
    fn name(&self) -> String;

    fn budget(&self) -> Budget;

    fn poison(
        &self,
        target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        rng: &mut RngStream,
    ) -> Result<Dataset>;
}

/// Structured metadata describing a targeted distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub family: String,
    pub dim: usize,
    pub margin: Option<f64>,
    pub support: String,
}

/// A sampler over examples labeled by a fixed target.
pub trait TargetedDistribution: Send + Sync {
    fn target(&self) -> &dyn Hypothesis;

    fn sample(&self, rng: &mut RngStream) -> LabeledExample;

    fn descriptor(&self) -> &Descriptor;

    /// Construction metadata handed to proof-derived attackers.
    fn context(&self) -> &AttackContext;

    fn sample_dataset(&self, m: usize, rng: &mut RngStream) -> Dataset {
        let items = (0..m).map(|_| self.sample(rng)).collect();
        Dataset::from_items(items).expect("a distribution emits points of one dimension")
    }
}
