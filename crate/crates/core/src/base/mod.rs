//! Shared currency of the crate: points, labeled multisets, the
//! learner/attacker/distribution contracts, and hierarchical RNG streams.

mod dataset;
mod point;
mod rng;
mod traits;

pub use dataset::{dataset_union, empirical_error, is_consistent, Dataset};
pub use point::{flip, Label, LabeledExample, Point};
pub use rng::{RngStream, StreamLabel};
pub use traits::{
    Attacker, Budget, ConstantHypothesis, Descriptor, FitProbe, Hypothesis, Learner, LearnerDiagnostics,
    TargetedDistribution,
};
