//! Learning algorithms: interval ERMs, structural learners for finite and
//! VC-1 classes, linear learners, and the robust aggregation protocols.

mod arcs;
mod circles;
mod covering;
mod finite;
mod interval;
mod linear2d;
mod robust;
mod svm;

pub use arcs::{consistent_arcs, convex_hull, normalize_angle, ArcPiece, ArcSet};
pub use circles::{fit_circles, CirclesErm};
pub use covering::{covering_sample_size, fit_covering, Covering, CoveringHypothesis, Lattice, MAX_CELLS};
pub use finite::{
    domain_sample, fit_closure, fit_consistent_row, fit_vc1, Closure, ClosureFamily, ConsistentRow, TreeOrder,
};
pub use interval::{
    fit_max_interval, fit_min_interval, fit_union_intervals, longest_gap, sorted_with_sentinels, MaxInterval,
    MinInterval, UnionIntervals,
};
pub use linear2d::{fit_linear2d, fit_linear2d_traced, BinarySearch2d, SearchTrace, MAX_HALVINGS, OFFSET_RANGE};
pub use robust::{
    fit_partition_majority, fit_projection, fit_subsample, majority, projection_number, random_blocks,
    subsample_size, MajorityVote, PartitionMajority, Projection, Subsample, DEFAULT_MULTISET_BOUND,
};
pub use svm::{fit_svm, solve_svm, Svm, SvmSolution, KKT_TOL, MAX_ITERATIONS};

/// Sample size of the binary-search learner's guarantee at margin `γ`,
/// accuracy `ε` and confidence `δ` (base-2 logarithms), rounded up.
pub fn margin_sample_size(gamma: f64, epsilon: f64, delta: f64) -> usize {
    let l = (64.0 / gamma).log2();
    let m = 48.0 * l / epsilon * (26.0 * l / epsilon).log2() + 8.0 * l / epsilon * (2.0 / delta).log2();
    m.ceil() as usize
}
