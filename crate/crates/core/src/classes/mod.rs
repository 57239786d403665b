//! Hypothesis classes, the distributions built from them, and brute-force
//! combinatorics over finite classes.

mod circles;
mod finite;
mod interval;
mod linear;

pub use circles::{
    make_circles_experiment, on_local_circle, sphere_center, sphere_index, CirclesExperiment, SphereCirclesHypothesis,
};
pub use finite::{
    domain_index, find_hollow_star, finite_hollow_star_number, finite_star_number, finite_vc_dimension,
    hollow_star_experiment_with_target, make_hollow_star_class, make_hollow_star_experiment, partial_order_leq,
    FiniteClass, FiniteExperiment, HollowStar, TableHypothesis, MAX_DOMAIN, MAX_ROWS, STAR_MAX_DOMAIN,
    VC_MAX_DOMAIN,
};
pub use interval::{
    make_interval_experiment, DensityPiece, DensitySpec, IntervalExperiment, IntervalHypothesis, IntervalKind,
    IntervalTarget, UnionOfIntervalsHypothesis,
};
pub use linear::{
    make_halfsphere_experiment, make_linear_margin_experiment, make_margin_lb_experiment,
    make_tangent_circle_experiment, tangent_circle_target, HalfSphereExperiment, LinearHypothesis,
    LinearMarginExperiment, MarginLbExperiment, TangentCircleExperiment, CONSTRUCTION_GAMMA,
};
