//! Clean-label attackers from the lower-bound constructions, plus generic
//! pool members used against the margin learners.

mod context;
mod geometric;
mod interval;
mod linear;
mod wrappers;

pub use context::AttackContext;
pub use geometric::{circle_tpoint_attacker, sphere_reflection_attacker, CircleTPoint, SphereReflection};
pub use interval::{interval_flood_attacker, subdivision_count, IntervalFlood, MAX_FLOOD_POINTS};
pub use linear::{
    boundary_flood_attacker, linear_reflection_attacker, margin_reflection_attacker, margin_reflection_gate,
    svm_one_point_attacker, BoundaryFlood, LinearReflection, MarginReflection, SvmOnePoint, BOUNDARY_OFFSET,
};
pub use wrappers::{
    budget_wrapper, hollow_star_attacker, label_flip_attacker, null_attacker, BudgetWrapper, HollowStarAttacker,
    LabelFlip, NullAttacker,
};
