use std::sync::Arc;

use crate::base::Label;
use crate::classes::{FiniteClass, LinearHypothesis};
use crate::geometry::UnitVector;

/// Hidden construction metadata a distribution hands to its attackers.
#[derive(Clone, Debug)]
pub enum AttackContext {
    /// The attacker works from the target hypothesis alone.
    None,
    /// Half-sphere construction with target `1{⟨e1,x⟩ ≥ −γ/2}`.
    HalfSphere { gamma: f64 },
    /// Margin lower-bound construction in R^n; `w_star` lives in R^{n−1}.
    MarginLb { w_star: UnitVector, sign: i8, gamma: f64, epsilon: f64 },
    /// Single circle `C_w` on the unit sphere of R^3 labeled `1` iff `positive`.
    TangentCircle { w: UnitVector, positive: bool, eta: f64 },
    /// Circles on unit spheres centered at `centers[i]`; `qs[i]` is local to sphere `i`.
    Circles { centers: Vec<Vec<f64>>, qs: Vec<UnitVector>, labels: Vec<Label> },
    /// Hollow star set `star` of `class` with target row `target_row`.
    HollowStar { class: Arc<FiniteClass>, star: Vec<Label>, target_row: usize },
    /// Linear target, exposed structurally.
    Linear { target: LinearHypothesis },
}
