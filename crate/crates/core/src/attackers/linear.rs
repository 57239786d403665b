use super::AttackContext;
use crate::base::{flip, Attacker, Budget, Dataset, Hypothesis, LabeledExample, Point, RngStream};
use crate::error::{Error, Result};
use crate::geometry::vector::{axpy, basis, dot, norm, scale};
use crate::geometry::{reflect_span_plane, span_partner, UnitVector};

/// One point against the max-margin separator on the half-sphere construction.
#[derive(Clone, Copy, Debug, Default)]
pub struct SvmOnePoint;

pub fn svm_one_point_attacker() -> SvmOnePoint {
    SvmOnePoint
}

impl Attacker for SvmOnePoint {
    fn name(&self) -> String {
        "svm_one_point_attacker".into()
    }

    fn budget(&self) -> Budget {
        Budget::Finite(1)
    }

    fn poison(
        &self,
        _target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        let AttackContext::HalfSphere { gamma } = ctx else {
            return Err(Error::Context("svm_one_point_attacker needs half-sphere metadata".into()));
        };
        let n = x0.dim();
        let e1 = UnitVector::basis(n, 0);
        let Ok(v2) = span_partner(x0.coords(), &e1) else {
            return Ok(Dataset::new());
        };
        let item = if train.count_label(1) == 0 {
            LabeledExample { x: Point::new(scale(&v2, -1.0))?, y: 1 }
        } else {
            let p = axpy(&scale(&v2, (1.0 - gamma * gamma).sqrt()), -gamma, e1.coords());
            LabeledExample { x: Point::new(p)?, y: 0 }
        };
        Dataset::from_items(vec![item])
    }
}

/// Sphere-part training points of the margin lower-bound construction, in R^{n−1}.
fn sphere_part(train: &Dataset) -> Vec<(Vec<f64>, u8)> {
    train
        .iter()
        .filter(|e| *e.x.coords().last().expect("nonempty point") == 0.0)
        .map(|e| {
            let c = e.x.coords();
            (c[..c.len() - 1].to_vec(), e.y)
        })
        .collect()
}

/// Whether the reflection attack is allowed for `x0` (given in R^{n−1}).
pub fn margin_reflection_gate(w_star: &UnitVector, gamma: f64, epsilon: f64, train: &Dataset, x0: &[f64]) -> bool {
    let Ok(v2) = span_partner(x0, w_star) else {
        return false;
    };
    let sphere = sphere_part(train);
    let cap = 0.125 + gamma;
    sphere.iter().all(|(x, _)| dot(x, w_star.coords()) <= cap && dot(x, &v2) <= 0.125)
        && dot(x0, w_star.coords()) <= cap
        && sphere.len() as f64 <= 32.0 * train.len() as f64 * epsilon
}

/// Mirrors every sphere-part training point across the plane fixed by
/// `x0` and `w*`, with flipped labels, when the gating event holds.
#[derive(Clone, Copy, Debug, Default)]
pub struct MarginReflection;

pub fn margin_reflection_attacker() -> MarginReflection {
    MarginReflection
}

impl Attacker for MarginReflection {
    fn name(&self) -> String {
        "margin_reflection_attacker".into()
    }

    fn budget(&self) -> Budget {
        Budget::Unbounded
    }

    fn poison(
        &self,
        _target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        let AttackContext::MarginLb { w_star, gamma, epsilon, .. } = ctx else {
            return Err(Error::Context("margin_reflection_attacker needs margin construction metadata".into()));
        };
        let n = w_star.dim() + 1;
        if x0.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x0.dim() });
        }
        let c = x0.coords();
        if c[n - 1] != 0.0 {
            return Ok(Dataset::new());
        }
        let x0_low = &c[..n - 1];
        if !margin_reflection_gate(w_star, *gamma, *epsilon, train, x0_low) {
            return Ok(Dataset::new());
        }
        let x0p = Point::new(x0_low.to_vec())?;
        let items = sphere_part(train)
            .into_iter()
            .map(|(x, y)| {
                let mut r = reflect_span_plane(&Point::new(x)?, &x0p, w_star)?.into_coords();
                r.push(0.0);
                Ok(LabeledExample { x: Point::new(r)?, y: flip(y) })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_items(items)
    }
}

/// Offset past the target boundary at which flooded points are placed.
pub const BOUNDARY_OFFSET: f64 = 1e-6;
/// Spacing of flooded points along the boundary.
const FLOOD_SPACING: f64 = 0.01;

fn linear_target(ctx: &AttackContext) -> Result<&crate::classes::LinearHypothesis> {
    match ctx {
        AttackContext::Linear { target } => Ok(target),
        _ => Err(Error::Context("attacker needs a linear target".into())),
    }
}

/// Unit normal and offset of a linear target, normalized so `‖w‖ = 1`.
fn unit_normal(h: &crate::classes::LinearHypothesis) -> (Vec<f64>, f64) {
    let s = norm(h.w());
    (scale(h.w(), 1.0 / s), h.b() / s)
}

/// A unit direction orthogonal to `w` (the first basis vector least aligned with it, projected).
fn boundary_direction(w: &[f64]) -> Option<Vec<f64>> {
    let n = w.len();
    if n < 2 {
        return None;
    }
    let k = (0..n).min_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs())).expect("n ≥ 2");
    let e = basis(n, k);
    let d = axpy(&e, -dot(&e, w), w);
    let dn = norm(&d);
    (dn > 0.0).then(|| scale(&d, 1.0 / dn))
}

/// Clean points of the label opposite to `x0`'s, just across the target
/// boundary near the foot of `x0`, inside the unit ball.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryFlood {
    pub count: usize,
}

pub fn boundary_flood_attacker(count: usize) -> BoundaryFlood {
    BoundaryFlood { count }
}

impl Attacker for BoundaryFlood {
    fn name(&self) -> String {
        format!("boundary_flood(count={})", self.count)
    }

    fn budget(&self) -> Budget {
        Budget::Finite(self.count)
    }

    fn poison(
        &self,
        target: &dyn Hypothesis,
        ctx: &AttackContext,
        _train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        let (w, b) = unit_normal(linear_target(ctx)?);
        let xc = x0.coords();
        if xc.len() != w.len() {
            return Err(Error::DimensionMismatch { expected: w.len(), found: xc.len() });
        }
        let Some(dir) = boundary_direction(&w) else {
            return Ok(Dataset::new());
        };
        let y0 = target.predict(x0);
        let want = flip(y0);
        let score = dot(&w, xc) + b;
        let side = if want == 1 { BOUNDARY_OFFSET } else { -BOUNDARY_OFFSET };
        let foot = axpy(xc, side - score, &w);
        let mut items = Vec::new();
        for k in 0..self.count {
            let s = k as f64;
            let step = if k % 2 == 0 { s / 2.0 } else { -(s + 1.0) / 2.0 };
            let p = axpy(&foot, step * FLOOD_SPACING, &dir);
            if norm(&p) > 1.0 {
                continue;
            }
            let x = Point::new(p)?;
            if target.predict(&x) == want {
                items.push(LabeledExample { x, y: want });
            }
        }
        Dataset::from_items(items)
    }
}

/// Mirrors training points across the hyperplane through `x0` parallel to
/// the target boundary, keeping images that are clean with the flipped label.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinearReflection;

pub fn linear_reflection_attacker() -> LinearReflection {
    LinearReflection
}

impl Attacker for LinearReflection {
    fn name(&self) -> String {
        "linear_reflection".into()
    }

    fn budget(&self) -> Budget {
        Budget::Unbounded
    }

    fn poison(
        &self,
        target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        let (w, _) = unit_normal(linear_target(ctx)?);
        let xc = x0.coords();
        if xc.len() != w.len() {
            return Err(Error::DimensionMismatch { expected: w.len(), found: xc.len() });
        }
        let level = dot(&w, xc);
        let mut items = Vec::new();
        for e in train.iter() {
            let r = axpy(e.x.coords(), -2.0 * (dot(&w, e.x.coords()) - level), &w);
            if norm(&r) > 1.0 {
                continue;
            }
            let x = Point::new(r)?;
            let y = flip(e.y);
            if target.predict(&x) == y {
                items.push(LabeledExample { x, y });
            }
        }
        Dataset::from_items(items)
    }
}
