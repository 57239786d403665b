use super::AttackContext;
use crate::base::{flip, Attacker, Budget, Dataset, Hypothesis, LabeledExample, Point, RngStream};
use crate::classes::sphere_index;
use crate::error::{Error, Result};
use crate::geometry::vector::{dist, norm, sub};
use crate::geometry::{reflect_axis, reflect_through_line, SphereCircle, UnitVector, IDENTITY_TOL, UNIT_TOL};

/// Mirrors the training circle through the axis of `x0` with flipped
/// labels, provided no training point lies within `√(3η/2)` of `x0`.
#[derive(Clone, Copy, Debug)]
pub struct SphereReflection {
    pub eta: f64,
}

pub fn sphere_reflection_attacker(eta: f64) -> Result<SphereReflection> {
    if !(eta > 0.0 && eta < 1.0 / 6.0) {
        return Err(Error::InvalidParameter(format!("eta must lie in (0, 1/6), got {eta}")));
    }
    Ok(SphereReflection { eta })
}

impl SphereReflection {
    pub fn exclusion_radius(&self) -> f64 {
        (1.5 * self.eta).sqrt()
    }
}

impl Attacker for SphereReflection {
    fn name(&self) -> String {
        "sphere_reflection_attacker".into()
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
        let AttackContext::TangentCircle { w, .. } = ctx else {
            return Err(Error::Context("sphere_reflection_attacker needs tangent-circle metadata".into()));
        };
        if (norm(x0.coords()) - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::NotUnit(norm(x0.coords())));
        }
        let axis = UnitVector::normalize(x0.coords())?;
        let radius = self.exclusion_radius();
        if train.iter().any(|e| dist(e.x.coords(), x0.coords()) < radius) {
            return Ok(Dataset::new());
        }
        let circle = SphereCircle::new(w.clone())?;
        let mut items = Vec::new();
        for e in train.iter().filter(|e| circle.contains(e.x.coords(), IDENTITY_TOL)) {
            let x = UnitVector::normalize(e.x.coords())?;
            let r = reflect_axis(&x, &axis)?;
            items.push(LabeledExample { x: r.to_point(), y: flip(e.y) });
        }
        Dataset::from_items(items)
    }
}

/// For an unseen `x0` on sphere `i` whose circle holds at most `t` training
/// points, mirrors those points through the axis from the sphere center to
/// `x0`, with flipped labels.
#[derive(Clone, Copy, Debug)]
pub struct CircleTPoint {
    pub t: usize,
}

pub fn circle_tpoint_attacker(t: usize) -> CircleTPoint {
    CircleTPoint { t }
}

impl Attacker for CircleTPoint {
    fn name(&self) -> String {
        format!("circle_tpoint_attacker(t={})", self.t)
    }

    fn budget(&self) -> Budget {
        Budget::Finite(self.t)
    }

    fn poison(
        &self,
        _target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        let AttackContext::Circles { centers, .. } = ctx else {
            return Err(Error::Context("circle_tpoint_attacker needs circles metadata".into()));
        };
        let x0c = x0.coords();
        if x0c.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: x0c.len() });
        }
        if norm(x0c) <= UNIT_TOL {
            return Ok(Dataset::new());
        }
        let Some(i) = sphere_index(centers, x0c) else {
            return Ok(Dataset::new());
        };
        if train.iter().any(|e| &e.x == x0) {
            return Ok(Dataset::new());
        }
        let on_sphere: Vec<&LabeledExample> =
            train.iter().filter(|e| sphere_index(centers, e.x.coords()) == Some(i)).collect();
        if on_sphere.len() > self.t {
            return Ok(Dataset::new());
        }
        let c = &centers[i];
        let axis = UnitVector::normalize(&sub(x0c, c))?;
        let items = on_sphere
            .into_iter()
            .map(|e| {
                let r = reflect_through_line(e.x.coords(), c, axis.coords());
                Ok(LabeledExample { x: Point::new(r)?, y: flip(e.y) })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_items(items)
    }
}
