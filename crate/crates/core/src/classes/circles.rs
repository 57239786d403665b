use rand::Rng;

use crate::attackers::AttackContext;
use crate::base::{flip, Descriptor, Hypothesis, Label, LabeledExample, Point, RngStream, TargetedDistribution};
use crate::error::{Error, Result};
use crate::geometry::vector::{add, dist, norm, sub};
use crate::geometry::{sample_circle, sample_sphere, SphereCircle, UnitVector, IDENTITY_TOL};

/// Center of sphere `i` (one-based): `3i·e1` in R^3.
pub fn sphere_center(i: usize) -> Vec<f64> {
    vec![3.0 * i as f64, 0.0, 0.0]
}

/// On unit sphere `i` around `centers[i]`: label `labels[i]` on the circle
/// `C_{q_i}` and the opposite label elsewhere on that sphere; 0 off all spheres.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereCirclesHypothesis {
    centers: Vec<Vec<f64>>,
    qs: Vec<UnitVector>,
    labels: Vec<Label>,
}

impl SphereCirclesHypothesis {
    pub fn new(centers: Vec<Vec<f64>>, qs: Vec<UnitVector>, labels: Vec<Label>) -> Result<Self> {
        if centers.len() != qs.len() || qs.len() != labels.len() || qs.is_empty() {
            return Err(Error::InvalidParameter("sphere, circle and label lists must match and be nonempty".into()));
        }
        for (c, q) in centers.iter().zip(&qs) {
            if c.len() != 3 || q.dim() != 3 {
                return Err(Error::DimensionMismatch { expected: 3, found: c.len().min(q.dim()) });
            }
        }
        for (a, ca) in centers.iter().enumerate() {
            for cb in &centers[a + 1..] {
                if dist(ca, cb) <= 2.0 {
                    return Err(Error::InvalidParameter("spheres must be disjoint".into()));
                }
            }
        }
        if labels.iter().any(|&s| s > 1) {
            return Err(Error::InvalidParameter("circle labels must be 0 or 1".into()));
        }
        Ok(SphereCirclesHypothesis { centers, qs, labels })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn qs(&self) -> &[UnitVector] {
        &self.qs
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Index of the sphere that `x` lies on, if any.
    pub fn sphere_of(&self, x: &[f64]) -> Option<usize> {
        sphere_index(&self.centers, x)
    }
}

/// Index of the unit sphere around one of `centers` containing `x` (within 1e-9).
pub fn sphere_index(centers: &[Vec<f64>], x: &[f64]) -> Option<usize> {
    centers.iter().position(|c| (dist(x, c) - 1.0).abs() <= IDENTITY_TOL)
}

/// Whether local point `p` (relative to its sphere center) lies on `C_q`.
pub fn on_local_circle(p: &[f64], q: &[f64]) -> bool {
    (norm(p) - 1.0).abs() <= IDENTITY_TOL && (dist(p, q) - 1.0).abs() <= IDENTITY_TOL
}

impl Hypothesis for SphereCirclesHypothesis {
    fn predict(&self, x: &Point) -> Label {
        let xc = x.coords();
        if xc.len() != 3 {
            return 0;
        }
        match self.sphere_of(xc) {
            None => 0,
            Some(i) => {
                let local = sub(xc, &self.centers[i]);
                if on_local_circle(&local, self.qs[i].coords()) {
                    self.labels[i]
                } else {
                    flip(self.labels[i])
                }
            }
        }
    }
}

/// `d` unit spheres centered at `3i·e1`; each circle `C_{q_i}` carries mass
/// `ζ = min(1/d, t/(8m))` uniformly and the origin carries the rest.
#[derive(Clone, Debug)]
pub struct CirclesExperiment {
    target: SphereCirclesHypothesis,
    circles: Vec<SphereCircle>,
    zeta: f64,
    descriptor: Descriptor,
    context: AttackContext,
}

impl CirclesExperiment {
    pub fn with_parameters(qs: Vec<UnitVector>, labels: Vec<Label>, t: usize, m: usize) -> Result<Self> {
        let d = qs.len();
        if d < 1 || t < 1 || m < 1 {
            return Err(Error::InvalidParameter("circles construction needs d, t, m ≥ 1".into()));
        }
        let centers: Vec<Vec<f64>> = (1..=d).map(sphere_center).collect();
        let target = SphereCirclesHypothesis::new(centers.clone(), qs.clone(), labels.clone())?;
        let circles = qs.iter().cloned().map(SphereCircle::new).collect::<Result<Vec<_>>>()?;
        let zeta = (1.0 / d as f64).min(t as f64 / (8.0 * m as f64));
        Ok(CirclesExperiment {
            target,
            circles,
            zeta,
            descriptor: Descriptor {
                family: "circles".into(),
                dim: 3,
                margin: None,
                support: format!("{d} circles on spheres at 3i*e1 plus the origin"),
            },
            context: AttackContext::Circles { centers, qs, labels },
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn spheres(&self) -> usize {
        self.circles.len()
    }

    pub fn circles_target(&self) -> &SphereCirclesHypothesis {
        &self.target
    }

    /// Uniform point on circle `i` (zero-based), in ambient coordinates.
    pub fn sample_on_circle(&self, i: usize, rng: &mut RngStream) -> LabeledExample {
        let local = sample_circle(&self.circles[i], rng);
        let x = Point::new(add(local.coords(), &self.target.centers[i])).expect("finite");
        LabeledExample { x, y: self.target.labels[i] }
    }
}

/// Draws each `q_i` uniformly on its sphere and each circle label by a fair coin.
pub fn make_circles_experiment(d: usize, t: usize, m: usize, rng: &mut RngStream) -> Result<CirclesExperiment> {
    if d < 1 {
        return Err(Error::InvalidParameter("circles construction needs d ≥ 1".into()));
    }
    let mut qs = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(d);
    for _ in 0..d {
        qs.push(sample_sphere(3, rng)?);
        labels.push(rng.random::<bool>() as Label);
    }
    CirclesExperiment::with_parameters(qs, labels, t, m)
}

impl TargetedDistribution for CirclesExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        let u: f64 = rng.random();
        let k = (u / self.zeta) as usize;
        if k < self.circles.len() {
            self.sample_on_circle(k, rng)
        } else {
            LabeledExample { x: Point::new(vec![0.0; 3]).expect("finite"), y: 0 }
        }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}
