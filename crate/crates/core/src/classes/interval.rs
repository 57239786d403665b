use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attackers::AttackContext;
use crate::base::{Descriptor, Hypothesis, Label, LabeledExample, Point, RngStream, TargetedDistribution};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Open,
    Closed,
    Empty,
}

/// Indicator of an open or closed subinterval of [0, 1], or of nothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalHypothesis {
    pub kind: IntervalKind,
    pub a: f64,
    pub b: f64,
}

impl IntervalHypothesis {
    pub fn new(kind: IntervalKind, a: f64, b: f64) -> Result<Self> {
        if kind == IntervalKind::Empty {
            return Ok(Self::empty());
        }
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::InvalidParameter(format!("interval endpoints ({a}, {b}) are not ordered")));
        }
        if a < 0.0 || b > 1.0 {
            return Err(Error::InvalidParameter(format!("interval ({a}, {b}) leaves [0, 1]")));
        }
        Ok(IntervalHypothesis { kind, a, b })
    }

    pub fn open(a: f64, b: f64) -> Result<Self> {
        Self::new(IntervalKind::Open, a, b)
    }

    pub fn closed(a: f64, b: f64) -> Result<Self> {
        Self::new(IntervalKind::Closed, a, b)
    }

    pub fn empty() -> Self {
        IntervalHypothesis { kind: IntervalKind::Empty, a: 0.0, b: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.kind == IntervalKind::Empty
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.kind {
            IntervalKind::Open => self.a < x && x < self.b,
            IntervalKind::Closed => self.a <= x && x <= self.b,
            IntervalKind::Empty => false,
        }
    }

    /// Lebesgue measure of the positive set.
    pub fn length(&self) -> f64 {
        match self.kind {
            IntervalKind::Empty => 0.0,
            _ => self.b - self.a,
        }
    }
}

impl Hypothesis for IntervalHypothesis {
    fn predict(&self, x: &Point) -> Label {
        self.contains(x.coords()[0]) as Label
    }
}

/// Indicator of a union of pairwise disjoint intervals, sorted left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionOfIntervalsHypothesis {
    intervals: Vec<IntervalHypothesis>,
}

impl UnionOfIntervalsHypothesis {
    pub fn new(mut intervals: Vec<IntervalHypothesis>) -> Result<Self> {
        intervals.retain(|iv| !iv.is_empty());
        intervals.sort_by(|p, q| p.a.total_cmp(&q.a));
        for w in intervals.windows(2) {
            let (l, r) = (&w[0], &w[1]);
            let touching = l.b == r.a && l.kind == IntervalKind::Closed && r.kind == IntervalKind::Closed;
            if l.b > r.a || touching {
                return Err(Error::InvalidParameter("intervals of a union must be disjoint".into()));
            }
        }
        Ok(UnionOfIntervalsHypothesis { intervals })
    }

    pub fn empty() -> Self {
        UnionOfIntervalsHypothesis { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[IntervalHypothesis] {
        &self.intervals
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }
}

impl Hypothesis for UnionOfIntervalsHypothesis {
    fn predict(&self, x: &Point) -> Label {
        let v = x.coords()[0];
        self.intervals.iter().any(|iv| iv.contains(v)) as Label
    }
}

/// One uniform piece of a piecewise-uniform density on [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

/// Piecewise-uniform density on [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub pieces: Vec<DensityPiece>,
}

impl DensitySpec {
    pub fn uniform() -> Self {
        DensitySpec { pieces: vec![DensityPiece { lo: 0.0, hi: 1.0, mass: 1.0 }] }
    }

    fn validate(&self) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(Error::InvalidParameter("density has no pieces".into()));
        }
        for p in &self.pieces {
            if !(0.0 <= p.lo && p.lo < p.hi && p.hi <= 1.0 && p.mass >= 0.0) {
                return Err(Error::InvalidParameter(format!("bad density piece {p:?}")));
            }
        }
        let total: f64 = self.pieces.iter().map(|p| p.mass).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("density mass sums to {total}, not 1")));
        }
        Ok(())
    }
}

/// Positive region of an interval-family target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntervalTarget {
    Single(IntervalHypothesis),
    Union(UnionOfIntervalsHypothesis),
}

impl Hypothesis for IntervalTarget {
    fn predict(&self, x: &Point) -> Label {
        match self {
            IntervalTarget::Single(h) => h.predict(x),
            IntervalTarget::Union(h) => h.predict(x),
        }
    }
}

/// Piecewise-uniform points on [0, 1] labeled by an interval-family target.
#[derive(Clone, Debug)]
pub struct IntervalExperiment {
    target: IntervalTarget,
    density: DensitySpec,
    cumulative: Vec<f64>,
    descriptor: Descriptor,
    context: AttackContext,
}

impl IntervalExperiment {
    pub fn new(target: IntervalTarget, density: DensitySpec) -> Result<Self> {
        density.validate()?;
        let mut acc = 0.0;
        let cumulative = density
            .pieces
            .iter()
            .map(|p| {
                acc += p.mass;
                acc
            })
            .collect();
        let descriptor = Descriptor {
            family: "interval".into(),
            dim: 1,
            margin: None,
            support: format!("piecewise uniform on [0,1], {} pieces", density.pieces.len()),
        };
        Ok(IntervalExperiment { target, density, cumulative, descriptor, context: AttackContext::None })
    }

    pub fn interval_target(&self) -> &IntervalTarget {
        &self.target
    }
}

impl TargetedDistribution for IntervalExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        let total = *self.cumulative.last().expect("validated nonempty");
        let u: f64 = rng.random_range(0.0..total);
        let k = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.cumulative.len() - 1);
        let p = self.density.pieces[k];
        let x = Point::scalar(rng.random_range(p.lo..p.hi)).expect("finite");
        let y = self.target.predict(&x);
        LabeledExample { x, y }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}

/// `density` on [0, 1] labeled by the single interval `h_star`.
pub fn make_interval_experiment(h_star: IntervalHypothesis, density: DensitySpec) -> Result<IntervalExperiment> {
    IntervalExperiment::new(IntervalTarget::Single(h_star), density)
}
