use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::attackers::AttackContext;
use crate::base::{Descriptor, Hypothesis, Label, LabeledExample, Point, RngStream, TargetedDistribution};
use crate::error::{Error, Result};
use crate::geometry::vector::{basis, dot, norm};
use crate::geometry::{sample_circle, sample_half_sphere, sample_sphere, SphereCircle, UnitVector};

/// `1{⟨w, x⟩ + b ≥ 0}` with `w ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearHypothesis {
    w: Vec<f64>,
    b: f64,
}

impl LinearHypothesis {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.is_empty() || w.iter().any(|c| !c.is_finite()) || !b.is_finite() {
            return Err(Error::InvalidParameter("linear hypothesis needs finite w and b".into()));
        }
        if w.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidParameter("linear hypothesis needs w ≠ 0".into()));
        }
        Ok(LinearHypothesis { w, b })
    }

    /// Direction `(cos β, sin β)` with offset `b`.
    pub fn from_angle(beta: f64, b: f64) -> Self {
        LinearHypothesis { w: vec![beta.cos(), beta.sin()], b }
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// `⟨w, x⟩ + b`.
    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }

    /// Euclidean distance of `x` to the decision boundary, signed by side.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.score(x) / norm(&self.w)
    }
}

impl Hypothesis for LinearHypothesis {
    fn predict(&self, x: &Point) -> Label {
        assert_eq!(x.dim(), self.w.len(), "linear hypothesis evaluated off its dimension");
        (self.score(x.coords()) >= 0.0) as Label
    }
}

/// Margin of the half-sphere and margin lower-bound constructions.
pub const CONSTRUCTION_GAMMA: f64 = 0.125;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.125) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/8), got {epsilon}")));
    }
    Ok(())
}

/// Mass `1 − 8ε` at `−e1` (label 0) and `8ε` uniform on the half sphere
/// `⟨x, e1⟩ ≥ 0` (label 1); target `1{⟨e1, x⟩ ≥ −γ/2}` with `γ = 1/8`.
#[derive(Clone, Debug)]
pub struct HalfSphereExperiment {
    n: usize,
    epsilon: f64,
    axis: UnitVector,
    target: LinearHypothesis,
    descriptor: Descriptor,
    context: AttackContext,
}

pub fn make_halfsphere_experiment(n: usize, epsilon: f64) -> Result<HalfSphereExperiment> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("half-sphere construction needs n ≥ 3, got {n}")));
    }
    check_epsilon(epsilon)?;
    let gamma = CONSTRUCTION_GAMMA;
    let target = LinearHypothesis::new(basis(n, 0), gamma / 2.0)?;
    Ok(HalfSphereExperiment {
        n,
        epsilon,
        axis: UnitVector::basis(n, 0),
        target,
        descriptor: Descriptor {
            family: "halfsphere".into(),
            dim: n,
            margin: Some(gamma),
            support: "point -e1 plus half sphere <x,e1> >= 0".into(),
        },
        context: AttackContext::HalfSphere { gamma },
    })
}

impl HalfSphereExperiment {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        CONSTRUCTION_GAMMA
    }

    pub fn linear_target(&self) -> &LinearHypothesis {
        &self.target
    }

    /// A point of the sphere component, labeled 1.
    pub fn sample_sphere_part(&self, rng: &mut RngStream) -> LabeledExample {
        let x = sample_half_sphere(self.n, &self.axis, rng).expect("n ≥ 3").to_point();
        LabeledExample { x, y: 1 }
    }
}

impl TargetedDistribution for HalfSphereExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        if rng.random::<f64>() < 8.0 * self.epsilon {
            self.sample_sphere_part(rng)
        } else {
            let x = Point::new(self.axis.neg().coords().to_vec()).expect("finite");
            LabeledExample { x, y: 0 }
        }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}

/// Margin lower-bound construction in R^n with points `(x, z)`, `x ∈ R^{n−1}`.
///
/// Mass `1 − 8ε` at `e_n` (label 1) and `8ε` uniform on
/// `{γw* + q : ‖q‖ = 1, ⟨q, w*⟩ ≥ 0} × {0}` (label 1 iff `sign = +1`).
/// Target `1{⟨(sign·w*, 1), (x, z)⟩ ≥ sign·γ/2}`.
#[derive(Clone, Debug)]
pub struct MarginLbExperiment {
    n: usize,
    epsilon: f64,
    w_star: UnitVector,
    sign: i8,
    target: LinearHypothesis,
    descriptor: Descriptor,
    context: AttackContext,
}

impl MarginLbExperiment {
    pub fn with_parameters(n: usize, epsilon: f64, w_star: UnitVector, sign: i8) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("margin construction needs n ≥ 3, got {n}")));
        }
        check_epsilon(epsilon)?;
        if w_star.dim() != n - 1 {
            return Err(Error::DimensionMismatch { expected: n - 1, found: w_star.dim() });
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
        }
        let gamma = CONSTRUCTION_GAMMA;
        let j = sign as f64;
        let mut w: Vec<f64> = w_star.coords().iter().map(|c| j * c).collect();
        w.push(1.0);
        let target = LinearHypothesis::new(w, -j * gamma / 2.0)?;
        let context = AttackContext::MarginLb { w_star: w_star.clone(), sign, gamma, epsilon };
        Ok(MarginLbExperiment {
            n,
            epsilon,
            w_star,
            sign,
            target,
            descriptor: Descriptor {
                family: "margin_lb".into(),
                dim: n,
                margin: Some(gamma),
                support: "point e_n plus shifted half sphere in the first n-1 coordinates".into(),
            },
            context,
        })
    }

    pub fn w_star(&self) -> &UnitVector {
        &self.w_star
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn linear_target(&self) -> &LinearHypothesis {
        &self.target
    }

    /// Embeds `x ∈ R^{n−1}` as `(x, 0)`.
    pub fn embed(&self, x: &[f64]) -> Point {
        let mut v = x.to_vec();
        v.push(0.0);
        Point::new(v).expect("finite")
    }

    pub fn apex(&self) -> Point {
        Point::new(basis(self.n, self.n - 1)).expect("finite")
    }

    /// A point of the shifted half sphere, with its label.
    pub fn sample_sphere_part(&self, rng: &mut RngStream) -> LabeledExample {
        let q = sample_half_sphere(self.n - 1, &self.w_star, rng).expect("n ≥ 3");
        let x: Vec<f64> =
            q.coords().iter().zip(self.w_star.coords()).map(|(qi, wi)| CONSTRUCTION_GAMMA * wi + qi).collect();
        let y = (self.sign == 1) as Label;
        LabeledExample { x: self.embed(&x), y }
    }
}

/// Draws `w*` uniformly on the (n−1)-sphere and `sign` uniformly in {±1}.
pub fn make_margin_lb_experiment(n: usize, epsilon: f64, rng: &mut RngStream) -> Result<MarginLbExperiment> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("margin construction needs n ≥ 3, got {n}")));
    }
    let w_star = sample_sphere(n - 1, rng)?;
    let sign = if rng.random::<bool>() { 1 } else { -1 };
    MarginLbExperiment::with_parameters(n, epsilon, w_star, sign)
}

impl TargetedDistribution for MarginLbExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        if rng.random::<f64>() < 8.0 * self.epsilon {
            self.sample_sphere_part(rng)
        } else {
            LabeledExample { x: self.apex(), y: 1 }
        }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}

/// Uniform distribution on the circle `C_w` of the unit sphere in R^3.
///
/// With `positive` the target is `1{⟨w,x⟩ − 1/2 ≥ 0}`; otherwise
/// `1{⟨w,x⟩ − (1−η)/2 ≤ 0}`. Either way the circle gets one label.
#[derive(Clone, Debug)]
pub struct TangentCircleExperiment {
    circle: SphereCircle,
    positive: bool,
    eta: f64,
    target: LinearHypothesis,
    descriptor: Descriptor,
    context: AttackContext,
}

impl TangentCircleExperiment {
    pub fn with_parameters(w: UnitVector, positive: bool, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0 / 6.0) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1/6), got {eta}")));
        }
        let target = tangent_circle_target(&w, positive, eta)?;
        let circle = SphereCircle::new(w.clone())?;
        Ok(TangentCircleExperiment {
            circle,
            positive,
            eta,
            target,
            descriptor: Descriptor {
                family: "tangent_circle".into(),
                dim: 3,
                margin: None,
                support: "circle {||x||=1, ||x-w||=1} in R^3".into(),
            },
            context: AttackContext::TangentCircle { w, positive, eta },
        })
    }

    pub fn w(&self) -> &UnitVector {
        self.circle.q()
    }

    pub fn positive(&self) -> bool {
        self.positive
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn circle(&self) -> &SphereCircle {
        &self.circle
    }

    pub fn linear_target(&self) -> &LinearHypothesis {
        &self.target
    }
}

/// Target of the tangent-circle construction for direction `w` and label `positive`.
pub fn tangent_circle_target(w: &UnitVector, positive: bool, eta: f64) -> Result<LinearHypothesis> {
    if positive {
        LinearHypothesis::new(w.coords().to_vec(), -0.5)
    } else {
        LinearHypothesis::new(w.neg().coords().to_vec(), (1.0 - eta) / 2.0)
    }
}

/// Draws `w` uniformly on the unit sphere of R^3 and the circle label by a fair coin.
pub fn make_tangent_circle_experiment(eta: f64, rng: &mut RngStream) -> Result<TangentCircleExperiment> {
    let w = sample_sphere(3, rng)?;
    let positive = rng.random::<bool>();
    TangentCircleExperiment::with_parameters(w, positive, eta)
}

impl TargetedDistribution for TangentCircleExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        let x = sample_circle(&self.circle, rng).to_point();
        LabeledExample { x, y: self.positive as Label }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}

/// Uniform distribution on the unit ball of R^n restricted to points at
/// distance ≥ γ/2 from the boundary of a random unit-normal halfspace.
#[derive(Clone, Debug)]
pub struct LinearMarginExperiment {
    n: usize,
    gamma: f64,
    target: LinearHypothesis,
    descriptor: Descriptor,
    context: AttackContext,
}

impl LinearMarginExperiment {
    /// `w` must be unit norm and `|b| ≤ 1 − γ/2` so both sides carry mass.
    pub fn with_target(w: UnitVector, b: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(Error::InvalidParameter(format!("gamma must lie in (0, 2], got {gamma}")));
        }
        if b.abs() > 1.0 - gamma / 2.0 {
            return Err(Error::InvalidParameter(format!("offset {b} leaves one side of the margin empty")));
        }
        let n = w.dim();
        let target = LinearHypothesis::new(w.coords().to_vec(), b)?;
        Ok(LinearMarginExperiment {
            n,
            gamma,
            context: AttackContext::Linear { target: target.clone() },
            target,
            descriptor: Descriptor {
                family: "linear_margin".into(),
                dim: n,
                margin: Some(gamma),
                support: "unit ball minus the gamma/2 slab around the target boundary".into(),
            },
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn linear_target(&self) -> &LinearHypothesis {
        &self.target
    }
}

/// Draws a uniform unit normal and an offset uniform in `[−1/2, 1/2]`.
pub fn make_linear_margin_experiment(n: usize, gamma: f64, rng: &mut RngStream) -> Result<LinearMarginExperiment> {
    if gamma >= 1.0 {
        return Err(Error::InvalidParameter(format!("gamma must be < 1 for this sampler, got {gamma}")));
    }
    let w = sample_sphere(n, rng)?;
    let b = rng.random_range(-0.5..=0.5);
    LinearMarginExperiment::with_target(w, b, gamma)
}

impl TargetedDistribution for LinearMarginExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        loop {
            let g: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
            let gn = norm(&g);
            if gn == 0.0 {
                continue;
            }
            let r = rng.random::<f64>().powf(1.0 / self.n as f64);
            let x: Vec<f64> = g.iter().map(|c| c / gn * r).collect();
            if self.target.score(&x).abs() >= self.gamma / 2.0 {
                let y = (self.target.score(&x) >= 0.0) as Label;
                return LabeledExample { x: Point::new(x).expect("finite"), y };
            }
        }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}
