use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::vector::{dot, norm, UnitVector};
use crate::base::RngStream;
use crate::error::{Error, Result};

/// Uniform point on the unit sphere in R^n, by normalizing a Gaussian vector.
pub fn sample_sphere(n: usize, rng: &mut RngStream) -> Result<UnitVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sphere dimension must be ≥ 2, got {n}")));
    }
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if norm(&g) > 1e-150 {
            return UnitVector::normalize(&g);
        }
    }
}

/// Uniform point on `{x : ‖x‖ = 1, ⟨x, axis⟩ ≥ 0}`.
///
/// Samples landing on the wrong side are mirrored through the hyperplane
/// orthogonal to `axis`, which preserves uniformity.
pub fn sample_half_sphere(n: usize, axis: &UnitVector, rng: &mut RngStream) -> Result<UnitVector> {
    if axis.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: axis.dim() });
    }
    let x = sample_sphere(n, rng)?;
    let c = dot(x.coords(), axis.coords());
    if c >= 0.0 {
        return Ok(x);
    }
    let flipped: Vec<f64> = x.coords().iter().zip(axis.coords()).map(|(xi, ai)| xi - 2.0 * c * ai).collect();
    UnitVector::normalize(&flipped)
}

/// The circle `{p : ‖p‖ = 1, ‖p − q‖ = 1}` on the unit sphere of R^3.
///
/// Centered at `q/2` with radius `√3/2`; `u1, u2` is a fixed orthonormal
/// basis of the plane orthogonal to `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereCircle {
    q: UnitVector,
    u1: [f64; 3],
    u2: [f64; 3],
}

impl SphereCircle {
    pub fn new(q: UnitVector) -> Result<Self> {
        if q.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: q.dim() });
        }
        let qc = q.coords();
        let mut axes = [0usize, 1, 2];
        axes.sort_by(|&a, &b| qc[a].abs().total_cmp(&qc[b].abs()).then(a.cmp(&b)));
        let (a, b) = (axes[0], axes[1]);
        let mut u1 = [0.0; 3];
        u1[a] = 1.0;
        for k in 0..3 {
            u1[k] -= qc[a] * qc[k];
        }
        normalize3(&mut u1);
        let mut u2 = [0.0; 3];
        u2[b] = 1.0;
        let pq = qc[b];
        let pu = u1[b];
        for k in 0..3 {
            u2[k] -= pq * qc[k] + pu * u1[k];
        }
        normalize3(&mut u2);
        Ok(SphereCircle { q, u1, u2 })
    }

    pub fn q(&self) -> &UnitVector {
        &self.q
    }

    pub fn center(&self) -> [f64; 3] {
        let q = self.q.coords();
        [q[0] / 2.0, q[1] / 2.0, q[2] / 2.0]
    }

    pub fn radius(&self) -> f64 {
        3f64.sqrt() / 2.0
    }

    /// Whether `p` lies on the circle, both defining distances within `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.len() == 3 && (norm(p) - 1.0).abs() <= tol && (dist3(p, self.q.coords()) - 1.0).abs() <= tol
    }
}

fn normalize3(v: &mut [f64; 3]) {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    for c in v.iter_mut() {
        *c /= n;
    }
}

fn dist3(a: &[f64], b: &[f64]) -> f64 {
    super::vector::dist(a, b)
}

/// Point of `c` at the given angle.
pub fn circle_point(c: &SphereCircle, angle: f64) -> UnitVector {
    let r = c.radius();
    let (s, co) = angle.sin_cos();
    let q = c.q.coords();
    let p: Vec<f64> = (0..3).map(|k| q[k] / 2.0 + r * (co * c.u1[k] + s * c.u2[k])).collect();
    UnitVector::normalize(&p).expect("circle points are nonzero")
}

/// Uniform point on `c`.
pub fn sample_circle(c: &SphereCircle, rng: &mut RngStream) -> UnitVector {
    let angle = rng.random_range(0.0..2.0 * PI);
    circle_point(c, angle)
}
