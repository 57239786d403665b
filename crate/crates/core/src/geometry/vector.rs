//! Dense vector arithmetic on slices.

use serde::{Deserialize, Serialize};

use crate::base::Point;
use crate::error::{Error, Result};

/// Norm tolerance accepted when constructing a [`UnitVector`].
pub const UNIT_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`.
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Standard basis vector `e_{k}` (zero-based `k`) in R^n.
pub fn basis(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// A point of Euclidean norm 1 (within [`UNIT_TOL`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords.clone())?;
        let n = norm(&coords);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(UnitVector(coords))
    }

    /// Scales a nonzero finite vector to unit norm.
    pub fn normalize(coords: &[f64]) -> Result<Self> {
        let n = norm(coords);
        if !n.is_finite() || n <= f64::MIN_POSITIVE {
            return Err(Error::Degenerate(format!("cannot normalize vector of norm {n}")));
        }
        Ok(UnitVector(coords.iter().map(|c| c / n).collect()))
    }

    pub fn basis(n: usize, k: usize) -> Self {
        UnitVector(basis(n, k))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn to_point(&self) -> Point {
        Point::new(self.0.clone()).expect("unit vectors are finite")
    }

    pub fn from_point(p: &Point) -> Result<Self> {
        UnitVector::new(p.coords().to_vec())
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitVector::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Vec<f64> {
        u.0
    }
}
