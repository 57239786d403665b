use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary label, always 0 or 1.
pub type Label = u8;

/// The opposite binary label.
pub fn flip(y: Label) -> Label {
    1 - y
}

/// A finite point in R^n, n ≥ 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("zero-dimensional point".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Lexicographic total order on coordinates.
    pub fn total_cmp(&self, other: &Point) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.0.len().cmp(&other.0.len()))
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

/// A point together with its binary label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: Point,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Point, y: Label) -> Result<Self> {
        if y > 1 {
            return Err(Error::InvalidLabel(y));
        }
        Ok(LabeledExample { x, y })
    }

    /// Order by coordinates, then label.
    pub fn total_cmp(&self, other: &LabeledExample) -> Ordering {
        self.x.total_cmp(&other.x).then(self.y.cmp(&other.y))
    }
}
