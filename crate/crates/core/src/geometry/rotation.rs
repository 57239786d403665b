use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::base::RngStream;
use crate::error::{Error, Result};

/// An orthogonal linear map of R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        Rotation { matrix: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "rotation applied to a vector of the wrong dimension");
        let v = DVector::from_column_slice(x);
        (&self.matrix * v).iter().copied().collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation { matrix: &self.matrix * &other.matrix }
    }

    pub fn transpose(&self) -> Rotation {
        Rotation { matrix: self.matrix.transpose() }
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` folded into `Q`.
pub fn random_rotation(n: usize, rng: &mut RngStream) -> Result<Rotation> {
    if n < 1 {
        return Err(Error::InvalidParameter("rotation dimension must be ≥ 1".into()));
    }
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(Rotation { matrix: q })
}
