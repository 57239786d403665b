//! Hard-margin linear SVM with offset, solved in the dual by SMO with
//! second-order working-set selection.

use crate::base::{Dataset, Hypothesis, Learner, RngStream};
use crate::classes::LinearHypothesis;
use crate::error::{Error, Result};
use crate::geometry::vector::{dot, norm};

/// Stopping tolerance on the maximal KKT violation.
pub const KKT_TOL: f64 = 1e-8;
/// Iteration budget of the solver.
pub const MAX_ITERATIONS: usize = 1_000_000;
const ALPHA_BLOWUP: f64 = 1e12;

/// Solver output with the quantities needed to audit it.
#[derive(Clone, Debug)]
pub struct SvmSolution {
    pub hypothesis: LinearHypothesis,
    /// Geometric margin of the returned separator on the input.
    pub margin: f64,
    /// Final maximal KKT violation.
    pub kkt_gap: f64,
    pub iterations: usize,
    pub support_vectors: usize,
}

/// Maximum-margin separator `1{⟨w,x⟩ + b ≥ 0}` of a strictly separable sample.
pub fn fit_svm(s: &Dataset) -> Result<LinearHypothesis> {
    solve_svm(s).map(|sol| sol.hypothesis)
}

/// [`fit_svm`] with solver diagnostics.
pub fn solve_svm(s: &Dataset) -> Result<SvmSolution> {
    let canon = s.canonical();
    let mut xs: Vec<&[f64]> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for e in canon.iter() {
        let x = e.x.coords();
        let y = if e.y == 1 { 1.0 } else { -1.0 };
        match xs.last() {
            Some(prev) if *prev == x && *ys.last().unwrap() == y => {}
            Some(prev) if *prev == x => return Err(Error::Unrealizable("a point carries both labels".into())),
            _ => {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    let n = xs.len();
    let has_pos = ys.iter().any(|&y| y > 0.0);
    let has_neg = ys.iter().any(|&y| y < 0.0);
    if !(has_pos && has_neg) {
        return Err(Error::InvalidParameter("SVM needs both labels".into()));
    }

    let k: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dot(xs[i], xs[j])).collect()).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let kkt_gap;
    loop {
        // Maximal violating pair with second-order choice of the partner.
        let mut i_best = None;
        let mut g_max = f64::NEG_INFINITY;
        for t in 0..n {
            let up = ys[t] > 0.0 || alpha[t] > 0.0;
            if up && -ys[t] * grad[t] > g_max {
                g_max = -ys[t] * grad[t];
                i_best = Some(t);
            }
        }
        let i = i_best.expect("positives are always in the up set");
        let mut g_min = f64::INFINITY;
        let mut j_best = None;
        let mut obj_best = f64::INFINITY;
        for t in 0..n {
            let low = ys[t] < 0.0 || alpha[t] > 0.0;
            if !low {
                continue;
            }
            let v = -ys[t] * grad[t];
            g_min = g_min.min(v);
            let b = g_max - v;
            if b > 0.0 {
                let a = (k[i][i] + k[t][t] - 2.0 * k[i][t]).max(1e-12);
                let obj = -b * b / a;
                if obj < obj_best {
                    obj_best = obj;
                    j_best = Some(t);
                }
            }
        }
        if g_max - g_min < KKT_TOL || j_best.is_none() {
            kkt_gap = (g_max - g_min).max(0.0);
            break;
        }
        let j = j_best.unwrap();
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NonConvergence(format!("SMO exceeded {MAX_ITERATIONS} iterations")));
        }
        let a = (k[i][i] + k[j][j] - 2.0 * k[i][j]).max(1e-12);
        let b = -ys[i] * grad[i] + ys[j] * grad[j];
        let mut lambda = b / a;
        if ys[i] < 0.0 {
            lambda = lambda.min(alpha[i]);
        }
        if ys[j] > 0.0 {
            lambda = lambda.min(alpha[j]);
        }
        alpha[i] += ys[i] * lambda;
        alpha[j] -= ys[j] * lambda;
        if alpha[i] < 0.0 {
            alpha[i] = 0.0;
        }
        if alpha[j] < 0.0 {
            alpha[j] = 0.0;
        }
        if alpha[i] > ALPHA_BLOWUP || alpha[j] > ALPHA_BLOWUP {
            return Err(Error::Unrealizable("sample is not linearly separable".into()));
        }
        for t in 0..n {
            grad[t] += ys[t] * lambda * (k[t][i] - k[t][j]);
        }
    }

    let dim = xs[0].len();
    let mut w = vec![0.0; dim];
    for t in 0..n {
        if alpha[t] > 0.0 {
            for (wc, xc) in w.iter_mut().zip(xs[t]) {
                *wc += alpha[t] * ys[t] * xc;
            }
        }
    }
    if norm(&w) == 0.0 {
        return Err(Error::Unrealizable("degenerate separator".into()));
    }
    let min_pos = (0..n).filter(|&t| ys[t] > 0.0).map(|t| dot(&w, xs[t])).fold(f64::INFINITY, f64::min);
    let max_neg = (0..n).filter(|&t| ys[t] < 0.0).map(|t| dot(&w, xs[t])).fold(f64::NEG_INFINITY, f64::max);
    if min_pos <= max_neg {
        return Err(Error::Unrealizable("sample is not strictly separable".into()));
    }
    let b = -(min_pos + max_neg) / 2.0;
    let margin = (min_pos - max_neg) / 2.0 / norm(&w);
    Ok(SvmSolution {
        hypothesis: LinearHypothesis::new(w, b)?,
        margin,
        kkt_gap,
        iterations,
        support_vectors: alpha.iter().filter(|&&a| a > 0.0).count(),
    })
}

/// Learner wrapper around [`fit_svm`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Svm;

impl Learner for Svm {
    fn name(&self) -> String {
        "fit_svm".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_svm(data)?))
    }
}
