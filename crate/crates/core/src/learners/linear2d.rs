use std::f64::consts::TAU;

use crate::base::{Dataset, FitProbe, Hypothesis, Learner, LearnerDiagnostics, RngStream};
use crate::classes::LinearHypothesis;
use crate::error::{Error, Result};

use super::arcs::{arcs_from_split, split_planar};

/// Offsets searched by the binary-search learner.
pub const OFFSET_RANGE: f64 = 2.0;
/// Halving budget before the search reports numerical degeneracy.
pub const MAX_HALVINGS: usize = 128;

/// Record of one binary-search run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchTrace {
    /// Number of halvings performed.
    pub steps: u64,
    /// Halvings at which zero or two half-brackets held a consistent direction.
    pub violations: u64,
}

/// Midpoint of `{b ∈ [−2, 2] : 1{⟨u_β,x⟩ + b ≥ 0} labels every point correctly}`.
fn feasible_offset(beta: f64, pos: &[[f64; 2]], neg: &[[f64; 2]]) -> Option<f64> {
    let (c, s) = (beta.cos(), beta.sin());
    let proj = |p: &[f64; 2]| c * p[0] + s * p[1];
    let lo = pos.iter().map(proj).fold(f64::INFINITY, f64::min);
    let hi = neg.iter().map(proj).fold(f64::NEG_INFINITY, f64::max);
    let b_lo = if pos.is_empty() { -OFFSET_RANGE } else { (-lo).max(-OFFSET_RANGE) };
    let b_hi = if neg.is_empty() { OFFSET_RANGE } else { (-hi).min(OFFSET_RANGE) };
    let closed_top = neg.is_empty();
    let nonempty = if closed_top { b_lo <= b_hi } else { b_lo < b_hi };
    nonempty.then_some((b_lo + b_hi) / 2.0)
}

/// Binary search over directions on the unit disk, returning `(β, b)`.
pub fn fit_linear2d(s: &Dataset) -> Result<LinearHypothesis> {
    fit_linear2d_traced(s).map(|(h, _)| h)
}

/// [`fit_linear2d`] together with its bracket-uniqueness trace.
pub fn fit_linear2d_traced(s: &Dataset) -> Result<(LinearHypothesis, SearchTrace)> {
    let (pos, neg) = split_planar(s)?;
    if pos.iter().chain(&neg).any(|p| p[0] * p[0] + p[1] * p[1] > 1.0 + 1e-12) {
        return Err(Error::InvalidParameter("binary-search learner needs points in the unit disk".into()));
    }
    let mut trace = SearchTrace::default();
    if let Some(b) = feasible_offset(0.0, &pos, &neg) {
        return Ok((LinearHypothesis::from_angle(0.0, b), trace));
    }
    let arcs = arcs_from_split(&pos, &neg);
    if arcs.is_empty() {
        return Err(Error::Unrealizable("no consistent direction exists".into()));
    }
    let (mut l, mut h) = (0.0, TAU);
    for _ in 0..MAX_HALVINGS {
        let beta = (l + h) / 2.0;
        if let Some(b) = feasible_offset(beta, &pos, &neg) {
            return Ok((LinearHypothesis::from_angle(beta, b), trace));
        }
        let left = arcs.meets_open(l, beta);
        let right = arcs.meets_open(beta, h);
        trace.steps += 1;
        if left == right {
            trace.violations += 1;
        }
        if left {
            h = beta;
        } else {
            l = beta;
        }
    }
    Err(Error::NonConvergence(format!("binary search exceeded {MAX_HALVINGS} halvings")))
}

/// Learner wrapper around [`fit_linear2d`].
#[derive(Clone, Copy, Debug, Default)]
pub struct BinarySearch2d;

impl Learner for BinarySearch2d {
    fn name(&self) -> String {
        "fit_linear2d".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_linear2d(data)?))
    }

    fn fit_probed(
        &self,
        data: &Dataset,
        _probe: &FitProbe<'_>,
        diag: &mut LearnerDiagnostics,
        _rng: &mut RngStream,
    ) -> Result<Box<dyn Hypothesis>> {
        let (h, trace) = fit_linear2d_traced(data)?;
        diag.search_steps += trace.steps;
        diag.search_violations += trace.violations;
        Ok(Box::new(h))
    }
}
