use std::sync::Arc;

use crate::base::{Dataset, Hypothesis, Label, Learner, RngStream};
use crate::classes::{partial_order_leq, FiniteClass, TableHypothesis};
use crate::error::{Error, Result};

use super::interval::fit_min_interval;

/// Labeled domain indices of a dataset over `class`'s domain.
pub fn domain_sample(class: &FiniteClass, s: &Dataset) -> Result<Vec<(usize, Label)>> {
    s.iter()
        .map(|e| {
            class
                .index_of(&e.x)
                .map(|i| (i, e.y))
                .ok_or_else(|| Error::InvalidParameter(format!("{:?} is not a domain point", e.x.coords())))
        })
        .collect()
}

/// The lowest-index row consistent with `s`.
pub fn fit_consistent_row(s: &Dataset, class: &FiniteClass) -> Result<usize> {
    let sample = domain_sample(class, s)?;
    let row = class.consistent_rows(&sample).next();
    row.ok_or_else(|| Error::Unrealizable("no row is consistent".into()))
}

/// Family over which the closure algorithm intersects the version space.
#[derive(Clone, Debug)]
pub enum ClosureFamily {
    Finite(Arc<FiniteClass>),
    /// All open and closed subintervals of [0, 1], plus the empty set.
    Intervals,
}

/// Predicts 1 exactly where every consistent hypothesis predicts 1.
pub fn fit_closure(s: &Dataset, family: &ClosureFamily) -> Result<Box<dyn Hypothesis>> {
    match family {
        ClosureFamily::Intervals => Ok(Box::new(fit_min_interval(s)?)),
        ClosureFamily::Finite(class) => {
            if !class.is_intersection_closed() {
                return Err(Error::InvalidParameter("closure needs an intersection-closed class".into()));
            }
            let sample = domain_sample(class, s)?;
            let mut rows = class.consistent_rows(&sample).peekable();
            if rows.peek().is_none() {
                return Err(Error::Unrealizable("empty version space".into()));
            }
            let mask = rows.fold(u64::MAX, |acc, k| acc & class.row(k));
            Ok(Box::new(TableHypothesis::new(mask, class.domain_size())))
        }
    }
}

/// Tree-order learner for VC-dimension-1 classes around reference row `f`.
///
/// Flips `f` on every point below the maximal disagreement point.
pub fn fit_vc1(s: &Dataset, class: &FiniteClass, f: usize) -> Result<TableHypothesis> {
    if f >= class.row_count() {
        return Err(Error::InvalidParameter(format!("reference row {f} out of range")));
    }
    let sample = domain_sample(class, s)?;
    let base = class.row(f);
    let n = class.domain_size();
    let mut disagreements: Vec<usize> = sample.iter().filter(|&&(i, y)| class.label(f, i) != y).map(|p| p.0).collect();
    if disagreements.is_empty() {
        return Ok(TableHypothesis::new(base, n));
    }
    disagreements.sort_unstable();
    disagreements.dedup();
    let leq = partial_order_leq(class, f);
    let maximal: Vec<usize> =
        disagreements.iter().copied().filter(|&c| disagreements.iter().all(|&o| leq[o][c])).collect();
    let Some(&top) = maximal.first() else {
        return Err(Error::Unrealizable("disagreement points are not totally ordered; class is not VC-1".into()));
    };
    let mut mask = base;
    for x in 0..n {
        if leq[x][top] {
            mask ^= 1 << x;
        }
    }
    Ok(TableHypothesis::new(mask, n))
}

/// Learner returning the lowest-index consistent row.
#[derive(Clone, Debug)]
pub struct ConsistentRow {
    pub class: Arc<FiniteClass>,
}

impl Learner for ConsistentRow {
    fn name(&self) -> String {
        "fit_consistent_row".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        let k = fit_consistent_row(data, &self.class)?;
        Ok(Box::new(self.class.hypothesis(k)))
    }
}

/// Learner wrapper around [`fit_closure`].
#[derive(Clone, Debug)]
pub struct Closure {
    pub family: ClosureFamily,
}

impl Learner for Closure {
    fn name(&self) -> String {
        "fit_closure".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        fit_closure(data, &self.family)
    }
}

/// Learner wrapper around [`fit_vc1`].
#[derive(Clone, Debug)]
pub struct TreeOrder {
    pub class: Arc<FiniteClass>,
    pub reference_row: usize,
}

impl Learner for TreeOrder {
    fn name(&self) -> String {
        "fit_vc1".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_vc1(data, &self.class, self.reference_row)?))
    }
}
