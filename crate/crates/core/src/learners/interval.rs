use crate::base::{Dataset, Hypothesis, Learner, RngStream};
use crate::classes::{IntervalHypothesis, UnionOfIntervalsHypothesis};
use crate::error::{Error, Result};

/// Coordinates of a one-dimensional dataset inside [0, 1], with labels.
fn unit_line(s: &Dataset) -> Result<Vec<(f64, u8)>> {
    if let Some(d) = s.dim() {
        if d != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: d });
        }
    }
    s.iter()
        .map(|e| {
            let x = e.x.coords()[0];
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(format!("interval learners need points in [0,1], got {x}")));
            }
            Ok((x, e.y))
        })
        .collect()
}

fn positive_hull(pts: &[(f64, u8)]) -> Option<(f64, f64)> {
    pts.iter().filter(|p| p.1 == 1).fold(None, |acc, &(x, _)| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

/// Smallest closed interval containing every positive; empty without positives.
pub fn fit_min_interval(s: &Dataset) -> Result<IntervalHypothesis> {
    let pts = unit_line(s)?;
    let Some((lo, hi)) = positive_hull(&pts) else {
        return Ok(IntervalHypothesis::empty());
    };
    if pts.iter().any(|&(x, y)| y == 0 && lo <= x && x <= hi) {
        return Err(Error::Unrealizable("a negative lies between the positives".into()));
    }
    IntervalHypothesis::closed(lo, hi)
}

/// Longest open interval containing every positive and no negative; the
/// leftmost one among equally long candidates.
pub fn fit_max_interval(s: &Dataset) -> Result<IntervalHypothesis> {
    let pts = unit_line(s)?;
    match positive_hull(&pts) {
        Some((lo, hi)) => {
            if pts.iter().any(|&(x, y)| y == 0 && lo <= x && x <= hi) {
                return Err(Error::Unrealizable("a negative lies between the positives".into()));
            }
            let left = pts.iter().filter(|p| p.1 == 0 && p.0 < lo).map(|p| p.0).fold(0.0, f64::max);
            let right = pts.iter().filter(|p| p.1 == 0 && p.0 > hi).map(|p| p.0).fold(1.0, f64::min);
            if !(left < lo && hi < right) {
                return Err(Error::Unrealizable("positives touch the domain boundary".into()));
            }
            IntervalHypothesis::open(left, right)
        }
        None => {
            let (a, b) = longest_gap(pts.iter().map(|p| p.0));
            IntervalHypothesis::open(a, b)
        }
    }
}

/// Longest gap between consecutive values of `xs ∪ {0, 1}`; leftmost on ties.
pub fn longest_gap(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let bounds = sorted_with_sentinels(xs);
    let mut best = (bounds[0], bounds[1]);
    for w in bounds.windows(2) {
        if w[1] - w[0] > best.1 - best.0 {
            best = (w[0], w[1]);
        }
    }
    best
}

/// Sorted distinct values of `xs` with 0 and 1 added.
pub fn sorted_with_sentinels(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = std::iter::once(0.0).chain(xs).chain(std::iter::once(1.0)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Union of closed intervals, one per maximal run of positives in sorted order.
pub fn fit_union_intervals(s: &Dataset, k: usize) -> Result<UnionOfIntervalsHypothesis> {
    let mut pts = unit_line(s)?;
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for w in pts.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
            return Err(Error::Unrealizable(format!("point {} carries both labels", w[0].0)));
        }
    }
    let mut runs: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for &(x, y) in &pts {
        match (y, open.as_mut()) {
            (1, Some(run)) => run.1 = x,
            (1, None) => open = Some((x, x)),
            (_, _) => runs.extend(open.take()),
        }
    }
    runs.extend(open);
    if runs.len() > k {
        return Err(Error::Unrealizable(format!("needs {} intervals, at most {k} allowed", runs.len())));
    }
    let intervals = runs.into_iter().map(|(a, b)| IntervalHypothesis::closed(a, b)).collect::<Result<Vec<_>>>()?;
    UnionOfIntervalsHypothesis::new(intervals)
}

/// Learner wrapper around [`fit_min_interval`].
#[derive(Clone, Copy, Debug, Default)]
pub struct MinInterval;

impl Learner for MinInterval {
    fn name(&self) -> String {
        "fit_min_interval".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_min_interval(data)?))
    }
}

/// Learner wrapper around [`fit_max_interval`].
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxInterval;

impl Learner for MaxInterval {
    fn name(&self) -> String {
        "fit_max_interval".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_max_interval(data)?))
    }
}

/// Learner wrapper around [`fit_union_intervals`].
#[derive(Clone, Copy, Debug)]
pub struct UnionIntervals {
    pub k: usize,
}

impl Learner for UnionIntervals {
    fn name(&self) -> String {
        format!("fit_union_intervals(k={})", self.k)
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_union_intervals(data, self.k)?))
    }
}
