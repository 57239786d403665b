use super::AttackContext;
use crate::base::{Attacker, Budget, Dataset, Hypothesis, LabeledExample, Point, RngStream};
use crate::error::{Error, Result};
use crate::learners::sorted_with_sentinels;

/// Cap on the number of points a single flood may emit.
pub const MAX_FLOOD_POINTS: usize = 10_000_000;

/// Shrink factor keeping every flooded sub-gap strictly shorter than the target gap.
const STRICT_SHRINK: f64 = 1.0 - 1e-6;

/// Parts a gap of length `gap` is cut into so each part is strictly
/// shorter than `target_gap`; 1 when it already is.
pub fn subdivision_count(gap: f64, target_gap: f64) -> usize {
    if gap < target_gap * STRICT_SHRINK {
        1
    } else {
        (gap / (target_gap * STRICT_SHRINK)).ceil().max(2.0) as usize
    }
}

/// Makes the gap around `x0` the unique longest gap by subdividing every
/// other gap with equally spaced target-labeled points.
#[derive(Clone, Copy, Debug)]
pub struct IntervalFlood {
    /// Multiplier on the minimal subdivision count of each flooded gap.
    pub resolution: usize,
}

pub fn interval_flood_attacker(resolution: usize) -> Result<IntervalFlood> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be ≥ 1".into()));
    }
    Ok(IntervalFlood { resolution })
}

impl Attacker for IntervalFlood {
    fn name(&self) -> String {
        if self.resolution == 1 {
            "interval_flood".into()
        } else {
            format!("interval_flood(resolution={})", self.resolution)
        }
    }

    fn budget(&self) -> Budget {
        Budget::Unbounded
    }

    fn poison(
        &self,
        target: &dyn Hypothesis,
        _ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        if x0.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: x0.dim() });
        }
        let z = x0.coords()[0];
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidParameter(format!("test point {z} outside [0,1]")));
        }
        let bounds = sorted_with_sentinels(train.iter().map(|e| e.x.coords()[0]));
        let Some(k) = bounds.windows(2).position(|w| w[0] < z && z < w[1]) else {
            return Ok(Dataset::new());
        };
        let target_gap = bounds[k + 1] - bounds[k];
        let mut items = Vec::new();
        for (j, w) in bounds.windows(2).enumerate() {
            if j == k {
                continue;
            }
            let minimal = subdivision_count(w[1] - w[0], target_gap);
            if minimal == 1 {
                continue;
            }
            let parts = minimal * self.resolution;
            if items.len() + parts > MAX_FLOOD_POINTS {
                return Err(Error::PolicyExceeded(format!("flood would exceed {MAX_FLOOD_POINTS} points")));
            }
            let step = (w[1] - w[0]) / parts as f64;
            for s in 1..parts {
                let x = Point::scalar(w[0] + step * s as f64)?;
                let y = target.predict(&x);
                items.push(LabeledExample { x, y });
            }
        }
        Dataset::from_items(items)
    }
}
