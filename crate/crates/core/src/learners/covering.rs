use std::collections::HashMap;

use rand::RngCore;

use crate::base::{Dataset, Hypothesis, Label, LabeledExample, Learner, Point, RngStream};
use crate::error::{Error, Result};
use crate::geometry::vector::dist;

/// Largest lattice the covering learner accepts.
pub const MAX_CELLS: f64 = 1e7;

/// Axis-aligned lattice of cubes with side `γ/√n`, so every cube has
/// circumradius `γ/2`; only cubes meeting the unit ball are cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub n: usize,
    pub gamma: f64,
    pub spacing: f64,
}

impl Lattice {
    pub fn new(gamma: f64, n: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(Error::InvalidParameter(format!("gamma must lie in (0, 2], got {gamma}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be ≥ 1".into()));
        }
        let spacing = gamma / (n as f64).sqrt();
        let per_axis = 2.0 * (1.0 / spacing).ceil();
        if per_axis.powi(n as i32) > MAX_CELLS {
            return Err(Error::PolicyExceeded(format!("lattice would exceed {MAX_CELLS} cells")));
        }
        Ok(Lattice { n, gamma, spacing })
    }

    pub fn cell_of(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|c| (c / self.spacing).floor() as i64).collect()
    }

    /// Number of cells meeting the closed unit ball.
    pub fn size(&self) -> usize {
        let k = (1.0 / self.spacing).ceil() as i64;
        let mut idx = vec![-k; self.n];
        let mut count = 0usize;
        loop {
            let nearest2: f64 = idx
                .iter()
                .map(|&i| {
                    let (a, b) = (i as f64 * self.spacing, (i + 1) as f64 * self.spacing);
                    let c = if a > 0.0 {
                        a
                    } else if b < 0.0 {
                        b
                    } else {
                        0.0
                    };
                    c * c
                })
                .sum();
            if nearest2 <= 1.0 {
                count += 1;
            }
            let mut d = 0;
            loop {
                if d == self.n {
                    return count;
                }
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = -k;
                d += 1;
            }
        }
    }
}

/// Sample size `|V| ln(|V|/δ) / ε`, rounded up.
pub fn covering_sample_size(lattice: &Lattice, epsilon: f64, delta: f64) -> usize {
    let v = lattice.size() as f64;
    (v * (v / delta).ln() / epsilon).ceil() as usize
}

/// Prediction rule of the covering learner.
#[derive(Clone, Debug)]
pub struct CoveringHypothesis {
    lattice: Lattice,
    cells: HashMap<Vec<i64>, Vec<LabeledExample>>,
    coin_key: u64,
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl CoveringHypothesis {
    /// Fair coin determined by the point and the fit's key.
    fn coin(&self, x: &[f64]) -> Label {
        let h = x.iter().fold(mix64(self.coin_key), |acc, c| mix64(acc ^ c.to_bits()));
        (h >> 63) as Label
    }
}

impl Hypothesis for CoveringHypothesis {
    fn predict(&self, x: &Point) -> Label {
        let xc = x.coords();
        match self.cells.get(&self.lattice.cell_of(xc)) {
            Some(members) => {
                let mut best = &members[0];
                let mut best_d = dist(xc, best.x.coords());
                for m in &members[1..] {
                    let d = dist(xc, m.x.coords());
                    if d < best_d {
                        best = m;
                        best_d = d;
                    }
                }
                best.y
            }
            None => self.coin(xc),
        }
    }
}

/// Nearest training point within the query's lattice cell; a fair coin in empty cells.
pub fn fit_covering(s: &Dataset, gamma: f64, n: usize, rng: &mut RngStream) -> Result<CoveringHypothesis> {
    let lattice = Lattice::new(gamma, n)?;
    if let Some(d) = s.dim() {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    let mut cells: HashMap<Vec<i64>, Vec<LabeledExample>> = HashMap::new();
    for e in s.canonical().into_items() {
        cells.entry(lattice.cell_of(e.x.coords())).or_default().push(e);
    }
    Ok(CoveringHypothesis { lattice, cells, coin_key: rng.next_u64() })
}

/// Learner wrapper around [`fit_covering`].
#[derive(Clone, Copy, Debug)]
pub struct Covering {
    pub gamma: f64,
    pub n: usize,
}

impl Learner for Covering {
    fn name(&self) -> String {
        format!("fit_covering(gamma={})", self.gamma)
    }

    fn fit(&self, data: &Dataset, rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_covering(data, self.gamma, self.n, rng)?))
    }

    fn is_randomized(&self) -> bool {
        true
    }
}
