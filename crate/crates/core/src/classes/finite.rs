use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attackers::AttackContext;
use crate::base::{Descriptor, Hypothesis, Label, LabeledExample, Point, RngStream, TargetedDistribution};
use crate::error::{Error, Result};

/// Largest domain a [`FiniteClass`] may have.
pub const MAX_DOMAIN: usize = 64;
/// Largest number of rows a [`FiniteClass`] may have.
pub const MAX_ROWS: usize = 10_000;
/// Domain limit for [`finite_vc_dimension`].
pub const VC_MAX_DOMAIN: usize = 24;
/// Domain limit for the star-number searches.
pub const STAR_MAX_DOMAIN: usize = 16;

#[derive(Serialize, Deserialize)]
struct FiniteClassJson {
    domain: Vec<String>,
    table: Vec<Vec<u8>>,
}

/// Finite hypothesis class over a finite domain, stored as bit rows.
///
/// Domain element `i` is represented as the one-dimensional point `[i]`;
/// bit `i` of a row is that hypothesis' label at element `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteClassJson", into = "FiniteClassJson")]
pub struct FiniteClass {
    domain: Vec<String>,
    rows: Vec<u64>,
}

impl TryFrom<FiniteClassJson> for FiniteClass {
    type Error = Error;
    fn try_from(j: FiniteClassJson) -> Result<Self> {
        let n = j.domain.len();
        let mut rows = Vec::with_capacity(j.table.len());
        for (k, r) in j.table.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidParameter(format!("row {k} has {} entries, expected {n}", r.len())));
            }
            let mut mask = 0u64;
            for (i, &v) in r.iter().enumerate() {
                match v {
                    0 => {}
                    1 => mask |= 1 << i,
                    other => return Err(Error::InvalidLabel(other)),
                }
            }
            rows.push(mask);
        }
        FiniteClass::new(j.domain, rows)
    }
}

impl From<FiniteClass> for FiniteClassJson {
    fn from(c: FiniteClass) -> Self {
        let n = c.domain.len();
        let table = c.rows.iter().map(|&r| (0..n).map(|i| ((r >> i) & 1) as u8).collect()).collect();
        FiniteClassJson { domain: c.domain, table }
    }
}

impl FiniteClass {
    pub fn new(domain: Vec<String>, rows: Vec<u64>) -> Result<Self> {
        let n = domain.len();
        if n == 0 || rows.is_empty() {
            return Err(Error::InvalidParameter("finite class needs a nonempty domain and table".into()));
        }
        if n > MAX_DOMAIN || rows.len() > MAX_ROWS {
            return Err(Error::PolicyExceeded(format!("finite class {n} points × {} rows", rows.len())));
        }
        let names: HashSet<&String> = domain.iter().collect();
        if names.len() != n {
            return Err(Error::InvalidParameter("domain names must be distinct".into()));
        }
        let full = full_mask(n);
        if rows.iter().any(|&r| r & !full != 0) {
            return Err(Error::InvalidParameter("row has bits outside the domain".into()));
        }
        let distinct: HashSet<u64> = rows.iter().copied().collect();
        if distinct.len() != rows.len() {
            return Err(Error::InvalidParameter("rows must be distinct".into()));
        }
        Ok(FiniteClass { domain, rows })
    }

    /// Domain named `x1..xn`.
    pub fn with_indexed_domain(n: usize, rows: Vec<u64>) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("x{i}")).collect(), rows)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: usize) -> u64 {
        self.rows[k]
    }

    pub fn label(&self, row: usize, point: usize) -> Label {
        ((self.rows[row] >> point) & 1) as Label
    }

    /// Point representing domain element `i`.
    pub fn point(&self, i: usize) -> Point {
        Point::scalar(i as f64).expect("finite")
    }

    /// Domain index represented by `x`, if `x` is a domain point.
    pub fn index_of(&self, x: &Point) -> Option<usize> {
        domain_index(x, self.domain.len())
    }

    pub fn hypothesis(&self, row: usize) -> TableHypothesis {
        TableHypothesis::new(self.rows[row], self.domain.len())
    }

    /// Rows consistent with every labeled domain point in `s`.
    pub fn consistent_rows<'a>(&'a self, s: &'a [(usize, Label)]) -> impl Iterator<Item = usize> + 'a {
        (0..self.rows.len()).filter(move |&k| s.iter().all(|&(i, y)| self.label(k, i) == y))
    }

    /// Whether the bitwise AND of any two rows is again a row.
    pub fn is_intersection_closed(&self) -> bool {
        let set: HashSet<u64> = self.rows.iter().copied().collect();
        self.rows.iter().all(|&a| self.rows.iter().all(|&b| set.contains(&(a & b))))
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Domain index of a one-dimensional integer point below `n`.
pub fn domain_index(x: &Point, n: usize) -> Option<usize> {
    let c = x.coords();
    if c.len() != 1 || c[0] < 0.0 || c[0].fract() != 0.0 || c[0] >= n as f64 {
        return None;
    }
    Some(c[0] as usize)
}

/// Arbitrary labeling of a finite domain; label 0 off the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableHypothesis {
    mask: u64,
    n: usize,
}

impl TableHypothesis {
    pub fn new(mask: u64, n: usize) -> Self {
        TableHypothesis { mask: mask & full_mask(n), n }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }
}

impl Hypothesis for TableHypothesis {
    fn predict(&self, x: &Point) -> Label {
        match domain_index(x, self.n) {
            Some(i) => ((self.mask >> i) & 1) as Label,
            None => 0,
        }
    }
}

/// Packs bits of `value` at the positions set in `subset` into the low bits.
fn gather(value: u64, subset: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    let mut s = subset;
    while s != 0 {
        let i = s.trailing_zeros();
        out |= ((value >> i) & 1) << k;
        k += 1;
        s &= s - 1;
    }
    out
}

fn shattered(class: &FiniteClass, subset: u64) -> bool {
    let size = subset.count_ones();
    let patterns: HashSet<u64> = class.rows.iter().map(|&r| r & subset).collect();
    patterns.len() as u64 == 1u64 << size
}

/// Size of the largest shattered subset of the domain.
pub fn finite_vc_dimension(class: &FiniteClass) -> Result<usize> {
    let n = class.domain_size();
    if n > VC_MAX_DOMAIN {
        return Err(Error::PolicyExceeded(format!("VC search limited to {VC_MAX_DOMAIN} points, got {n}")));
    }
    // Shattered sets are closed under subsets, so grow them one element at a time.
    let mut level: Vec<u64> = vec![0];
    let mut dim = 0;
    loop {
        let next: Vec<u64> = level
            .par_iter()
            .flat_map_iter(|&s| {
                let start = if s == 0 { 0 } else { 64 - s.leading_zeros() as usize };
                (start..n).map(move |e| s | (1 << e)).filter(|&t| shattered(class, t))
            })
            .collect();
        if next.is_empty() {
            return Ok(dim);
        }
        dim += 1;
        level = next;
    }
}

/// Largest `s` with points `x_1..x_s` and hypotheses `h_0..h_s` such that
/// `h_i` differs from `h_0` on `{x_1..x_s}` exactly at `x_i`.
pub fn finite_star_number(class: &FiniteClass) -> Result<usize> {
    let n = class.domain_size();
    if n > STAR_MAX_DOMAIN {
        return Err(Error::PolicyExceeded(format!("star search limited to {STAR_MAX_DOMAIN} points, got {n}")));
    }
    let best = class
        .rows
        .par_iter()
        .map(|&h0| {
            let diffs: Vec<u64> = class.rows.iter().map(|&h| h ^ h0).filter(|&d| d != 0).collect();
            let mut best = 0usize;
            for x in 1u64..(1u64 << n) {
                let size = x.count_ones() as usize;
                if size <= best {
                    continue;
                }
                let mut isolated = 0u64;
                for &d in &diffs {
                    let m = d & x;
                    if m != 0 && m & (m - 1) == 0 {
                        isolated |= m;
                    }
                }
                if isolated == x {
                    best = size;
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// A hollow star set: domain subset `points` (bitmask) with unrealizable labeling `labels`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HollowStar {
    pub points: u64,
    pub labels: u64,
}

/// Largest unrealizable labeled subset whose single-flip neighbors are all realizable.
pub fn finite_hollow_star_number(class: &FiniteClass) -> Result<Option<usize>> {
    Ok(find_hollow_star(class)?.map(|h| h.points.count_ones() as usize))
}

/// A largest hollow star set, if any exists.
pub fn find_hollow_star(class: &FiniteClass) -> Result<Option<HollowStar>> {
    let n = class.domain_size();
    if n > STAR_MAX_DOMAIN {
        return Err(Error::PolicyExceeded(format!("hollow star search limited to {STAR_MAX_DOMAIN} points, got {n}")));
    }
    let found = (1u64..(1u64 << n))
        .into_par_iter()
        .filter_map(|x| {
            let size = x.count_ones();
            let mut realizable = vec![false; 1usize << size];
            for &r in &class.rows {
                realizable[gather(r, x) as usize] = true;
            }
            (0..1u64 << size)
                .find(|&y| !realizable[y as usize] && (0..size).all(|j| realizable[(y ^ (1 << j)) as usize]))
                .map(|y| (size, x, y))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    Ok(found.map(|(_, points, compact)| {
        let mut labels = 0u64;
        let mut s = points;
        let mut k = 0;
        while s != 0 {
            let i = s.trailing_zeros();
            labels |= ((compact >> k) & 1) << i;
            k += 1;
            s &= s - 1;
        }
        HollowStar { points, labels }
    }))
}

/// `leq[x][x2]` iff every row disagreeing with row `f` at `x2` also disagrees at `x`.
pub fn partial_order_leq(class: &FiniteClass, f: usize) -> Vec<Vec<bool>> {
    let n = class.domain_size();
    let base = class.row(f);
    let diffs: Vec<u64> = class.rows.iter().map(|&h| h ^ base).collect();
    (0..n)
        .map(|x| (0..n).map(|x2| diffs.iter().all(|&d| (d >> x2) & 1 == 0 || (d >> x) & 1 == 1)).collect())
        .collect()
}

/// One-hot class on `k` points and its all-zeros hollow star labeling.
pub fn make_hollow_star_class(k: usize) -> Result<(FiniteClass, Vec<Label>)> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("hollow star construction needs k ≥ 3, got {k}")));
    }
    let rows = (0..k).map(|i| 1u64 << i).collect();
    Ok((FiniteClass::with_indexed_domain(k, rows)?, vec![0; k]))
}

/// Uniform distribution on a subset of a finite domain, labeled by one row.
#[derive(Clone, Debug)]
pub struct FiniteExperiment {
    class: Arc<FiniteClass>,
    target_row: usize,
    target: TableHypothesis,
    support: Vec<usize>,
    descriptor: Descriptor,
    context: AttackContext,
}

impl FiniteExperiment {
    pub fn new(class: Arc<FiniteClass>, target_row: usize, support: Vec<usize>, context: AttackContext) -> Result<Self> {
        if target_row >= class.row_count() {
            return Err(Error::InvalidParameter(format!("row {target_row} out of range")));
        }
        if support.is_empty() || support.iter().any(|&i| i >= class.domain_size()) {
            return Err(Error::InvalidParameter("support must be a nonempty set of domain indices".into()));
        }
        let target = class.hypothesis(target_row);
        let descriptor = Descriptor {
            family: "finite".into(),
            dim: 1,
            margin: None,
            support: format!("uniform on {} of {} domain points", support.len(), class.domain_size()),
        };
        Ok(FiniteExperiment { class, target_row, target, support, descriptor, context })
    }

    pub fn class(&self) -> &Arc<FiniteClass> {
        &self.class
    }

    pub fn target_row(&self) -> usize {
        self.target_row
    }
}

impl TargetedDistribution for FiniteExperiment {
    fn target(&self) -> &dyn Hypothesis {
        &self.target
    }

    fn sample(&self, rng: &mut RngStream) -> LabeledExample {
        let i = self.support[rng.random_range(0..self.support.len())];
        let x = self.class.point(i);
        let y = self.target.predict(&x);
        LabeledExample { x, y }
    }

    fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    fn context(&self) -> &AttackContext {
        &self.context
    }
}

/// Hollow star construction on `k` points with target row `i*` drawn
/// uniformly; data uniform on the domain without `x_{i*}`.
pub fn make_hollow_star_experiment(k: usize, rng: &mut RngStream) -> Result<FiniteExperiment> {
    let (class, star) = make_hollow_star_class(k)?;
    let i_star = rng.random_range(0..k);
    hollow_star_experiment_with_target(Arc::new(class), star, i_star)
}

/// Hollow star construction with a fixed target row.
pub fn hollow_star_experiment_with_target(class: Arc<FiniteClass>, star: Vec<Label>, i_star: usize) -> Result<FiniteExperiment> {
    let support = (0..class.domain_size()).filter(|&i| i != i_star).collect();
    let context = AttackContext::HollowStar { class: class.clone(), star, target_row: i_star };
    FiniteExperiment::new(class, i_star, support, context)
}
