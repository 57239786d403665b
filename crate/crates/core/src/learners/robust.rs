//! Aggregation protocols that tolerate a bounded number of poison items.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::base::{Dataset, FitProbe, Hypothesis, Label, Learner, LearnerDiagnostics, Point, RngStream};
use crate::classes::{FiniteClass, TableHypothesis};
use crate::error::{Error, Result};

/// `1{Σ h(x) ≥ ⌈|H|/2⌉}` over a list of voters.
#[derive(Debug)]
pub struct MajorityVote {
    voters: Vec<Box<dyn Hypothesis>>,
}

impl MajorityVote {
    pub fn new(voters: Vec<Box<dyn Hypothesis>>) -> Self {
        MajorityVote { voters }
    }

    pub fn voters(&self) -> &[Box<dyn Hypothesis>] {
        &self.voters
    }
}

/// Majority with ties going to label 1.
pub fn majority(ones: usize, total: usize) -> Label {
    (2 * ones >= total) as Label
}

impl Hypothesis for MajorityVote {
    fn predict(&self, x: &Point) -> Label {
        let ones = self.voters.iter().filter(|h| h.predict(x) == 1).count();
        majority(ones, self.voters.len())
    }
}

/// Random split of `data` into `blocks` disjoint blocks of `⌊|data|/blocks⌋`
/// items, as index lists into `data`. The remainder is discarded.
///
/// Indices are shuffled from canonical order, so the split depends on the
/// dataset only as a multiset.
pub fn random_blocks(data: &Dataset, blocks: usize, rng: &mut RngStream) -> Result<Vec<Vec<usize>>> {
    if blocks == 0 || data.len() < blocks {
        return Err(Error::InvalidParameter(format!("need at least {blocks} items, got {}", data.len())));
    }
    let mut order = data.canonical_order();
    order.shuffle(rng);
    let size = data.len() / blocks;
    Ok(order.chunks_exact(size).take(blocks).map(|c| c.to_vec()).collect())
}

fn subset(data: &Dataset, idx: &[usize]) -> Dataset {
    let items = idx.iter().map(|&i| data.items()[i].clone()).collect();
    Dataset::from_items(items).expect("subset of a valid dataset")
}

fn fit_blocks(
    data: &Dataset,
    blocks: &[Vec<usize>],
    base: &dyn Learner,
    rng: &RngStream,
) -> Result<Vec<Box<dyn Hypothesis>>> {
    blocks
        .iter()
        .enumerate()
        .map(|(b, idx)| base.fit(&subset(data, idx), &mut rng.derive2("block", b)))
        .collect()
}

/// Majority vote of `base` fitted on `10t+1` random blocks.
pub fn fit_partition_majority(data: &Dataset, t: usize, base: &dyn Learner, rng: &mut RngStream) -> Result<MajorityVote> {
    let blocks = random_blocks(data, 10 * t + 1, rng)?;
    Ok(MajorityVote::new(fit_blocks(data, &blocks, base, rng)?))
}

/// Partition-majority protocol as a [`Learner`].
#[derive(Clone)]
pub struct PartitionMajority {
    pub t: usize,
    pub base: Arc<dyn Learner>,
}

impl Learner for PartitionMajority {
    fn name(&self) -> String {
        format!("fit_partition_majority(t={}, base={})", self.t, self.base.name())
    }

    fn fit(&self, data: &Dataset, rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_partition_majority(data, self.t, self.base.as_ref(), rng)?))
    }

    /// Checks that a vote error at the probe is backed by `4t+1` erring clean blocks.
    fn fit_probed(
        &self,
        data: &Dataset,
        probe: &FitProbe<'_>,
        diag: &mut LearnerDiagnostics,
        rng: &mut RngStream,
    ) -> Result<Box<dyn Hypothesis>> {
        let blocks = random_blocks(data, 10 * self.t + 1, rng)?;
        let voters = fit_blocks(data, &blocks, self.base.as_ref(), rng)?;
        let vote = MajorityVote::new(voters);
        let poisoned = probe.poison_mask.iter().filter(|&&p| p).count();
        if poisoned <= self.t && vote.predict(probe.x) != probe.truth {
            diag.vote_errors += 1;
            let clean_wrong = blocks
                .iter()
                .zip(vote.voters())
                .filter(|(idx, h)| idx.iter().all(|&i| !probe.poison_mask[i]) && h.predict(probe.x) != probe.truth)
                .count();
            if clean_wrong < 4 * self.t + 1 {
                diag.vote_invariant_violations += 1;
            }
        }
        Ok(Box::new(vote))
    }

    fn is_randomized(&self) -> bool {
        true
    }
}

/// Largest multiset size enumerated by [`projection_number`] by default.
pub const DEFAULT_MULTISET_BOUND: usize = 7;

/// Majority labels of a multiset of rows and the region where fewer than a `1/k` share disagree with them.
fn majority_and_region(counts_one: &[usize], total: usize, k: usize) -> (u64, u64) {
    let mut maj = 0u64;
    let mut region = 0u64;
    for (i, &ones) in counts_one.iter().enumerate() {
        let m = majority(ones, total);
        let disagree = if m == 1 { total - ones } else { ones };
        if m == 1 {
            maj |= 1 << i;
        }
        if disagree * k < total {
            region |= 1 << i;
        }
    }
    (maj, region)
}

fn first_agreeing_row(class: &FiniteClass, maj: u64, region: u64) -> Option<usize> {
    class.rows().iter().position(|&r| (r ^ maj) & region == 0)
}

/// Smallest `k ≥ 2` such that every multiset of at most `max_multiset` rows
/// has a row agreeing with its majority wherever fewer than a `1/k` share disagree.
pub fn projection_number(class: &FiniteClass, max_multiset: usize) -> Result<usize> {
    if max_multiset == 0 {
        return Err(Error::InvalidParameter("multiset bound must be ≥ 1".into()));
    }
    let rows = class.row_count();
    let n = class.domain_size();
    let mut multisets: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn extend(stack: &mut Vec<usize>, start: usize, rows: usize, bound: usize, out: &mut Vec<Vec<usize>>) {
        if !stack.is_empty() {
            out.push(stack.clone());
        }
        if stack.len() == bound {
            return;
        }
        for r in start..rows {
            stack.push(r);
            extend(stack, r, rows, bound, out);
            stack.pop();
        }
    }
    extend(&mut stack, 0, rows, max_multiset, &mut multisets);
    if multisets.len() > 5_000_000 {
        return Err(Error::PolicyExceeded(format!("{} multisets to enumerate", multisets.len())));
    }
    let profiles: Vec<(Vec<usize>, usize)> = multisets
        .iter()
        .map(|ms| {
            let counts = (0..n).map(|i| ms.iter().filter(|&&r| class.label(r, i) == 1).count()).collect();
            (counts, ms.len())
        })
        .collect();
    for k in 2..=max_multiset + 1 {
        let works = profiles.iter().all(|(counts, total)| {
            let (maj, region) = majority_and_region(counts, *total, k);
            first_agreeing_row(class, maj, region).is_some()
        });
        if works {
            return Ok(k);
        }
    }
    unreachable!("k = bound + 1 only constrains unanimous points")
}

/// Proper aggregation over `10·k_p·t + 1` blocks: the first row agreeing
/// with the block majority on the high-agreement region.
pub fn fit_projection(
    data: &Dataset,
    t: usize,
    base: &dyn Learner,
    class: &FiniteClass,
    k_p: usize,
    rng: &mut RngStream,
) -> Result<TableHypothesis> {
    if k_p < 2 {
        return Err(Error::InvalidParameter(format!("projection number must be ≥ 2, got {k_p}")));
    }
    let blocks = random_blocks(data, 10 * k_p * t + 1, rng)?;
    let voters = fit_blocks(data, &blocks, base, rng)?;
    let n = class.domain_size();
    let counts: Vec<usize> =
        (0..n).map(|i| voters.iter().filter(|h| h.predict(&class.point(i)) == 1).count()).collect();
    let (maj, region) = majority_and_region(&counts, voters.len(), k_p);
    let row = first_agreeing_row(class, maj, region)
        .ok_or_else(|| Error::Unrealizable("no row agrees with the majority on its agreement region".into()))?;
    Ok(class.hypothesis(row))
}

/// Projection protocol as a [`Learner`].
#[derive(Clone)]
pub struct Projection {
    pub t: usize,
    pub base: Arc<dyn Learner>,
    pub class: Arc<FiniteClass>,
    pub k_p: usize,
}

impl Learner for Projection {
    fn name(&self) -> String {
        format!("fit_projection(t={}, k_p={}, base={})", self.t, self.k_p, self.base.name())
    }

    fn fit(&self, data: &Dataset, rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_projection(data, self.t, self.base.as_ref(), &self.class, self.k_p, rng)?))
    }

    fn is_randomized(&self) -> bool {
        true
    }
}

/// Size `⌊|S|ε/(3t)⌋` of the with-replacement subsample.
pub fn subsample_size(len: usize, t: usize, epsilon: f64) -> usize {
    (len as f64 * epsilon / (3.0 * t as f64)).floor() as usize
}

/// `base` fitted on a uniform with-replacement subsample of size `⌊|S|ε/(3t)⌋`.
pub fn fit_subsample(
    data: &Dataset,
    t: usize,
    epsilon: f64,
    base: &dyn Learner,
    rng: &mut RngStream,
) -> Result<Box<dyn Hypothesis>> {
    if t == 0 || !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("subsample needs t ≥ 1 and ε > 0".into()));
    }
    let size = subsample_size(data.len(), t, epsilon);
    if size == 0 {
        return Err(Error::InvalidParameter("subsample size is 0".into()));
    }
    let order = data.canonical_order();
    let picks: Vec<usize> = (0..size).map(|_| order[rng.random_range(0..order.len())]).collect();
    base.fit(&subset(data, &picks), &mut rng.derive("base"))
}

/// Subsample protocol as a [`Learner`].
#[derive(Clone)]
pub struct Subsample {
    pub t: usize,
    pub epsilon: f64,
    pub base: Arc<dyn Learner>,
}

impl Learner for Subsample {
    fn name(&self) -> String {
        format!("fit_subsample(t={}, epsilon={}, base={})", self.t, self.epsilon, self.base.name())
    }

    fn fit(&self, data: &Dataset, rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        fit_subsample(data, self.t, self.epsilon, self.base.as_ref(), rng)
    }

    fn is_randomized(&self) -> bool {
        true
    }
}
