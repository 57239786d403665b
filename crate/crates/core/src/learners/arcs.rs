use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::base::Dataset;
use crate::error::{Error, Result};

/// One piece of an [`ArcSet`], a subset of `[0, 2π)`.
///
/// Open at both ends, except that `lo_closed` includes `lo` (used only for
/// pieces starting at 0 that come from an arc wrapping through 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcPiece {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
}

impl ArcPiece {
    fn contains(&self, beta: f64) -> bool {
        (self.lo < beta || (self.lo_closed && self.lo == beta)) && beta < self.hi
    }

    fn intersect(&self, other: &ArcPiece) -> Option<ArcPiece> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(ArcPiece { lo, hi, lo_closed })
    }
}

/// Finite union of disjoint arcs of directions, stored as pieces of `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSet {
    pieces: Vec<ArcPiece>,
}

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl ArcSet {
    pub fn full() -> Self {
        ArcSet { pieces: vec![ArcPiece { lo: 0.0, hi: TAU, lo_closed: true }] }
    }

    pub fn empty() -> Self {
        ArcSet { pieces: Vec::new() }
    }

    /// Open arc of directions from `start` counterclockwise for `width ≤ 2π`.
    pub fn open_arc(start: f64, width: f64) -> Self {
        let lo = normalize_angle(start);
        let hi = lo + width;
        if hi <= TAU {
            ArcSet { pieces: vec![ArcPiece { lo, hi, lo_closed: false }] }
        } else {
            ArcSet {
                pieces: vec![
                    ArcPiece { lo: 0.0, hi: hi - TAU, lo_closed: true },
                    ArcPiece { lo, hi: TAU, lo_closed: false },
                ],
            }
        }
    }

    pub fn pieces(&self) -> &[ArcPiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, beta: f64) -> bool {
        let b = normalize_angle(beta);
        self.pieces.iter().any(|p| p.contains(b))
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut pieces: Vec<ArcPiece> =
            self.pieces.iter().flat_map(|p| other.pieces.iter().filter_map(move |q| p.intersect(q))).collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        ArcSet { pieces }
    }

    /// Whether some direction in the open interval `(l, h) ⊆ [0, 2π]` belongs to the set.
    pub fn meets_open(&self, l: f64, h: f64) -> bool {
        self.pieces.iter().any(|p| p.lo.max(l) < p.hi.min(h))
    }
}

/// Extreme points of a planar point set, counterclockwise (monotone chain).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for p in &pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    // The upper chain may never pop into the finished lower chain.
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

/// Planar positives and negatives of a two-dimensional dataset.
pub fn split_planar(s: &Dataset) -> Result<(Vec<[f64; 2]>, Vec<[f64; 2]>)> {
    if let Some(d) = s.dim() {
        if d != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: d });
        }
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for e in s {
        let c = e.x.coords();
        if e.y == 1 {
            pos.push([c[0], c[1]]);
        } else {
            neg.push([c[0], c[1]]);
        }
    }
    Ok((pos, neg))
}

/// Directions `β` with `min_pos ⟨u_β, x⟩ > max_neg ⟨u_β, x⟩`.
///
/// Each positive/negative pair of hull vertices contributes the open
/// half-circle `⟨u_β, x_neg − x_pos⟩ < 0`.
pub fn consistent_arcs(s: &Dataset) -> Result<ArcSet> {
    let (pos, neg) = split_planar(s)?;
    Ok(arcs_from_split(&pos, &neg))
}

pub(crate) fn arcs_from_split(pos: &[[f64; 2]], neg: &[[f64; 2]]) -> ArcSet {
    if pos.is_empty() || neg.is_empty() {
        return ArcSet::full();
    }
    let hp = convex_hull(pos);
    let hn = convex_hull(neg);
    let mut set = ArcSet::full();
    for p in &hp {
        for q in &hn {
            let d = [q[0] - p[0], q[1] - p[1]];
            if d[0] == 0.0 && d[1] == 0.0 {
                return ArcSet::empty();
            }
            let phi = d[1].atan2(d[0]);
            set = set.intersect(&ArcSet::open_arc(phi + FRAC_PI_2, PI));
            if set.is_empty() {
                return set;
            }
        }
    }
    set
}
