use crate::base::{Dataset, Hypothesis, Label, Learner, RngStream};
use crate::classes::{on_local_circle, sphere_center, sphere_index, SphereCirclesHypothesis};
use crate::error::{Error, Result};
use crate::geometry::vector::{dot, sub};
use crate::geometry::{circle_point, SphereCircle, UnitVector, IDENTITY_TOL};

/// Deterministic angles tried when a circle is pinned by a single point.
const PROBE_ANGLES: [f64; 8] = [0.0, 0.7, 1.9, 2.6, 3.4, 4.1, 5.0, 5.8];

/// Fixed directions tried when no point pins the circle.
fn free_candidates() -> Vec<UnitVector> {
    let raw: [[f64; 3]; 8] = [
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0],
        [0.0, -1.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.6, 0.0, 0.8],
        [0.0, 0.8, -0.6],
    ];
    raw.iter().map(|r| UnitVector::normalize(r).expect("nonzero")).collect()
}

/// Unit vectors `q` with `⟨q, a⟩ = ⟨q, b⟩ = 1/2`, i.e. `a, b ∈ C_q`.
fn common_circle_centers(a: &[f64], b: &[f64]) -> Vec<UnitVector> {
    let g = dot(a, b);
    if (1.0 + g).abs() < 1e-12 {
        return Vec::new();
    }
    let coef = 1.0 / (2.0 * (1.0 + g));
    let base: Vec<f64> = a.iter().zip(b).map(|(x, y)| coef * (x + y)).collect();
    let rest2 = 1.0 - dot(&base, &base);
    if rest2 < -1e-12 {
        return Vec::new();
    }
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let Ok(nrm) = UnitVector::normalize(&cross) else {
        return Vec::new();
    };
    let h = rest2.max(0.0).sqrt();
    [h, -h]
        .iter()
        .filter_map(|&s| {
            let q: Vec<f64> = base.iter().zip(nrm.coords()).map(|(p, c)| p + s * c).collect();
            UnitVector::normalize(&q).ok()
        })
        .collect()
}

/// A circle center `q` with every `on` point on `C_q` and no `off` point on it.
fn fit_one_sphere(on: &[Vec<f64>], off: &[Vec<f64>]) -> Option<UnitVector> {
    let ok = |q: &UnitVector| {
        on.iter().all(|p| on_local_circle(p, q.coords())) && !off.iter().any(|p| on_local_circle(p, q.coords()))
    };
    let mut distinct: Vec<&Vec<f64>> = Vec::new();
    for p in on {
        if !distinct.iter().any(|d| sub(d, p).iter().all(|c| c.abs() <= IDENTITY_TOL)) {
            distinct.push(p);
        }
    }
    match distinct.len() {
        0 => free_candidates().into_iter().find(ok),
        1 => {
            let anchor = UnitVector::normalize(distinct[0]).ok()?;
            let c = SphereCircle::new(anchor).ok()?;
            PROBE_ANGLES.iter().map(|&a| circle_point(&c, a)).find(ok)
        }
        _ => common_circle_centers(distinct[0], distinct[1]).into_iter().find(ok),
    }
}

/// Consistent member of the circles-on-spheres class for spheres at `3i·e1`.
///
/// Per sphere it tries circle label 1 before 0.
pub fn fit_circles(s: &Dataset, spheres: usize) -> Result<SphereCirclesHypothesis> {
    if let Some(d) = s.dim() {
        if d != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: d });
        }
    }
    let centers: Vec<Vec<f64>> = (1..=spheres).map(sphere_center).collect();
    let mut local: Vec<Vec<(Vec<f64>, Label)>> = vec![Vec::new(); spheres];
    for e in s.canonical().iter() {
        let x = e.x.coords();
        match sphere_index(&centers, x) {
            Some(i) => local[i].push((sub(x, &centers[i]), e.y)),
            None if e.y == 1 => return Err(Error::Unrealizable("positive point off every sphere".into())),
            None => {}
        }
    }
    let mut qs = Vec::with_capacity(spheres);
    let mut labels = Vec::with_capacity(spheres);
    for pts in &local {
        let mut found = None;
        for s_label in [1u8, 0u8] {
            let on: Vec<Vec<f64>> = pts.iter().filter(|p| p.1 == s_label).map(|p| p.0.clone()).collect();
            let off: Vec<Vec<f64>> = pts.iter().filter(|p| p.1 != s_label).map(|p| p.0.clone()).collect();
            if let Some(q) = fit_one_sphere(&on, &off) {
                found = Some((q, s_label));
                break;
            }
        }
        let (q, lab) = found.ok_or_else(|| Error::Unrealizable("no circle fits a sphere's sample".into()))?;
        qs.push(q);
        labels.push(lab);
    }
    SphereCirclesHypothesis::new(centers, qs, labels)
}

/// Learner wrapper around [`fit_circles`].
#[derive(Clone, Copy, Debug)]
pub struct CirclesErm {
    pub spheres: usize,
}

impl Learner for CirclesErm {
    fn name(&self) -> String {
        "fit_circles".into()
    }

    fn fit(&self, data: &Dataset, _rng: &mut RngStream) -> Result<Box<dyn Hypothesis>> {
        Ok(Box::new(fit_circles(data, self.spheres)?))
    }
}
