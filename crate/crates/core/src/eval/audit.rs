use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::engine::{with_workers, DistributionFactory, EvalOptions};
use crate::base::{Attacker, RngStream};
use crate::error::Result;
use crate::geometry::vector::{dist, dot, norm, sub};
use crate::geometry::{
    circle_point, random_rotation, reflect_axis, reflect_span_plane, reflect_through_line, sample_half_sphere,
    sample_sphere, SphereCircle, IDENTITY_TOL,
};

/// Result of invoking one attacker on many random (training set, test point) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CleanLabelAudit {
    pub attacker: String,
    pub invocations: u64,
    /// Invocations that emitted at least one example.
    pub nonempty: u64,
    pub emitted: u64,
    pub clean_label_violations: u64,
    pub budget_violations: u64,
    pub errors: u64,
}

impl CleanLabelAudit {
    pub fn passed(&self) -> bool {
        self.clean_label_violations == 0 && self.budget_violations == 0 && self.errors == 0
    }
}

/// Checks every emitted example against the target and the declared budget.
pub fn clean_label_audit(
    attacker: &Arc<dyn Attacker>,
    factory: &DistributionFactory<'_>,
    m: usize,
    invocations: usize,
    seed: u64,
    opts: EvalOptions,
) -> Result<CleanLabelAudit> {
    let root = RngStream::from_seed(seed);
    let rows: Vec<CleanLabelAudit> = with_workers(opts, || {
        (0..invocations)
            .into_par_iter()
            .map(|i| {
                let r = root.derive2("invocation", i);
                let mut row = CleanLabelAudit { invocations: 1, ..Default::default() };
                let outcome = factory(&mut r.derive("target")).and_then(|dist| {
                    let train = dist.sample_dataset(m, &mut r.derive("train"));
                    let x0 = dist.sample(&mut r.derive("test")).x;
                    let p = attacker.poison(dist.target(), dist.context(), &train, &x0, &mut r.derive("attack"))?;
                    Ok((dist, p))
                });
                match outcome {
                    Err(_) => row.errors = 1,
                    Ok((dist, p)) => {
                        row.nonempty = (!p.is_empty()) as u64;
                        row.emitted = p.len() as u64;
                        row.clean_label_violations =
                            p.iter().filter(|e| dist.target().predict(&e.x) != e.y).count() as u64;
                        row.budget_violations = (!attacker.budget().allows(p.len())) as u64;
                    }
                }
                row
            })
            .collect()
    })?;
    let mut total = CleanLabelAudit { attacker: attacker.name(), ..Default::default() };
    for r in rows {
        total.invocations += r.invocations;
        total.nonempty += r.nonempty;
        total.emitted += r.emitted;
        total.clean_label_violations += r.clean_label_violations;
        total.budget_violations += r.budget_violations;
        total.errors += r.errors;
    }
    Ok(total)
}

/// Outcome of one family of geometric identities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryCheck {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub max_deviation: f64,
}

impl GeometryCheck {
    fn new(name: &'static str) -> Self {
        GeometryCheck { name, cases: 0, failures: 0, max_deviation: 0.0 }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        self.max_deviation = self.max_deviation.max(deviation);
        if !(deviation <= IDENTITY_TOL) {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.failures == 0
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Involution, isometry and membership identities of the geometry
/// primitives on `samples` random inputs each, at tolerance 1e-9.
pub fn geometry_audit(samples: usize, seed: u64) -> Result<Vec<GeometryCheck>> {
    let root = RngStream::from_seed(seed);
    let mut axis_inv = GeometryCheck::new("reflect_axis involution");
    let mut axis_iso = GeometryCheck::new("reflect_axis isometry");
    let mut axis_fix = GeometryCheck::new("reflect_axis fixes x0");
    let mut span_inv = GeometryCheck::new("reflect_span_plane involution");
    let mut span_iso = GeometryCheck::new("reflect_span_plane isometry");
    let mut span_fix = GeometryCheck::new("reflect_span_plane fixes x0");
    let mut line_inv = GeometryCheck::new("reflect_through_line involution");
    let mut rot_orth = GeometryCheck::new("random_rotation orthogonality");
    let mut circle_on = GeometryCheck::new("circle_point lies on its circle");
    let mut circle_map = GeometryCheck::new("axis reflection maps C_w onto C_w'");
    let mut half = GeometryCheck::new("sample_half_sphere stays on its side");
    for s in 0..samples {
        let mut r = root.derive2("sample", s);
        let n = r.random_range(2..=8);
        let x = sample_sphere(n, &mut r)?;
        let y = sample_sphere(n, &mut r)?;
        let x0 = sample_sphere(n, &mut r)?;
        let mx = reflect_axis(&x, &x0)?;
        let my = reflect_axis(&y, &x0)?;
        axis_inv.record(max_abs_diff(reflect_axis(&mx, &x0)?.coords(), x.coords()));
        axis_iso.record((dot(mx.coords(), my.coords()) - dot(x.coords(), y.coords())).abs());
        axis_fix.record(max_abs_diff(reflect_axis(&x0, &x0)?.coords(), x0.coords()));

        let n3 = r.random_range(3..=9);
        let v1 = sample_sphere(n3, &mut r)?;
        let scale = r.random_range(0.5..2.0);
        let x0p = crate::base::Point::new(sample_sphere(n3, &mut r)?.coords().iter().map(|c| c * scale).collect())?;
        let a = crate::base::Point::new(sample_sphere(n3, &mut r)?.coords().iter().map(|c| c * 1.3).collect())?;
        let b = sample_sphere(n3, &mut r)?.to_point();
        let ra = reflect_span_plane(&a, &x0p, &v1)?;
        let rb = reflect_span_plane(&b, &x0p, &v1)?;
        span_inv.record(max_abs_diff(reflect_span_plane(&ra, &x0p, &v1)?.coords(), a.coords()));
        span_iso.record((dist(ra.coords(), rb.coords()) - dist(a.coords(), b.coords())).abs());
        span_fix.record(max_abs_diff(reflect_span_plane(&x0p, &x0p, &v1)?.coords(), x0p.coords()));

        let origin: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let dir = sample_sphere(n, &mut r)?;
        let p: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let once = reflect_through_line(&p, &origin, dir.coords());
        line_inv.record(max_abs_diff(&reflect_through_line(&once, &origin, dir.coords()), &p));

        if s % 16 == 0 {
            let k = r.random_range(2..=12);
            let rot = random_rotation(k, &mut r)?;
            let prod = rot.compose(&rot.transpose());
            let id = nalgebra::DMatrix::<f64>::identity(k, k);
            rot_orth.record((prod.matrix() - id).amax());
        }

        let w = sample_sphere(3, &mut r)?;
        let c = SphereCircle::new(w.clone())?;
        let angle = r.random_range(0.0..std::f64::consts::TAU);
        let on = circle_point(&c, angle);
        circle_on.record(circle_deviation(&c, on.coords()));
        let x0c = circle_point(&c, r.random_range(0.0..std::f64::consts::TAU));
        let w_mirror = reflect_axis(&w, &x0c)?;
        let c_mirror = SphereCircle::new(w_mirror)?;
        let image = reflect_axis(&on, &x0c)?;
        circle_map.record(circle_deviation(&c_mirror, image.coords()));

        let axis = sample_sphere(n3, &mut r)?;
        let hpt = sample_half_sphere(n3, &axis, &mut r)?;
        half.record((-dot(hpt.coords(), axis.coords())).max(0.0).max((norm(hpt.coords()) - 1.0).abs()));
    }
    Ok(vec![axis_inv, axis_iso, axis_fix, span_inv, span_iso, span_fix, line_inv, rot_orth, circle_on, circle_map, half])
}

/// Largest violation of the two defining equations of a circle on the unit sphere.
fn circle_deviation(c: &SphereCircle, p: &[f64]) -> f64 {
    let on_sphere = (norm(p) - 1.0).abs();
    let to_q = (norm(&sub(p, c.q().coords())) - 1.0).abs();
    on_sphere.max(to_q)
}

