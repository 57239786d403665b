use rand::Rng;
use serde::Serialize;

use crate::attackers::{margin_reflection_attacker, margin_reflection_gate, sphere_reflection_attacker};
use crate::base::{flip, Attacker, Dataset, Label, LabeledExample, Point, RngStream, TargetedDistribution};
use crate::classes::{MarginLbExperiment, TangentCircleExperiment, CONSTRUCTION_GAMMA};
use crate::error::{Error, Result};
use crate::geometry::vector::dot;
use crate::geometry::{
    random_rotation, reflect_axis, reflect_span_plane, sample_circle, sample_half_sphere, sample_sphere, span_partner,
    UnitVector, IDENTITY_TOL,
};

/// Draws examined before a symmetry audit with no fired trial is declared inconclusive.
pub const MIN_DRAWS: usize = 1000;

/// Greedy nearest-neighbor matching of two labeled multisets.
///
/// Every item of `a` is paired with the closest unmatched item of `b`
/// carrying the same label (max-coordinate distance). Returns the largest
/// paired distance, or infinity when the sizes differ or a label runs out.
pub fn multiset_deviation(a: &Dataset, b: &Dataset) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let a = a.canonical();
    let b = b.canonical();
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for e in a.iter() {
        let mut best: Option<(usize, f64)> = None;
        for (j, f) in b.iter().enumerate() {
            if used[j] || f.y != e.y || f.x.dim() != e.x.dim() {
                continue;
            }
            let d = e.x.coords().iter().zip(f.x.coords()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            None => return f64::INFINITY,
            Some((j, d)) => {
                used[j] = true;
                worst = worst.max(d);
            }
        }
    }
    worst
}

/// Summary of a symmetry audit.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SymmetryAudit {
    pub draws: u64,
    /// Draws where the attack gate opened.
    pub fired: u64,
    /// Largest multiset deviation over fired draws.
    pub max_deviation: f64,
    /// Fired draws whose poisoned datasets differ by more than 1e-9.
    pub mismatches: u64,
    /// Draws where the gate disagreed between the two realizations.
    pub gate_disagreements: u64,
    /// Fired draws where the two targets agree at the test point.
    pub target_agreements: u64,
}

impl SymmetryAudit {
    pub fn passed(&self) -> bool {
        self.fired > 0
            && self.mismatches == 0
            && self.gate_disagreements == 0
            && self.target_agreements == 0
            && self.max_deviation <= IDENTITY_TOL
    }

    fn record(&mut self, deviation: f64) {
        self.fired += 1;
        self.max_deviation = self.max_deviation.max(deviation);
        if !(deviation <= IDENTITY_TOL) {
            self.mismatches += 1;
        }
    }
}

fn finish(audit: SymmetryAudit) -> Result<SymmetryAudit> {
    if audit.fired == 0 {
        return Err(Error::Inconclusive(format!("gate never opened in {} draws", audit.draws)));
    }
    Ok(audit)
}

fn nudge(poison: Dataset, by: f64) -> Result<Dataset> {
    let mut items = poison.into_items();
    if let Some(first) = items.first_mut() {
        let mut c = first.x.coords().to_vec();
        c[0] += by;
        first.x = Point::new(c)?;
    }
    Dataset::from_items(items)
}

/// Target label at a circle point. A positive circle lies on its target's
/// decision boundary, so scores within `IDENTITY_TOL` of zero take the
/// circle's own label instead of a rounding-dependent side.
fn circle_label(exp: &TangentCircleExperiment, x: &Point) -> Label {
    let score = exp.linear_target().score(x.coords());
    if score.abs() <= IDENTITY_TOL {
        exp.positive() as Label
    } else {
        (score >= 0.0) as Label
    }
}

/// Tangent-circle construction: the poisoned set built against the true
/// circle equals the one built against its mirror image through `x0`.
///
/// Runs until `fired_target` draws open the gate (or `max(1000, 20·target)`
/// draws). `perturb` shifts one poison coordinate of the first realization,
/// as a negative control.
pub fn symmetry_audit_thm4(eta: f64, m: usize, fired_target: usize, seed: u64, perturb: f64) -> Result<SymmetryAudit> {
    let attacker = sphere_reflection_attacker(eta)?;
    let root = RngStream::from_seed(seed);
    let mut audit = SymmetryAudit::default();
    let max_draws = MIN_DRAWS.max(20 * fired_target);
    for d in 0..max_draws {
        if audit.fired as usize >= fired_target {
            break;
        }
        audit.draws += 1;
        let mut r = root.derive2("draw", d);
        let w = sample_sphere(3, &mut r)?;
        let positive = r.random::<bool>();
        let exp = TangentCircleExperiment::with_parameters(w.clone(), positive, eta)?;
        let train = exp.sample_dataset(m, &mut r.derive("train"));
        let x0 = sample_circle(exp.circle(), &mut r.derive("test"));

        let mirror_w = reflect_axis(&w, &x0)?;
        let mirror = TangentCircleExperiment::with_parameters(mirror_w, !positive, eta)?;
        let mirror_train = Dataset::from_items(
            train
                .iter()
                .map(|e| {
                    let x = reflect_axis(&UnitVector::normalize(e.x.coords())?, &x0)?.to_point();
                    Ok(LabeledExample { x, y: flip(e.y) })
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        let x0p = x0.to_point();
        let p1 = attacker.poison(exp.target(), exp.context(), &train, &x0p, &mut r.derive("a1"))?;
        let p2 = attacker.poison(mirror.target(), mirror.context(), &mirror_train, &x0p, &mut r.derive("a2"))?;
        if p1.is_empty() != p2.is_empty() {
            audit.gate_disagreements += 1;
            continue;
        }
        if p1.is_empty() {
            continue;
        }
        if circle_label(&exp, &x0p) == circle_label(&mirror, &x0p) {
            audit.target_agreements += 1;
        }
        let p1 = if perturb != 0.0 { nudge(p1, perturb)? } else { p1 };
        audit.record(multiset_deviation(&train.union(&p1)?, &mirror_train.union(&p2)?));
    }
    finish(audit)
}

/// Counters specific to the margin construction audit.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MarginSymmetryAudit {
    pub audit: SymmetryAudit,
    /// Draws where the base-frame event and both gates were not all equal.
    pub claim_disagreements: u64,
    /// Largest distance between the two realizations' test points.
    pub test_point_deviation: f64,
}

impl MarginSymmetryAudit {
    pub fn passed(&self) -> bool {
        self.audit.passed() && self.claim_disagreements == 0 && self.test_point_deviation <= IDENTITY_TOL
    }
}

struct Realization {
    exp: MarginLbExperiment,
    train: Dataset,
    x0: Point,
}

fn realize(
    n: usize,
    epsilon: f64,
    sign: i8,
    map: &dyn Fn(&[f64]) -> Vec<f64>,
    shifted_q: &[Vec<f64>],
    apex_copies: usize,
    x0_base: &[f64],
) -> Result<Realization> {
    let e1 = UnitVector::basis(n - 1, 0);
    let w = UnitVector::normalize(&map(e1.coords()))?;
    let exp = MarginLbExperiment::with_parameters(n, epsilon, w, sign)?;
    let mut items = Vec::with_capacity(shifted_q.len() + apex_copies);
    for q in shifted_q {
        let x = exp.embed(&map(q));
        let y = exp.target().predict(&x);
        items.push(LabeledExample { x, y });
    }
    for _ in 0..apex_copies {
        items.push(LabeledExample { x: exp.apex(), y: 1 });
    }
    let x0 = exp.embed(&map(x0_base));
    Ok(Realization { exp, train: Dataset::from_items(items)?, x0 })
}

/// Margin construction: realizes the test point and training set in two
/// coordinate frames (a random rotation `T`, and `T` composed with the
/// reflection fixing `γe1 + t0`) with opposite labels, and checks that the
/// two poisoned datasets coincide whenever the base-frame event holds.
pub fn symmetry_audit_app_e(n: usize, epsilon: f64, m: usize, fired_target: usize, seed: u64) -> Result<MarginSymmetryAudit> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("margin construction needs n ≥ 3, got {n}")));
    }
    let gamma = CONSTRUCTION_GAMMA;
    let attacker = margin_reflection_attacker();
    let root = RngStream::from_seed(seed);
    let e1 = UnitVector::basis(n - 1, 0);
    let mut out = MarginSymmetryAudit::default();
    let max_draws = MIN_DRAWS.max(20 * fired_target);
    for d in 0..max_draws {
        if out.audit.fired as usize >= fired_target {
            break;
        }
        out.audit.draws += 1;
        let mut r = root.derive2("draw", d);
        let on_sphere = (0..m).filter(|_| r.random::<f64>() < 8.0 * epsilon).count();
        let t0 = sample_half_sphere(n - 1, &e1, &mut r)?;
        let qs: Vec<UnitVector> = (0..on_sphere).map(|_| sample_half_sphere(n - 1, &e1, &mut r)).collect::<Result<_>>()?;
        let v2 = span_partner(t0.coords(), &e1)?;
        let base_event = qs.iter().all(|q| q.coords()[0] <= 0.125 && dot(q.coords(), &v2) <= 0.125)
            && t0.coords()[0] <= 0.125
            && on_sphere as f64 <= 32.0 * m as f64 * epsilon;

        let rot = random_rotation(n - 1, &mut r)?;
        let sign: i8 = if r.random::<bool>() { 1 } else { -1 };
        let shift = |q: &[f64]| -> Vec<f64> {
            let mut v = q.to_vec();
            v[0] += gamma;
            v
        };
        let x0_base = shift(t0.coords());
        let x0_base_point = Point::new(x0_base.clone())?;
        let shifted: Vec<Vec<f64>> = qs.iter().map(|q| shift(q.coords())).collect();
        let plain = |u: &[f64]| rot.apply(u);
        let mirrored = |u: &[f64]| {
            let reflected = reflect_span_plane(&Point::new(u.to_vec()).expect("finite"), &x0_base_point, &e1)
                .expect("x0 is not parallel to e1");
            rot.apply(reflected.coords())
        };
        let g1 = realize(n, epsilon, sign, &plain, &shifted, m - on_sphere, &x0_base)?;
        let g2 = realize(n, epsilon, -sign, &mirrored, &shifted, m - on_sphere, &x0_base)?;

        let dev_x0 = g1.x0.coords().iter().zip(g2.x0.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.test_point_deviation = out.test_point_deviation.max(dev_x0);

        let low = |p: &Point| p.coords()[..n - 1].to_vec();
        let gate1 = margin_reflection_gate(g1.exp.w_star(), gamma, epsilon, &g1.train, &low(&g1.x0));
        let gate2 = margin_reflection_gate(g2.exp.w_star(), gamma, epsilon, &g2.train, &low(&g2.x0));
        if base_event != gate1 || gate1 != gate2 {
            out.claim_disagreements += 1;
        }
        if !base_event {
            continue;
        }
        let p1 = attacker.poison(g1.exp.target(), g1.exp.context(), &g1.train, &g1.x0, &mut r.derive("a1"))?;
        let p2 = attacker.poison(g2.exp.target(), g2.exp.context(), &g2.train, &g2.x0, &mut r.derive("a2"))?;
        if g1.exp.target().predict(&g1.x0) == g2.exp.target().predict(&g1.x0) {
            out.audit.target_agreements += 1;
        }
        out.audit.record(multiset_deviation(&g1.train.union(&p1)?, &g2.train.union(&p2)?));
    }
    finish(out.audit.clone())?;
    Ok(out)
}

