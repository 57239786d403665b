//! The fixed audit suites shared by the CLI and the acceptance target.

use std::sync::Arc;

use serde::Serialize;

use super::audit::{clean_label_audit, geometry_audit, CleanLabelAudit, GeometryCheck};
use super::config::{AttackerSpec, ClassSpec, IntervalSpec};
use super::engine::EvalOptions;
use super::symmetry::{symmetry_audit_app_e, symmetry_audit_thm4, MarginSymmetryAudit, SymmetryAudit};
use crate::attackers::label_flip_attacker;
use crate::base::{Attacker, RngStream};
use crate::error::Result;

/// One shipped attacker together with a distribution it is meant for.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub attacker: AttackerSpec,
    pub class: ClassSpec,
    pub m: usize,
}

fn case(attacker: AttackerSpec, class: ClassSpec, m: usize) -> AuditCase {
    AuditCase { attacker, class, m }
}

/// Every registry attacker on a matching construction.
pub fn shipped_attacker_cases() -> Vec<AuditCase> {
    let interval = ClassSpec::Interval { target: IntervalSpec::Open { a: 0.3, b: 0.6 }, density: None };
    let empty = ClassSpec::Interval { target: IntervalSpec::Empty, density: None };
    let flood = AttackerSpec::IntervalFloodAttacker { resolution: 1 };
    let margin2d = ClassSpec::LinearMargin { n: 2, gamma: 0.25 };
    let boundary = AttackerSpec::BoundaryFlood { count: 64 };
    vec![
        case(AttackerSpec::NullAttacker, interval.clone(), 50),
        case(flood.clone(), empty.clone(), 50),
        case(flood.clone(), interval.clone(), 100),
        case(AttackerSpec::IntervalFloodAttacker { resolution: 3 }, interval, 100),
        case(AttackerSpec::BudgetWrapper { inner: Box::new(flood), t: 2 }, empty, 200),
        case(AttackerSpec::SvmOnePointAttacker, ClassSpec::Halfsphere { n: 64, epsilon: 0.01 }, 100),
        case(AttackerSpec::SphereReflectionAttacker { eta: 1e-3 }, ClassSpec::TangentCircle { eta: 1e-3 }, 5),
        case(AttackerSpec::MarginReflectionAttacker, ClassSpec::MarginLb { n: 65, epsilon: 0.01 }, 50),
        case(AttackerSpec::CircleTpointAttacker { t: 4 }, ClassSpec::Circles { d: 1, t: 4 }, 30),
        case(AttackerSpec::HollowStarAttacker, ClassSpec::HollowStar { k: 9 }, 4),
        case(boundary.clone(), margin2d.clone(), 200),
        case(AttackerSpec::BudgetWrapper { inner: Box::new(boundary), t: 16 }, margin2d.clone(), 200),
        case(AttackerSpec::BoundaryFlood { count: 16 }, ClassSpec::LinearMargin { n: 2, gamma: 0.5 }, 200),
        case(AttackerSpec::LinearReflection, margin2d.clone(), 200),
        case(AttackerSpec::BudgetWrapper { inner: Box::new(AttackerSpec::LinearReflection), t: 16 }, margin2d, 200),
    ]
}

/// Clean-label and budget audit of every shipped attacker.
pub fn attacker_suite(invocations: usize, seed: u64, opts: EvalOptions) -> Result<Vec<CleanLabelAudit>> {
    let root = RngStream::from_seed(seed);
    shipped_attacker_cases()
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let attacker = c.attacker.build()?;
            let factory = c.class.factory(c.m)?;
            let mut audit = clean_label_audit(&attacker, factory.as_ref(), c.m, invocations, seed_of(&root, i), opts)?;
            audit.attacker = format!("{} on {}", audit.attacker, c.class.name());
            Ok(audit)
        })
        .collect()
}

/// Audit of an attacker that emits dirty labels; must fail.
pub fn negative_control(invocations: usize, seed: u64, opts: EvalOptions) -> Result<CleanLabelAudit> {
    let class = ClassSpec::Interval { target: IntervalSpec::Open { a: 0.3, b: 0.6 }, density: None };
    let attacker: Arc<dyn Attacker> = Arc::new(label_flip_attacker());
    clean_label_audit(&attacker, class.factory(50)?.as_ref(), 50, invocations, seed, opts)
}

fn seed_of(root: &RngStream, i: usize) -> u64 {
    let key = root.derive2("case", i).key();
    u64::from_le_bytes(key[..8].try_into().expect("8 bytes"))
}

/// Tangent-circle and margin symmetry audits at their acceptance settings.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetrySuite {
    pub tangent_circle: SymmetryAudit,
    pub margin: MarginSymmetryAudit,
}

impl SymmetrySuite {
    pub fn passed(&self) -> bool {
        self.tangent_circle.passed() && self.margin.passed()
    }
}

/// Fired draws each symmetry audit must reach.
pub const SYMMETRY_FIRED_TARGET: usize = 100;

pub fn symmetry_suite(seed: u64) -> Result<SymmetrySuite> {
    let tangent_circle = symmetry_audit_thm4(1e-3, 5, SYMMETRY_FIRED_TARGET, seed, 0.0)?;
    let margin = symmetry_audit_app_e(257, 0.01, 50, SYMMETRY_FIRED_TARGET, seed.wrapping_add(1))?;
    Ok(SymmetrySuite { tangent_circle, margin })
}

/// Random inputs per geometry identity in the shipped suite.
pub const GEOMETRY_SAMPLES: usize = 2000;

pub fn geometry_suite(seed: u64) -> Result<Vec<GeometryCheck>> {
    geometry_audit(GEOMETRY_SAMPLES, seed)
}
