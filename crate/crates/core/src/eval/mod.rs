//! Monte-Carlo estimation of attackable rates, audits, experiment configs
//! and result tables.

mod audit;
mod config;
mod engine;
mod report;
mod stats;
mod studies;
mod suite;
mod symmetry;

pub use audit::{clean_label_audit, geometry_audit, CleanLabelAudit, GeometryCheck};
pub use config::{
    config_digest, run_config, scenario_seed, AttackerSpec, ClassSpec, ExperimentConfig, IntervalSpec, LearnerSpec, SampleSize,
    SampleSizeRule, ScenarioConfig, ScenarioResult,
};
pub use engine::{attackable_rate, expected_attackable_rate, AttackReport, AuditCounters, DistributionFactory, EvalOptions};
pub use report::{csv_record, format_g17, results_csv, CSV_COLUMNS};
pub use stats::{mean_and_half_width, wilson_interval, Proportion, Z95};
pub use studies::{svm_attack_event, svm_event_study, SvmEventStudy};
pub use symmetry::{
    multiset_deviation, symmetry_audit_app_e, symmetry_audit_thm4, MarginSymmetryAudit, SymmetryAudit, MIN_DRAWS,
};
pub use suite::{
    attacker_suite, geometry_suite, negative_control, shipped_attacker_cases, symmetry_suite, AuditCase, SymmetrySuite,
    GEOMETRY_SAMPLES, SYMMETRY_FIRED_TARGET,
};
