//! Results CSV: one row per scenario, fixed column order, floats printed
//! with 17 significant digits so reruns compare byte for byte.

use super::config::{ClassSpec, ExperimentConfig, ScenarioResult};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 17] = [
    "experiment_id",
    "class",
    "learner",
    "attacker",
    "n",
    "d",
    "t",
    "gamma",
    "epsilon",
    "m",
    "trials",
    "test_points",
    "atk_mean",
    "atk_ci95",
    "err_mean",
    "audit_violations",
    "seed",
];

/// `%.17g`: fixed notation for decimal exponents in `[-4, 17)`, scientific
/// with an at-least-two-digit exponent otherwise, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let mantissa = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(format_g17).unwrap_or_default()
}

fn class_params(c: &ClassSpec) -> (Option<usize>, Option<usize>, Option<usize>, Option<f64>, Option<f64>) {
    // (n, d, t, gamma, epsilon) carried by the class itself.
    match c {
        ClassSpec::Halfsphere { n, epsilon } | ClassSpec::MarginLb { n, epsilon } => (Some(*n), None, None, None, Some(*epsilon)),
        ClassSpec::Circles { d, t } => (None, Some(*d), Some(*t), None, None),
        ClassSpec::LinearMargin { n, gamma } => (Some(*n), None, None, Some(*gamma), None),
        ClassSpec::HollowStar { k } => (Some(*k), None, None, None, None),
        ClassSpec::Finite { class, .. } => (Some(class.domain_size()), None, None, None, None),
        ClassSpec::Interval { .. } | ClassSpec::TangentCircle { .. } => (None, None, None, None, None),
    }
}

/// Field values of one CSV row, in `CSV_COLUMNS` order.
pub fn csv_record(experiment: &str, r: &ScenarioResult) -> Vec<String> {
    let s = &r.scenario;
    let (n, d, t, gamma, epsilon) = class_params(&s.class);
    vec![
        format!("{experiment}/{}", s.id),
        s.class.name().to_string(),
        r.report.learner.clone(),
        r.report.attackers.join("+"),
        opt_usize(n),
        opt_usize(d),
        opt_usize(s.t.or(t)),
        opt_f64(s.gamma.or(gamma)),
        opt_f64(s.epsilon.or(epsilon)),
        r.m.to_string(),
        r.report.trials.to_string(),
        r.report.test_points_per_trial.to_string(),
        format_g17(r.report.atk_mean),
        format_g17(r.report.atk_ci95),
        format_g17(r.report.err_mean),
        r.report.audit.total().to_string(),
        r.report.seed.to_string(),
    ]
}

/// Header plus one row per scenario.
pub fn results_csv(cfg: &ExperimentConfig, results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in results {
        w.write_record(csv_record(&cfg.experiment, r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
}
