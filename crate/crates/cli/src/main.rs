//! `cleanlabel` command-line runner.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid config or arguments,
//! 3 audit violation or trial error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use cleanlabel::eval::{
    attacker_suite, config_digest, format_g17, geometry_suite, negative_control, results_csv, run_config,
    symmetry_suite, EvalOptions, ExperimentConfig, CSV_COLUMNS,
};
use serde_json::json;

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_AUDIT: u8 = 3;

#[derive(Parser)]
#[command(name = "cleanlabel", version, about = "Clean-label poisoning experiments and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a config and write results.csv and manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replaces the seed stored in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, env = "CLEANLABEL_WORKERS", default_value_t = 0)]
        workers: usize,
    },
    /// Run the clean-label, geometry and symmetry audit suites.
    Audit {
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
        /// Attacker invocations per shipped attacker.
        #[arg(long, default_value_t = 10_000)]
        invocations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "CLEANLABEL_WORKERS", default_value_t = 0)]
        workers: usize,
        /// Also audit a label-flipping attacker, which must be caught.
        #[arg(long)]
        negative_control: bool,
    },
    /// Aggregate results CSVs by the given columns.
    Table {
        files: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "experiment_id")]
        group_by: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scope {
    All,
    Attackers,
    Geometry,
    Symmetry,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure { code, error: error.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out, seed, workers } => cmd_run(&config, &out, seed, workers),
        Command::Audit { scope, invocations, seed, workers, negative_control } => {
            cmd_audit(scope, invocations, seed, workers, negative_control)
        }
        Command::Table { files, group_by, format } => cmd_table(&files, &group_by, format),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, workers: usize) -> Result<(), Failure> {
    let bytes = fs::read(config).with_context(|| format!("reading {}", config.display())).map_err(|e| fail(EXIT_IO, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| fail(EXIT_CONFIG, e))?;
    let mut cfg = ExperimentConfig::from_json(text).map_err(|e| fail(EXIT_CONFIG, e))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let results = run_config(&cfg, EvalOptions { workers }).map_err(|e| match e {
        cleanlabel::Error::Config(_) | cleanlabel::Error::InvalidParameter(_) => fail(EXIT_CONFIG, e),
        other => fail(EXIT_AUDIT, other),
    })?;
    let elapsed = clock.elapsed().as_secs_f64();

    let csv = results_csv(&cfg, &results).map_err(|e| fail(EXIT_IO, e))?;
    let manifest = json!({
        "experiment": cfg.experiment,
        "config_path": config.display().to_string(),
        "config_sha256": config_digest(&bytes),
        "seed": cfg.seed,
        "versions": { "cleanlabel": env!("CARGO_PKG_VERSION") },
        "started_unix": started,
        "wall_clock_seconds": elapsed,
        "scenarios": results,
    });
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display())).map_err(|e| fail(EXIT_IO, e))?;
    fs::write(out.join("results.csv"), csv).context("writing results.csv").map_err(|e| fail(EXIT_IO, e))?;
    let manifest = serde_json::to_string_pretty(&manifest).map_err(|e| fail(EXIT_IO, e))?;
    fs::write(out.join("manifest.json"), manifest).context("writing manifest.json").map_err(|e| fail(EXIT_IO, e))?;

    let mut violations = 0;
    for r in &results {
        let a = &r.report.audit;
        println!(
            "{}: atk_mean={} atk_ci95={} err_mean={} audit_violations={}",
            r.scenario.id,
            format_g17(r.report.atk_mean),
            format_g17(r.report.atk_ci95),
            format_g17(r.report.err_mean),
            a.total()
        );
        for m in &r.report.trial_error_messages {
            eprintln!("  {}: {m}", r.scenario.id);
        }
        violations += a.total();
    }
    if violations > 0 {
        return Err(fail(EXIT_AUDIT, anyhow!("{violations} audit violations or trial errors")));
    }
    Ok(())
}

fn cmd_audit(scope: Scope, invocations: usize, seed: u64, workers: usize, control: bool) -> Result<(), Failure> {
    let opts = EvalOptions { workers };
    let internal = |e: cleanlabel::Error| fail(EXIT_AUDIT, e);
    let mut failed = 0usize;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };
    if matches!(scope, Scope::All | Scope::Attackers) {
        for a in attacker_suite(invocations, seed, opts).map_err(internal)? {
            let detail = format!(
                "{} invocations, {} nonempty, {} clean-label violations, {} budget violations, {} errors",
                a.invocations, a.nonempty, a.clean_label_violations, a.budget_violations, a.errors
            );
            report(&a.attacker, a.passed(), detail);
        }
    }
    if control {
        let a = negative_control(invocations, seed, opts).map_err(internal)?;
        let detail = format!("{} clean-label violations", a.clean_label_violations);
        report("negative control label_flip", a.passed(), detail);
    }
    if matches!(scope, Scope::All | Scope::Geometry) {
        for g in geometry_suite(seed).map_err(internal)? {
            let detail = format!("{} cases, {} failures, max deviation {:e}", g.cases, g.failures, g.max_deviation);
            report(g.name, g.passed(), detail);
        }
    }
    if matches!(scope, Scope::All | Scope::Symmetry) {
        let s = symmetry_suite(seed).map_err(internal)?;
        let t = &s.tangent_circle;
        report(
            "tangent-circle symmetry",
            t.passed(),
            format!("{} fired of {} draws, max deviation {:e}", t.fired, t.draws, t.max_deviation),
        );
        let m = &s.margin;
        report(
            "margin construction symmetry",
            m.passed(),
            format!(
                "{} fired of {} draws, max deviation {:e}, {} gate disagreements",
                m.audit.fired, m.audit.draws, m.audit.max_deviation, m.claim_disagreements
            ),
        );
    }
    if failed > 0 {
        return Err(fail(EXIT_AUDIT, anyhow!("{failed} audit checks failed")));
    }
    Ok(())
}

/// Accumulated rows of one group.
#[derive(Default)]
struct Group {
    rows: Vec<BTreeMap<String, String>>,
}

fn cmd_table(files: &[PathBuf], group_by: &[String], format: Format) -> Result<(), Failure> {
    let config_err = |e: anyhow::Error| fail(EXIT_CONFIG, e);
    if files.is_empty() {
        return Err(config_err(anyhow!("no input files")));
    }
    for g in group_by {
        if !CSV_COLUMNS.contains(&g.as_str()) {
            return Err(config_err(anyhow!("unknown group-by column {g:?}")));
        }
    }
    let mut groups: BTreeMap<Vec<String>, Group> = BTreeMap::new();
    let mut order: Vec<Vec<String>> = Vec::new();
    for f in files {
        let mut reader = csv::Reader::from_path(f).map_err(|e| fail(EXIT_IO, anyhow!("{}: {e}", f.display())))?;
        let header: Vec<String> =
            reader.headers().map_err(|e| fail(EXIT_IO, e))?.iter().map(str::to_string).collect();
        if header != CSV_COLUMNS {
            return Err(config_err(anyhow!("{}: header does not match the results schema", f.display())));
        }
        for rec in reader.records() {
            let rec = rec.map_err(|e| fail(EXIT_IO, e))?;
            let row: BTreeMap<String, String> = header.iter().cloned().zip(rec.iter().map(str::to_string)).collect();
            let key: Vec<String> = group_by.iter().map(|g| row[g].clone()).collect();
            if !groups.contains_key(&key) {
                order.push(key.clone());
            }
            groups.entry(key).or_default().rows.push(row);
        }
    }

    let mut header: Vec<String> = group_by.to_vec();
    header.extend(["rows", "atk_mean", "atk_ci95", "err_mean"].map(String::from));
    let mut lines = Vec::new();
    for key in &order {
        let g = &groups[key];
        let (atk, ci, err) = aggregate(g).map_err(config_err)?;
        let mut line = key.clone();
        line.extend([g.rows.len().to_string(), atk, ci, err]);
        lines.push(line);
    }
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(std::io::stdout());
            for line in std::iter::once(&header).chain(&lines) {
                w.write_record(line).map_err(|e| fail(EXIT_IO, e))?;
            }
            w.flush().map_err(|e| fail(EXIT_IO, e))?;
        }
        Format::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|c| std::iter::once(&header).chain(&lines).map(|l| l[c].chars().count()).max().unwrap_or(0))
                .collect();
            for line in std::iter::once(&header).chain(&lines) {
                let cells: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                println!("{}", cells.join("  ").trim_end());
            }
        }
    }
    Ok(())
}

/// Weighted by trials × test points. A single-row group is passed through
/// verbatim so `table` reproduces `run` output exactly.
fn aggregate(g: &Group) -> anyhow::Result<(String, String, String)> {
    if let [row] = g.rows.as_slice() {
        return Ok((row["atk_mean"].clone(), row["atk_ci95"].clone(), row["err_mean"].clone()));
    }
    let num = |row: &BTreeMap<String, String>, c: &str| -> anyhow::Result<f64> {
        row[c].parse::<f64>().with_context(|| format!("column {c}: {:?} is not a number", row[c]))
    };
    let (mut w_sum, mut atk, mut err, mut var) = (0.0, 0.0, 0.0, 0.0);
    for row in &g.rows {
        let w = num(row, "trials")? * num(row, "test_points")?;
        if !(w > 0.0) {
            bail!("row with no test points");
        }
        w_sum += w;
        atk += w * num(row, "atk_mean")?;
        err += w * num(row, "err_mean")?;
        var += (w * num(row, "atk_ci95")?).powi(2);
    }
    Ok((format_g17(atk / w_sum), format_g17(var.sqrt() / w_sum), format_g17(err / w_sum)))
}
