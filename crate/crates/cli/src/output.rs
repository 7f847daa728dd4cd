//! Report files and the terminal summary.
//!
//! `<command>.json` holds every report and is byte-identical across runs
//! with the same inputs. Timing lives in `<command>.manifest.json`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use restriction_core::{VerificationReport, SCHEMA_VERSION};
use serde::Serialize;
use serde_json::Value;

use crate::commands::Outcome;
use crate::config::RunConfig;

pub const CSV_HEADER: [&str; 7] = ["system", "n", "scale", "quantity", "bound", "observed", "pass"];

#[derive(Serialize)]
struct RunDocument<'a> {
    schema_version: u32,
    command: &'a str,
    seed: Option<u64>,
    pass: bool,
    reports: &'a [VerificationReport],
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    command: &'a str,
    version: &'a str,
    seed: Option<u64>,
    groups: Vec<String>,
    wall_clock_seconds: f64,
    cache_hits: usize,
    files: Vec<String>,
}

pub fn document_json(outcome: &Outcome) -> String {
    let doc = RunDocument {
        schema_version: SCHEMA_VERSION,
        command: outcome.command,
        seed: outcome.seed,
        pass: outcome.pass(),
        reports: &outcome.reports,
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
}

fn rank_of(subject: &str) -> String {
    subject.rsplit_once('^').map(|(_, n)| n.to_string()).unwrap_or_default()
}

fn fmt_value(v: Option<&Value>) -> String {
    match v {
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

pub fn write_csv<W: Write>(out: W, reports: &[VerificationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        let n = rank_of(&r.subject);
        for rec in &r.records {
            w.write_record([
                r.subject.clone(),
                n.clone(),
                fmt_value(rec.params.get("rho")),
                rec.check.clone(),
                rec.bound.to_string(),
                rec.observed.to_string(),
                rec.pass.to_string(),
            ])?;
        }
        for m in &r.measurements {
            w.write_record([
                r.subject.clone(),
                n.clone(),
                fmt_value(m.params.get("rho")),
                m.name.clone(),
                String::new(),
                m.value.to_string(),
                String::new(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_outputs(outcome: &Outcome, cfg: &RunConfig, elapsed: Duration) -> Result<Vec<PathBuf>> {
    let dir: &Path = &cfg.out;
    std::fs::create_dir_all(dir).with_context(|| format!("creating output dir {}", dir.display()))?;
    let mut files = Vec::new();
    if cfg.format.json() {
        let path = dir.join(format!("{}.json", outcome.command));
        std::fs::write(&path, document_json(outcome))?;
        files.push(path);
    }
    if cfg.format.csv() {
        let path = dir.join(format!("{}.csv", outcome.command));
        write_csv(std::fs::File::create(&path)?, &outcome.reports)?;
        files.push(path);
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        command: outcome.command,
        version: env!("CARGO_PKG_VERSION"),
        seed: outcome.seed,
        groups: cfg.groups.iter().map(|g| g.label()).collect(),
        wall_clock_seconds: elapsed.as_secs_f64(),
        cache_hits: outcome.cache_hits,
        files: files.iter().map(|p| p.display().to_string()).collect(),
    };
    let path = dir.join(format!("{}.manifest.json", outcome.command));
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    files.push(path);
    Ok(files)
}

pub fn summary(outcome: &Outcome) -> String {
    let mut s = String::new();
    for r in &outcome.reports {
        let failures: Vec<&str> = r.failures().map(|f| f.check.as_str()).collect();
        s.push_str(&format!(
            "{:<10} {:<16} {:>5} records  {}\n",
            r.subject,
            r.suite,
            r.records.len(),
            if r.pass { "PASS" } else { "FAIL" }
        ));
        for f in r.failures().take(5) {
            s.push_str(&format!(
                "    {} observed {} > bound {}{}\n",
                f.check,
                f.observed,
                f.bound,
                f.witness.as_deref().map(|w| format!(" at {w}")).unwrap_or_default()
            ));
        }
        if failures.len() > 5 {
            s.push_str(&format!("    ... {} more failures\n", failures.len() - 5));
        }
        for m in r.measurements.iter().filter(|m| m.name.ends_with("max_reference_ratio") || m.name.len() <= 2) {
            s.push_str(&format!("    {} = {}\n", m.name, m.value));
        }
    }
    s
}
