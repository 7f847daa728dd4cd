//! `restriction`: run finite-group restriction checks over parameter grids.

mod cache;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use restriction_core::SystemConstants;

use crate::config::{Format, RawConfig, RunConfig};

#[derive(Parser)]
#[command(name = "restriction", version, about = "Restriction estimates on finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ball axioms and conditions (R), (F), (F') with the constants C1, C2, C3.
    SystemCheck(Common),
    /// Measure constants A, B and the measure conditions.
    MeasureAnalyze(Common),
    /// Decomposition bounds, envelope scans, operator norm and Lorentz ratios.
    Verify(Common),
    /// Envelope scans only, with reference ratios per group.
    Scan(Common),
    /// Print the exponent profile and constants for (n, a, b).
    Exponents(ExponentArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    exhaustive_cap: Option<usize>,
    #[arg(long)]
    size_cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Group label such as Z9^2 or F3^2; repeatable.
    #[arg(long = "group")]
    groups: Vec<String>,
    /// Any config key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c3: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    a_const: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    b_const: f64,
    /// The unspecified dimensional constant in C_bar.
    #[arg(long, default_value_t = 1.0)]
    c_nab: f64,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut raw = match &self.config {
            Some(path) => config::load_file(path)?,
            None => RawConfig::new(),
        };
        for s in &self.set {
            config::insert_assignment(&mut raw, s)?;
        }
        let flags: [(&str, Option<String>); 7] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("samples", self.samples.map(|v| v.to_string())),
            ("exhaustive_cap", self.exhaustive_cap.map(|v| v.to_string())),
            ("size_cap", self.size_cap.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("cache_dir", self.cache_dir.as_ref().map(|p| p.display().to_string())),
            (
                "format",
                self.format.map(|f| match f {
                    Format::Json => "json".to_string(),
                    Format::Csv => "csv".to_string(),
                    Format::Both => "both".to_string(),
                }),
            ),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                config::insert(&mut raw, k, &v)?;
            }
        }
        if !self.groups.is_empty() {
            config::insert(&mut raw, "group", &self.groups.join(","))?;
        }
        RunConfig::resolve(&raw)
    }
}

fn run_grid(common: &Common, f: fn(&RunConfig) -> Result<commands::Outcome>) -> Result<bool> {
    let cfg = common.resolve()?;
    let start = Instant::now();
    let outcome = f(&cfg)?;
    output::write_outputs(&outcome, &cfg, start.elapsed())?;
    print!("{}", output::summary(&outcome));
    Ok(outcome.pass())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::SystemCheck(c) => run_grid(&c, commands::system_check),
        Command::MeasureAnalyze(c) => run_grid(&c, commands::measure_analyze),
        Command::Verify(c) => run_grid(&c, commands::verify),
        Command::Scan(c) => run_grid(&c, commands::scan),
        Command::Exponents(e) => {
            let req = commands::ExponentRequest {
                n: e.n,
                a: config::parse_exponent(&e.a)?,
                b: config::parse_exponent(&e.b)?,
                constants: SystemConstants {
                    c1: e.c1,
                    c2: e.c2,
                    c3: e.c3,
                    a_const: e.a_const,
                    b_const: e.b_const,
                },
                c_nab: e.c_nab,
            };
            print!("{}", commands::exponents_table(&req)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
