//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Lists are comma separated
//! and integer ranges may be written `1..3` (inclusive). Later sources
//! override earlier ones: file, then `--set`, then dedicated flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use restriction_core::arith::is_prime;
use restriction_core::{Exponent, GroupSpec, DEFAULT_SIZE_CAP};
use serde::Serialize;

pub type RawConfig = BTreeMap<String, String>;

const KEYS: &[&str] = &[
    "p",
    "alpha",
    "n",
    "N",
    "q",
    "group",
    "measure",
    "graph",
    "weights",
    "a",
    "b",
    "seed",
    "samples",
    "conv_samples",
    "lorentz_samples",
    "exhaustive_cap",
    "size_cap",
    "out",
    "format",
    "cache_dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureChoice {
    Paraboloid,
    /// Graph of a polynomial in `n - 1` variables.
    Graph(String),
    /// Whitespace or comma separated weights in row-major order.
    Weights(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub groups: Vec<GroupSpec>,
    pub measure: MeasureChoice,
    pub a: Option<Exponent>,
    pub b: Option<Exponent>,
    pub seed: u64,
    pub samples: usize,
    pub conv_samples: usize,
    pub lorentz_samples: usize,
    pub exhaustive_cap: usize,
    pub size_cap: u64,
    pub out: PathBuf,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
}

pub fn parse_text(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
        insert(&mut raw, k.trim(), v.trim())?;
    }
    Ok(raw)
}

pub fn load_file(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_text(&text)
}

/// Inserts `key=value`, rejecting unknown keys.
pub fn insert(raw: &mut RawConfig, key: &str, value: &str) -> Result<()> {
    if !KEYS.contains(&key) && !key.starts_with("poly.") {
        bail!("unknown config key '{key}'");
    }
    raw.insert(key.to_string(), value.to_string());
    Ok(())
}

pub fn insert_assignment(raw: &mut RawConfig, assignment: &str) -> Result<()> {
    let (k, v) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got '{assignment}'"))?;
    insert(raw, k.trim(), v.trim())
}

fn int_list(key: &str, text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().with_context(|| format!("{key}: bad range start '{lo}'"))?;
            let hi: u64 = hi.trim().parse().with_context(|| format!("{key}: bad range end '{hi}'"))?;
            if lo > hi {
                bail!("{key}: empty range {part}");
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().with_context(|| format!("{key}: '{part}' is not an integer"))?);
        }
    }
    Ok(out)
}

/// Integers, fractions `p/q` and finite decimals.
pub fn parse_exponent(text: &str) -> Result<Exponent> {
    let t = text.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 9 {
            bail!("cannot parse exponent '{t}'");
        }
        let scale = 10i64.pow(frac.len() as u32);
        let negative = whole.starts_with('-');
        let w: i64 = if whole.is_empty() || whole == "-" { 0 } else { whole.parse()? };
        let f: i64 = frac.parse()?;
        let num = w.abs() * scale + f;
        return Ok(Exponent::new(if negative { -num } else { num }, scale));
    }
    t.parse::<Exponent>().map_err(|_| anyhow!("cannot parse exponent '{t}'"))
}

fn parse_num<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T> {
    match raw.get(key) {
        Some(v) => v.parse().map_err(|_| anyhow!("{key}: cannot parse '{v}'")),
        None => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self> {
        let size_cap = parse_num(raw, "size_cap", DEFAULT_SIZE_CAP)?;
        let groups = build_grid(raw, size_cap)?;
        let implied = match (raw.get("weights"), raw.get("graph")) {
            (Some(_), Some(_)) if raw.get("measure").is_none() => bail!("both graph and weights given; set measure"),
            (Some(_), _) => "weights",
            (_, Some(_)) => "graph",
            _ => "paraboloid",
        };
        let measure = match raw.get("measure").map(String::as_str).unwrap_or(implied) {
            "paraboloid" => MeasureChoice::Paraboloid,
            "graph" => MeasureChoice::Graph(raw.get("graph").cloned().ok_or_else(|| anyhow!("measure = graph needs a graph key"))?),
            "weights" => MeasureChoice::Weights(
                raw.get("weights")
                    .map(PathBuf::from)
                    .ok_or_else(|| anyhow!("measure = weights needs a weights key"))?,
            ),
            other => bail!("unknown measure '{other}' (paraboloid, graph, weights)"),
        };
        let format = match raw.get("format") {
            Some(f) => Format::from_str(f, true).map_err(|_| anyhow!("format must be json, csv or both"))?,
            None => Format::Both,
        };
        Ok(RunConfig {
            groups,
            measure,
            a: raw.get("a").map(|s| parse_exponent(s)).transpose()?,
            b: raw.get("b").map(|s| parse_exponent(s)).transpose()?,
            seed: parse_num(raw, "seed", 0)?,
            samples: parse_num(raw, "samples", 10_000)?,
            conv_samples: parse_num(raw, "conv_samples", 1_000)?,
            lorentz_samples: parse_num(raw, "lorentz_samples", 64)?,
            exhaustive_cap: parse_num(raw, "exhaustive_cap", 16)?,
            size_cap,
            out: raw.get("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("reports")),
            format,
            cache_dir: raw.get("cache_dir").map(PathBuf::from),
        })
    }

    /// Exponents for rank `n`, defaulting to `a = b = n - 1`.
    pub fn exponents(&self, n: usize) -> (Exponent, Exponent) {
        let d = Exponent::from_integer(n as i64 - 1);
        (self.a.unwrap_or(d), self.b.unwrap_or(d))
    }
}

fn build_grid(raw: &RawConfig, size_cap: u64) -> Result<Vec<GroupSpec>> {
    let mut specs: Vec<GroupSpec> = Vec::new();
    if let Some(list) = raw.get("group") {
        for label in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            specs.push(label.parse()?);
        }
    }
    let ns = int_list("n", raw.get("n").map(String::as_str).unwrap_or("2"))?;
    let alphas = int_list("alpha", raw.get("alpha").map(String::as_str).unwrap_or("1"))?;
    let ps = int_list("p", raw.get("p").map(String::as_str).unwrap_or(""))?;
    let moduli = int_list("N", raw.get("N").map(String::as_str).unwrap_or(""))?;
    let qs = int_list("q", raw.get("q").map(String::as_str).unwrap_or(""))?;
    for &p in &ps {
        if p % 2 == 0 || !is_prime(p) {
            bail!("p must be an odd prime (got {p})");
        }
    }
    if let Some(&a) = alphas.iter().find(|&&a| a == 0) {
        bail!("alpha must be at least 1 (got {a})");
    }
    if let Some(&n) = ns.iter().find(|&&n| n == 0) {
        bail!("n must be at least 1 (got {n})");
    }
    if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
        bail!("N must be at least 2 (got {m})");
    }
    for &n in &ns {
        let n = n as usize;
        for &p in &ps {
            for &alpha in &alphas {
                let m = p
                    .checked_pow(alpha as u32)
                    .ok_or_else(|| anyhow!("{p}^{alpha} overflows"))?;
                specs.push(GroupSpec::cyclic(m, n));
            }
        }
        for &m in &moduli {
            specs.push(GroupSpec::cyclic(m, n));
        }
        for &q in &qs {
            let spec = match raw.get(&format!("poly.{q}")) {
                Some(poly) => {
                    let coeffs = int_list(&format!("poly.{q}"), poly)?;
                    let p = restriction_core::arith::prime_power(q)
                        .ok_or_else(|| anyhow!("field order {q} is not a prime power"))?
                        .0;
                    GroupSpec::finite_field(p, coeffs, n)
                }
                None => GroupSpec::field_of_order(q, n)?,
            };
            specs.push(spec);
        }
    }
    let mut seen = std::collections::HashSet::new();
    specs.retain(|s| seen.insert(s.clone()));
    if specs.is_empty() {
        bail!("no groups configured (set group, p, N or q)");
    }
    for s in &specs {
        if s.cardinality() > size_cap as u128 {
            bail!("{s} has {} points, above the size cap {size_cap}", s.cardinality());
        }
    }
    Ok(specs)
}
