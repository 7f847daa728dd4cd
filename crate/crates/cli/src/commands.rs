use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use restriction_core::balls::{check_conditions, verify_axioms};
use restriction_core::char_sums::paraboloid_transform_closed;
use restriction_core::exponents::{cbar_constant, to_f64};
use restriction_core::measures::{
    check_measure_conditions, graph_measure, inverse_transform_measure, norm_decay_constant, paraboloid_measure,
};
use restriction_core::verifier::{convolution_rwt_scan, restricted_weak_type_scan};
use restriction_core::{
    arith, verify_suite, DualMeasure, Exponent, ExponentProfile, Group, GroupSpec, LpSystem, Measurement, MeasureProfile,
    Polynomial, Record, ScanStrategy, SuiteOptions, SystemConstants, VerificationReport,
};
use serde::Serialize;

use crate::cache::{self, Cache};
use crate::config::{MeasureChoice, RunConfig};

pub struct Outcome {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub reports: Vec<VerificationReport>,
    pub cache_hits: usize,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

struct GridPoint<'a> {
    group: Group,
    sys: LpSystem,
    cfg: &'a RunConfig,
}

fn context<'a>(cfg: &'a RunConfig, spec: &GroupSpec) -> Result<GridPoint<'a>> {
    let group = Group::with_cap(spec.clone(), cfg.size_cap)?;
    let sys = LpSystem::build(&group)?;
    Ok(GridPoint { group, sys, cfg })
}

fn build_measure(cfg: &RunConfig, g: &Group) -> Result<DualMeasure> {
    Ok(match &cfg.measure {
        MeasureChoice::Paraboloid => paraboloid_measure(g)?,
        MeasureChoice::Graph(text) => {
            if g.rank() < 2 {
                bail!("graph measures need rank at least 2");
            }
            graph_measure(g, &Polynomial::parse(text, g.rank() - 1)?)?
        }
        MeasureChoice::Weights(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading weights {}", path.display()))?;
            let weights = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().with_context(|| format!("bad weight '{s}'")))
                .collect::<Result<Vec<_>>>()?;
            if weights.len() != g.size() {
                bail!("weights file has {} entries, {} needs {}", weights.len(), g.spec(), g.size());
            }
            DualMeasure::new(g, weights)?
        }
    })
}

fn profile(ctx: &GridPoint, mu: &DualMeasure) -> Result<MeasureProfile> {
    let (a, b) = ctx.cfg.exponents(ctx.group.rank());
    Ok(MeasureProfile::analyze(mu, &ctx.sys, a, b)?)
}

/// Runs `f` on every grid point in parallel, keeping grid order.
fn per_group<T: Send>(cfg: &RunConfig, f: impl Fn(&GroupSpec) -> Result<T> + Sync) -> Result<Vec<T>> {
    cfg.groups
        .par_iter()
        .map(|s| f(s).with_context(|| format!("group {s}")))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn system_check(cfg: &RunConfig) -> Result<Outcome> {
    let reports = per_group(cfg, |spec| {
        let ctx = context(cfg, spec)?;
        let mut report = VerificationReport::new("system_check", spec.label());
        report.absorb(verify_axioms(&ctx.sys));
        report.absorb(check_conditions(&ctx.sys));
        let c = ctx.sys.constants();
        for (name, v) in [("C1", c.c1), ("C2", c.c2), ("C3", c.c3)] {
            report.measure(Measurement::new(name, v).param("kind", format!("{:?}", ctx.sys.kind())));
        }
        Ok(report)
    })?;
    Ok(Outcome {
        command: "system-check",
        seed: None,
        reports,
        cache_hits: 0,
    })
}

pub fn measure_analyze(cfg: &RunConfig) -> Result<Outcome> {
    let reports = per_group(cfg, |spec| {
        let ctx = context(cfg, spec)?;
        let mu = build_measure(cfg, &ctx.group)?;
        let prof = profile(&ctx, &mu)?;
        let mut report = VerificationReport::new("measure_analyze", spec.label());
        report.absorb(check_measure_conditions(&mu, &ctx.sys, &prof)?);
        report.measure(Measurement::new("A", prof.a_const).param("a", prof.a.to_string()));
        report.measure(Measurement::new("B", prof.b_const).param("b", prof.b.to_string()));
        if cfg.measure == MeasureChoice::Paraboloid {
            let n = ctx.group.rank();
            let (c, x) = norm_decay_constant(&mu, &ctx.group, Exponent::from_integer(n as i64 - 1))?;
            report.push(
                Record::bounded("paraboloid.decay_law", 1.0, c).with_witness(format!("x {:?}", ctx.group.point(x).coords)),
            );
            if let GroupSpec::CyclicModule { modulus, .. } = spec {
                if arith::prime_power(*modulus).is_some_and(|(p, _)| p % 2 == 1) {
                    let check = inverse_transform_measure(&ctx.group, &mu)?;
                    let mut worst = 0.0f64;
                    for (i, v) in check.values().iter().enumerate() {
                        let closed = paraboloid_transform_closed(spec, &ctx.group.point(i))?;
                        worst = worst.max((closed - v).norm());
                    }
                    report.push(Record::bounded("char_sums.closed_form", 1e-9, worst));
                }
            }
        }
        Ok(report)
    })?;
    Ok(Outcome {
        command: "measure-analyze",
        seed: None,
        reports,
        cache_hits: 0,
    })
}

#[derive(Serialize)]
struct CacheKey<'a> {
    command: &'a str,
    spec: &'a GroupSpec,
    measure: &'a DualMeasure,
    a: String,
    b: String,
    options: &'a SuiteOptions,
}

fn suite_options(cfg: &RunConfig) -> SuiteOptions {
    SuiteOptions {
        seed: cfg.seed,
        samples: cfg.samples,
        conv_samples: cfg.conv_samples,
        exhaustive_cap: cfg.exhaustive_cap,
        lorentz_samples: cfg.lorentz_samples,
        ..SuiteOptions::default()
    }
}

/// Runs `run` per group, consulting the cache when one is configured.
fn cached(
    cfg: &RunConfig,
    command: &'static str,
    run: impl Fn(&GridPoint, &DualMeasure, &MeasureProfile, &SuiteOptions) -> Result<VerificationReport> + Sync,
) -> Result<Outcome> {
    let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;
    let opts = suite_options(cfg);
    let results = per_group(cfg, |spec| {
        let ctx = context(cfg, spec)?;
        let mu = build_measure(cfg, &ctx.group)?;
        let (a, b) = cfg.exponents(ctx.group.rank());
        let key = cache::key(&CacheKey {
            command,
            spec,
            measure: &mu,
            a: a.to_string(),
            b: b.to_string(),
            options: &opts,
        });
        if let Some(hit) = cache.as_ref().and_then(|c| c.load(&key)) {
            return Ok((hit, true));
        }
        let prof = profile(&ctx, &mu)?;
        let report = run(&ctx, &mu, &prof, &opts)?;
        if let Some(c) = &cache {
            c.store(&key, &report)?;
        }
        Ok((report, false))
    })?;
    let cache_hits = results.iter().filter(|r| r.1).count();
    Ok(Outcome {
        command,
        seed: Some(cfg.seed),
        reports: results.into_iter().map(|r| r.0).collect(),
        cache_hits,
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    cached(cfg, "verify", |ctx, mu, prof, opts| Ok(verify_suite(mu, &ctx.sys, prof, opts)?))
}

/// Both envelope scans only, for comparing reference ratios across the grid.
pub fn scan(cfg: &RunConfig) -> Result<Outcome> {
    cached(cfg, "scan", |ctx, mu, prof, opts| {
        let mut report = VerificationReport::new("scan", ctx.sys.label()).with_seed(opts.seed);
        let weak = ScanStrategy::auto(ctx.group.size(), opts.samples, opts.seed, opts.exhaustive_cap);
        report.absorb(restricted_weak_type_scan(mu, &ctx.sys, prof, &weak)?);
        let conv = ScanStrategy::random(opts.conv_samples, opts.seed);
        report.absorb(convolution_rwt_scan(mu, &ctx.sys, prof, &conv)?);
        report.measure(Measurement::new("group_size", ctx.group.size() as f64));
        Ok(report)
    })
}

pub struct ExponentRequest {
    pub n: usize,
    pub a: Exponent,
    pub b: Exponent,
    pub constants: SystemConstants,
    pub c_nab: f64,
}

pub fn exponents_table(req: &ExponentRequest) -> Result<String> {
    let prof = ExponentProfile::new(req.n, req.a, req.b)?;
    let mut out = format!("n = {}, a = {}, b = {}\n", req.n, req.a, req.b);
    for (name, v) in prof.rows().into_iter().skip(2) {
        out.push_str(&format!("{name:<10} {:<10} {:.6}\n", v.to_string(), to_f64(v)));
    }
    let c = &req.constants;
    out.push_str(&format!(
        "K1         {:.6}  (C1 = {}, C2 = {}, A = {})\n",
        c.k1(&prof),
        c.c1,
        c.c2,
        c.a_const
    ));
    out.push_str(&format!(
        "C_bar      {:.6}  (C_nab = {} is user-supplied)\n",
        cbar_constant(&prof, c, req.c_nab),
        req.c_nab
    ));
    Ok(out)
}
