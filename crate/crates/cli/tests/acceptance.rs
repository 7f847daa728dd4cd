//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every line is printed
//! regardless of output capture. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use restriction_core::balls::{check_conditions, verify_axioms};
use restriction_core::char_sums::{quad_sum_bruteforce, quad_sum_closed, QuadSumInput};
use restriction_core::exponents::to_f64;
use restriction_core::measures::{norm_decay_constant, paraboloid_measure};
use restriction_core::verifier::{
    check_decomposition_bounds, convolution_rwt_scan, l2_operator_norm, restricted_weak_type_scan, restriction_ratio,
};
use restriction_core::{
    arith, DualMeasure, Domain, Exponent, ExponentProfile, GFunction, Group, GroupSpec, LpSystem, MeasureProfile,
    ScanStrategy, VerificationReport, DEFAULT_SIZE_CAP,
};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

/// Grid shared by criteria 1, 2, 4 and 6: `F_q^n` for `q ∈ {3, 5, 7}` and
/// `[Z/p^αZ]^n` for `p ∈ {3, 5, 7}`, `α ≤ 3`, with `n ∈ {2, 3}` under the size cap.
fn grid() -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        for q in [3u64, 5, 7] {
            out.push(GroupSpec::prime_field(q, n));
        }
        for p in [3u64, 5, 7] {
            for alpha in 1..=3u32 {
                let spec = GroupSpec::cyclic(p.pow(alpha), n);
                if spec.cardinality() <= DEFAULT_SIZE_CAP as u128 {
                    out.push(spec);
                }
            }
        }
    }
    out
}

struct Setup {
    spec: GroupSpec,
    group: Group,
    sys: LpSystem,
    mu: DualMeasure,
    profile: MeasureProfile,
}

fn setup(spec: &GroupSpec) -> Setup {
    let group = Group::new(spec.clone()).expect("grid group");
    let sys = LpSystem::build(&group).expect("system");
    let mu = paraboloid_measure(&group).expect("paraboloid");
    let d = Exponent::from_integer(group.rank() as i64 - 1);
    let profile = MeasureProfile::analyze(&mu, &sys, d, d).expect("profile");
    Setup {
        spec: spec.clone(),
        group,
        sys,
        mu,
        profile,
    }
}

fn first_failure(report: &VerificationReport) -> String {
    report
        .failures()
        .next()
        .map(|f| format!("{} observed {} bound {} {:?}", f.check, f.observed, f.bound, f.witness))
        .unwrap_or_default()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed > limit {
        return Err(format!("took {:.1}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()));
    }
    Ok(())
}

fn criterion_1(setups: &[Setup], build_time: Duration) -> Outcome {
    for s in setups {
        let c = s.sys.constants();
        for (name, v) in [("C1", c.c1), ("C2", c.c2), ("C3", c.c3)] {
            if (v - 1.0).abs() > TOL {
                return Err(format!("{}: {name} = {v}", s.spec));
            }
        }
    }
    within(build_time, Duration::from_secs(120))?;
    Ok(format!("{} systems, (C1, C2, C3) = (1, 1, 1), built in {:.1}s", setups.len(), build_time.as_secs_f64()))
}

fn criterion_2(setups: &[Setup]) -> Outcome {
    let mut points = 0usize;
    for s in setups {
        let n = s.group.rank() as i64;
        if (s.profile.a_const - 1.0).abs() > TOL {
            return Err(format!("{}: A = {}", s.spec, s.profile.a_const));
        }
        if s.profile.b_const > 1.0 + TOL {
            return Err(format!("{}: B = {}", s.spec, s.profile.b_const));
        }
        let (c, x) = norm_decay_constant(&s.mu, &s.group, Exponent::from_integer(n - 1)).map_err(|e| e.to_string())?;
        if c > 1.0 + TOL {
            return Err(format!("{}: |check mu(x)| ||x||^((n-1)/2) = {c} at {:?}", s.spec, s.group.point(x).coords));
        }
        points += s.group.size();
    }
    Ok(format!("A = 1, B <= 1 on {} systems; pointwise decay law on {points} points", setups.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0usize;
    let mut worst = 0.0f64;
    for p in [3u64, 5, 7] {
        let mut alpha = 1u32;
        while p.pow(alpha) <= 343 {
            let m = p.pow(alpha);
            let norm = |x: u64| m / arith::gcd(x, m);
            for a in 0..m {
                for b in 0..m {
                    let input = QuadSumInput::new(a, b, p, alpha).map_err(|e| e.to_string())?;
                    let closed = quad_sum_closed(&input).map_err(|e| e.to_string())?;
                    let brute = quad_sum_bruteforce(&input);
                    let diff = (closed - brute).norm();
                    worst = worst.max(diff);
                    if diff > TOL {
                        return Err(format!("p^alpha = {m}, a = {a}, b = {b}: |closed - brute| = {diff}"));
                    }
                    if norm(a).max(norm(b)) > 1 {
                        let big = m as f64 / (norm(b) as f64).sqrt();
                        let v = brute.norm();
                        if v > TOL && (v - big).abs() > TOL {
                            return Err(format!("p^alpha = {m}, a = {a}, b = {b}: |S| = {v} not in {{0, {big}}}"));
                        }
                    }
                    pairs += 1;
                }
            }
            alpha += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{pairs} pairs, max |closed - brute| = {worst:.2e}, {:.1}s", start.elapsed().as_secs_f64()))
}

fn criterion_4(setups: &[Setup]) -> Outcome {
    let mut rows = 0usize;
    for s in setups {
        let rep = check_decomposition_bounds(&s.mu, &s.sys, &s.profile).map_err(|e| e.to_string())?;
        if !rep.pass {
            return Err(format!("{}: {}", s.spec, first_failure(&rep)));
        }
        rows += rep.records.len();
    }
    Ok(format!("{rows} scale rows over {} systems, zero violations", setups.len()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut specs = vec![GroupSpec::cyclic(3, 2)];
    for n in [2usize, 3] {
        for q in [3u64, 5, 7] {
            specs.push(GroupSpec::prime_field(q, n));
        }
    }
    let mut scanned = 0.0;
    for spec in &specs {
        let s = setup(spec);
        let ground: Vec<usize> = (0..s.group.size().min(15)).collect();
        let strategy = ScanStrategy {
            ground: Some(ground.clone()),
            exhaustive_cap: 15,
            ..ScanStrategy::exhaustive()
        };
        let rep = restricted_weak_type_scan(&s.mu, &s.sys, &s.profile, &strategy).map_err(|e| e.to_string())?;
        if !rep.pass {
            return Err(format!("{spec}: {}", first_failure(&rep)));
        }
        let count = rep
            .records_for("restriction.envelope.violations")
            .next()
            .and_then(|r| r.params["scanned"].as_f64())
            .unwrap_or(0.0);
        if count != ((1u64 << ground.len()) - 1) as f64 {
            return Err(format!("{spec}: scanned {count} sets"));
        }
        scanned += count;
        let prof = ExponentProfile::new(s.group.rank(), s.profile.a, s.profile.b).map_err(|e| e.to_string())?;
        let delta = GFunction::indicator(&s.group, Domain::Primal, [0]);
        let energy = restriction_ratio(&s.group, &delta, prof.r0, &s.mu).map_err(|e| e.to_string())?.powi(2);
        let reference = energy / 1f64.powf(2.0 / to_f64(prof.r0));
        if (reference - 1.0).abs() > TOL {
            return Err(format!("{spec}: E = {{0}} reference ratio {reference}"));
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{scanned} subsets over {} groups, zero violations, E = {{0}} ratio 1, {:.1}s",
        specs.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_6(setups: &[Setup]) -> Outcome {
    let mut worst = 0.0f64;
    for s in setups {
        let op = l2_operator_norm(&s.group, &s.mu, 17, 10_000).map_err(|e| format!("{}: {e}", s.spec))?;
        let expected = s.group.size() as f64 * s.mu.max_weight();
        if (op.closed_form - expected).abs() > 1e-12 * expected {
            return Err(format!("{}: closed form {} vs {expected}", s.spec, op.closed_form));
        }
        let rel = (op.power_iter - op.closed_form).abs() / op.closed_form;
        worst = worst.max(rel);
        if rel > 1e-6 {
            return Err(format!("{}: power {} vs closed {}", s.spec, op.power_iter, op.closed_form));
        }
        if s.spec == GroupSpec::cyclic(3, 2) && (op.closed_form - 3.0).abs() > TOL {
            return Err(format!("Z3^2: operator norm {}", op.closed_form));
        }
    }
    Ok(format!("{} systems, max relative gap {worst:.2e}, Z3^2 value 3", setups.len()))
}

fn criterion_7() -> Outcome {
    let s = setup(&GroupSpec::cyclic(9, 2));
    let rep = convolution_rwt_scan(&s.mu, &s.sys, &s.profile, &ScanStrategy::random(1000, 2024)).map_err(|e| e.to_string())?;
    if !rep.pass {
        return Err(first_failure(&rep));
    }
    let scanned = rep
        .records_for("convolution.envelope.violations")
        .next()
        .and_then(|r| r.params["scanned"].as_u64())
        .unwrap_or(0);
    if scanned < 1000 {
        return Err(format!("only {scanned} pairs scanned"));
    }
    Ok(format!("{scanned} pairs (1000 random + structured) over Z9^2, zero violations"))
}

fn criterion_8() -> Outcome {
    let mut systems = 0;
    for m in [6u64, 12, 30] {
        for n in [1usize, 2] {
            let g = Group::new(GroupSpec::cyclic(m, n)).map_err(|e| e.to_string())?;
            let sys = LpSystem::build(&g).map_err(|e| e.to_string())?;
            for rep in [verify_axioms(&sys), check_conditions(&sys)] {
                if !rep.pass {
                    return Err(format!("Z{m}^{n}: {}", first_failure(&rep)));
                }
            }
            systems += 1;
        }
    }
    Ok(format!("{systems} composite systems: axioms on both families and (R), (F), (F') hold"))
}

fn run_cli(out: &Path, cache: Option<&Path>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_restriction"));
    cmd.args(["verify", "--group", "Z9^2", "--samples", "10000", "--seed", "42", "--format", "json", "--out"])
        .arg(out);
    if let Some(c) = cache {
        cmd.arg("--cache-dir").arg(c);
    }
    let status = cmd.output().map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    std::fs::read(out.join("verify.json")).map_err(|e| e.to_string())
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_cli(&tmp.path().join("a"), None)?;
    let b = run_cli(&tmp.path().join("b"), None)?;
    if a != b {
        return Err("two fresh runs differ".into());
    }
    let cache = tmp.path().join("cache");
    let c = run_cli(&tmp.path().join("c"), Some(&cache))?;
    let d = run_cli(&tmp.path().join("d"), Some(&cache))?;
    if c != a || d != a {
        return Err("cached run differs from fresh run".into());
    }
    Ok(format!("4 verify runs on Z9^2 (seed 42, 10^4 samples) byte-identical, {} bytes", a.len()))
}

fn main() {
    let build_start = Instant::now();
    let setups: Vec<Setup> = grid().iter().map(setup).collect();
    let build_time = build_start.elapsed();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("system constants (C1, C2, C3) = (1, 1, 1)", Box::new(|| criterion_1(&setups, build_time))),
        ("paraboloid A = 1, B <= 1, pointwise decay", Box::new(|| criterion_2(&setups))),
        ("Gauss sum closed form vs brute force", Box::new(criterion_3)),
        ("decomposition bounds at every scale", Box::new(|| criterion_4(&setups))),
        ("exhaustive restriction envelope", Box::new(criterion_5)),
        ("operator norm power iteration vs closed form", Box::new(|| criterion_6(&setups))),
        ("convolution envelope on Z9^2", Box::new(criterion_7)),
        ("composite modulus axioms and conditions", Box::new(criterion_8)),
        ("byte-identical verify reports", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {title}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {title}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
