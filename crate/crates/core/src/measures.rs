//! Finite measures on `Ĝ` and their regularity/decay constants.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::balls::{norm_index, scale_value, LpSystem};
use crate::error::{Error, Result};
use crate::exponents::Exponent;
use crate::group::{Domain, GFunction, Group, GroupSpec};
use crate::report::{Record, VerificationReport};

const LEFT_LIMIT: f64 = 1e-9;

/// Nonnegative weights on the points of `Ĝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMeasure {
    spec: GroupSpec,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SparseMeasure {
    spec: GroupSpec,
    weights: BTreeMap<usize, f64>,
}

impl Serialize for DualMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SparseMeasure {
            spec: self.spec.clone(),
            weights: self
                .weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(i, &w)| (i, w))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let sparse = SparseMeasure::deserialize(d)?;
        let size = sparse.spec.cardinality();
        let mut weights = vec![0.0; size as usize];
        for (i, w) in sparse.weights {
            if i as u128 >= size {
                return Err(D::Error::custom(format!("point index {i} outside the group")));
            }
            weights[i] = w;
        }
        Ok(DualMeasure {
            spec: sparse.spec,
            weights,
        })
    }
}

impl DualMeasure {
    pub fn new(group: &Group, weights: Vec<f64>) -> Result<Self> {
        let m = DualMeasure {
            spec: group.spec().clone(),
            weights,
        };
        m.validate(group)?;
        Ok(m)
    }

    /// Checks sizes and signs; use after deserializing.
    pub fn validate(&self, group: &Group) -> Result<()> {
        if &self.spec != group.spec() {
            return Err(Error::SpecMismatch);
        }
        if self.weights.len() != group.size() {
            return Err(Error::DimensionMismatch {
                expected: group.size(),
                got: self.weights.len(),
            });
        }
        if let Some((i, w)) = self
            .weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::Measure(format!("weight {w} at point {i} is not a nonnegative number")));
        }
        Ok(())
    }

    pub fn point_mass(group: &Group, at: usize) -> Self {
        let mut w = vec![0.0; group.size()];
        w[at] = 1.0;
        DualMeasure {
            spec: group.spec().clone(),
            weights: w,
        }
    }

    /// Normalised counting measure on all of `Ĝ`.
    pub fn uniform(group: &Group) -> Self {
        DualMeasure {
            spec: group.spec().clone(),
            weights: vec![1.0 / group.size() as f64; group.size()],
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter_map(|(i, &w)| (w > 0.0).then_some(i))
            .collect()
    }

    fn complex_weights(&self) -> Vec<Complex64> {
        self.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect()
    }

    /// Density with respect to the mass-one measure on `Ĝ`: `|G| μ({ξ})`.
    pub fn density(&self, group: &Group) -> Result<GFunction> {
        self.check(group)?;
        let s = group.size() as f64;
        GFunction::new(group, Domain::Dual, self.weights.iter().map(|&w| Complex64::new(s * w, 0.0)).collect())
    }

    pub fn check(&self, group: &Group) -> Result<()> {
        if &self.spec != group.spec() {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }
}

/// `μ̌(x) = Σ_ξ μ({ξ}) <x, ξ>` as a function on `G`.
pub fn inverse_transform_measure(group: &Group, mu: &DualMeasure) -> Result<GFunction> {
    mu.check(group)?;
    GFunction::new(group, Domain::Primal, group.synthesis_values(&mu.complex_weights()))
}

/// A polynomial in `n - 1` variables with integer coefficients, evaluated
/// in the coordinate ring (`Z/NZ`, or `F_q` through its prime subfield).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<(i64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(vars: usize, terms: Vec<(i64, Vec<u32>)>) -> Result<Self> {
        if let Some((_, e)) = terms.iter().find(|(_, e)| e.len() != vars) {
            return Err(Error::Polynomial(format!(
                "monomial has {} exponents, expected {vars}",
                e.len()
            )));
        }
        Ok(Polynomial { vars, terms })
    }

    /// `ω_1² + ... + ω_vars²`.
    pub fn sum_of_squares(vars: usize) -> Self {
        let terms = (0..vars)
            .map(|i| {
                let mut e = vec![0; vars];
                e[i] = 2;
                (1, e)
            })
            .collect();
        Polynomial { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Parses sums of terms like `3*w1^2*w2`, `-w2`, `7`. Variables are
    /// `w1..wk` (or `x1..xk`).
    pub fn parse(text: &str, vars: usize) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Polynomial("empty polynomial".into()));
        }
        let mut pieces = Vec::new();
        let mut current = String::new();
        for (i, c) in cleaned.chars().enumerate() {
            if (c == '+' || c == '-') && i > 0 && !current.ends_with('^') {
                pieces.push(std::mem::take(&mut current));
            }
            current.push(c);
        }
        pieces.push(current);
        let mut terms = Vec::new();
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-1i64, rest.to_string()),
                None => (1, piece.trim_start_matches('+').to_string()),
            };
            let mut coeff = sign;
            let mut exps = vec![0u32; vars];
            for factor in body.split('*') {
                let bad = || Error::Polynomial(format!("cannot parse factor `{factor}` in `{text}`"));
                if let Some(rest) = factor.strip_prefix('w').or_else(|| factor.strip_prefix('x')) {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| bad())?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad())?;
                    if idx == 0 || idx > vars {
                        return Err(Error::Polynomial(format!(
                            "variable w{idx} outside w1..w{vars}"
                        )));
                    }
                    exps[idx - 1] += pow;
                } else {
                    coeff = coeff.checked_mul(factor.parse::<i64>().map_err(|_| bad())?).ok_or_else(bad)?;
                }
            }
            terms.push((coeff, exps));
        }
        Ok(Polynomial { vars, terms })
    }

    /// Value at `args` in the coordinate ring of `group`.
    pub fn evaluate(&self, group: &Group, args: &[u64]) -> u64 {
        match group.field() {
            Some(f) => self.terms.iter().fold(0, |acc, (c, e)| {
                let mono = args
                    .iter()
                    .zip(e)
                    .fold(f.from_int(*c), |m, (&a, &k)| f.mul(m, f.pow(a, k as u64)));
                f.add(acc, mono)
            }),
            None => {
                let m = group.coordinate_order() as u128;
                self.terms.iter().fold(0u64, |acc, (c, e)| {
                    let mut mono = (*c as i128).rem_euclid(m as i128) as u128;
                    for (&a, &k) in args.iter().zip(e) {
                        for _ in 0..k {
                            mono = mono * a as u128 % m;
                        }
                    }
                    ((acc as u128 + mono) % m) as u64
                })
            }
        }
    }
}

/// Normalised counting measure on the graph `{(ω, h(ω))}`.
pub fn graph_measure(group: &Group, h: &Polynomial) -> Result<DualMeasure> {
    let n = group.rank();
    if n < 2 {
        return Err(Error::Unsupported("graph measures need rank at least 2".into()));
    }
    if h.vars() != n - 1 {
        return Err(Error::Polynomial(format!(
            "polynomial has {} variables, the graph needs {}",
            h.vars(),
            n - 1
        )));
    }
    let q = group.coordinate_order() as usize;
    let base = q.pow((n - 1) as u32);
    let mut weights = vec![0.0; group.size()];
    let w = 1.0 / base as f64;
    let mut omega = vec![0u64; n - 1];
    for j in 0..base {
        let mut r = j;
        for slot in omega.iter_mut().rev() {
            *slot = (r % q) as u64;
            r /= q;
        }
        let top = h.evaluate(group, &omega);
        // row-major index of (ω, h(ω))
        weights[j * q + top as usize] += w;
    }
    Ok(DualMeasure {
        spec: group.spec().clone(),
        weights,
    })
}

pub fn paraboloid_measure(group: &Group) -> Result<DualMeasure> {
    if let Some(f) = group.field() {
        if f.characteristic() == 2 {
            return Err(Error::Unsupported("paraboloid needs odd characteristic".into()));
        }
    }
    if group.rank() < 2 {
        return Err(Error::Unsupported("paraboloid needs rank at least 2".into()));
    }
    graph_measure(group, &Polynomial::sum_of_squares(group.rank() - 1))
}

fn exponent_in_range(name: &str, v: Exponent, n: usize) -> Result<f64> {
    let x = *v.numer() as f64 / *v.denom() as f64;
    if !(x > 0.0 && x < n as f64) {
        return Err(Error::Exponent(format!("{name} = {v} must lie in (0, {n})")));
    }
    Ok(x)
}

/// `μ(B_ρ(ξ))` for every `ξ`, on dual bracket `k`: `(μ * χ_{-B})(ξ)`.
fn ball_masses(sys: &LpSystem, mu: &DualMeasure, k: usize) -> Vec<f64> {
    let g = sys.group();
    let ball = sys.dual().origin_ball(k);
    let reflected: Vec<Complex64> = (0..g.size())
        .map(|y| Complex64::new(if ball[g.neg_index(y)] { 1.0 } else { 0.0 }, 0.0))
        .collect();
    g.convolve_values(&mu.complex_weights(), &reflected)
        .into_iter()
        .map(|v| v.re)
        .collect()
}

/// Smallest `A` with `μ(B_ρ(ξ)) <= A ρ^a` for all `ξ` and `ρ`.
pub fn regularity_constant(mu: &DualMeasure, sys: &LpSystem, a: Exponent) -> Result<f64> {
    mu.check(sys.group())?;
    let a = exponent_in_range("a", a, sys.dimension())?;
    let dual = sys.dual();
    Ok((0..dual.len())
        .into_par_iter()
        .map(|k| {
            let rho = scale_value(dual.breakpoints()[k]);
            ball_masses(sys, mu, k)
                .into_iter()
                .fold(0.0, f64::max)
                / rho.powf(a)
        })
        .reduce(|| 0.0, f64::max))
}

/// Smallest `B` with `|μ̌(x)| <= B ρ^{-b/2}` whenever `x ∉ B_ρ(0)`, using the
/// closed exit radius (first breakpoint whose ball contains `x`).
pub fn decay_constant(mu: &DualMeasure, sys: &LpSystem, b: Exponent) -> Result<f64> {
    mu.check(sys.group())?;
    let b = exponent_in_range("b", b, sys.dimension())?;
    let check = inverse_transform_measure(sys.group(), mu)?;
    let primal = sys.primal();
    let core = primal.core_points();
    let mut best = 0.0f64;
    for (x, v) in check.values().iter().enumerate() {
        if core[x] {
            continue;
        }
        match primal.first_containing(x) {
            Some(k) => best = best.max(v.norm() * scale_value(primal.breakpoints()[k]).powf(b / 2.0)),
            None => return Ok(f64::INFINITY),
        }
    }
    Ok(best)
}

/// Exponents `(a, b)` with the minimal constants `(A, B)` for a measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureProfile {
    pub a: Exponent,
    pub a_const: f64,
    pub b: Exponent,
    pub b_const: f64,
}

impl MeasureProfile {
    /// Requires `0 < b <= a < n`.
    pub fn analyze(mu: &DualMeasure, sys: &LpSystem, a: Exponent, b: Exponent) -> Result<Self> {
        crate::exponents::check_hypothesis(sys.dimension(), a, b)?;
        Ok(MeasureProfile {
            a,
            a_const: regularity_constant(mu, sys, a)?,
            b,
            b_const: decay_constant(mu, sys, b)?,
        })
    }
}

/// Re-checks (Rμ) and (Fμ) at breakpoints, midpoints and left limits with
/// ball masses summed directly over the support.
pub fn check_measure_conditions(mu: &DualMeasure, sys: &LpSystem, profile: &MeasureProfile) -> Result<VerificationReport> {
    let g = sys.group();
    mu.check(g)?;
    let mut report = VerificationReport::new("measure_conditions", sys.label());
    let a = *profile.a.numer() as f64 / *profile.a.denom() as f64;
    let b = *profile.b.numer() as f64 / *profile.b.denom() as f64;
    let support = mu.support();
    let dual = sys.dual();

    let bp: Vec<f64> = dual.breakpoints().iter().map(|&s| scale_value(s)).collect();
    let mut rhos = Vec::new();
    for (k, &s) in bp.iter().enumerate() {
        rhos.push(s);
        if let Some(&next) = bp.get(k + 1) {
            rhos.push(next * (1.0 - LEFT_LIMIT));
        }
    }
    for &rho in &rhos {
        let Some(k) = dual.bracket_at(rho) else { continue };
        let ball = dual.origin_ball(k);
        let (worst_xi, worst) = (0..g.size())
            .into_par_iter()
            .map(|xi| {
                let m: f64 = support
                    .iter()
                    .filter(|&&eta| ball[g.sub_index(eta, xi)])
                    .map(|&eta| mu.weights[eta])
                    .sum();
                (xi, m)
            })
            .reduce(|| (0, 0.0), |p, q| if q.1 > p.1 || (q.1 == p.1 && q.0 < p.0) { q } else { p });
        report.push(
            Record::bounded("condition.R_mu", profile.a_const * rho.powf(a), worst)
                .param("rho", rho)
                .with_witness(format!("xi {:?}", g.point(worst_xi).coords)),
        );
    }

    let check = inverse_transform_measure(g, mu)?;
    report.push(
        Record::bounded("measure.check_at_origin", mu.total_mass() * (1.0 + 1e-12), check.values()[0].norm())
            .param("mass", mu.total_mass()),
    );
    let primal = sys.primal();
    let core = primal.core_points();
    let pb: Vec<f64> = primal.breakpoints().iter().map(|&s| scale_value(s)).collect();
    let mut prhos = Vec::new();
    for (k, &s) in pb.iter().enumerate() {
        prhos.push(s);
        if let Some(&next) = pb.get(k + 1) {
            prhos.push(0.5 * (s + next));
            prhos.push(next * (1.0 - LEFT_LIMIT));
        }
    }
    for rho in prhos {
        let mut worst = (0usize, 0.0f64);
        for (x, v) in check.values().iter().enumerate() {
            if core[x] || primal.origin_ball_contains(rho, x) {
                continue;
            }
            if v.norm() > worst.1 {
                worst = (x, v.norm());
            }
        }
        report.push(
            Record::bounded("condition.F_mu", profile.b_const * rho.powf(-b / 2.0), worst.1)
                .param("rho", rho)
                .with_witness(format!("x {:?}", g.point(worst.0).coords)),
        );
    }
    Ok(report)
}

/// `max_{x ≠ 0} |μ̌(x)| ‖x‖^{b/2}` with a maximizing point.
pub fn norm_decay_constant(mu: &DualMeasure, group: &Group, b: Exponent) -> Result<(f64, usize)> {
    let b = exponent_in_range("b", b, group.rank())?;
    let check = inverse_transform_measure(group, mu)?;
    Ok(check
        .values()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(x, v)| (v.norm() * (norm_index(group, x) as f64).powf(b / 2.0), x))
        .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best }))
}
