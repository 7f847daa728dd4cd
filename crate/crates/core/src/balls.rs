//! Littlewood-Paley ball systems on finite groups and their constants.
//!
//! Every family here is a finite list of breakpoints `s_0 < s_1 < ...` with
//! the ball for radius `ρ` equal to the ball of the largest breakpoint not
//! exceeding `ρ` (empty below `s_0`). All "for every ρ > 0" statements thus
//! reduce to breakpoints and their left limits.

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, prime_power};
use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::report::{Record, VerificationReport};

/// Exact radius. Primal scales are integers, dual scales reciprocals.
pub type Scale = Ratio<u64>;

pub fn scale_value(s: Scale) -> f64 {
    *s.numer() as f64 / *s.denom() as f64
}

fn scale_label(s: Scale) -> String {
    if *s.denom() == 1 {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Left limits are probed this far below a breakpoint.
const LEFT_LIMIT: f64 = 1e-9;

/// `N / gcd(x_1, ..., x_n, N)` on `[Z/NZ]^n`; on `F_q^n` the value is 1 at
/// the origin and `q` elsewhere.
pub fn norm_of(group: &Group, x: &GroupPoint) -> Result<u64> {
    let i = group.index(x)?;
    Ok(norm_index(group, i))
}

pub(crate) fn norm_index(group: &Group, i: usize) -> u64 {
    let m = group.coordinate_order();
    if group.is_field() {
        return if i == 0 { 1 } else { m };
    }
    let g = group.point(i).coords.iter().fold(m, |acc, &c| gcd(acc, c));
    m / g
}

/// `B_d = {x : ‖x‖ divides d} = {x : (N/d) divides every coordinate}`.
fn divisor_subgroup(group: &Group, d: u64) -> Vec<bool> {
    let step = group.coordinate_order() / d;
    (0..group.size())
        .map(|i| group.point(i).coords.iter().all(|&c| c % step == 0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    FiniteField,
    PrimePower,
    Composite,
    Custom,
}

#[derive(Debug, Clone)]
enum Membership {
    /// `y ∈ B_ρ(c)` iff `‖y - c‖ <= factor · ρ`.
    Norm { factor: Scale, norms: Vec<u64> },
    /// `B_ρ(c) = c + B_ρ(0)`.
    Translate,
}

/// One family of balls (on `G` or on `Ĝ`).
#[derive(Debug, Clone)]
pub struct BallFamily {
    breakpoints: Vec<Scale>,
    balls: Vec<Vec<bool>>,
    sizes: Vec<usize>,
    membership: Membership,
}

impl BallFamily {
    /// A family given by its balls at the origin, translated to other centres.
    pub fn from_origin_sets(group: &Group, breakpoints: Vec<Scale>, sets: Vec<Vec<usize>>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != sets.len() {
            return Err(Error::Scale("one origin set per breakpoint is required".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || *breakpoints[0].numer() == 0 {
            return Err(Error::Scale("breakpoints must be positive and strictly increasing".into()));
        }
        let balls = sets
            .into_iter()
            .map(|set| {
                let mut m = vec![false; group.size()];
                for i in set {
                    if i >= group.size() {
                        return Err(Error::Scale(format!("point index {i} outside the group")));
                    }
                    m[i] = true;
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(breakpoints, balls, Membership::Translate))
    }

    fn assemble(breakpoints: Vec<Scale>, balls: Vec<Vec<bool>>, membership: Membership) -> Self {
        let sizes = balls.iter().map(|b| b.iter().filter(|&&x| x).count()).collect();
        BallFamily {
            breakpoints,
            balls,
            sizes,
            membership,
        }
    }

    pub fn breakpoints(&self) -> &[Scale] {
        &self.breakpoints
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Membership mask of the ball at the origin on bracket `k`.
    pub fn origin_ball(&self, k: usize) -> &[bool] {
        &self.balls[k]
    }

    pub fn origin_points(&self, k: usize) -> Vec<usize> {
        self.balls[k]
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn ball_size(&self, k: usize) -> usize {
        self.sizes[k]
    }

    /// Bracket index for radius `rho`, `None` when the ball is empty.
    pub fn bracket_at(&self, rho: f64) -> Option<usize> {
        self.breakpoints
            .iter()
            .rposition(|&s| scale_value(s) <= rho)
    }

    pub fn measure_at(&self, rho: f64) -> usize {
        self.bracket_at(rho).map_or(0, |k| self.sizes[k])
    }

    pub fn origin_ball_contains(&self, rho: f64, y: usize) -> bool {
        self.bracket_at(rho).is_some_and(|k| self.balls[k][y])
    }

    /// First bracket whose origin ball contains `y`.
    pub fn first_containing(&self, y: usize) -> Option<usize> {
        self.balls.iter().position(|b| b[y])
    }

    /// Points lying in every nonempty ball at the origin.
    pub fn core_points(&self) -> Vec<bool> {
        let size = self.balls[0].len();
        let mut core = vec![true; size];
        for (b, &s) in self.balls.iter().zip(&self.sizes) {
            if s > 0 {
                for (c, &m) in core.iter_mut().zip(b) {
                    *c &= m;
                }
            }
        }
        core
    }

    /// `B_ρ(center)` on bracket `k`, evaluated from the family's own rule.
    pub fn ball(&self, group: &Group, center: usize, k: usize) -> Vec<bool> {
        match &self.membership {
            Membership::Translate => {
                let mut out = vec![false; group.size()];
                for y in self.origin_points(k) {
                    out[group.add_index(center, y)] = true;
                }
                out
            }
            Membership::Norm { factor, norms } => {
                let radius = *factor * self.breakpoints[k];
                (0..group.size())
                    .map(|y| Scale::from(norms[group.sub_index(y, center)]) <= radius)
                    .collect()
            }
        }
    }
}

/// `(C₁, C₂, C₃)` of conditions (R), (F), (F′).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Available scales on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSet {
    pub primal: Vec<Scale>,
    pub dual: Vec<Scale>,
}

impl ScaleSet {
    pub fn primal_values(&self) -> Vec<f64> {
        self.primal.iter().map(|&s| scale_value(s)).collect()
    }
}

/// A Littlewood-Paley system with projections `φ_ρ = χ_{B_ρ(0)}`.
#[derive(Debug, Clone)]
pub struct LpSystem {
    group: Group,
    kind: SystemKind,
    primal: BallFamily,
    dual: BallFamily,
    constants: SystemConstants,
}

impl LpSystem {
    /// Builds the natural system for the group: the three-tier balls on
    /// `F_q^n`, the `p`-adic balls on `[Z/p^αZ]^n`, or divisor unions on
    /// `[Z/NZ]^n` for composite `N`.
    pub fn build(group: &Group) -> Result<Self> {
        let m = group.coordinate_order();
        let n_pts = group.size();
        let (kind, primal, dual) = if group.is_field() {
            let zero: Vec<bool> = (0..n_pts).map(|i| i == 0).collect();
            let all = vec![true; n_pts];
            let norms = (0..n_pts).map(|i| norm_index(group, i)).collect::<Vec<_>>();
            let primal = BallFamily::assemble(
                vec![Scale::from(1), Scale::from(m)],
                vec![zero.clone(), all.clone()],
                Membership::Norm {
                    factor: Scale::from(1),
                    norms: norms.clone(),
                },
            );
            let dual = BallFamily::assemble(
                vec![Scale::new(1, m), Scale::from(1)],
                vec![zero, all],
                Membership::Norm {
                    factor: Scale::from(m),
                    norms,
                },
            );
            (SystemKind::FiniteField, primal, dual)
        } else {
            let norms: Vec<u64> = (0..n_pts).map(|i| norm_index(group, i)).collect();
            let divs = divisors(m);
            let subgroups: Vec<Vec<bool>> = divs.iter().map(|&d| divisor_subgroup(group, d)).collect();
            let (kind, primal_balls, dual_balls) = if prime_power(m).is_some() {
                // divisors are 1, p, ..., p^α and the subgroups are nested;
                // the dual ball at ρ = p^{-ν} is B_{p^{α-ν}}
                (SystemKind::PrimePower, subgroups.clone(), subgroups)
            } else {
                let union = |pick: &dyn Fn(usize) -> bool| -> Vec<bool> {
                    let mut out = vec![false; n_pts];
                    for (j, sg) in subgroups.iter().enumerate() {
                        if pick(j) {
                            for (o, &b) in out.iter_mut().zip(sg) {
                                *o |= b;
                            }
                        }
                    }
                    out
                };
                let primal = (0..divs.len()).map(|k| union(&|j| j <= k)).collect();
                // dual bracket at ρ = 1/d unions B_{N/d'} over d' >= d
                let dual = (0..divs.len())
                    .rev()
                    .map(|k| {
                        union(&|j| {
                            let e = divs[j];
                            divs.iter().any(|&dp| dp >= divs[k] && m / dp == e)
                        })
                    })
                    .collect();
                (SystemKind::Composite, primal, dual)
            };
            let primal = BallFamily::assemble(
                divs.iter().map(|&d| Scale::from(d)).collect(),
                primal_balls,
                Membership::Norm {
                    factor: Scale::from(1),
                    norms: norms.clone(),
                },
            );
            let dual = BallFamily::assemble(
                divs.iter().rev().map(|&d| Scale::new(1, d)).collect(),
                dual_balls,
                Membership::Norm {
                    factor: Scale::from(m),
                    norms,
                },
            );
            (kind, primal, dual)
        };
        Ok(Self::from_families(group, kind, primal, dual))
    }

    /// Wraps arbitrary families; constants are computed, not assumed.
    pub fn from_families(group: &Group, kind: SystemKind, primal: BallFamily, dual: BallFamily) -> Self {
        let constants = compute_system_constants(group, &primal, &dual);
        LpSystem {
            group: group.clone(),
            kind,
            primal,
            dual,
            constants,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn primal(&self) -> &BallFamily {
        &self.primal
    }

    pub fn dual(&self) -> &BallFamily {
        &self.dual
    }

    pub fn constants(&self) -> SystemConstants {
        self.constants
    }

    /// Homogeneity dimension, the rank of the group.
    pub fn dimension(&self) -> usize {
        self.group.rank()
    }

    pub fn scales(&self) -> ScaleSet {
        ScaleSet {
            primal: self.primal.breakpoints.clone(),
            dual: self.dual.breakpoints.clone(),
        }
    }

    pub fn label(&self) -> String {
        self.group.spec().label()
    }

    /// `φ_ρ`, or `None` below the smallest scale where the projection vanishes.
    pub fn projection(&self, rho: f64) -> Option<&[bool]> {
        self.primal.bracket_at(rho).map(|k| self.primal.origin_ball(k))
    }

    /// `φ̂_ρ` for primal bracket `k`.
    pub fn projection_transform(&self, k: usize) -> Vec<Complex64> {
        let ind: Vec<Complex64> = self
            .primal
            .origin_ball(k)
            .iter()
            .map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
            .collect();
        self.group.forward_values(&ind)
    }
}

/// Minimal constants under the exit-scale closure convention.
///
/// * `C₁ = max_k m(B_{s_k}(0)) / s_k^n` over primal breakpoints.
/// * `C₂ = sup` of `|φ̂_ρ(ξ)| · s_exit(ξ)^n` over projection brackets
///   `[s_k, s_{k+1})` and `ξ` outside the core, where `s_exit(ξ)` is the
///   first dual breakpoint whose ball contains `-ξ`; the pair constrains
///   only if some `s ∈ [1/ρ, s_exit)` exists for `ρ` in the bracket, i.e.
///   `s_exit > 1/s_{k+1}`.
/// * `C₃ = max_k (1/|G|) Σ_ξ |φ̂_{s_k}(ξ)|`.
pub fn compute_system_constants(group: &Group, primal: &BallFamily, dual: &BallFamily) -> SystemConstants {
    let n = group.rank() as i32;
    let c1 = primal
        .breakpoints
        .iter()
        .zip(&primal.sizes)
        .map(|(&s, &m)| m as f64 / scale_value(s).powi(n))
        .fold(0.0, f64::max);

    let core = dual.core_points();
    let exit: Vec<Option<f64>> = (0..group.size())
        .map(|xi| {
            dual.first_containing(group.neg_index(xi))
                .map(|j| scale_value(dual.breakpoints[j]))
        })
        .collect();

    let per_bracket: Vec<(f64, f64)> = (0..primal.len())
        .into_par_iter()
        .filter(|&k| primal.sizes[k] > 0)
        .map(|k| {
            let ind: Vec<Complex64> = primal.balls[k]
                .iter()
                .map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
                .collect();
            let hat = group.forward_values(&ind);
            let inv_upper = primal
                .breakpoints
                .get(k + 1)
                .map_or(0.0, |&s| 1.0 / scale_value(s));
            let mut c2 = 0.0f64;
            for (xi, v) in hat.iter().enumerate() {
                if core[xi] {
                    continue;
                }
                match exit[xi] {
                    Some(s) if s > inv_upper => c2 = c2.max(v.norm() * s.powi(n)),
                    Some(_) => {}
                    None => c2 = f64::INFINITY,
                }
            }
            let c3 = hat.iter().map(|v| v.norm()).sum::<f64>() / group.size() as f64;
            (c2, c3)
        })
        .collect();
    let c2 = per_bracket.iter().map(|p| p.0).fold(0.0, f64::max);
    let c3 = per_bracket.iter().map(|p| p.1).fold(0.0, f64::max);
    SystemConstants { c1, c2, c3 }
}

fn witness_point(group: &Group, i: usize) -> String {
    format!("{:?}", group.point(i).coords)
}

fn check_family(group: &Group, family: &BallFamily, name: &str, report: &mut VerificationReport) {
    let size = group.size();
    for k in 0..family.len().saturating_sub(1) {
        let bad: Vec<usize> = (0..size)
            .filter(|&i| family.balls[k][i] && !family.balls[k + 1][i])
            .collect();
        report.push(
            Record::violations(
                "axiom.nesting",
                bad.len(),
                bad.first().map(|&i| witness_point(group, i)),
            )
            .param("family", name)
            .param("scale", scale_label(family.breakpoints[k]))
            .param("next_scale", scale_label(family.breakpoints[k + 1])),
        );
    }
    for k in 0..family.len() {
        let bad: Vec<usize> = (0..size)
            .filter(|&i| family.balls[k][i] && !family.balls[k][group.neg_index(i)])
            .collect();
        report.push(
            Record::violations("axiom.symmetry", bad.len(), bad.first().map(|&i| witness_point(group, i)))
                .param("family", name)
                .param("scale", scale_label(family.breakpoints[k])),
        );
    }
    let last = family.len() - 1;
    let missing: Vec<usize> = (0..size).filter(|&i| !family.balls[last][i]).collect();
    report.push(
        Record::violations(
            "axiom.covering",
            missing.len(),
            missing.first().map(|&i| witness_point(group, i)),
        )
        .param("family", name)
        .param("scale", scale_label(family.breakpoints[last])),
    );
    for (center, k, bad) in translation_defects(group, family) {
        report.push(
            Record::violations(
                "axiom.translation",
                bad.len(),
                bad.first().map(|&i| format!("center {} point {}", witness_point(group, center), witness_point(group, i))),
            )
            .param("family", name)
            .param("scale", scale_label(family.breakpoints[k]))
            .param("center", center as u64),
        );
    }
}

/// Centres used for the translation axiom: all of them up to 4096 points,
/// otherwise 64 evenly spaced ones plus the origin's neighbour.
fn translation_centers(size: usize) -> Vec<usize> {
    if size <= 4096 {
        (0..size).collect()
    } else {
        let step = size / 64;
        (0..64).map(|j| (j * step + 1) % size).collect()
    }
}

fn translation_defects(group: &Group, family: &BallFamily) -> Vec<(usize, usize, Vec<usize>)> {
    let centers = translation_centers(group.size());
    let mut out: Vec<(usize, usize, Vec<usize>)> = (0..family.len())
        .into_par_iter()
        .map(|k| {
            let mut defects = Vec::new();
            for &c in &centers {
                let ruled = family.ball(group, c, k);
                let shifted: Vec<bool> = (0..group.size())
                    .map(|y| family.balls[k][group.sub_index(y, c)])
                    .collect();
                defects.extend((0..group.size()).filter(|&y| ruled[y] != shifted[y]).map(|y| (c, y)));
            }
            let center = defects.first().map_or(0, |d| d.0);
            (center, k, defects.into_iter().map(|d| d.1).collect())
        })
        .collect();
    out.sort_by_key(|d| d.1);
    out
}

/// Checks axioms i)–iv) on both families, bracket by bracket.
pub fn verify_axioms(sys: &LpSystem) -> VerificationReport {
    let mut report = VerificationReport::new("axioms", sys.label());
    check_family(&sys.group, &sys.primal, "primal", &mut report);
    check_family(&sys.group, &sys.dual, "dual", &mut report);
    report
}

fn rho_samples(family: &BallFamily) -> Vec<f64> {
    let b: Vec<f64> = family.breakpoints.iter().map(|&s| scale_value(s)).collect();
    let mut out = Vec::new();
    for (k, &s) in b.iter().enumerate() {
        out.push(s);
        match b.get(k + 1) {
            Some(&next) => {
                out.push(0.5 * (s + next));
                out.push(next * (1.0 - LEFT_LIMIT));
            }
            None => out.push(2.0 * s),
        }
    }
    out
}

/// Re-checks (R), (F), (F′) and the projection properties against the
/// stored constants at breakpoints, midpoints and left limits. This pass
/// works directly from radii and never reuses the exit-scale maximisation.
pub fn check_conditions(sys: &LpSystem) -> VerificationReport {
    let g = &sys.group;
    let n = g.rank() as i32;
    let SystemConstants { c1, c2, c3 } = sys.constants;
    let mut report = VerificationReport::new("conditions", sys.label());

    for rho in rho_samples(&sys.primal) {
        let m = sys.primal.measure_at(rho) as f64;
        report.push(Record::bounded("condition.R", c1 * rho.powi(n), m).param("rho", rho));
    }

    let core = sys.dual.core_points();
    let mut s_samples: Vec<f64> = sys
        .dual
        .breakpoints
        .iter()
        .flat_map(|&s| [scale_value(s) * (1.0 - LEFT_LIMIT), scale_value(s)])
        .collect();
    s_samples.dedup();
    let rhos = rho_samples(&sys.primal);
    let rows: Vec<(f64, f64, f64, Option<String>, f64)> = rhos
        .par_iter()
        .map(|&rho| {
            let k = sys.primal.bracket_at(rho).expect("samples start at the first breakpoint");
            let hat = sys.projection_transform(k);
            // (ratio, observed, bound, witness) of the tightest constraint
            let mut worst: Option<(f64, f64, f64, String)> = None;
            for (xi, v) in hat.iter().enumerate() {
                if core[xi] {
                    continue;
                }
                let neg = g.neg_index(xi);
                for &s in &s_samples {
                    if s < 1.0 / rho || sys.dual.origin_ball_contains(s, neg) {
                        continue;
                    }
                    let bound = c2 * s.powi(-n);
                    let ratio = if bound > 0.0 { v.norm() / bound } else { v.norm() * f64::MAX };
                    if worst.as_ref().is_none_or(|w| ratio > w.0) {
                        worst = Some((ratio, v.norm(), bound, format!("xi {} s {s}", witness_point(g, xi))));
                    }
                }
            }
            let l1 = hat.iter().map(|v| v.norm()).sum::<f64>() / g.size() as f64;
            match worst {
                Some((_, observed, bound, w)) => (rho, observed, bound, Some(w), l1),
                None => (rho, 0.0, 0.0, None, l1),
            }
        })
        .collect();
    for (rho, observed, bound, witness, l1) in rows {
        if let Some(w) = witness {
            report.push(
                Record::bounded("condition.F", bound, observed)
                    .param("rho", rho)
                    .with_witness(w),
            );
        }
        report.push(Record::bounded("condition.F_prime", c3, l1).param("rho", rho));
    }

    for k in 0..sys.primal.len() {
        let rho = scale_value(sys.primal.breakpoints[k]);
        let outside: Vec<usize> = (0..g.size())
            .filter(|&i| sys.primal.balls[k][i] && !sys.primal.origin_ball_contains(2.0 * rho, i))
            .collect();
        report.push(
            Record::violations(
                "projection.support",
                outside.len(),
                outside.first().map(|&i| witness_point(g, i)),
            )
            .param("rho", rho),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn system(spec: GroupSpec) -> LpSystem {
        LpSystem::build(&Group::new(spec).unwrap()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let g9 = Group::new(GroupSpec::cyclic(9, 2)).unwrap();
        assert_eq!(norm_of(&g9, &vec![3, 6].into()).unwrap(), 3);
        assert_eq!(norm_of(&g9, &vec![0, 0].into()).unwrap(), 1);
        let g12 = Group::new(GroupSpec::cyclic(12, 2)).unwrap();
        assert_eq!(norm_of(&g12, &vec![4, 6].into()).unwrap(), 6);
        let f = Group::new(GroupSpec::prime_field(5, 2)).unwrap();
        assert_eq!(norm_of(&f, &vec![0, 3].into()).unwrap(), 5);
    }

    #[test]
    fn finite_field_three_tiers() {
        let sys = system(GroupSpec::prime_field(3, 2));
        assert_eq!(sys.primal().origin_points(sys.primal().bracket_at(2.0).unwrap()), vec![0]);
        assert_eq!(sys.primal().measure_at(0.5), 0);
        assert_eq!(sys.primal().measure_at(3.0), 9);
        assert_eq!(sys.dual().measure_at(1.0 / 3.0), 1);
        assert_eq!(sys.dual().measure_at(0.3), 0);
        assert_eq!(sys.dual().measure_at(1.0), 9);
    }

    #[test]
    fn prime_power_ball_is_subgroup() {
        let sys = system(GroupSpec::cyclic(9, 2));
        let g = sys.group();
        let k = sys.primal().bracket_at(3.0).unwrap();
        let pts = sys.primal().origin_points(k);
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|&i| g.point(i).coords.iter().all(|c| c % 3 == 0)));
    }

    #[test]
    fn composite_divisor_union() {
        let sys = system(GroupSpec::cyclic(6, 1));
        assert_eq!(sys.kind(), SystemKind::Composite);
        let k = sys.primal().bracket_at(3.0).unwrap();
        assert_eq!(sys.primal().origin_points(k), vec![0, 2, 3, 4]);
        // ρ = 4, 5 stay in the bracket of 3
        assert_eq!(sys.primal().measure_at(5.5), 4);
        // ball sizes 1, 2, 4, 6 at ρ = 1, 2, 3, 6
        assert!((sys.constants().c1 - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unit_constants_for_fields_and_prime_powers() {
        for spec in [
            GroupSpec::prime_field(3, 2),
            GroupSpec::prime_field(5, 2),
            GroupSpec::prime_field(7, 2),
            GroupSpec::cyclic(9, 2),
            GroupSpec::cyclic(27, 2),
            GroupSpec::cyclic(25, 3),
        ] {
            let c = system(spec.clone()).constants();
            for v in [c.c1, c.c2, c.c3] {
                assert!((v - 1.0).abs() < 1e-9, "{spec}: {c:?}");
            }
        }
    }

    #[test]
    fn axioms_hold_on_built_systems() {
        for spec in [
            GroupSpec::prime_field(5, 2),
            GroupSpec::cyclic(27, 1),
            GroupSpec::cyclic(12, 2),
            GroupSpec::finite_field(3, vec![1, 0, 1], 2),
        ] {
            let sys = system(spec.clone());
            let rep = verify_axioms(&sys);
            assert!(rep.pass, "{spec}: {:?}", rep.failures().collect::<Vec<_>>());
            let cond = check_conditions(&sys);
            assert!(cond.pass, "{spec}: {:?}", cond.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn corrupted_nesting_is_reported() {
        let g = Group::new(GroupSpec::cyclic(6, 1)).unwrap();
        let primal = BallFamily::from_origin_sets(
            &g,
            vec![Scale::from(1), Scale::from(2), Scale::from(3), Scale::from(6)],
            vec![vec![0], vec![0, 3], vec![0, 2, 4], (0..6).collect()],
        )
        .unwrap();
        let dual = LpSystem::build(&g).unwrap().dual().clone();
        let sys = LpSystem::from_families(&g, SystemKind::Custom, primal, dual);
        let rep = verify_axioms(&sys);
        assert!(!rep.pass);
        let bad: Vec<_> = rep.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].check, "axiom.nesting");
        assert_eq!(bad[0].witness.as_deref(), Some("[3]"));
    }

    #[test]
    fn ball_measure_is_a_step_function() {
        let sys = system(GroupSpec::cyclic(12, 1));
        let b = sys.primal().breakpoints().to_vec();
        for w in b.windows(2) {
            let (lo, hi) = (scale_value(w[0]), scale_value(w[1]));
            let m = sys.primal().measure_at(lo);
            for t in [0.25, 0.5, 0.99] {
                assert_eq!(sys.primal().measure_at(lo + t * (hi - lo)), m);
            }
        }
    }

    #[test]
    fn cyclic_balls_are_norm_sublevel_sets() {
        for spec in [GroupSpec::cyclic(27, 2), GroupSpec::cyclic(30, 1), GroupSpec::cyclic(12, 2)] {
            let sys = system(spec);
            let g = sys.group();
            for (k, &s) in sys.primal().breakpoints().iter().enumerate() {
                for i in 0..g.size() {
                    let expected = norm_index(g, i) as f64 <= scale_value(s);
                    assert_eq!(sys.primal().origin_ball(k)[i], expected);
                }
            }
        }
    }

    #[test]
    fn projection_transforms_are_real() {
        let sys = system(GroupSpec::cyclic(12, 2));
        for k in 0..sys.primal().len() {
            assert!(sys.projection_transform(k).iter().all(|v| v.im.abs() < 1e-9));
        }
    }
}
