//! Exponents and explicit constants of the restriction estimate.
//!
//! Exponents are exact rationals. Constants are doubles. The two envelope
//! functions evaluate the fully explicit two-term bounds and minimize them
//! over the available primal scales.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::balls::{scale_value, ScaleSet};
use crate::error::{Error, Result};
use crate::measures::MeasureProfile;

pub type Exponent = Ratio<i64>;

pub fn to_f64(r: Exponent) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Hölder conjugate `p / (p - 1)`; requires `p > 1`.
pub fn conjugate(p: Exponent) -> Exponent {
    p / (p - 1)
}

/// Checks `0 < b <= a < n`.
pub fn check_hypothesis(n: usize, a: Exponent, b: Exponent) -> Result<()> {
    let zero = Exponent::from_integer(0);
    if n == 0 || !(zero < b && b <= a && a < Exponent::from_integer(n as i64)) {
        return Err(Error::Hypothesis {
            n,
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub n: usize,
    pub a: Exponent,
    pub b: Exponent,
    pub r0: Exponent,
    pub r0_conj: Exponent,
    pub theta: Exponent,
    pub sigma: Exponent,
    pub sigma_conj: Exponent,
    pub tau: Exponent,
    pub tau_conj: Exponent,
    pub conv_r0: Exponent,
    pub conv_s0: Exponent,
    pub conv_s0_conj: Exponent,
}

impl ExponentProfile {
    pub fn new(n: usize, a: Exponent, b: Exponent) -> Result<Self> {
        check_hypothesis(n, a, b)?;
        let d = Exponent::from_integer(n as i64) - a;
        let two = Exponent::from_integer(2);
        let four = Exponent::from_integer(4);
        let r0 = (four * d + two * b) / (four * d + b);
        let theta = two * d / (two * d + b);
        let x = two * (d + b) * (two * d + b);
        let sigma = x / (x - b * b);
        let tau = two * (d + b) / b;
        let conv_r0 = (two * d + b) / (d + b);
        let conv_s0 = (two * d + b) / d;
        Ok(ExponentProfile {
            n,
            a,
            b,
            r0,
            r0_conj: conjugate(r0),
            theta,
            sigma,
            sigma_conj: conjugate(sigma),
            tau,
            tau_conj: conjugate(tau),
            conv_r0,
            conv_s0,
            conv_s0_conj: conjugate(conv_s0),
        })
    }

    pub fn from_measure(n: usize, m: &MeasureProfile) -> Result<Self> {
        Self::new(n, m.a, m.b)
    }

    /// Named fields in display order.
    pub fn rows(&self) -> Vec<(&'static str, Exponent)> {
        vec![
            ("a", self.a),
            ("b", self.b),
            ("r0", self.r0),
            ("r0'", self.r0_conj),
            ("theta", self.theta),
            ("sigma", self.sigma),
            ("sigma'", self.sigma_conj),
            ("tau", self.tau),
            ("tau'", self.tau_conj),
            ("conv_r0", self.conv_r0),
            ("conv_s0", self.conv_s0),
            ("conv_s0'", self.conv_s0_conj),
        ]
    }
}

/// Ball-system constants together with the measure constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub a_const: f64,
    pub b_const: f64,
}

impl SystemConstants {
    pub fn new(ball: crate::balls::SystemConstants, measure: &MeasureProfile) -> Self {
        SystemConstants {
            c1: ball.c1,
            c2: ball.c2,
            c3: ball.c3,
            a_const: measure.a_const,
            b_const: measure.b_const,
        }
    }

    pub fn unit() -> Self {
        SystemConstants {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            a_const: 1.0,
            b_const: 1.0,
        }
    }

    /// `K₁ = 2^n (C₁ + (2^{n-a} - 1)^{-1} C₂) A`.
    pub fn k1(&self, profile: &ExponentProfile) -> f64 {
        let n = profile.n as f64;
        let gap = 2f64.powf(n - to_f64(profile.a)) - 1.0;
        2f64.powf(n) * (self.c1 + self.c2 / gap) * self.a_const
    }
}

/// `C̄ = C_{n,a,b} (C₁+C₂)^{1-θ} C₃^{(1-θ)/(2-θ)} A^{1-θ} B^θ`.
pub fn cbar_constant(profile: &ExponentProfile, c: &SystemConstants, c_nab: f64) -> f64 {
    let t = to_f64(profile.theta);
    c_nab * (c.c1 + c.c2).powf(1.0 - t) * c.c3.powf((1.0 - t) / (2.0 - t)) * c.a_const.powf(1.0 - t) * c.b_const.powf(t)
}

/// `P ρ^{n-a} + Q ρ^{-b/2}` minimized over primal scales `ρ >= 1`.
fn minimize(p: f64, q: f64, profile: &ExponentProfile, scales: &ScaleSet) -> Result<(f64, f64)> {
    let up = to_f64(Exponent::from_integer(profile.n as i64) - profile.a);
    let down = to_f64(profile.b) / 2.0;
    scales
        .primal
        .iter()
        .map(|&s| scale_value(s))
        .filter(|&rho| rho >= 1.0)
        .map(|rho| (p * rho.powf(up) + q * rho.powf(-down), rho))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .ok_or_else(|| Error::Scale("no primal scale at or above 1".into()))
}

/// `min_ρ [K₁ m(E) ρ^{n-a} + 2B m(E)² ρ^{-b/2}]` and the minimizing `ρ`.
pub fn envelope_weak(m_e: f64, c: &SystemConstants, profile: &ExponentProfile, scales: &ScaleSet) -> Result<(f64, f64)> {
    if !(m_e > 0.0) {
        return Err(Error::Measure(format!("m(E) = {m_e} must be positive")));
    }
    minimize(c.k1(profile) * m_e, 2.0 * c.b_const * m_e * m_e, profile, scales)
}

/// `min_ρ [K₁ m̂E m̂F ρ^{n-a} + 2B (m̂E m̂F)^{1/2} ρ^{-b/2}]` and the minimizing `ρ`.
pub fn envelope_conv(
    m_e: f64,
    m_f: f64,
    c: &SystemConstants,
    profile: &ExponentProfile,
    scales: &ScaleSet,
) -> Result<(f64, f64)> {
    if !(m_e > 0.0 && m_f > 0.0) {
        return Err(Error::Measure(format!("masses ({m_e}, {m_f}) must be positive")));
    }
    let prod = m_e * m_f;
    minimize(c.k1(profile) * prod, 2.0 * c.b_const * prod.sqrt(), profile, scales)
}

/// Infimum over all `ρ > 0` of `P ρ^u + Q ρ^{-v}` together with its minimizer.
pub fn continuous_infimum(p: f64, q: f64, u: f64, v: f64) -> (f64, f64) {
    let rho = (v * q / (u * p)).powf(1.0 / (u + v));
    (p * rho.powf(u) + q * rho.powf(-v), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balls::Scale;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Exponent {
        Ratio::new(n, d)
    }

    fn int(n: i64) -> Exponent {
        Ratio::from_integer(n)
    }

    fn scales(v: &[u64]) -> ScaleSet {
        ScaleSet {
            primal: v.iter().map(|&s| Scale::from(s)).collect(),
            dual: v.iter().rev().map(|&s| Scale::new(1, s)).collect(),
        }
    }

    #[test]
    fn two_one_one() {
        let p = ExponentProfile::new(2, int(1), int(1)).unwrap();
        assert_eq!(p.r0, q(6, 5));
        assert_eq!(p.theta, q(2, 3));
        assert_eq!(p.sigma, q(12, 11));
        assert_eq!(p.tau, int(4));
        assert_eq!(p.conv_r0, q(3, 2));
        assert_eq!(p.conv_s0, int(3));
        assert_eq!(p.r0_conj, int(6));
    }

    #[test]
    fn three_two_two() {
        assert_eq!(ExponentProfile::new(3, int(2), int(2)).unwrap().r0, q(4, 3));
    }

    #[test]
    fn hypothesis_violations() {
        assert!(ExponentProfile::new(2, int(1), q(3, 2)).is_err());
        assert!(ExponentProfile::new(2, int(2), int(1)).is_err());
        assert!(ExponentProfile::new(2, int(1), int(0)).is_err());
        assert!(ExponentProfile::new(0, int(1), int(1)).is_err());
    }

    #[test]
    fn cbar_examples() {
        let p = ExponentProfile::new(2, int(1), int(1)).unwrap();
        let mut c = SystemConstants::unit();
        assert!((cbar_constant(&p, &c, 1.0) - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let base = cbar_constant(&p, &c, 1.0);
        c.b_const = 2.0;
        assert!((cbar_constant(&p, &c, 1.0) / base - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);
        let all_one = SystemConstants { c1: 0.5, c2: 0.5, ..SystemConstants::unit() };
        assert!((cbar_constant(&p, &all_one, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k1_value() {
        let p = ExponentProfile::new(2, int(1), int(1)).unwrap();
        assert_eq!(SystemConstants::unit().k1(&p), 8.0);
        let p = ExponentProfile::new(3, int(2), int(2)).unwrap();
        assert_eq!(SystemConstants::unit().k1(&p), 16.0);
    }

    #[test]
    fn envelope_single_scale() {
        let p = ExponentProfile::new(2, int(1), int(1)).unwrap();
        let c = SystemConstants::unit();
        let (b, rho) = envelope_weak(5.0, &c, &p, &scales(&[1])).unwrap();
        assert_eq!((b, rho), (c.k1(&p) * 5.0 + 2.0 * 25.0, 1.0));
        let (b, _) = envelope_conv(1.0, 1.0, &c, &p, &scales(&[1])).unwrap();
        assert_eq!(b, c.k1(&p) + 2.0);
        assert!(envelope_weak(1.0, &c, &p, &ScaleSet { primal: vec![], dual: vec![] }).is_err());
        assert!(envelope_weak(0.0, &c, &p, &scales(&[1])).is_err());
    }

    #[test]
    fn envelope_three_scales() {
        let p = ExponentProfile::new(2, int(1), int(1)).unwrap();
        let c = SystemConstants::unit();
        let s = scales(&[1, 3, 9]);
        // termwise: 72 + 162, 216 + 162/sqrt 3, 648 + 54
        let oracle = [1.0f64, 3.0, 9.0].map(|r| 8.0 * 9.0 * r + 2.0 * 81.0 / r.sqrt());
        assert!(oracle[0] < oracle[1] && oracle[0] < oracle[2]);
        let (b, rho) = envelope_weak(9.0, &c, &p, &s).unwrap();
        assert_eq!(rho, 1.0);
        assert!((b - 234.0).abs() < 1e-12);
        let (b, rho) = envelope_conv(3.0, 9.0, &c, &p, &s).unwrap();
        assert_eq!(rho, 1.0);
        assert!((b - (216.0 + 6.0 * 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(envelope_conv(9.0, 3.0, &c, &p, &s).unwrap().0, b);
    }

    #[test]
    fn envelope_without_decay_uses_smallest_scale() {
        let p = ExponentProfile::new(2, int(1), int(1)).unwrap();
        let c = SystemConstants { b_const: 0.0, ..SystemConstants::unit() };
        let (b, rho) = envelope_weak(4.0, &c, &p, &scales(&[1, 3, 9])).unwrap();
        assert_eq!((b, rho), (32.0, 1.0));
    }

    fn admissible() -> impl Strategy<Value = (usize, Exponent, Exponent)> {
        (1usize..7, 1i64..13, 1i64..13, 1i64..13).prop_filter_map("0 < b <= a < n", |(n, an, bn, den)| {
            let a = q(an, den);
            let b = q(bn, den);
            check_hypothesis(n, a, b).ok().map(|_| (n, a, b))
        })
    }

    proptest! {
        #[test]
        fn exponent_relations((n, a, b) in admissible()) {
            let p = ExponentProfile::new(n, a, b).unwrap();
            prop_assert!(p.r0 > int(1) && p.r0 <= int(2));
            prop_assert!(p.theta > int(0) && p.theta < int(1));
            prop_assert_eq!(int(1) / p.r0 - int(1) / p.r0_conj, p.theta);
            prop_assert!(p.sigma < p.r0 && p.r0 < p.tau_conj);
            prop_assert_eq!(int(1) / p.conv_r0 + int(1) / p.conv_s0, int(1));
            prop_assert_eq!(p.conv_s0_conj, p.conv_r0);
        }

        #[test]
        fn paraboloid_numerology(n in 2i64..12) {
            let p = ExponentProfile::new(n as usize, int(n - 1), int(n - 1)).unwrap();
            prop_assert_eq!(p.r0, q(2 * (n + 1), n + 3));
        }

        #[test]
        fn discretization_gap(
            (n, a, b) in admissible(),
            m_e in 1.0f64..1e4,
            bc in 0.05f64..5.0,
            base in 2u64..6,
            levels in 1u32..5,
        ) {
            let s: Vec<u64> = (0..=levels).map(|k| base.pow(k)).collect();
            let set = scales(&s);
            let prof = ExponentProfile::new(n, a, b).unwrap();
            let c = SystemConstants { b_const: bc, ..SystemConstants::unit() };
            let (bound, _) = envelope_weak(m_e, &c, &prof, &set).unwrap();
            let up = to_f64(int(n as i64) - a);
            let (inf, rho) = continuous_infimum(c.k1(&prof) * m_e, 2.0 * bc * m_e * m_e, up, to_f64(b) / 2.0);
            prop_assert!(bound >= inf * (1.0 - 1e-12));
            if rho >= 1.0 && rho <= *s.last().unwrap() as f64 {
                prop_assert!(bound <= inf * (base as f64).powf(up) * (1.0 + 1e-12));
            }
        }
    }
}
