//! Quadratic exponential sums `S(a, b) = Σ_{t mod p^α} e((a t + b t²) / p^α)`.
//!
//! [`quad_sum_closed`] evaluates them through the classical Gauss sum
//! formulas; [`quad_sum_bruteforce`] is the direct sum used as its oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, legendre, mul_mod, valuation};
use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadSumInput {
    /// Linear coefficient.
    pub a: u64,
    /// Quadratic coefficient.
    pub b: u64,
    pub p: u64,
    pub alpha: u32,
}

impl QuadSumInput {
    pub fn new(a: u64, b: u64, p: u64, alpha: u32) -> Result<Self> {
        if p % 2 == 0 || !is_prime(p) {
            return Err(Error::Unsupported(format!("p = {p} must be an odd prime")));
        }
        if alpha == 0 {
            return Err(Error::InvalidGroup("alpha must be at least 1".into()));
        }
        let m = p
            .checked_pow(alpha)
            .ok_or_else(|| Error::InvalidGroup(format!("{p}^{alpha} overflows")))?;
        if a >= m || b >= m {
            return Err(Error::CoordinateRange {
                value: a.max(b),
                modulus: m,
            });
        }
        Ok(QuadSumInput { a, b, p, alpha })
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.alpha)
    }
}

fn e(num: u64, den: u64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * (num % den) as f64 / den as f64)
}

/// Direct summation over all `t mod p^α`.
pub fn quad_sum_bruteforce(input: &QuadSumInput) -> Complex64 {
    let m = input.modulus();
    let roots: Vec<Complex64> = (0..m).map(|j| e(j, m)).collect();
    (0..m)
        .map(|t| {
            let phase = (mul_mod(input.a, t, m) + mul_mod(input.b, mul_mod(t, t, m), m)) % m;
            roots[phase as usize]
        })
        .sum()
}

/// `Σ_{t mod p^γ} e(u t² / p^γ)` for a unit `u`: `p^{γ/2}` for even `γ`,
/// `(u/p) ε_p p^{γ/2}` for odd `γ`, with `ε_p ∈ {1, i}` by `p mod 4`.
fn gauss_sum(u: u64, p: u64, gamma: u32) -> Complex64 {
    let magnitude = (p as f64).powf(gamma as f64 / 2.0);
    if gamma % 2 == 0 {
        return Complex64::new(magnitude, 0.0);
    }
    let eps = if p % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    eps * (legendre(u, p) as f64) * magnitude
}

/// Closed-form evaluation. With `b = p^β u` (`u` a unit), the sum vanishes
/// unless `p^β | a`; then completing the square modulo `p^{α-β}` gives
/// `p^β e(-a'² (4u)^{-1} / p^{α-β}) G(u; p^{α-β})` where `a = p^β a'`.
pub fn quad_sum_closed(input: &QuadSumInput) -> Result<Complex64> {
    let QuadSumInput { a, b, p, alpha } = *input;
    if p % 2 == 0 {
        return Err(Error::Unsupported("even p".into()));
    }
    let m = input.modulus();
    let beta = valuation(b, p, alpha);
    if beta >= alpha {
        return Ok(if a == 0 {
            Complex64::new(m as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    let pb = p.pow(beta);
    if a % pb != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gamma = alpha - beta;
    let mg = p.pow(gamma);
    let u = (b / pb) % mg;
    let a1 = (a / pb) % mg;
    let inv4u = inv_mod(mul_mod(4, u, mg), mg).expect("4u is a unit for odd p");
    let shift = mul_mod(mul_mod(a1, a1, mg), inv4u, mg);
    let phase = e((mg - shift) % mg, mg);
    Ok(phase * gauss_sum(u, p, gamma) * pb as f64)
}

/// `μ̌(x) = p^{-(n-1)α} Π_j S(x_j, x_n)` for the paraboloid on `[Z/p^αZ]^n`.
pub fn paraboloid_transform_closed(spec: &GroupSpec, x: &GroupPoint) -> Result<Complex64> {
    let GroupSpec::CyclicModule { modulus, rank } = *spec else {
        return Err(Error::Unsupported("closed form needs a cyclic module".into()));
    };
    let (p, alpha) = crate::arith::prime_power(modulus)
        .filter(|(p, _)| *p % 2 == 1)
        .ok_or_else(|| Error::Unsupported(format!("modulus {modulus} is not an odd prime power")))?;
    if rank < 2 {
        return Err(Error::Unsupported("paraboloid needs rank at least 2".into()));
    }
    let group = Group::with_cap(spec.clone(), u64::MAX)?;
    group.index(x)?;
    let top = x.coords[rank - 1];
    let mut acc = Complex64::new(1.0, 0.0);
    for &xj in &x.coords[..rank - 1] {
        acc *= quad_sum_closed(&QuadSumInput::new(xj, top, p, alpha)?)? / modulus as f64;
    }
    Ok(acc)
}
