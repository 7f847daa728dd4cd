//! Arithmetic in `F_{p^k}` with elements encoded as base-`p` integers.
//!
//! An element `c_0 + c_1 X + ... + c_{k-1} X^{k-1}` is stored as the integer
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`, so `0..q` enumerates the field and
//! the encoding of `F_p` itself is the identity.

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteField {
    p: u64,
    k: usize,
    /// Monic modulus, coefficients low to high, length `k + 1`.
    modulus: Vec<u64>,
    /// `Tr(X^i)` for `i < 2k - 1`.
    trace_powers: Vec<u64>,
}

impl FiniteField {
    /// Builds `F_{p^k} = F_p[X] / (modulus)`. The modulus must be monic and
    /// irreducible; irreducibility is checked by trial division.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("characteristic {p} is not prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::Polynomial("modulus must have degree at least 1".into()));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::Polynomial(format!("coefficient {c} not reduced mod {p}")));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::Polynomial("modulus must be monic".into()));
        }
        let k = modulus.len() - 1;
        if !is_irreducible(&modulus, p) {
            return Err(Error::Polynomial(format!("{modulus:?} is reducible over F_{p}")));
        }
        let mut field = FiniteField {
            p,
            k,
            modulus,
            trace_powers: Vec::new(),
        };
        field.trace_powers = (0..2 * k - 1)
            .map(|i| field.trace_slow(field.monomial(i)))
            .collect();
        Ok(field)
    }

    /// The prime field `F_p`, modulus `X`.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, vec![0, 1])
    }

    /// First monic irreducible of degree `k`, ordered by the base-`p`
    /// encoding of its lower coefficients.
    pub fn default_modulus(p: u64, k: usize) -> Result<Vec<u64>> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("characteristic {p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Polynomial("degree must be at least 1".into()));
        }
        let count = p
            .checked_pow(k as u32)
            .ok_or_else(|| Error::InvalidGroup(format!("{p}^{k} overflows")))?;
        (0..count)
            .map(|low| {
                let mut m: Vec<u64> = (0..k).map(|i| low / p.pow(i as u32) % p).collect();
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .ok_or_else(|| Error::Polynomial(format!("no irreducible of degree {k} over F_{p}")))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn decode(&self, x: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.k);
        let mut y = x;
        for _ in 0..self.k {
            c.push(y % self.p);
            y /= self.p;
        }
        c
    }

    pub fn encode(&self, coeffs: &[u64]) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        let (a, b) = (self.decode(x), self.decode(y));
        let s: Vec<u64> = a.iter().zip(&b).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    pub fn neg(&self, x: u64) -> u64 {
        let a: Vec<u64> = self
            .decode(x)
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        self.encode(&a)
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let (a, b) = (self.decode(x), self.decode(y));
        let mut prod = vec![0u64; 2 * self.k - 1];
        for (i, &u) in a.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(u, v, self.p)) % self.p;
            }
        }
        self.encode(&reduce(prod, &self.modulus, self.p))
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Element from an integer, through the prime subfield.
    pub fn from_int(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    /// Absolute trace to `F_p`, using linearity over the precomputed `Tr(X^i)`.
    pub fn trace(&self, x: u64) -> u64 {
        self.decode(x)
            .iter()
            .zip(&self.trace_powers)
            .fold(0, |acc, (&c, &t)| (acc + mul_mod(c, t, self.p)) % self.p)
    }

    /// `Tr(X^{i+l})`: the Gram matrix of the trace form in the monomial basis.
    pub fn trace_form(&self, i: usize, l: usize) -> u64 {
        self.trace_powers[i + l]
    }

    fn monomial(&self, i: usize) -> u64 {
        let mut c = vec![0u64; i + 1];
        c[i] = 1;
        self.encode(&reduce(c, &self.modulus, self.p))
    }

    /// `x + x^p + ... + x^{p^{k-1}}` by repeated Frobenius.
    fn trace_slow(&self, x: u64) -> u64 {
        let mut acc = 0;
        let mut y = x;
        for _ in 0..self.k {
            acc = self.add(acc, y);
            y = self.pow(y, self.p);
        }
        debug_assert!(acc < self.p, "trace must land in the prime field");
        acc
    }
}

/// Remainder of `a` modulo the polynomial `m` over `F_p` (coefficients low to high).
fn reduce(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
    while a.len() > dm {
        let top = a.pop().unwrap();
        if top == 0 {
            continue;
        }
        let f = mul_mod(top, lead_inv, p);
        let shift = a.len() - dm;
        for (i, &c) in m[..dm].iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - mul_mod(f, c, p)) % p;
        }
    }
    a.resize(dm, 0);
    a
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        // every monic polynomial of degree d
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut y = low;
            for _ in 0..d {
                div.push(y % p);
                y /= p;
            }
            div.push(1);
            if reduce(m.to_vec(), &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}
