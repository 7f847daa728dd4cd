//! Finite abelian groups `[Z/NZ]^n` and `F_q^n`, their points and the
//! self-dual character pairing.

mod field;
mod fourier;
mod function;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::FiniteField;
pub use function::{Domain, GFunction};

/// Groups larger than this are rejected unless the caller raises the cap.
pub const DEFAULT_SIZE_CAP: u64 = 1 << 20;

/// Description of a finite abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `[Z/NZ]^n`.
    CyclicModule { modulus: u64, rank: usize },
    /// `F_{p^k}^n`; `polynomial` is the monic irreducible modulus, low to high.
    FiniteField {
        characteristic: u64,
        degree: usize,
        polynomial: Vec<u64>,
        rank: usize,
    },
}

impl GroupSpec {
    pub fn cyclic(modulus: u64, rank: usize) -> Self {
        GroupSpec::CyclicModule { modulus, rank }
    }

    /// `F_p^n` for a prime `p`.
    pub fn prime_field(p: u64, rank: usize) -> Self {
        GroupSpec::FiniteField {
            characteristic: p,
            degree: 1,
            polynomial: vec![0, 1],
            rank,
        }
    }

    pub fn finite_field(p: u64, polynomial: Vec<u64>, rank: usize) -> Self {
        GroupSpec::FiniteField {
            characteristic: p,
            degree: polynomial.len().saturating_sub(1),
            polynomial,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::CyclicModule { rank, .. } | GroupSpec::FiniteField { rank, .. } => *rank,
        }
    }

    /// Size of each coordinate ring: `N` or `q`.
    pub fn coordinate_order(&self) -> u128 {
        match self {
            GroupSpec::CyclicModule { modulus, .. } => *modulus as u128,
            GroupSpec::FiniteField {
                characteristic,
                degree,
                ..
            } => (*characteristic as u128).saturating_pow(*degree as u32),
        }
    }

    pub fn cardinality(&self) -> u128 {
        self.coordinate_order().saturating_pow(self.rank() as u32)
    }

    /// Short label such as `Z9^2` or `F3^2`.
    pub fn label(&self) -> String {
        match self {
            GroupSpec::CyclicModule { modulus, rank } => format!("Z{modulus}^{rank}"),
            GroupSpec::FiniteField { rank, .. } => format!("F{}^{rank}", self.coordinate_order()),
        }
    }
}

impl GroupSpec {
    /// `F_q^n` with the default modulus for `q = p^k`.
    pub fn field_of_order(q: u64, rank: usize) -> Result<Self> {
        let (p, k) = crate::arith::prime_power(q)
            .ok_or_else(|| Error::InvalidGroup(format!("field order {q} is not a prime power")))?;
        Ok(Self::finite_field(p, FiniteField::default_modulus(p, k as usize)?, rank))
    }
}

/// Parses `Z<N>^<n>` and `F<q>^<n>`; the rank defaults to 1.
impl std::str::FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidGroup(format!("cannot parse group '{s}', expected e.g. Z9^2 or F3^2"));
        let (head, rank) = match s.split_once('^') {
            Some((h, r)) => (h, r.trim().parse::<usize>().map_err(|_| bad())?),
            None => (s, 1),
        };
        let mut chars = head.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let order: u64 = chars.as_str().trim().parse().map_err(|_| bad())?;
        match kind {
            'Z' | 'z' => Ok(GroupSpec::cyclic(order, rank)),
            'F' | 'f' => GroupSpec::field_of_order(order, rank),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A point of the group (or of its dual, which shares the representation).
///
/// Coordinates are residues in `[0, N)` for cyclic modules and base-`p`
/// encoded field elements in `[0, q)` for finite fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupPoint {
    pub coords: Vec<u64>,
}

impl GroupPoint {
    pub fn new(coords: Vec<u64>) -> Self {
        GroupPoint { coords }
    }
}

impl From<Vec<u64>> for GroupPoint {
    fn from(coords: Vec<u64>) -> Self {
        GroupPoint { coords }
    }
}

/// A validated group with precomputed character tables.
///
/// Points are addressed by their index in row-major order over the
/// coordinates (first coordinate most significant). Internally every index
/// is also a string of "digits" in base `digit_base`: the `n` residues for a
/// cyclic module, or the `n k` prime-field coefficients for `F_{p^k}^n`.
#[derive(Clone)]
pub struct Group {
    spec: GroupSpec,
    size: usize,
    coord_order: u64,
    digit_base: u64,
    digits: usize,
    field: Option<FiniteField>,
    /// `exp(2 pi i j / digit_base)`.
    roots: Vec<Complex64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
    /// Finite fields only: `v -> M v` on one coordinate, `M` the trace-form
    /// Gram matrix, so that `Tr(u v)` becomes the digit dot product `u . (M v)`.
    trace_map: Vec<u64>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("spec", &self.spec)
            .field("size", &self.size)
            .finish()
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        Self::with_cap(spec, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(spec: GroupSpec, cap: u64) -> Result<Self> {
        let rank = spec.rank();
        if rank == 0 {
            return Err(Error::InvalidGroup("rank must be at least 1".into()));
        }
        let (field, digit_base, digits) = match &spec {
            GroupSpec::CyclicModule { modulus, .. } => {
                if *modulus < 2 {
                    return Err(Error::InvalidGroup(format!("modulus {modulus} must be at least 2")));
                }
                (None, *modulus, rank)
            }
            GroupSpec::FiniteField {
                characteristic,
                degree,
                polynomial,
                ..
            } => {
                if *degree == 0 || polynomial.len() != degree + 1 {
                    return Err(Error::Polynomial(format!(
                        "degree {degree} needs {} coefficients, got {}",
                        degree + 1,
                        polynomial.len()
                    )));
                }
                let field = FiniteField::new(*characteristic, polynomial.clone())?;
                (Some(field), *characteristic, rank * degree)
            }
        };
        let size = spec.cardinality();
        if size > cap as u128 {
            return Err(Error::SizeCap { size, cap });
        }
        let roots = (0..digit_base)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / digit_base as f64))
            .collect();
        let trace_map = match &field {
            None => Vec::new(),
            Some(f) => {
                let (p, k) = (f.characteristic(), f.degree());
                (0..f.order())
                    .map(|v| {
                        let c = f.decode(v);
                        let image: Vec<u64> = (0..k)
                            .map(|i| (0..k).fold(0, |acc, l| (acc + f.trace_form(i, l) * c[l]) % p))
                            .collect();
                        f.encode(&image)
                    })
                    .collect()
            }
        };
        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(digit_base as usize);
        let fft_inverse = planner.plan_fft_inverse(digit_base as usize);
        Ok(Group {
            coord_order: spec.coordinate_order() as u64,
            spec,
            size: size as usize,
            digit_base,
            digits,
            field,
            roots,
            fft_forward,
            fft_inverse,
            trace_map,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    /// `N` for `[Z/NZ]^n`, `q` for `F_q^n`.
    pub fn coordinate_order(&self) -> u64 {
        self.coord_order
    }

    pub fn field(&self) -> Option<&FiniteField> {
        self.field.as_ref()
    }

    pub fn is_field(&self) -> bool {
        self.field.is_some()
    }

    pub fn point(&self, index: usize) -> GroupPoint {
        let n = self.rank();
        let mut coords = vec![0u64; n];
        let mut i = index as u64;
        for c in coords.iter_mut().rev() {
            *c = i % self.coord_order;
            i /= self.coord_order;
        }
        GroupPoint { coords }
    }

    pub fn index(&self, x: &GroupPoint) -> Result<usize> {
        self.check_point(x)?;
        Ok(x
            .coords
            .iter()
            .fold(0u64, |acc, &c| acc * self.coord_order + c) as usize)
    }

    fn check_point(&self, x: &GroupPoint) -> Result<()> {
        if x.coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: x.coords.len(),
            });
        }
        if let Some(&c) = x.coords.iter().find(|&&c| c >= self.coord_order) {
            return Err(Error::CoordinateRange {
                value: c,
                modulus: self.coord_order,
            });
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = GroupPoint> + '_ {
        (0..self.size).map(|i| self.point(i))
    }

    pub fn neg_index(&self, i: usize) -> usize {
        let b = self.digit_base as usize;
        let (mut rest, mut out, mut scale) = (i, 0usize, 1usize);
        for _ in 0..self.digits {
            out += (b - rest % b) % b * scale;
            rest /= b;
            scale *= b;
        }
        out
    }

    pub fn add_index(&self, i: usize, j: usize) -> usize {
        let b = self.digit_base as usize;
        let (mut u, mut v, mut out, mut scale) = (i, j, 0usize, 1usize);
        for _ in 0..self.digits {
            out += (u % b + v % b) % b * scale;
            u /= b;
            v /= b;
            scale *= b;
        }
        out
    }

    pub fn sub_index(&self, i: usize, j: usize) -> usize {
        let b = self.digit_base as usize;
        let (mut u, mut v, mut out, mut scale) = (i, j, 0usize, 1usize);
        for _ in 0..self.digits {
            out += (u % b + b - v % b) % b * scale;
            u /= b;
            v /= b;
            scale *= b;
        }
        out
    }

    /// Exponent `t` with `pairing(x, xi) = exp(2 pi i t / m)`, where `m` is
    /// `N` for cyclic modules and `p` for finite fields.
    pub fn phase(&self, x: &GroupPoint, xi: &GroupPoint) -> Result<u64> {
        self.check_point(x)?;
        self.check_point(xi)?;
        Ok(match &self.field {
            None => x.coords.iter().zip(&xi.coords).fold(0u64, |acc, (&u, &v)| {
                ((acc as u128 + u as u128 * v as u128) % self.digit_base as u128) as u64
            }),
            Some(f) => {
                let p = f.characteristic();
                let mut t = 0u64;
                for (&u, &v) in x.coords.iter().zip(&xi.coords) {
                    let (cu, cv) = (f.decode(u), f.decode(v));
                    for (i, &a) in cu.iter().enumerate() {
                        for (l, &b) in cv.iter().enumerate() {
                            t = (t + a * b % p * f.trace_form(i, l)) % p;
                        }
                    }
                }
                t
            }
        })
    }

    /// The character pairing `<x, xi>`: `e^{2 pi i (x . xi) / N}` on
    /// `[Z/NZ]^n` and `e^{2 pi i Tr(x . xi) / p}` on `F_q^n`.
    pub fn pairing(&self, x: &GroupPoint, xi: &GroupPoint) -> Result<Complex64> {
        Ok(self.roots[self.phase(x, xi)? as usize])
    }

    /// [`Group::pairing`] on row-major indices.
    pub fn pairing_by_index(&self, x: usize, xi: usize) -> Complex64 {
        self.roots[self.phase(&self.point(x), &self.point(xi)).expect("valid indices") as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;

    mod approx_eq {
        use num_complex::Complex64;
        pub fn close(a: Complex64, b: Complex64) -> bool {
            (a - b).norm() < 1e-12
        }
    }

    fn omega(k: f64, m: f64) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * k / m)
    }

    #[test]
    fn cyclic_pairing_definition() {
        let g = Group::new(GroupSpec::cyclic(3, 1)).unwrap();
        let v = g.pairing(&vec![1].into(), &vec![1].into()).unwrap();
        assert!(close(v, omega(1.0, 3.0)));
    }

    #[test]
    fn pairing_with_zero_is_one() {
        for spec in [
            GroupSpec::cyclic(12, 2),
            GroupSpec::prime_field(5, 2),
            GroupSpec::finite_field(3, vec![1, 0, 1], 2),
        ] {
            let g = Group::new(spec).unwrap();
            let zero = g.point(0);
            for xi in g.points() {
                assert!(close(g.pairing(&zero, &xi).unwrap(), Complex64::new(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn f9_pairing_uses_absolute_trace() {
        let g = Group::new(GroupSpec::finite_field(3, vec![1, 0, 1], 1)).unwrap();
        // X encodes as 0 + 1 * 3
        let x = GroupPoint::new(vec![3]);
        let v = g.pairing(&x, &x).unwrap();
        assert!(close(v, omega(1.0, 3.0)));
    }

    #[test]
    fn pairing_is_symmetric_bilinear_nondegenerate() {
        for spec in [
            GroupSpec::cyclic(6, 2),
            GroupSpec::cyclic(9, 1),
            GroupSpec::prime_field(3, 2),
            GroupSpec::finite_field(3, vec![2, 2, 0, 1], 1),
            GroupSpec::finite_field(3, vec![1, 0, 1], 2),
        ] {
            let g = Group::new(spec.clone()).unwrap();
            for i in 0..g.size() {
                for j in 0..g.size() {
                    let a = g.pairing_by_index(i, j);
                    assert!(close(a, g.pairing_by_index(j, i)), "{spec}");
                    for k in [0, 1, g.size() - 1] {
                        let lhs = g.pairing_by_index(g.add_index(i, k), j);
                        let rhs = a * g.pairing_by_index(k, j);
                        assert!(close(lhs, rhs), "{spec}");
                    }
                }
                if i != 0 {
                    let witness = (0..g.size()).any(|x| !close(g.pairing_by_index(x, i), Complex64::new(1.0, 0.0)));
                    assert!(witness, "{spec}: character {i} is trivial");
                }
            }
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(Group::new(GroupSpec::cyclic(1, 2)), Err(Error::InvalidGroup(_))));
        assert!(matches!(Group::new(GroupSpec::cyclic(5, 0)), Err(Error::InvalidGroup(_))));
        assert!(matches!(
            Group::new(GroupSpec::cyclic(1024, 3)),
            Err(Error::SizeCap { .. })
        ));
        assert!(Group::with_cap(GroupSpec::cyclic(1024, 3), 1 << 30).is_ok());
        assert!(matches!(
            Group::new(GroupSpec::finite_field(3, vec![2, 0, 1], 1)),
            Err(Error::Polynomial(_))
        ));
        let g = Group::new(GroupSpec::cyclic(5, 2)).unwrap();
        assert!(matches!(g.index(&vec![1].into()), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(g.index(&vec![1, 5].into()), Err(Error::CoordinateRange { .. })));
    }

    #[test]
    fn index_roundtrip_and_negation() {
        let g = Group::new(GroupSpec::cyclic(12, 2)).unwrap();
        assert_eq!(g.index(&vec![4, 6].into()).unwrap(), 4 * 12 + 6);
        for i in 0..g.size() {
            assert_eq!(g.index(&g.point(i)).unwrap(), i);
            assert_eq!(g.add_index(i, g.neg_index(i)), 0);
        }
        let f = Group::new(GroupSpec::finite_field(3, vec![1, 0, 1], 2)).unwrap();
        for i in 0..f.size() {
            assert_eq!(f.add_index(i, f.neg_index(i)), 0);
            let p = f.point(i);
            let fld = f.field().unwrap();
            let negated: Vec<u64> = p.coords.iter().map(|&c| fld.neg(c)).collect();
            assert_eq!(f.index(&negated.into()).unwrap(), f.neg_index(i));
        }
    }

    #[test]
    fn spec_json_shape() {
        let s = serde_json::to_string(&GroupSpec::cyclic(9, 2)).unwrap();
        assert_eq!(s, r#"{"kind":"cyclic_module","modulus":9,"rank":2}"#);
        let f: GroupSpec = serde_json::from_str(
            r#"{"kind":"finite_field","characteristic":3,"degree":2,"polynomial":[1,0,1],"rank":1}"#,
        )
        .unwrap();
        assert_eq!(f.label(), "F9^1");
    }

    #[test]
    fn parse_labels() {
        assert_eq!("Z9^2".parse::<GroupSpec>().unwrap(), GroupSpec::cyclic(9, 2));
        assert_eq!("Z6".parse::<GroupSpec>().unwrap(), GroupSpec::cyclic(6, 1));
        assert_eq!("F3^2".parse::<GroupSpec>().unwrap(), GroupSpec::prime_field(3, 2));
        assert_eq!("F9^1".parse::<GroupSpec>().unwrap(), GroupSpec::finite_field(3, vec![1, 0, 1], 1));
        for bad in ["Q3^2", "Z^2", "F6^2", "Z9^x", ""] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
        let spec = GroupSpec::field_of_order(9, 2).unwrap();
        assert_eq!(spec.label().parse::<GroupSpec>().unwrap(), spec);
    }
}
