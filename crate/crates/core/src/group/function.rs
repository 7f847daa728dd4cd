use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Group, GroupSpec};
use crate::error::{Error, Result};

/// Which side of the duality a function lives on. The tag fixes the measure:
/// counting measure on `G`, mass `1/|G|` per point on `Ĝ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "G")]
    Primal,
    #[serde(rename = "G_hat")]
    Dual,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Primal => "G",
            Domain::Dual => "G_hat",
        }
    }
}

/// A complex function on `G` or `Ĝ`, values in canonical enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFunction {
    spec: GroupSpec,
    domain: Domain,
    values: Vec<Complex64>,
}

impl GFunction {
    pub fn new(group: &Group, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.size() {
            return Err(Error::DimensionMismatch {
                expected: group.size(),
                got: values.len(),
            });
        }
        Ok(Self::from_parts(group.spec().clone(), domain, values))
    }

    pub(crate) fn from_parts(spec: GroupSpec, domain: Domain, values: Vec<Complex64>) -> Self {
        GFunction { spec, domain, values }
    }

    pub fn from_real(group: &Group, domain: Domain, values: &[f64]) -> Result<Self> {
        Self::new(
            group,
            domain,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zero(group: &Group, domain: Domain) -> Self {
        Self::from_parts(
            group.spec().clone(),
            domain,
            vec![Complex64::new(0.0, 0.0); group.size()],
        )
    }

    /// Indicator function of a set of point indices.
    pub fn indicator(group: &Group, domain: Domain, points: impl IntoIterator<Item = usize>) -> Self {
        let mut f = Self::zero(group, domain);
        for i in points {
            f.values[i] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Mass of a single point under this function's measure.
    pub fn atom_weight(&self) -> f64 {
        match self.domain {
            Domain::Primal => 1.0,
            Domain::Dual => 1.0 / self.values.len() as f64,
        }
    }

    fn check_compatible(&self, other: &GFunction) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        if self.domain != other.domain {
            return Err(Error::WrongDomain {
                expected: self.domain.name(),
                got: other.domain.name(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &GFunction) -> Result<GFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(self.spec.clone(), self.domain, values))
    }

    pub fn pointwise_mul(&self, other: &GFunction) -> Result<GFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self::from_parts(self.spec.clone(), self.domain, values))
    }

    /// `∫ f conj(g)` under the domain measure.
    pub fn inner(&self, other: &GFunction) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.atom_weight())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `L^p` norm under the domain measure; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::Exponent(format!("L^p exponent must be positive, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        let w = self.atom_weight();
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        Ok((w * s).powf(1.0 / p))
    }

    /// Lorentz quasi-norm `‖f‖_{p,s}` computed from the decreasing
    /// rearrangement, which is a step function with steps of width equal to
    /// the atom weight. On a step `[t0, t1)` with height `v`,
    /// `∫ (t^{1/p} v)^s dt/t = v^s (p/s) (t1^{s/p} - t0^{s/p})`.
    pub fn lorentz_norm(&self, p: f64, s: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 || p.is_infinite() {
            return Err(Error::Exponent(format!("Lorentz exponent p must be finite and positive, got {p}")));
        }
        if s.is_nan() || s <= 0.0 {
            return Err(Error::Exponent(format!("Lorentz exponent s must be positive, got {s}")));
        }
        let w = self.atom_weight();
        let mut mags: Vec<f64> = self.values.iter().map(|v| v.norm()).filter(|&v| v > 0.0).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        if s.is_infinite() {
            return Ok(mags
                .iter()
                .enumerate()
                .map(|(k, v)| v * ((k + 1) as f64 * w).powf(1.0 / p))
                .fold(0.0, f64::max));
        }
        let r = s / p;
        let total: f64 = mags
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let t0 = k as f64 * w;
                let t1 = (k + 1) as f64 * w;
                v.powf(s) * (t1.powf(r) - t0.powf(r))
            })
            .sum();
        Ok((total * p / s).powf(1.0 / s))
    }
}
