//! Fourier transforms on `G` with counting measure and on `Ĝ` with the
//! mass-one normalisation.
//!
//! The transform is separable: one length-`b` DFT per digit axis, where the
//! digits are the residues of `[Z/NZ]^n` or the prime-field coefficients of
//! `F_{p^k}^n`. For fields the trace form is absorbed by relabelling the
//! frequency index through `trace_map`.

use num_complex::Complex64;

use super::{Domain, GFunction, Group};
use crate::error::{Error, Result};

impl Group {
    fn dft_axes(&self, data: &mut [Complex64], inverse: bool) {
        let fft = if inverse { &self.fft_inverse } else { &self.fft_forward };
        let b = self.digit_base as usize;
        let zero = Complex64::new(0.0, 0.0);
        let mut scratch = vec![zero; fft.get_inplace_scratch_len()];
        let mut line = vec![zero; b];
        let mut stride = 1usize;
        for _ in 0..self.digits {
            let block = stride * b;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
            stride = block;
        }
    }

    /// Index of the digit vector paired against `xi` by the flat transform.
    fn frequency_slot(&self, xi: usize) -> usize {
        if self.trace_map.is_empty() {
            return xi;
        }
        let q = self.coord_order;
        let mut rest = xi as u64;
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..self.rank() {
            out += self.trace_map[(rest % q) as usize] * scale;
            rest /= q;
            scale *= q;
        }
        out as usize
    }

    /// `f̂(ξ) = Σ_x f(x) <x, -ξ>`.
    pub fn forward_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.size, "value array does not match group size");
        let mut flat = values.to_vec();
        self.dft_axes(&mut flat, false);
        if self.trace_map.is_empty() {
            flat
        } else {
            (0..self.size).map(|xi| flat[self.frequency_slot(xi)]).collect()
        }
    }

    /// `Σ_ξ g(ξ) <x, ξ>`, without the `1/|G|` factor.
    pub fn synthesis_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.size, "value array does not match group size");
        let mut flat = if self.trace_map.is_empty() {
            values.to_vec()
        } else {
            let mut h = vec![Complex64::new(0.0, 0.0); self.size];
            for (xi, v) in values.iter().enumerate() {
                h[self.frequency_slot(xi)] = *v;
            }
            h
        };
        self.dft_axes(&mut flat, true);
        flat
    }

    /// `(1/|G|) Σ_ξ g(ξ) <x, ξ>`.
    pub fn inverse_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / self.size as f64;
        let mut out = self.synthesis_values(values);
        out.iter_mut().for_each(|v| *v *= scale);
        out
    }

    /// Group convolution with counting measure: `(a * b)(x) = Σ_y a(y) b(x - y)`.
    pub fn convolve_values(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let fa = self.forward_values(a);
        let fb = self.forward_values(b);
        let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(u, v)| u * v).collect();
        self.inverse_values(&prod)
    }

    pub fn fourier_forward(&self, f: &GFunction) -> Result<GFunction> {
        self.check_function(f, Domain::Primal)?;
        Ok(GFunction::from_parts(
            self.spec.clone(),
            Domain::Dual,
            self.forward_values(f.values()),
        ))
    }

    pub fn fourier_inverse(&self, g: &GFunction) -> Result<GFunction> {
        self.check_function(g, Domain::Dual)?;
        Ok(GFunction::from_parts(
            self.spec.clone(),
            Domain::Primal,
            self.inverse_values(g.values()),
        ))
    }

    pub(crate) fn check_function(&self, f: &GFunction, domain: Domain) -> Result<()> {
        if f.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        if f.domain() != domain {
            return Err(Error::WrongDomain {
                expected: domain.name(),
                got: f.domain().name(),
            });
        }
        Ok(())
    }
}
