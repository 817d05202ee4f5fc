//! Numerical inverse Laplace transform on the fixed Talbot contour.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Parameters of the fixed-Talbot inversion.
///
/// The contour is `s(θ) = r θ (cot θ + i)` with `r = 2M/(5u)`. In double
/// precision the roundoff floor grows like `e^(2M/5)`, which is why the
/// default term count is moderate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IltSpec {
    pub terms: usize,
    /// Extra terms used for the self-consistency check.
    pub check_offset: usize,
    /// Largest tolerated disagreement between the two term counts.
    pub tolerance: f64,
}

impl Default for IltSpec {
    fn default() -> Self {
        IltSpec {
            terms: 24,
            check_offset: 8,
            tolerance: 1e-8,
        }
    }
}

impl IltSpec {
    pub fn validate(&self) -> Result<()> {
        if self.terms < 8 {
            return Err(Error::domain(format!("inverse Laplace needs at least 8 terms, got {}", self.terms)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("inverse Laplace tolerance must be positive"));
        }
        Ok(())
    }
}

/// Talbot sum with exactly `m` terms.
pub fn talbot<F: Fn(Complex64) -> Complex64>(f: &F, u: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * u);
    let mut acc = 0.5 * f(Complex64::new(r, 0.0)).re * (r * u).exp();
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = 1.0 / theta.tan();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * u).exp() * f(s) * Complex64::new(1.0, sigma);
        acc += term.re;
    }
    r / mf * acc
}

/// Inverse Laplace transform of `f` at `u > 0`.
///
/// The value is computed with `spec.terms` and `spec.terms + check_offset`
/// contour points; if the two disagree beyond `spec.tolerance` (absolute, or
/// relative for large values) the inversion is reported as non-convergent.
pub fn inverse_laplace<F: Fn(Complex64) -> Complex64>(f: F, u: f64, spec: &IltSpec) -> Result<f64> {
    spec.validate()?;
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain(format!("inverse Laplace needs u > 0, got {u}")));
    }
    let value = talbot(&f, u, spec.terms);
    let check = talbot(&f, u, spec.terms + spec.check_offset);
    let diff = (value - check).abs();
    if !value.is_finite() || !check.is_finite() || diff > spec.tolerance * value.abs().max(1.0) {
        return Err(Error::numerical(format!(
            "inverse Laplace at u={u} did not settle: {value} with {} terms vs {check} with {} terms",
            spec.terms,
            spec.terms + spec.check_offset
        )));
    }
    Ok(value)
}
