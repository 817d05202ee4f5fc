//! The kernel `Z(u)`, the inverse Laplace transform of `(1/s) P(1/s)` where
//! `P` is the instantaneous SEP. Averaging `P` over any positive SNR `γ`
//! then reduces to `E[P(γ)] = -∫_0^∞ Z(u) M'(u) du` with `M` the MGF of `1/γ`.

use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use super::modulation::{CraigTerm, ModulationSpec};
use crate::special::{
    bessel_j0, integrate_adaptive, inverse_laplace, sine_integral, upper_incomplete_gamma_complex, IltSpec,
};
use crate::{Error, Result};

/// `Z(u)` for the given modulation.
///
/// Binary `b = 1` gives `(1/2) J0(2 sqrt(a u))`; binary `b = 1/2` gives
/// `1/2 - Si(2 sqrt(a u))/π`; other binary shapes use the power series
/// for small `a u` and the numerical inverse Laplace transform beyond it.
/// Craig terms invert term by term, since
/// `exp(-β/s)/s` inverts to `J0(2 sqrt(β u))`.
pub fn z_function(m: &ModulationSpec, u: f64) -> Result<f64> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain(format!("Z(u) needs u > 0, got {u}")));
    }
    Kernel::new(m)?.eval(u, DEFAULT_TOL)
}

/// Absolute accuracy asked of `Z` when no caller tolerance applies.
pub(crate) const DEFAULT_TOL: f64 = 1e-13;
/// Beyond this `a u` the series loses more than about five digits.
const SERIES_LIMIT: f64 = 30.0;

/// `1/2 - (au)^b / (2Γ(b)) Σ_k (-au)^k / (k! (b+k) Γ(b+k+1))`.
fn binary_series(a: f64, b: f64, u: f64) -> f64 {
    let x = a * u;
    let mut sum = 0.0;
    // (-x)^k / (k! Γ(b+k+1)), built by recurrence
    let mut term = 1.0 / gamma(b + 1.0);
    let mut k = 0.0;
    loop {
        let add = term / (b + k);
        sum += add;
        k += 1.0;
        term *= -x / (k * (b + k));
        if add.abs() <= 1e-17 * sum.abs() && k > x.sqrt() {
            break;
        }
    }
    0.5 - x.powf(b) / (2.0 * gamma(b)) * sum
}

/// `Z(u)` for a binary modulation by numerical inversion only.
pub fn z_function_ilt(m: &ModulationSpec, u: f64, spec: &IltSpec) -> Result<f64> {
    match *m {
        ModulationSpec::Binary { a, b } => {
            let gb = gamma(b);
            inverse_laplace(
                move |s: Complex64| {
                    let g = upper_incomplete_gamma_complex(b, a / s).unwrap_or(Complex64::new(f64::NAN, 0.0));
                    g / (s * 2.0 * gb)
                },
                u,
                spec,
            )
        }
        ModulationSpec::Craig { .. } => Err(Error::domain(
            "Craig forms grow without bound on the left half-plane and cannot be inverted on a contour",
        )),
    }
}

/// A prepared evaluator for `Z`.
pub(crate) enum Kernel<'a> {
    Bessel { a: f64 },
    SineIntegral { a: f64 },
    Contour { m: &'a ModulationSpec, a: f64, b: f64, spec: IltSpec },
    Craig { terms: &'a [CraigTerm] },
}

impl<'a> Kernel<'a> {
    pub(crate) fn new(m: &'a ModulationSpec) -> Result<Self> {
        m.validate()?;
        Ok(match *m {
            ModulationSpec::Binary { a, b } if b == 1.0 => Kernel::Bessel { a },
            ModulationSpec::Binary { a, b } if b == 0.5 => Kernel::SineIntegral { a },
            ModulationSpec::Binary { a, b } => Kernel::Contour {
                m,
                a,
                b,
                spec: IltSpec::default(),
            },
            ModulationSpec::Craig { ref terms, .. } => Kernel::Craig { terms },
        })
    }

    /// An upper bound on `|Z(u)|` over all `u`.
    pub(crate) fn bound(&self) -> f64 {
        match self {
            Kernel::Bessel { .. } | Kernel::SineIntegral { .. } => 0.5,
            // Z(0+) = P(0) = 1/2 and Z is a decaying oscillation.
            Kernel::Contour { .. } => 1.0,
            Kernel::Craig { terms } => terms
                .iter()
                .map(|t| match t {
                    CraigTerm::Gaussian { weight, .. } => 0.5 * weight.abs(),
                    CraigTerm::Segment { lower, upper, alpha, .. } => {
                        let n = 64;
                        let h = (upper - lower) / n as f64;
                        (0..=n).map(|i| alpha(lower + i as f64 * h).abs()).fold(0.0, f64::max) * (upper - lower)
                    }
                })
                .sum(),
        }
    }

    /// `Z(u)` to absolute accuracy of roughly `tol` where the evaluation is
    /// itself numerical.
    pub(crate) fn eval(&self, u: f64, tol: f64) -> Result<f64> {
        match self {
            Kernel::Bessel { a } => Ok(0.5 * bessel_j0(2.0 * (a * u).sqrt())),
            Kernel::SineIntegral { a } => Ok(si_kernel(*a, u)),
            Kernel::Contour { a, b, .. } if a * u <= SERIES_LIMIT => Ok(binary_series(*a, *b, u)),
            Kernel::Contour { m, spec, .. } => z_function_ilt(m, u, spec),
            Kernel::Craig { terms } => {
                let mut total = 0.0;
                for t in terms.iter() {
                    total += match t {
                        CraigTerm::Gaussian { weight, g } => weight * si_kernel(*g, u),
                        CraigTerm::Segment {
                            lower,
                            upper,
                            alpha,
                            beta,
                        } => integrate_adaptive(
                            |th| alpha(th) * bessel_j0(2.0 * (beta(th) * u).sqrt()),
                            *lower,
                            *upper,
                            tol,
                            1e-11,
                        )?,
                    };
                }
                Ok(total)
            }
        }
    }
}

fn si_kernel(a: f64, u: f64) -> f64 {
    0.5 - sine_integral(2.0 * (a * u).sqrt()) / PI
}
