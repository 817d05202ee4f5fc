//! Upper (complementary) incomplete gamma function Γ(b, x).

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Γ(b, x) = ∫_x^∞ t^(b-1) e^(-t) dt for b > 0, x ≥ 0.
pub fn upper_incomplete_gamma(b: f64, x: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!("incomplete gamma needs b > 0, got {b}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("incomplete gamma needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(gamma(b));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let use_fraction = x >= b + 1.0 || (b < 1.0 && x >= 1.0);
    if use_fraction {
        continued_fraction(b, x)
    } else {
        Ok(gamma(b) - lower_series(b, x)?)
    }
}

/// γ(b, x) by its power series.
fn lower_series(b: f64, x: f64) -> Result<f64> {
    let mut ap = b;
    let mut del = 1.0 / b;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            return Ok(sum * (-x + b * x.ln()).exp());
        }
    }
    Err(Error::numerical(format!("incomplete gamma series did not converge at b={b}, x={x}")))
}

/// Γ(b, x) by the Legendre continued fraction, modified Lentz evaluation.
fn continued_fraction(b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut bb = x + 1.0 - b;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / bb;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - b);
        bb += 2.0;
        d = an * d + bb;
        if d.abs() < TINY {
            d = TINY;
        }
        c = bb + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok((-x + b * x.ln()).exp() * h);
        }
    }
    Err(Error::numerical(format!("incomplete gamma fraction did not converge at b={b}, x={x}")))
}

/// Γ(b, z) for complex z on the principal branch, via Γ(b) − γ(b, z).
///
/// Accurate when |z| is moderate, which is the regime the Talbot contour
/// visits for the arguments used here.
pub fn upper_incomplete_gamma_complex(b: f64, z: Complex64) -> Result<Complex64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!("incomplete gamma needs b > 0, got {b}")));
    }
    let gb = Complex64::new(gamma(b), 0.0);
    if z == Complex64::new(0.0, 0.0) {
        return Ok(gb);
    }
    let mut ap = b;
    let mut del = Complex64::new(1.0 / b, 0.0);
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= z / ap;
        sum += del;
        if del.norm() < sum.norm() * EPS {
            let lower = sum * (-z + b * z.ln()).exp();
            return Ok(gb - lower);
        }
    }
    Err(Error::numerical(format!("complex incomplete gamma series did not converge at z={z}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // (b, x, Γ(b, x)) from 40-digit arbitrary-precision evaluation.
    const TABLE: &[(f64, f64, f64)] = &[
        (0.5, 1.0, 0.2788055852806619765),
        (0.5, 0.1, 1.1604624847937442309),
        (0.5, 5.0, 0.0027746032604128093195),
        (0.5, 30.0, 1.6813032086528978612e-14),
        (1.0, 2.5, 0.08208499862389879517),
        (2.5, 1.0, 1.1288027918891022864),
        (2.5, 3.5, 0.29330607260055144944),
        (2.5, 10.0, 0.0016613173117794600556),
        (0.1, 0.01, 3.2096552407902130905),
        (0.1, 2.0, 0.053977968112828232196),
        (7.0, 3.0, 695.87385457763433102),
        (7.0, 8.0, 225.6294798262062427),
        (7.0, 20.0, 0.1836881970165365277),
        (0.01, 0.5, 0.55948291420134991065),
        (3.3, 0.0001, 2.6834373819557491819),
    ];

    #[test]
    fn matches_reference_table() {
        for &(b, x, want) in TABLE {
            let got = upper_incomplete_gamma(b, x).unwrap();
            assert!(((got - want) / want).abs() <= 1e-10, "Γ({b},{x}) = {got}, want {want}");
        }
    }

    #[test]
    fn unit_shape_is_exponential() {
        for &x in &[0.0, 0.3, 1.0, 4.0, 40.0] {
            let got = upper_incomplete_gamma(1.0, x).unwrap();
            assert!(((got - (-x).exp()) / (-x).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn half_shape_at_zero_is_sqrt_pi() {
        let got = upper_incomplete_gamma(0.5, 0.0).unwrap();
        assert!((got - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn half_shape_at_one() {
        assert!((upper_incomplete_gamma(0.5, 1.0).unwrap() - 0.27880558).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(upper_incomplete_gamma(0.0, 1.0).is_err());
        assert!(upper_incomplete_gamma(1.0, -1.0).is_err());
        assert!(upper_incomplete_gamma(1.0, f64::NAN).is_err());
    }

    #[test]
    fn complex_agrees_with_real_on_axis() {
        for &(b, x, want) in TABLE.iter().filter(|t| t.1 < 6.0) {
            let got = upper_incomplete_gamma_complex(b, Complex64::new(x, 0.0)).unwrap();
            assert!(((got.re - want) / want).abs() < 1e-9, "b={b} x={x}");
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn complex_unit_shape_is_exponential() {
        let z = Complex64::new(0.7, -1.3);
        let got = upper_incomplete_gamma_complex(1.0, z).unwrap();
        assert!((got - (-z).exp()).norm() < 1e-13);
    }
}
