//! Sine integral Si(x) = ∫_0^x sin(t)/t dt.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

const EPS: f64 = 1e-16;

/// Si(x) for finite real `x`; odd in `x`.
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    let v = if t < 2.0 { series(t) } else { via_exponential_integral(t) };
    v.copysign(x)
}

fn series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        let add = term / (2.0 * k + 1.0);
        sum += add;
        if add.abs() <= EPS * sum.abs() {
            return sum;
        }
    }
}

/// Lentz evaluation of the continued fraction for E1(ix); Si = π/2 + Im.
fn via_exponential_integral(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..100_000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    FRAC_PI_2 + h.im
}
