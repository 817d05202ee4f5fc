//! Modified Bessel functions of the second kind K0, K1 and the Bessel
//! function of the first kind J0.
//!
//! K0/K1 use the Temme power series for `x <= 2` and Steed's continued
//! fraction (CF2) above that. Both branches produce the exponentially scaled
//! values `e^x K_n(x)` first, so products of many Bessel terms can be formed
//! without underflow.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const EPS: f64 = 1e-17;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} requires a positive finite argument, got {x}")))
    }
}

/// K0(x) for x > 0. Underflows gracefully to 0 for very large x.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive(x, "bessel_k0")?;
    Ok(k01_scaled(x).0 * (-x).exp())
}

/// K1(x) for x > 0. Underflows gracefully to 0 for very large x.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_positive(x, "bessel_k1")?;
    Ok(k01_scaled(x).1 * (-x).exp())
}

/// `e^x K0(x)`.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check_positive(x, "bessel_k0_scaled")?;
    Ok(k01_scaled(x).0)
}

/// `e^x K1(x)`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    check_positive(x, "bessel_k1_scaled")?;
    Ok(k01_scaled(x).1)
}

/// Scaled pair `(e^x K0(x), e^x K1(x))`. Caller guarantees `x > 0`.
pub(crate) fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(x)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // K0 = -(ln(x/2) + gamma) I0 + sum_{k>=1} y^k/(k!)^2 H_k
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum_{k>=0} (psi(k+1)+psi(k+2)) y^k/(k!(k+1)!)
    let mut i0 = 1.0;
    let mut i1_sum = 1.0;
    let mut k0_tail = 0.0;
    let mut k1_tail = 1.0 - 2.0 * EULER_GAMMA;

    let mut t0 = 1.0; // y^k/(k!)^2
    let mut t1 = 1.0; // y^k/(k!(k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 1..200 {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let h_next = harmonic + 1.0 / (kf + 1.0);
        i0 += t0;
        i1_sum += t1;
        k0_tail += t0 * harmonic;
        let psi_pair = -2.0 * EULER_GAMMA + harmonic + h_next;
        k1_tail += t1 * psi_pair;
        if t0 * harmonic < EPS * k0_tail.abs().max(1e-300) && t1 * psi_pair.abs() < EPS * k1_tail.abs() {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_tail;
    (k0, k1)
}

/// Steed's continued fraction CF2 with Temme's normalisation, order zero.
fn k01_steed(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

const J0_MILLER_LIMIT: f64 = 25.0;

/// J0(x) for any finite x; absolute error near machine precision.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let y = 0.25 * ax * ax;
        1.0 - y + 0.25 * y * y
    } else if ax <= J0_MILLER_LIMIT {
        j0_miller(ax)
    } else {
        j0_hankel(ax)
    }
}

/// Backward recurrence normalised by J0 + 2 sum J_2k = 1.
fn j0_miller(x: f64) -> f64 {
    let start = (x + 20.0 + 8.0 * x.sqrt()) as usize;
    let start = start + start % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
        if k == 1 {
            j0 = cur;
        }
    }
    norm += j0;
    j0 / norm
}

/// Hankel asymptotic expansion, summed until the terms stop shrinking.
fn j0_hankel(x: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let m = 2.0 * kf - 1.0;
        term *= m * m / (8.0 * kf * x);
        if term.abs() >= last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        // a_k / x^k alternates in sign pairs: P gets even k, Q odd k.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - FRAC_PI_4;
    (1.0 / (FRAC_PI_2 * x)).sqrt() * (p * chi.cos() + q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    // (x, K0(x), K1(x)) from 40-digit arbitrary-precision evaluation.
    const K_TABLE: &[(f64, f64, f64)] = &[
        (1.000000e-06, 13.931442073626419459, 999999.99999278432422),
        (1.000000e-04, 9.326271913450274873, 9999.999508686404478),
        (1.000000e-02, 4.7212447301610949443, 99.973894118296245561),
        (1.000000e-01, 2.4270690247020165578, 9.8538447808706055744),
        (5.000000e-01, 0.92441907122766586178, 1.6564411200033008937),
        (1.000000e+00, 0.42102443824070833334, 0.60190723019723457474),
        (1.500000e+00, 0.21380556264752573672, 0.27738780045684381609),
        (1.999000e+00, 0.11403383058923290871, 0.14004984207710966262),
        (2.000000e+00, 0.11389387274953343565, 0.13986588181652242728),
        (2.001000e+00, 0.11375409873668462698, 0.13968218830176755518),
        (2.500000e+00, 0.062347553200366186029, 0.073890816347747063649),
        (3.000000e+00, 0.034739504386279248072, 0.040156431128194184377),
        (5.000000e+00, 0.0036910983340425942747, 0.0040446134454521642084),
        (7.500000e+00, 0.00024917761635611438901, 0.00026529739012528952599),
        (1.000000e+01, 0.000017780062316167651811, 0.000018648773453825584597),
        (1.500000e+01, 9.819536482396434541e-8, 1.014172936976209181e-7),
        (2.000000e+01, 5.7412378153365242927e-10, 5.8830579695570381777e-10),
        (3.000000e+01, 2.1324774964630563712e-14, 2.1677320018915494249e-14),
        (5.000000e+01, 3.4101677497894955139e-23, 3.4441022267175556126e-23),
        (7.500000e+01, 3.8701170455869118998e-34, 3.8958329467421913766e-34),
        (1.000000e+02, 4.6566282291759020189e-45, 4.6798537356369092866e-45),
        (2.000000e+02, 1.2256819797765334517e-88, 1.228742373472985812e-88),
        (4.000000e+02, 1.1997800432009760003e-175, 1.2012788332610325652e-175),
        (7.000000e+02, 4.669776431685376881e-306, 4.6731107967079661091e-306),
    ];

    const J_TABLE: &[(f64, f64)] = &[
        (0.0, 1.0),
        (1.0e-5, 0.999999999975),
        (0.3, 0.97762624653829608922),
        (1.0, 0.76519768655796655145),
        (2.0, 0.22389077914123566805),
        (5.0, -0.17759677131433830435),
        (8.0, 0.17165080713755390609),
        (12.0, 0.047689310796833536624),
        (17.5, -0.10311039822868592217),
        (24.9, 0.083245968353015490053),
        (25.0, 0.096266783275958116174),
        (25.1, 0.10827567149994945198),
        (33.0, 0.097270672235509462797),
        (40.0, 0.0073668905842372895535),
        (47.3, -0.094959345344983000891),
        (50.0, 0.055812327669251815005),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn k0_k1_match_reference_table() {
        for &(x, k0, k1) in K_TABLE {
            let got0 = bessel_k0(x).unwrap();
            let got1 = bessel_k1(x).unwrap();
            assert!(rel(got0, k0) <= 1e-12, "K0({x}) = {got0}, want {k0}");
            assert!(rel(got1, k1) <= 1e-12, "K1({x}) = {got1}, want {k1}");
        }
    }

    #[test]
    fn k1_at_two() {
        assert!((bessel_k1(2.0).unwrap() - 0.13986588).abs() < 1e-8);
    }

    #[test]
    fn k_ratio_tends_to_one() {
        let r = bessel_k0_scaled(1e6).unwrap() / bessel_k1_scaled(1e6).unwrap();
        assert!((r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn x_k1_tends_to_one_near_zero() {
        let x = 1e-9;
        assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn huge_argument_underflows_to_zero() {
        assert_eq!(bessel_k0(800.0).unwrap(), 0.0);
        assert_eq!(bessel_k1(800.0).unwrap(), 0.0);
        assert!(bessel_k0_scaled(800.0).unwrap() > 0.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k0(f64::NAN).is_err());
    }

    #[test]
    fn wronskian_against_i0_i1() {
        // I0 K1 + I1 K0 = 1/x, with I0/I1 from their power series.
        for &x in &[0.3, 1.0, 2.5, 6.0, 12.0] {
            let y = 0.25 * x * x;
            let (mut i0, mut i1, mut t0, mut t1) = (1.0, 1.0, 1.0, 1.0);
            for k in 1..200 {
                let kf = k as f64;
                t0 *= y / (kf * kf);
                t1 *= y / (kf * (kf + 1.0));
                i0 += t0;
                i1 += t1;
            }
            i1 *= 0.5 * x;
            let w = i0 * bessel_k1(x).unwrap() + i1 * bessel_k0(x).unwrap();
            assert!(rel(w, 1.0 / x) < 1e-12, "x={x} w={w}");
        }
    }

    #[test]
    fn j0_matches_reference_table() {
        for &(x, j) in J_TABLE {
            let got = bessel_j0(x);
            assert!((got - j).abs() <= 1e-12, "J0({x}) = {got}, want {j}");
            assert_eq!(got, bessel_j0(-x));
        }
    }

    #[test]
    fn j0_first_zero() {
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-14);
    }
}
