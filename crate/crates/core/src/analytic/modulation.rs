//! Instantaneous symbol error probability of the supported modulations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::special::{integrate_adaptive, upper_incomplete_gamma};
use crate::{Error, Result};

/// A real function of the Craig angle θ.
pub type AngleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One additive term of a Craig-form SEP.
#[derive(Clone)]
pub enum CraigTerm {
    /// `weight · (1/π) ∫_0^{π/2} exp(-g γ / sin²θ) dθ`, i.e. `weight · Q(sqrt(2 g γ))`.
    Gaussian { weight: f64, g: f64 },
    /// `∫_lower^upper α(θ) exp(-β(θ) γ) dθ` with `β > 0` on the open interval.
    Segment {
        lower: f64,
        upper: f64,
        alpha: AngleFn,
        beta: AngleFn,
    },
}

impl CraigTerm {
    /// A segment starting at θ = 0.
    pub fn segment(upper: f64, alpha: AngleFn, beta: AngleFn) -> Self {
        CraigTerm::Segment {
            lower: 0.0,
            upper,
            alpha,
            beta,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            CraigTerm::Gaussian { weight, g } => {
                if !(weight.is_finite() && *g > 0.0 && g.is_finite()) {
                    return Err(Error::domain("Gaussian Craig term needs finite weight and g > 0"));
                }
            }
            CraigTerm::Segment {
                lower,
                upper,
                alpha,
                beta,
            } => {
                if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                    return Err(Error::domain(format!("Craig segment [{lower}, {upper}] is empty")));
                }
                for k in 1..16 {
                    let th = lower + (upper - lower) * k as f64 / 16.0;
                    let (a, b) = (alpha(th), beta(th));
                    if !(b > 0.0 && b.is_finite() && a.is_finite()) {
                        return Err(Error::domain(format!(
                            "Craig segment needs finite α and positive β, got α({th}) = {a}, β({th}) = {b}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn sep(&self, snr: f64) -> Result<f64> {
        match self {
            CraigTerm::Gaussian { weight, g } => {
                Ok(weight * upper_incomplete_gamma(0.5, g * snr)? / (2.0 * PI.sqrt()))
            }
            CraigTerm::Segment {
                lower,
                upper,
                alpha,
                beta,
            } => integrate_adaptive(|th| alpha(th) * (-beta(th) * snr).exp(), *lower, *upper, 1e-10, 0.0),
        }
    }
}

/// How an instantaneous SNR maps to a symbol error probability.
#[derive(Clone)]
pub enum ModulationSpec {
    /// `P(γ) = Γ(b, aγ) / (2Γ(b))`.
    Binary { a: f64, b: f64 },
    /// Sum of Craig-form terms.
    Craig { label: String, terms: Vec<CraigTerm> },
}

impl fmt::Debug for ModulationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulationSpec::Binary { a, b } => f.debug_struct("Binary").field("a", a).field("b", b).finish(),
            ModulationSpec::Craig { label, terms } => f
                .debug_struct("Craig")
                .field("label", label)
                .field("terms", &terms.len())
                .finish(),
        }
    }
}

impl ModulationSpec {
    pub fn binary(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::domain(format!("binary modulation needs a, b > 0, got a = {a}, b = {b}")));
        }
        Ok(ModulationSpec::Binary { a, b })
    }

    /// Differential PSK: `a = 1, b = 1`.
    pub fn dpsk() -> Self {
        ModulationSpec::Binary { a: 1.0, b: 1.0 }
    }

    /// Non-coherent binary FSK: `a = 1/2, b = 1`.
    pub fn ncfsk() -> Self {
        ModulationSpec::Binary { a: 0.5, b: 1.0 }
    }

    /// Coherent BPSK: `a = 1, b = 1/2`.
    pub fn bpsk() -> Self {
        ModulationSpec::Binary { a: 1.0, b: 0.5 }
    }

    /// Coherent binary FSK: `a = 1/2, b = 1/2`.
    pub fn bfsk_coherent() -> Self {
        ModulationSpec::Binary { a: 0.5, b: 0.5 }
    }

    /// Coherent M-PSK in Craig form,
    /// `(1/π) ∫_0^{(M-1)π/M} exp(-γ sin²(π/M) / sin²θ) dθ`.
    ///
    /// The part of the range beyond π/2 is folded back onto
    /// `[π/M, π/2]`, leaving a Gaussian term plus a segment on which
    /// `β ≤ 1`.
    pub fn mpsk(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!("M-PSK needs M >= 2, got {m}")));
        }
        let g = (PI / m as f64).sin().powi(2);
        let mut terms = vec![CraigTerm::Gaussian { weight: 1.0, g }];
        if m > 2 {
            terms.push(CraigTerm::Segment {
                lower: PI / m as f64,
                upper: FRAC_PI_2,
                alpha: Arc::new(|_| 1.0 / PI),
                beta: Arc::new(move |th: f64| g / th.sin().powi(2)),
            });
        }
        Ok(ModulationSpec::Craig {
            label: format!("{m}-PSK"),
            terms,
        })
    }

    /// A user-described Craig form.
    pub fn craig(label: impl Into<String>, terms: Vec<CraigTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("a Craig form needs at least one term"));
        }
        for t in &terms {
            t.validate()?;
        }
        Ok(ModulationSpec::Craig {
            label: label.into(),
            terms,
        })
    }

    /// Preset lookup: `dpsk`, `ncfsk`, `bpsk`, `bfsk` (coherent) or `<M>psk`.
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "dpsk" => Ok(Self::dpsk()),
            "ncfsk" => Ok(Self::ncfsk()),
            "bpsk" => Ok(Self::bpsk()),
            "bfsk" | "cbfsk" => Ok(Self::bfsk_coherent()),
            "qpsk" => Self::mpsk(4),
            other => match other.strip_suffix("psk").and_then(|m| m.trim_end_matches('-').parse::<u32>().ok()) {
                Some(m) => Self::mpsk(m),
                None => Err(Error::config(format!("unknown modulation '{name}'"))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModulationSpec::Binary { a, b } => match (*a, *b) {
                (1.0, 1.0) => "DPSK".into(),
                (0.5, 1.0) => "NCFSK".into(),
                (1.0, 0.5) => "BPSK".into(),
                (0.5, 0.5) => "BFSK".into(),
                _ => format!("binary(a={a}, b={b})"),
            },
            ModulationSpec::Craig { label, .. } => label.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModulationSpec::Binary { a, b } => Self::binary(*a, *b).map(|_| ()),
            ModulationSpec::Craig { terms, .. } => terms.iter().try_for_each(CraigTerm::validate),
        }
    }

    /// Symbol error probability at instantaneous SNR `snr`.
    pub fn sep(&self, snr: f64) -> Result<f64> {
        match self {
            ModulationSpec::Binary { .. } => sep_binary(self, snr),
            ModulationSpec::Craig { .. } => sep_craig(self, snr),
        }
    }

    /// The SEP at zero SNR, the largest value the SEP takes.
    pub fn sep_at_zero(&self) -> Result<f64> {
        self.sep(0.0)
    }
}

fn check_snr(snr: f64) -> Result<()> {
    if !(snr >= 0.0) {
        return Err(Error::domain(format!("SNR must be non-negative, got {snr}")));
    }
    Ok(())
}

/// `Γ(b, a·snr) / (2Γ(b))`.
pub fn sep_binary(m: &ModulationSpec, snr: f64) -> Result<f64> {
    check_snr(snr)?;
    match *m {
        ModulationSpec::Binary { a, b } => {
            if b == 1.0 {
                Ok(0.5 * (-a * snr).exp())
            } else {
                Ok(upper_incomplete_gamma(b, a * snr)? / (2.0 * gamma(b)))
            }
        }
        ModulationSpec::Craig { .. } => Err(Error::domain("sep_binary needs a binary modulation")),
    }
}

/// Sum of the Craig terms at `snr`, segments by adaptive quadrature.
pub fn sep_craig(m: &ModulationSpec, snr: f64) -> Result<f64> {
    check_snr(snr)?;
    match m {
        ModulationSpec::Craig { terms, .. } => {
            let mut total = 0.0;
            for t in terms {
                total += t.sep(snr)?;
            }
            Ok(total)
        }
        ModulationSpec::Binary { .. } => Err(Error::domain("sep_craig needs a Craig-form modulation")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_constants() {
        let ab = |m: ModulationSpec| match m {
            ModulationSpec::Binary { a, b } => (a, b),
            _ => unreachable!(),
        };
        assert_eq!(ab(ModulationSpec::dpsk()), (1.0, 1.0));
        assert_eq!(ab(ModulationSpec::ncfsk()), (0.5, 1.0));
        assert_eq!(ab(ModulationSpec::bpsk()), (1.0, 0.5));
        assert_eq!(ab(ModulationSpec::bfsk_coherent()), (0.5, 0.5));
    }

    #[test]
    fn binary_values() {
        assert_eq!(ModulationSpec::dpsk().sep(0.0).unwrap(), 0.5);
        assert!((ModulationSpec::dpsk().sep(1.0).unwrap() - 0.5 * (-1.0f64).exp()).abs() < 1e-16);
        // Q(sqrt 2)
        assert!((ModulationSpec::bpsk().sep(1.0).unwrap() - 0.078_649_603_525_142_7).abs() < 1e-12);
        assert!((ModulationSpec::bpsk().sep(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((ModulationSpec::ncfsk().sep(2.0).unwrap() - 0.5 * (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn two_psk_is_bpsk() {
        let m2 = ModulationSpec::mpsk(2).unwrap();
        for &g in &[0.0, 0.3, 1.0, 4.0] {
            let d = m2.sep(g).unwrap() - ModulationSpec::bpsk().sep(g).unwrap();
            assert!(d.abs() < 1e-9);
        }
    }

    /// Plain trapezoid on the unfolded single-integral form.
    fn mpsk_trapezoid(m: u32, snr: f64, n: usize) -> f64 {
        let g = (PI / m as f64).sin().powi(2);
        let top = (m as f64 - 1.0) * PI / m as f64;
        let h = top / n as f64;
        let f = |th: f64| if th == 0.0 { 0.0 } else { (-snr * g / th.sin().powi(2)).exp() / PI };
        let mut s = 0.5 * (f(0.0) + f(top));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h
    }

    #[test]
    fn four_psk_matches_brute_force() {
        let got = ModulationSpec::mpsk(4).unwrap().sep(5.0).unwrap();
        let want = mpsk_trapezoid(4, 5.0, 1_000_000);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn eight_psk_matches_brute_force_on_grid() {
        let m = ModulationSpec::mpsk(8).unwrap();
        for &snr in &[0.1, 1.0, 7.0, 30.0] {
            let want = mpsk_trapezoid(8, snr, 200_000);
            assert!((m.sep(snr).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_snr_constant() {
        assert!((ModulationSpec::mpsk(8).unwrap().sep(0.0).unwrap() - 7.0 / 8.0).abs() < 1e-10);
        assert!((ModulationSpec::mpsk(2).unwrap().sep(0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn user_segment_craig() {
        let q = ModulationSpec::craig(
            "Q",
            vec![CraigTerm::segment(
                FRAC_PI_2,
                Arc::new(|_| 1.0 / PI),
                Arc::new(|th: f64| 1.0 / th.sin().powi(2)),
            )],
        )
        .unwrap();
        assert!((q.sep(1.0).unwrap() - ModulationSpec::bpsk().sep(1.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ModulationSpec::binary(0.0, 1.0).is_err());
        assert!(ModulationSpec::binary(1.0, -1.0).is_err());
        assert!(ModulationSpec::mpsk(1).is_err());
        assert!(ModulationSpec::dpsk().sep(-1.0).is_err());
        assert!(ModulationSpec::craig("x", vec![]).is_err());
        let bad = CraigTerm::segment(1.0, Arc::new(|_| 1.0), Arc::new(|_| -1.0));
        assert!(ModulationSpec::craig("x", vec![bad]).is_err());
        assert!(sep_binary(&ModulationSpec::mpsk(4).unwrap(), 1.0).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(ModulationSpec::from_name("DPSK").unwrap().label(), "DPSK");
        assert_eq!(ModulationSpec::from_name("8psk").unwrap().label(), "8-PSK");
        assert_eq!(ModulationSpec::from_name("qpsk").unwrap().label(), "4-PSK");
        assert!(ModulationSpec::from_name("qam").is_err());
    }
}
