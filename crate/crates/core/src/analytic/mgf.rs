//! Moment generating functions of reciprocal hop SNRs.
//!
//! For the best of `L` i.i.d. exponential SNRs with mean `Ω`,
//!
//! ```text
//! M(s)  = E[exp(-s/γ)] = 2 Σ_ℓ (-1)^(ℓ+1) C(L,ℓ) z_ℓ K1(2 z_ℓ),   z_ℓ = sqrt(ℓ s / Ω)
//! M'(s) = -(2/Ω) Σ_ℓ (-1)^(ℓ+1) C(L,ℓ) ℓ K0(2 z_ℓ)
//! ```
//!
//! Sums are formed on exponentially scaled Bessel values relative to the
//! `ℓ = 1` term so that neither underflows at large `s`.

use crate::special::k01_scaled;
use crate::{Error, Result};

/// Which channel statistic a handle describes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MgfKind {
    /// Best of `L` channels of a relay hop.
    MaxRecip,
    /// The single channel into the destination.
    LastHop,
    /// Best of `L` per-relay minima over the final two hops, scaled by `c`.
    PairBound { c: f64 },
}

/// MGF of `1/γ` where `γ` is the largest of `L` i.i.d. exponential SNRs with
/// mean `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfHandle {
    pub kind: MgfKind,
    /// Hop position in the route (0-based), when known.
    pub hop: Option<usize>,
    pub relays: usize,
    /// Mean of each exponential candidate (for pair bounds, `μ_c`).
    pub omega: f64,
    coeffs: Vec<f64>,
}

impl MgfHandle {
    fn build(kind: MgfKind, relays: usize, omega: f64) -> Result<Self> {
        if relays < 1 {
            return Err(Error::domain("an MGF needs L >= 1"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("average SNR must be positive, got {omega}")));
        }
        // (-1)^(ℓ+1) C(L, ℓ)
        let mut coeffs = Vec::with_capacity(relays);
        let mut binom = 1.0;
        for l in 1..=relays {
            binom = binom * (relays + 1 - l) as f64 / l as f64;
            coeffs.push(if l % 2 == 1 { binom } else { -binom });
        }
        Ok(MgfHandle {
            kind,
            hop: None,
            relays,
            omega,
            coeffs,
        })
    }

    pub fn at_hop(mut self, hop: usize) -> Self {
        self.hop = Some(hop);
        self
    }

    /// `(S1, S0, x1)` with `M = 2 S1 e^{-x1}` and `M' = -(2/Ω) S0 e^{-x1}`.
    fn scaled_sums(&self, s: f64) -> (f64, f64, f64) {
        let x1 = 2.0 * (s / self.omega).sqrt();
        let mut s1 = 0.0;
        let mut s0 = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let l = (i + 1) as f64;
            let z = (l * s / self.omega).sqrt();
            let x = 2.0 * z;
            let (k0, k1) = k01_scaled(x);
            let damp = (x1 - x).exp();
            s1 += c * z * k1 * damp;
            s0 += c * l * k0 * damp;
        }
        (s1, s0, x1)
    }

    /// `M(s)`; equals 1 at `s = 0`.
    pub fn value(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        let (s1, _, x1) = self.scaled_sums(s);
        2.0 * s1 * (-x1).exp()
    }

    /// `M'(s)`; diverges logarithmically at `s = 0` when `L = 1`.
    pub fn derivative(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return if self.relays == 1 {
                f64::NEG_INFINITY
            } else {
                -self.mean_reciprocal()
            };
        }
        let (_, s0, x1) = self.scaled_sums(s);
        -2.0 / self.omega * s0 * (-x1).exp()
    }

    /// `(ln M(s), M'(s)/M(s))` for `s > 0`, free of underflow.
    pub fn log_value_and_ratio(&self, s: f64) -> (f64, f64) {
        let (s1, s0, x1) = self.scaled_sums(s);
        ((2.0 * s1).ln() - x1, -s0 / (self.omega * s1))
    }

    /// `E[1/γ]` for `L >= 2`, `∞` for `L = 1`.
    pub fn mean_reciprocal(&self) -> f64 {
        if self.relays == 1 {
            return f64::INFINITY;
        }
        // -M'(0+) = -(1/Ω) Σ (-1)^(ℓ+1) C(L,ℓ) ℓ ln ℓ
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let l = (i + 1) as f64;
                c * l * l.ln()
            })
            .sum();
        -sum / self.omega
    }
}

/// MGF of the reciprocal of the best of `L` i.i.d. exponential SNRs.
pub fn mgf_max_recip(relays: usize, omega: f64) -> Result<MgfHandle> {
    MgfHandle::build(MgfKind::MaxRecip, relays, omega)
}

/// MGF of the reciprocal SNR of the final hop.
pub fn mgf_last_hop(omega_d: f64) -> Result<MgfHandle> {
    MgfHandle::build(MgfKind::LastHop, 1, omega_d)
}

/// MGF of `1/(c · max_ℓ min(γ_a,ℓ, γ_b,ℓ))`. The minimum of two
/// exponentials is exponential with mean `1/(1/Ω_a + 1/Ω_b)`; `c = 1`
/// yields the ASEP lower bound, `c = 1/2` the upper bound.
pub fn mgf_pair_bound(relays: usize, omega_a: f64, omega_b: f64, c: f64) -> Result<MgfHandle> {
    if c != 1.0 && c != 0.5 {
        return Err(Error::domain(format!("pair bound factor must be 1 or 1/2, got {c}")));
    }
    if !(omega_a > 0.0 && omega_b > 0.0) {
        return Err(Error::domain("average SNRs must be positive"));
    }
    let mu = c / (1.0 / omega_a + 1.0 / omega_b);
    MgfHandle::build(MgfKind::PairBound { c }, relays, mu)
}
