//! Average symbol error probability (ASEP) of amplify-and-forward multihop
//! transmission over clusters of relays.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: Bessel K0/K1/J0, incomplete gamma, the sine integral,
//!   Gauss–Chebyshev rules and a fixed-Talbot inverse Laplace transform.
//! - [`channel`]: the layered relay topology, seeded Rayleigh realizations and
//!   harmonic end-to-end SNR arithmetic.
//! - [`routing`]: AP-1, AP-n, optimal, dual-path and forward–backward route
//!   selection, plus the protocol complexity formulas.
//! - [`analytic`]: MGF-of-reciprocal-SNR construction and the single-integral
//!   ASEP evaluation (AP-1 exact, AP-2 bounds).
//! - [`mc`]: semi-analytic Monte-Carlo ASEP estimation with deterministic
//!   parallelism.
//! - [`experiment`]: config-driven sweeps producing CSV and SVG artifacts.

pub mod analytic;
pub mod channel;
mod error;
pub mod experiment;
pub mod mc;
pub mod routing;
pub mod special;

pub use error::{Error, Result};

/// Linear power ratio from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Decibels from a linear power ratio.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
