//! Semi-analytic Monte-Carlo ASEP estimation.
//!
//! Each trial draws one fading realization, routes it and averages the
//! conditional SEP of the resulting SNR. Trial `t` draws its channels from
//! `(seed, t)` alone, and trials are grouped into fixed blocks of
//! [`BLOCK_TRIALS`] whose partial moments are reduced in block order, so the
//! estimate is bit-identical for any worker count.

use crate::analytic::ModulationSpec;
use crate::channel::{blank_realization, fill_realization, Fading, RngSpec, Topology};
use crate::routing::Protocol;
use crate::special::NeumaierSum;
use crate::{db_to_linear, Error, Result};

/// Trials per reduction block.
pub const BLOCK_TRIALS: u64 = 1024;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Everything a Monte-Carlo run needs besides the topology.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub trials: u64,
    pub protocol: Protocol,
    pub modulation: ModulationSpec,
    pub rng: RngSpec,
    pub workers: usize,
    pub fading: Fading,
}

impl McConfig {
    /// Single-worker Rayleigh run.
    pub fn new(protocol: Protocol, modulation: ModulationSpec, trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            protocol,
            modulation,
            rng: RngSpec::new(seed),
            workers: 1,
            fading: Fading::Rayleigh,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_fading(mut self, fading: Fading) -> Self {
        self.fading = fading;
        self
    }

    pub fn with_protocol(mut self, protocol: Protocol) -> Self {
        self.protocol = protocol;
        self
    }

    fn validate_common(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers must be at least 1"));
        }
        self.modulation.validate()
    }

    pub fn validate(&self, topo: &Topology) -> Result<()> {
        self.validate_common()?;
        self.protocol.validate(topo.n_hops(), topo.relays())
    }
}

/// How an ASEP value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mc,
    AnalyticExact,
    AnalyticLower,
    AnalyticUpper,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::AnalyticExact => "analytic-exact",
            Method::AnalyticLower => "analytic-lower",
            Method::AnalyticUpper => "analytic-upper",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Method::Mc),
            "analytic-exact" => Ok(Method::AnalyticExact),
            "analytic-lower" => Ok(Method::AnalyticLower),
            "analytic-upper" => Ok(Method::AnalyticUpper),
            other => Err(Error::config(format!("unknown method tag {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ASEP value with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsepEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for analytic values.
    pub std_error: f64,
    /// Normal 95% interval, floored at zero.
    pub ci95: (f64, f64),
    pub trials: u64,
    pub method: Method,
}

impl AsepEstimate {
    /// A deterministic value with a degenerate interval.
    pub fn analytic(value: f64, method: Method) -> Self {
        AsepEstimate {
            mean: value,
            std_error: 0.0,
            ci95: (value, value),
            trials: 0,
            method,
        }
    }

    fn from_moments(mean: f64, variance: f64, trials: u64) -> Self {
        let std_error = (variance / trials as f64).sqrt();
        AsepEstimate {
            mean,
            std_error,
            ci95: ((mean - Z95 * std_error).max(0.0), mean + Z95 * std_error),
            trials,
            method: Method::Mc,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within_sigma(&self, value: f64, k: f64) -> bool {
        (value - self.mean).abs() <= k * self.std_error
    }
}

/// Estimates of several protocols on common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedEstimate {
    pub protocols: Vec<Protocol>,
    pub estimates: Vec<AsepEstimate>,
    /// Covariance matrix of the estimated means (row-major, `k × k`).
    pub covariance: Vec<f64>,
}

impl PairedEstimate {
    /// Standard error of `mean_i - mean_j`.
    pub fn diff_std_error(&self, i: usize, j: usize) -> f64 {
        let k = self.protocols.len();
        let var = self.covariance[i * k + i] + self.covariance[j * k + j] - 2.0 * self.covariance[i * k + j];
        var.max(0.0).sqrt()
    }

    /// `mean_i <= mean_j + sigmas · se(mean_i - mean_j)`.
    pub fn ordered(&self, i: usize, j: usize, sigmas: f64) -> bool {
        self.estimates[i].mean <= self.estimates[j].mean + sigmas * self.diff_std_error(i, j)
    }
}

/// Running moments of a `k`-vector: compensated sums for the means and
/// co-moments `Σ (x_i - m_i)(x_j - m_j)` for the covariance.
#[derive(Debug, Clone)]
struct Moments {
    n: u64,
    sums: Vec<NeumaierSum>,
    mean: Vec<f64>,
    comoment: Vec<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Moments {
            n: 0,
            sums: vec![NeumaierSum::default(); k],
            mean: vec![0.0; k],
            comoment: vec![0.0; k * k],
        }
    }

    fn push(&mut self, x: &[f64], delta: &mut [f64]) {
        let k = x.len();
        self.n += 1;
        let n = self.n as f64;
        for i in 0..k {
            self.sums[i].add(x[i]);
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / n;
        }
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        let k = self.mean.len();
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta: Vec<f64> = (0..k).map(|i| other.mean[i] - self.mean[i]).collect();
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += other.comoment[i * k + j] + delta[i] * delta[j] * na * nb / n;
            }
            self.sums[i].add(other.sums[i].value());
            self.mean[i] += delta[i] * nb / n;
        }
        self.n += other.n;
    }
}

/// Effective SNR of each protocol on trial `trial_index`.
pub fn effective_snrs(
    topo: &Topology,
    protocols: &[Protocol],
    fading: Fading,
    rng: &RngSpec,
    trial_index: u64,
) -> Result<Vec<f64>> {
    let mut real = blank_realization(topo);
    fill_realization(topo, fading, rng, trial_index, &mut real);
    protocols.iter().map(|p| p.effective_snr(&real)).collect()
}

fn run_block(topo: &Topology, protocols: &[Protocol], cfg: &McConfig, block: u64) -> Result<Moments> {
    let k = protocols.len();
    let start = block * BLOCK_TRIALS;
    let end = (start + BLOCK_TRIALS).min(cfg.trials);
    let mut moments = Moments::new(k);
    let mut real = blank_realization(topo);
    let mut x = vec![0.0; k];
    let mut delta = vec![0.0; k];
    for t in start..end {
        fill_realization(topo, cfg.fading, &cfg.rng, t, &mut real);
        for (slot, p) in x.iter_mut().zip(protocols) {
            *slot = cfg.modulation.sep(p.effective_snr(&real)?)?;
        }
        moments.push(&x, &mut delta);
    }
    Ok(moments)
}

fn run_blocks(topo: &Topology, protocols: &[Protocol], cfg: &McConfig) -> Result<Vec<Moments>> {
    let blocks = cfg.trials.div_ceil(BLOCK_TRIALS);
    #[cfg(feature = "parallel")]
    if cfg.workers > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
        return pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| run_block(topo, protocols, cfg, b))
                .collect()
        });
    }
    (0..blocks).map(|b| run_block(topo, protocols, cfg, b)).collect()
}

fn reduce(protocols: &[Protocol], blocks: Vec<Moments>) -> PairedEstimate {
    let k = protocols.len();
    let mut total = Moments::new(k);
    for b in &blocks {
        total.merge(b);
    }
    let n = total.n as f64;
    // Sample covariance of the data over n gives the covariance of the means.
    let denom = if total.n > 1 { (n - 1.0) * n } else { f64::INFINITY };
    let covariance: Vec<f64> = total.comoment.iter().map(|c| c / denom).collect();
    let estimates = (0..k)
        .map(|i| {
            let mean = total.sums[i].value() / n;
            let variance = if total.n > 1 { total.comoment[i * k + i] / (n - 1.0) } else { 0.0 };
            AsepEstimate::from_moments(mean, variance.max(0.0), total.n)
        })
        .collect();
    PairedEstimate {
        protocols: protocols.to_vec(),
        estimates,
        covariance,
    }
}

/// Monte-Carlo ASEP of `cfg.protocol` on `topo`.
pub fn estimate_asep(topo: &Topology, cfg: &McConfig) -> Result<AsepEstimate> {
    cfg.validate(topo)?;
    let protocols = [cfg.protocol];
    Ok(reduce(&protocols, run_blocks(topo, &protocols, cfg)?).estimates[0])
}

/// Estimates for every protocol in `protocols` on the same realizations.
/// `cfg.protocol` is ignored.
pub fn estimate_paired(topo: &Topology, protocols: &[Protocol], cfg: &McConfig) -> Result<PairedEstimate> {
    if protocols.is_empty() {
        return Err(Error::config("protocol list is empty"));
    }
    cfg.validate_common()?;
    for p in protocols {
        p.validate(topo.n_hops(), topo.relays())?;
    }
    Ok(reduce(protocols, run_blocks(topo, protocols, cfg)?))
}

fn check_grid(snr_grid_db: &[f64]) -> Result<()> {
    if snr_grid_db.is_empty() {
        return Err(Error::config("SNR grid is empty"));
    }
    if snr_grid_db.iter().any(|g| !g.is_finite()) || snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("SNR grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// One estimate per grid point, with every average power of `template`
/// scaled by the grid SNR. The same seed is used at every point, so the
/// curve is drawn on common random numbers.
pub fn estimate_curve(template: &Topology, snr_grid_db: &[f64], cfg: &McConfig) -> Result<Vec<(f64, AsepEstimate)>> {
    check_grid(snr_grid_db)?;
    snr_grid_db
        .iter()
        .map(|&db| Ok((db, estimate_asep(&template.scaled(db_to_linear(db))?, cfg)?)))
        .collect()
}

/// [`estimate_paired`] at every grid point of [`estimate_curve`].
pub fn estimate_paired_curve(
    template: &Topology,
    snr_grid_db: &[f64],
    protocols: &[Protocol],
    cfg: &McConfig,
) -> Result<Vec<(f64, PairedEstimate)>> {
    check_grid(snr_grid_db)?;
    snr_grid_db
        .iter()
        .map(|&db| Ok((db, estimate_paired(&template.scaled(db_to_linear(db))?, protocols, cfg)?)))
        .collect()
}
