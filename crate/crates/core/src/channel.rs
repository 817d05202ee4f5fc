//! Layered relay-cluster topology, Rayleigh channel realizations and the
//! harmonic end-to-end SNR of an amplify-and-forward chain.
//!
//! Hops are numbered from the source: hop 0 reaches the first cluster, hop
//! `N-1` reaches the destination. Between clusters every relay can reach
//! every relay of the next cluster, so middle hops are `L x L` matrices
//! indexed `(from, to)`.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shape of the network: `N` hops through `N-1` clusters of `L` relays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    n_hops: usize,
    relays: usize,
    hop_avg_power: Vec<f64>,
    last_hop_avg_power: f64,
}

impl Topology {
    /// `hop_avg_power` holds the linear average SNRs of hops `1..N-1`;
    /// `last_hop_avg_power` is that of the hop into the destination.
    pub fn new(n_hops: usize, relays: usize, hop_avg_power: Vec<f64>, last_hop_avg_power: f64) -> Result<Self> {
        if n_hops < 2 {
            return Err(Error::config(format!("a relay chain needs at least 2 hops, got {n_hops}")));
        }
        if relays < 1 {
            return Err(Error::config("each cluster needs at least one relay"));
        }
        if hop_avg_power.len() != n_hops - 1 {
            return Err(Error::config(format!(
                "expected {} per-hop average powers, got {}",
                n_hops - 1,
                hop_avg_power.len()
            )));
        }
        let valid = |w: f64| w > 0.0 && w.is_finite();
        if !hop_avg_power.iter().copied().all(valid) || !valid(last_hop_avg_power) {
            return Err(Error::config("average powers must be positive and finite"));
        }
        Ok(Topology {
            n_hops,
            relays,
            hop_avg_power,
            last_hop_avg_power,
        })
    }

    /// Every hop shares the same average SNR.
    pub fn uniform(n_hops: usize, relays: usize, avg_power: f64) -> Result<Self> {
        Topology::new(n_hops, relays, vec![avg_power; n_hops.saturating_sub(1)], avg_power)
    }

    pub fn n_hops(&self) -> usize {
        self.n_hops
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn hop_avg_power(&self) -> &[f64] {
        &self.hop_avg_power
    }

    pub fn last_hop_avg_power(&self) -> f64 {
        self.last_hop_avg_power
    }

    /// Average SNR of hop `hop` (0-based; `N-1` is the last hop).
    pub fn hop_mean(&self, hop: usize) -> f64 {
        if hop + 1 == self.n_hops {
            self.last_hop_avg_power
        } else {
            self.hop_avg_power[hop]
        }
    }

    /// Same shape with every average power multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Topology> {
        Topology::new(
            self.n_hops,
            self.relays,
            self.hop_avg_power.iter().map(|w| w * factor).collect(),
            self.last_hop_avg_power * factor,
        )
    }

    /// Channels in one realization: `L^2 (N-2) + 2L`.
    pub fn channel_count(&self) -> usize {
        self.relays * self.relays * (self.n_hops - 2) + 2 * self.relays
    }
}

/// Seed plus substream label. Trial `t` of `(seed, stream_id)` always draws
/// the same numbers, whichever worker evaluates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        RngSpec { seed, stream_id }
    }

    /// Generator dedicated to one trial: the ChaCha key carries
    /// `(seed, trial_index)` and the stream word carries `stream_id`.
    pub fn trial_rng(&self, trial_index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&trial_index.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// How channel SNRs are drawn around their hop mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fading {
    /// Exponential SNR with the hop's mean.
    #[default]
    Rayleigh,
    /// Every channel sits exactly at its hop mean (zero-variance hook).
    Constant,
}

/// One fading draw of every channel in the layered graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    relays: usize,
    first_hop: Vec<f64>,
    mid_hops: Vec<Vec<f64>>,
    last_hop: Vec<f64>,
}

impl ChannelRealization {
    /// Assemble a realization from explicit SNRs. `mid_hops[k]` is row-major,
    /// row = transmitting relay.
    pub fn from_parts(first_hop: Vec<f64>, mid_hops: Vec<Vec<f64>>, last_hop: Vec<f64>) -> Result<Self> {
        let relays = first_hop.len();
        if relays == 0 || last_hop.len() != relays {
            return Err(Error::domain("first and last hop must both hold L >= 1 channels"));
        }
        if mid_hops.iter().any(|m| m.len() != relays * relays) {
            return Err(Error::domain("middle hops must be L x L matrices"));
        }
        let ok = |g: &f64| *g > 0.0 && g.is_finite();
        if !first_hop.iter().all(ok) || !last_hop.iter().all(ok) || !mid_hops.iter().flatten().all(ok) {
            return Err(Error::domain("channel SNRs must be positive and finite"));
        }
        Ok(ChannelRealization {
            relays,
            first_hop,
            mid_hops,
            last_hop,
        })
    }

    fn zeroed(topo: &Topology) -> Self {
        let l = topo.relays;
        ChannelRealization {
            relays: l,
            first_hop: vec![0.0; l],
            mid_hops: vec![vec![0.0; l * l]; topo.n_hops - 2],
            last_hop: vec![0.0; l],
        }
    }

    pub fn n_hops(&self) -> usize {
        self.mid_hops.len() + 2
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn first_hop(&self) -> &[f64] {
        &self.first_hop
    }

    pub fn last_hop(&self) -> &[f64] {
        &self.last_hop
    }

    /// Middle hop matrices, hop 1 through `N-2`.
    pub fn mid_hops(&self) -> &[Vec<f64>] {
        &self.mid_hops
    }

    /// Row of the middle hop `hop` (1-based hop index, `1..=N-2`) seen by
    /// relay `from` of the previous cluster.
    pub fn mid_row(&self, hop: usize, from: usize) -> &[f64] {
        let l = self.relays;
        &self.mid_hops[hop - 1][from * l..(from + 1) * l]
    }

    /// SNR of hop `hop` between relay `from` of the previous cluster and
    /// relay `to` of the next one. `from` is ignored on hop 0 and `to` on the
    /// last hop.
    pub fn channel(&self, hop: usize, from: usize, to: usize) -> f64 {
        if hop == 0 {
            self.first_hop[to]
        } else if hop + 1 == self.n_hops() {
            self.last_hop[from]
        } else {
            self.mid_hops[hop - 1][from * self.relays + to]
        }
    }

    /// Per-hop SNRs along a route given by one relay index per cluster.
    pub fn path_snrs(&self, relay_indices: &[usize]) -> Vec<f64> {
        let n = self.n_hops();
        debug_assert_eq!(relay_indices.len(), n - 1);
        (0..n)
            .map(|hop| {
                let from = if hop == 0 { 0 } else { relay_indices[hop - 1] };
                let to = if hop + 1 == n { 0 } else { relay_indices[hop] };
                self.channel(hop, from, to)
            })
            .collect()
    }

    /// `Σ 1/γ` along a route, summed from the source.
    pub fn path_reciprocal_sum(&self, relay_indices: &[usize]) -> f64 {
        let n = self.n_hops();
        let mut acc = 0.0;
        for hop in 0..n {
            let from = if hop == 0 { 0 } else { relay_indices[hop - 1] };
            let to = if hop + 1 == n { 0 } else { relay_indices[hop] };
            acc += 1.0 / self.channel(hop, from, to);
        }
        acc
    }

    /// The destination-to-source view under channel reciprocity: first and
    /// last vectors swap, middle hops reverse order and transpose.
    pub fn reversed(&self) -> ChannelRealization {
        let l = self.relays;
        let mid_hops = self
            .mid_hops
            .iter()
            .rev()
            .map(|m| {
                let mut t = vec![0.0; l * l];
                for i in 0..l {
                    for j in 0..l {
                        t[j * l + i] = m[i * l + j];
                    }
                }
                t
            })
            .collect();
        ChannelRealization {
            relays: l,
            first_hop: self.last_hop.clone(),
            mid_hops,
            last_hop: self.first_hop.clone(),
        }
    }

    pub fn channel_count(&self) -> usize {
        self.first_hop.len() + self.last_hop.len() + self.mid_hops.iter().map(Vec::len).sum::<usize>()
    }

    fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.first_hop
            .iter_mut()
            .chain(self.mid_hops.iter_mut().flatten())
            .chain(self.last_hop.iter_mut())
    }
}

/// Draw trial `trial_index` of a Rayleigh realization.
pub fn sample_realization(topo: &Topology, rng: &RngSpec, trial_index: u64) -> ChannelRealization {
    sample_with(topo, Fading::Rayleigh, rng, trial_index)
}

pub fn sample_with(topo: &Topology, fading: Fading, rng: &RngSpec, trial_index: u64) -> ChannelRealization {
    let mut real = ChannelRealization::zeroed(topo);
    fill_realization(topo, fading, rng, trial_index, &mut real);
    real
}

/// Buffer-reusing form of [`sample_with`]; `real` must have been produced
/// for the same topology shape.
pub(crate) fn fill_realization(
    topo: &Topology,
    fading: Fading,
    rng: &RngSpec,
    trial_index: u64,
    real: &mut ChannelRealization,
) {
    if real.relays != topo.relays || real.n_hops() != topo.n_hops {
        *real = ChannelRealization::zeroed(topo);
    }
    let l = topo.relays;
    let mut gen = rng.trial_rng(trial_index);
    // Hop means in the order values_mut() visits the channels.
    let hop_of = |idx: usize| -> usize {
        if idx < l {
            0
        } else {
            let mid = idx - l;
            (mid / (l * l) + 1).min(topo.n_hops - 1)
        }
    };
    for (idx, slot) in real.values_mut().enumerate() {
        let mean = topo.hop_mean(hop_of(idx));
        *slot = match fading {
            Fading::Rayleigh => {
                let u: f64 = gen.sample(Open01);
                -u.ln() * mean
            }
            Fading::Constant => mean,
        };
    }
}

pub(crate) fn blank_realization(topo: &Topology) -> ChannelRealization {
    ChannelRealization::zeroed(topo)
}

fn check_snrs(hop_snrs: &[f64]) -> Result<()> {
    if hop_snrs.is_empty() {
        return Err(Error::domain("end-to-end SNR needs at least one hop"));
    }
    if let Some(bad) = hop_snrs.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
        return Err(Error::domain(format!("hop SNRs must be positive and finite, got {bad}")));
    }
    Ok(())
}

/// `Σ 1/γ_i`.
pub fn reciprocal_sum(hop_snrs: &[f64]) -> Result<f64> {
    check_snrs(hop_snrs)?;
    Ok(hop_snrs.iter().map(|g| 1.0 / g).sum())
}

/// Harmonic end-to-end SNR of an amplify-and-forward chain, `1 / Σ 1/γ_i`.
pub fn end_to_end_snr(hop_snrs: &[f64]) -> Result<f64> {
    Ok(1.0 / reciprocal_sum(hop_snrs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_hop_single_relay_shape() {
        let topo = Topology::uniform(2, 1, 3.0).unwrap();
        let r = sample_realization(&topo, &RngSpec::new(11), 0);
        assert_eq!(r.first_hop().len(), 1);
        assert_eq!(r.last_hop().len(), 1);
        assert!(r.mid_hops().is_empty());
    }

    #[test]
    fn four_hop_three_relay_channel_count() {
        let topo = Topology::uniform(4, 3, 1.0).unwrap();
        let r = sample_realization(&topo, &RngSpec::new(1), 5);
        assert_eq!(r.channel_count(), 24);
        assert_eq!(topo.channel_count(), 24);
    }

    #[test]
    fn invalid_topologies_are_config_errors() {
        assert!(matches!(Topology::uniform(1, 2, 1.0), Err(Error::Config(_))));
        assert!(matches!(Topology::uniform(3, 0, 1.0), Err(Error::Config(_))));
        assert!(matches!(Topology::new(3, 2, vec![1.0], 1.0), Err(Error::Config(_))));
        assert!(matches!(Topology::new(3, 2, vec![1.0, -1.0], 1.0), Err(Error::Config(_))));
        assert!(matches!(Topology::new(2, 2, vec![1.0], f64::INFINITY), Err(Error::Config(_))));
    }

    #[test]
    fn per_hop_sample_means() {
        let topo = Topology::new(3, 1, vec![10.0, 10.0], 10.0).unwrap();
        let rng = RngSpec::new(2024);
        let trials = 1_000_000u64;
        let mut sums = [0.0f64; 3];
        let mut real = blank_realization(&topo);
        for t in 0..trials {
            fill_realization(&topo, Fading::Rayleigh, &rng, t, &mut real);
            sums[0] += real.first_hop()[0];
            sums[1] += real.mid_hops()[0][0];
            sums[2] += real.last_hop()[0];
        }
        for s in sums {
            let mean = s / trials as f64;
            assert!((mean - 10.0).abs() < 0.1, "mean {mean}");
        }
    }

    #[test]
    fn hop_means_follow_topology() {
        let topo = Topology::new(4, 2, vec![1.0, 100.0, 10_000.0], 1e6).unwrap();
        let rng = RngSpec::new(3);
        let trials = 20_000u64;
        let mut acc = [0.0f64; 4];
        for t in 0..trials {
            let r = sample_realization(&topo, &rng, t);
            acc[0] += r.first_hop().iter().sum::<f64>() / 2.0;
            acc[1] += r.mid_hops()[0].iter().sum::<f64>() / 4.0;
            acc[2] += r.mid_hops()[1].iter().sum::<f64>() / 4.0;
            acc[3] += r.last_hop().iter().sum::<f64>() / 2.0;
        }
        for (hop, a) in acc.iter().enumerate() {
            let mean = a / trials as f64;
            let want = topo.hop_mean(hop);
            assert!((mean / want - 1.0).abs() < 0.03, "hop {hop}: {mean} vs {want}");
        }
    }

    #[test]
    fn kolmogorov_smirnov_against_exponential() {
        let omega = 4.0;
        let topo = Topology::uniform(2, 1, omega).unwrap();
        let rng = RngSpec::new(77);
        let n = 100_000usize;
        let mut xs: Vec<f64> = (0..n as u64).map(|t| sample_realization(&topo, &rng, t).first_hop()[0]).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - (-x / omega).exp();
                let lo = cdf - i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64 - cdf;
                lo.max(hi)
            })
            .fold(0.0, f64::max);
        // 1% critical value of the KS statistic: 1.628 / sqrt(n).
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn deterministic_per_trial_and_stream() {
        let topo = Topology::uniform(4, 3, 2.0).unwrap();
        let a = sample_realization(&topo, &RngSpec::with_stream(9, 1), 42);
        let b = sample_realization(&topo, &RngSpec::with_stream(9, 1), 42);
        assert_eq!(a, b);
        let c = sample_realization(&topo, &RngSpec::with_stream(9, 2), 42);
        assert_ne!(a, c);
        let d = sample_realization(&topo, &RngSpec::with_stream(9, 1), 43);
        assert_ne!(a, d);
    }

    #[test]
    fn constant_fading_pins_channels_to_means() {
        let topo = Topology::new(3, 2, vec![2.0, 3.0], 5.0).unwrap();
        let r = sample_with(&topo, Fading::Constant, &RngSpec::new(0), 0);
        assert_eq!(r.first_hop(), &[2.0, 2.0]);
        assert!(r.mid_hops()[0].iter().all(|&g| g == 3.0));
        assert_eq!(r.last_hop(), &[5.0, 5.0]);
    }

    #[test]
    fn end_to_end_examples() {
        assert_eq!(end_to_end_snr(&[1.0, 1.0]).unwrap(), 0.5);
        assert!((end_to_end_snr(&[2.0, 2.0, 2.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((end_to_end_snr(&[1.0, 2.0, 4.0, 8.0]).unwrap() - 1.0 / 1.875).abs() < 1e-15);
        assert_eq!(reciprocal_sum(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(reciprocal_sum(&[0.5]).unwrap(), 2.0);
    }

    #[test]
    fn end_to_end_rejects_bad_input() {
        assert!(end_to_end_snr(&[]).is_err());
        assert!(end_to_end_snr(&[1.0, 0.0]).is_err());
        assert!(reciprocal_sum(&[-2.0]).is_err());
    }

    #[test]
    fn reversal_is_an_involution() {
        let topo = Topology::uniform(5, 3, 1.0).unwrap();
        let r = sample_realization(&topo, &RngSpec::new(5), 0);
        assert_eq!(r.reversed().reversed(), r);
        let path = [2, 0, 1, 1];
        let rev_path: Vec<usize> = path.iter().rev().copied().collect();
        let mut fwd = r.path_snrs(&path);
        fwd.reverse();
        assert_eq!(r.reversed().path_snrs(&rev_path), fwd);
    }

    proptest! {
        #[test]
        fn harmonic_chain_bounds(xs in prop::collection::vec(1e-3f64..1e3, 1..8)) {
            let e2e = end_to_end_snr(&xs).unwrap();
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(e2e <= min * (1.0 + 1e-12));
            prop_assert!(e2e >= min / xs.len() as f64 * (1.0 - 1e-12));
            let rs = reciprocal_sum(&xs).unwrap();
            prop_assert!((1.0 / rs - e2e).abs() <= 1e-15 * e2e);
        }

        #[test]
        fn sampled_snrs_positive(seed in any::<u64>(), trial in any::<u64>()) {
            let topo = Topology::uniform(4, 3, 0.01).unwrap();
            let r = sample_realization(&topo, &RngSpec::new(seed), trial);
            prop_assert!(r.first_hop().iter().chain(r.mid_hops().iter().flatten()).chain(r.last_hop()).all(|&g| g > 0.0 && g.is_finite()));
        }
    }
}
