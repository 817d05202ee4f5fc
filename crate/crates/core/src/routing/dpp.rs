//! Dual path protocol: two relay-disjoint greedy paths started on the best
//! and second-best first-hop channels.

use super::{argmax_excluding, CombinerSpec, DualRouteResult, RouteResult};
use crate::channel::{sample_realization, ChannelRealization, RngSpec, Topology};
use crate::{Error, Result};

struct DppTrace {
    a: Vec<usize>,
    b: Vec<usize>,
    /// One flag per middle hop: did both argmax choices coincide?
    collisions: Vec<bool>,
}

fn trace(real: &ChannelRealization) -> DppTrace {
    let n = real.n_hops();
    let a0 = argmax_excluding(real.first_hop(), None);
    let b0 = argmax_excluding(real.first_hop(), Some(a0));
    let mut a = vec![a0];
    let mut b = vec![b0];
    let mut collisions = Vec::with_capacity(n - 2);
    for hop in 1..n - 1 {
        let ja = argmax_excluding(real.mid_row(hop, a[hop - 1]), None);
        let mut jb = argmax_excluding(real.mid_row(hop, b[hop - 1]), None);
        let hit = ja == jb;
        if hit {
            jb = argmax_excluding(real.mid_row(hop, b[hop - 1]), Some(ja));
        }
        collisions.push(hit);
        a.push(ja);
        b.push(jb);
    }
    DppTrace { a, b, collisions }
}

/// Route both DPP paths and select the one with the larger end-to-end SNR.
///
/// Path A holds priority: when both paths want the same relay, B falls back
/// to its own second-best channel.
pub fn route_dpp(real: &ChannelRealization) -> Result<DualRouteResult> {
    let l = real.relays();
    let n = real.n_hops();
    if l < 2 {
        return Err(Error::UnsupportedProtocol(
            "the dual path protocol needs at least two relays per cluster".into(),
        ));
    }
    let t = trace(real);
    let csi = l * (2 * n - 1) + 2;
    let hits = t.collisions.iter().filter(|&&c| c).count();
    let comparisons = (l + 1) + (n - 2) * 2 * (l - 1) + hits * (l - 2);
    let a = RouteResult::on(real, t.a, csi, comparisons);
    let b = RouteResult::on(real, t.b, csi, comparisons);
    Ok(DualRouteResult::combine(a, b, &CombinerSpec::Sc))
}

/// Empirical DPP collision statistics against the two candidate models.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeRateReport {
    pub relays: usize,
    pub trials: u64,
    /// Collision frequency at each middle hop, hop 1 first.
    pub per_hop_rate: Vec<f64>,
    /// Collision frequency over all middle hops and trials.
    pub pooled_rate: f64,
    /// Binomial standard error of `pooled_rate` under `predicted_rate`.
    pub std_error: f64,
    /// Collision probability of two independent uniform argmaxes, `1/L`.
    pub predicted_rate: f64,
    /// The merge probability used by the complexity table, `1/L²`.
    pub table_p_c: f64,
    /// `|pooled - 1/L| <= 3σ`.
    pub matches_prediction: bool,
    /// `|pooled - 1/L²| > 3σ`: the table's merge probability is not what
    /// the protocol exhibits.
    pub deviates_from_table: bool,
}

impl MergeRateReport {
    pub fn summary(&self) -> String {
        let verdict = if self.deviates_from_table {
            "deviates from"
        } else {
            "is consistent with"
        };
        format!(
            "L={}: merge rate {:.5} ± {:.5} (1/L = {:.5}); {} table p_c = 1/L² = {:.5}",
            self.relays, self.pooled_rate, self.std_error, self.predicted_rate, verdict, self.table_p_c
        )
    }
}

/// Frequency with which the two DPP paths pick the same next relay before
/// the split rule separates them.
pub fn measure_dpp_merge_rate(topo: &Topology, trials: u64, rng: &RngSpec) -> Result<MergeRateReport> {
    let l = topo.relays();
    if l < 2 {
        return Err(Error::domain("merge rate needs at least two relays per cluster"));
    }
    if trials < 1 {
        return Err(Error::domain("merge rate needs at least one trial"));
    }
    if topo.n_hops() < 3 {
        return Err(Error::domain("merge rate needs at least one middle hop (N >= 3)"));
    }
    let mid = topo.n_hops() - 2;
    let mut counts = vec![0u64; mid];
    for trial in 0..trials {
        let real = sample_realization(topo, rng, trial);
        for (c, hit) in counts.iter_mut().zip(trace(&real).collisions) {
            *c += u64::from(hit);
        }
    }
    let per_hop_rate: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let samples = (trials * mid as u64) as f64;
    let pooled_rate = counts.iter().sum::<u64>() as f64 / samples;
    let predicted_rate = 1.0 / l as f64;
    let table_p_c = predicted_rate * predicted_rate;
    let std_error = (predicted_rate * (1.0 - predicted_rate) / samples).sqrt();
    Ok(MergeRateReport {
        relays: l,
        trials,
        per_hop_rate,
        pooled_rate,
        std_error,
        predicted_rate,
        table_p_c,
        matches_prediction: (pooled_rate - predicted_rate).abs() <= 3.0 * std_error,
        deviates_from_table: (pooled_rate - table_p_c).abs() > 3.0 * std_error,
    })
}
