//! Route selection over a [`ChannelRealization`].
//!
//! All protocols here assume a controller with full CSI; they differ only in
//! which channels they read and how they pick the next relay.

mod complexity;
mod dpp;

use serde::{Deserialize, Serialize};

pub use complexity::{complexity_table, ComplexityReport, TableProtocol};
pub use dpp::{measure_dpp_merge_rate, route_dpp, MergeRateReport};

use crate::channel::ChannelRealization;
use crate::{Error, Result};

/// A chosen route: one relay per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub relay_indices: Vec<usize>,
    /// Harmonic end-to-end SNR of the route, summed from the source.
    pub e2e_snr: f64,
    /// Distinct channel gains read to make the routing decisions.
    pub csi_observed: usize,
    /// Pairwise comparisons, as counted by the protocol's closed-form cost.
    pub comparisons: usize,
}

impl RouteResult {
    fn on(real: &ChannelRealization, relay_indices: Vec<usize>, csi_observed: usize, comparisons: usize) -> Self {
        let e2e_snr = 1.0 / real.path_reciprocal_sum(&relay_indices);
        RouteResult {
            relay_indices,
            e2e_snr,
            csi_observed,
            comparisons,
        }
    }
}

/// Diversity combining of two route SNRs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CombinerSpec {
    /// Selection combining: the larger SNR.
    Sc,
    /// Maximal-ratio combining: SNRs add.
    Mrc,
    /// Switch-and-stay: the primary route while it clears the threshold.
    Ssc { threshold: f64 },
}

impl CombinerSpec {
    /// Build from a kind name and an optional threshold (linear SNR). The
    /// threshold must be present exactly for SSC.
    pub fn from_parts(kind: &str, threshold: Option<f64>) -> Result<Self> {
        let spec = match (kind.to_ascii_lowercase().as_str(), threshold) {
            ("sc", None) => CombinerSpec::Sc,
            ("mrc", None) => CombinerSpec::Mrc,
            ("ssc", Some(t)) => CombinerSpec::Ssc { threshold: t },
            ("ssc", None) => return Err(Error::domain("SSC combining needs a threshold")),
            ("sc" | "mrc", Some(_)) => return Err(Error::domain(format!("{kind} combining takes no threshold"))),
            _ => return Err(Error::domain(format!("unknown combiner '{kind}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let CombinerSpec::Ssc { threshold } = self {
            if !(*threshold > 0.0 && threshold.is_finite()) {
                return Err(Error::domain(format!("SSC threshold must be positive, got {threshold}")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            CombinerSpec::Sc => "SC",
            CombinerSpec::Mrc => "MRC",
            CombinerSpec::Ssc { .. } => "SSC",
        }
    }

    /// Combined SNR and which branch produced it.
    pub fn combine(&self, primary: f64, secondary: f64) -> (f64, RouteChoice) {
        match *self {
            CombinerSpec::Sc => {
                if secondary > primary {
                    (secondary, RouteChoice::Secondary)
                } else {
                    (primary, RouteChoice::Primary)
                }
            }
            CombinerSpec::Mrc => (primary + secondary, RouteChoice::Combined),
            CombinerSpec::Ssc { threshold } => {
                if primary >= threshold {
                    (primary, RouteChoice::Primary)
                } else {
                    (secondary, RouteChoice::Secondary)
                }
            }
        }
    }
}

/// Which of two routes carries the transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    Primary,
    Secondary,
    /// Both routes, combined coherently (MRC).
    Combined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualRouteResult {
    pub primary_route: RouteResult,
    pub secondary_route: RouteResult,
    pub selected: RouteChoice,
    pub combined_snr: f64,
}

impl DualRouteResult {
    fn combine(primary_route: RouteResult, secondary_route: RouteResult, comb: &CombinerSpec) -> Self {
        let (combined_snr, selected) = comb.combine(primary_route.e2e_snr, secondary_route.e2e_snr);
        DualRouteResult {
            primary_route,
            secondary_route,
            selected,
            combined_snr,
        }
    }
}

/// A unidirectional scan protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ScanProtocol {
    /// Last-n-hop selection; `n = 1` is plain greedy routing.
    Ap { n: usize },
    Optimal,
    Dpp,
}

impl ScanProtocol {
    pub fn validate(&self, n_hops: usize, relays: usize) -> Result<()> {
        match *self {
            ScanProtocol::Ap { n } if n < 1 || n > n_hops => {
                Err(Error::domain(format!("AP-n needs 1 <= n <= {n_hops}, got n = {n}")))
            }
            ScanProtocol::Dpp if relays < 2 => Err(Error::UnsupportedProtocol(
                "the dual path protocol needs at least two relays per cluster".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Run the scan source-to-destination.
    pub fn run(&self, real: &ChannelRealization) -> Result<RouteOutcome> {
        Ok(match *self {
            ScanProtocol::Ap { n } => RouteOutcome::Single(route_apn(real, n)?),
            ScanProtocol::Optimal => RouteOutcome::Single(route_optimal(real)),
            ScanProtocol::Dpp => RouteOutcome::Dual(route_dpp(real)?),
        })
    }
}

/// Output of a scan: a single route, or the two DPP routes.
#[derive(Debug, Clone, PartialEq)]
pub enum RouteOutcome {
    Single(RouteResult),
    Dual(DualRouteResult),
}

impl RouteOutcome {
    /// The route the scan transmits on (for DPP, the selected path).
    pub fn selected_route(&self) -> &RouteResult {
        match self {
            RouteOutcome::Single(r) => r,
            RouteOutcome::Dual(d) => match d.selected {
                RouteChoice::Secondary => &d.secondary_route,
                _ => &d.primary_route,
            },
        }
    }

    pub fn snr(&self) -> f64 {
        match self {
            RouteOutcome::Single(r) => r.e2e_snr,
            RouteOutcome::Dual(d) => d.combined_snr,
        }
    }
}

/// Index of the largest entry, lower index winning ties, skipping `exclude`.
pub(crate) fn argmax_excluding(values: &[f64], exclude: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if Some(i) == exclude {
            continue;
        }
        if best == usize::MAX || v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Greedy selection of the first `hops` hops; returns the relays reached.
fn greedy_prefix(real: &ChannelRealization, hops: usize) -> Vec<usize> {
    let mut path = Vec::with_capacity(real.n_hops() - 1);
    for hop in 0..hops {
        let next = if hop == 0 {
            argmax_excluding(real.first_hop(), None)
        } else {
            argmax_excluding(real.mid_row(hop, path[hop - 1]), None)
        };
        path.push(next);
    }
    path
}

/// Greedy per-hop routing: the strongest outgoing channel at every hop; the
/// final hop is forced.
pub fn route_ap1(real: &ChannelRealization) -> RouteResult {
    let n = real.n_hops();
    let l = real.relays();
    let path = greedy_prefix(real, n - 1);
    RouteResult::on(real, path, l * (n - 1), (l - 1) * (n - 1))
}

/// Minimum-reciprocal-sum completion of `prefix` through the remaining hops.
///
/// Layered shortest path with edge weight `1/γ`. Partial sums accumulate from
/// the source, so the winning cost equals `path_reciprocal_sum` bit for bit.
fn best_completion(real: &ChannelRealization, prefix: &[usize]) -> Vec<usize> {
    let n = real.n_hops();
    let l = real.relays();
    let start_hop = prefix.len();
    debug_assert!(start_hop < n - 1);

    let mut prefix_cost = 0.0;
    for hop in 0..start_hop {
        let from = if hop == 0 { 0 } else { prefix[hop - 1] };
        prefix_cost += 1.0 / real.channel(hop, from, prefix[hop]);
    }
    let from = prefix.last().copied().unwrap_or(0);
    let mut cost: Vec<f64> = (0..l).map(|j| prefix_cost + 1.0 / real.channel(start_hop, from, j)).collect();
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(n);

    for hop in start_hop + 1..n - 1 {
        let mut next = vec![f64::INFINITY; l];
        let mut parent = vec![0usize; l];
        for (j, slot) in next.iter_mut().enumerate() {
            for (i, &c) in cost.iter().enumerate() {
                let cand = c + 1.0 / real.channel(hop, i, j);
                if cand < *slot {
                    *slot = cand;
                    parent[j] = i;
                }
            }
        }
        cost = next;
        parents.push(parent);
    }

    let mut last = 0;
    let mut best = f64::INFINITY;
    for (i, &c) in cost.iter().enumerate() {
        let total = c + 1.0 / real.last_hop()[i];
        if total < best {
            best = total;
            last = i;
        }
    }

    let mut suffix = vec![last];
    for parent in parents.iter().rev() {
        let prev = parent[*suffix.last().expect("non-empty")];
        suffix.push(prev);
    }
    suffix.reverse();
    suffix
}

/// Last-n-hop selection: greedy for the first `N - n` hops, then the best of
/// the `L^(n-1)` suffixes by end-to-end SNR.
pub fn route_apn(real: &ChannelRealization, n: usize) -> Result<RouteResult> {
    let hops = real.n_hops();
    let l = real.relays();
    if n < 1 || n > hops {
        return Err(Error::domain(format!("AP-n needs 1 <= n <= {hops}, got n = {n}")));
    }
    if n == 1 {
        return Ok(route_ap1(real));
    }
    let mut path = greedy_prefix(real, hops - n);
    path.extend(best_completion(real, &path));
    let csi = l * (hops - n) + 2 * l + (n - 2) * l * l;
    let comparisons = (l - 1) * (hops - n) + (2 * l - 1) * (l * (n - 2) + 1);
    Ok(RouteResult::on(real, path, csi, comparisons))
}

/// Exact best route over all `L^(N-1)` paths.
pub fn route_optimal(real: &ChannelRealization) -> RouteResult {
    let n = real.n_hops();
    let l = real.relays();
    let mut r = route_apn(real, n).expect("n = N is always in range");
    r.comparisons = (2 * l * l * (n - 2) + 4 * l).saturating_sub(l * n + 1);
    r
}

/// Run `protocol` from the destination towards the source, assuming
/// reciprocal channels, and report the route in forward indexing.
pub fn route_backward(real: &ChannelRealization, protocol: &ScanProtocol) -> Result<RouteOutcome> {
    protocol.validate(real.n_hops(), real.relays())?;
    let reversed = real.reversed();
    let remap = |r: &RouteResult| {
        let mut idx = r.relay_indices.clone();
        idx.reverse();
        RouteResult::on(real, idx, r.csi_observed, r.comparisons)
    };
    Ok(match protocol.run(&reversed)? {
        RouteOutcome::Single(r) => RouteOutcome::Single(remap(&r)),
        RouteOutcome::Dual(d) => RouteOutcome::Dual(DualRouteResult::combine(
            remap(&d.primary_route),
            remap(&d.secondary_route),
            &CombinerSpec::Sc,
        )),
    })
}

/// Forward–backward routing: the forward and backward scans each yield a
/// route (DPP contributes its selected path) and the two are combined.
pub fn route_fb(real: &ChannelRealization, protocol: &ScanProtocol, comb: &CombinerSpec) -> Result<DualRouteResult> {
    comb.validate()?;
    if matches!(protocol, ScanProtocol::Optimal) {
        return Err(Error::UnsupportedProtocol(
            "forward-backward routing applies to AP-n and DPP scans".into(),
        ));
    }
    protocol.validate(real.n_hops(), real.relays())?;
    let forward = protocol.run(real)?.selected_route().clone();
    let backward = route_backward(real, protocol)?.selected_route().clone();
    Ok(DualRouteResult::combine(forward, backward, comb))
}

/// A complete routing strategy as evaluated by the Monte-Carlo engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Protocol {
    Forward(ScanProtocol),
    Backward(ScanProtocol),
    ForwardBackward { scan: ScanProtocol, combiner: CombinerSpec },
}

impl Protocol {
    pub fn ap(n: usize) -> Self {
        Protocol::Forward(ScanProtocol::Ap { n })
    }

    pub fn optimal() -> Self {
        Protocol::Forward(ScanProtocol::Optimal)
    }

    pub fn dpp() -> Self {
        Protocol::Forward(ScanProtocol::Dpp)
    }

    pub fn fbap(n: usize, combiner: CombinerSpec) -> Self {
        Protocol::ForwardBackward {
            scan: ScanProtocol::Ap { n },
            combiner,
        }
    }

    pub fn fbdpp(combiner: CombinerSpec) -> Self {
        Protocol::ForwardBackward {
            scan: ScanProtocol::Dpp,
            combiner,
        }
    }

    pub fn validate(&self, n_hops: usize, relays: usize) -> Result<()> {
        match self {
            Protocol::Forward(s) | Protocol::Backward(s) => s.validate(n_hops, relays),
            Protocol::ForwardBackward { scan, combiner } => {
                if matches!(scan, ScanProtocol::Optimal) {
                    return Err(Error::UnsupportedProtocol(
                        "forward-backward routing applies to AP-n and DPP scans".into(),
                    ));
                }
                combiner.validate()?;
                scan.validate(n_hops, relays)
            }
        }
    }

    /// SNR the destination sees on this realization.
    pub fn effective_snr(&self, real: &ChannelRealization) -> Result<f64> {
        match self {
            Protocol::Forward(s) => Ok(s.run(real)?.snr()),
            Protocol::Backward(s) => Ok(route_backward(real, s)?.snr()),
            Protocol::ForwardBackward { scan, combiner } => Ok(route_fb(real, scan, combiner)?.combined_snr),
        }
    }

    /// Short family name used in reports: AP, OPT, DPP, BAP, BDPP, FBAP, FBDPP.
    pub fn family(&self) -> &'static str {
        match self {
            Protocol::Forward(ScanProtocol::Ap { .. }) => "AP",
            Protocol::Forward(ScanProtocol::Optimal) => "OPT",
            Protocol::Forward(ScanProtocol::Dpp) => "DPP",
            Protocol::Backward(ScanProtocol::Ap { .. }) => "BAP",
            Protocol::Backward(ScanProtocol::Optimal) => "BOPT",
            Protocol::Backward(ScanProtocol::Dpp) => "BDPP",
            Protocol::ForwardBackward { scan: ScanProtocol::Dpp, .. } => "FBDPP",
            Protocol::ForwardBackward { .. } => "FBAP",
        }
    }

    pub fn hop_window(&self) -> Option<usize> {
        match self {
            Protocol::Forward(ScanProtocol::Ap { n })
            | Protocol::Backward(ScanProtocol::Ap { n })
            | Protocol::ForwardBackward {
                scan: ScanProtocol::Ap { n },
                ..
            } => Some(*n),
            _ => None,
        }
    }

    pub fn combiner(&self) -> Option<CombinerSpec> {
        match self {
            Protocol::ForwardBackward { combiner, .. } => Some(*combiner),
            _ => None,
        }
    }

    /// Human-readable label such as `AP-2` or `FBAP-2 (MRC)`.
    pub fn label(&self) -> String {
        let mut s = self.family().to_string();
        if let Some(n) = self.hop_window() {
            s.push_str(&format!("-{n}"));
        }
        if let Some(c) = self.combiner() {
            s.push_str(&format!(" ({})", c.name()));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{end_to_end_snr, sample_realization, RngSpec, Topology};

    fn fixture_n3_l2() -> ChannelRealization {
        // mid row of relay 1 = [0.5, 0.2]; row of relay 0 is irrelevant.
        ChannelRealization::from_parts(vec![0.3, 0.9], vec![vec![0.8, 0.6, 0.5, 0.2]], vec![0.7, 0.1]).unwrap()
    }

    fn random(n: usize, l: usize, trial: u64) -> ChannelRealization {
        let topo = Topology::uniform(n, l, 1.0).unwrap();
        sample_realization(&topo, &RngSpec::new(0xfeed), trial)
    }

    /// Independent replay of the greedy rule.
    fn greedy_oracle(real: &ChannelRealization) -> Vec<usize> {
        let n = real.n_hops();
        let mut path = Vec::new();
        let mut best = 0;
        for (i, &g) in real.first_hop().iter().enumerate() {
            if g > real.first_hop()[best] {
                best = i;
            }
        }
        path.push(best);
        for hop in 1..n - 1 {
            let row = real.mid_row(hop, *path.last().unwrap());
            let mut b = 0;
            for (i, &g) in row.iter().enumerate() {
                if g > row[b] {
                    b = i;
                }
            }
            path.push(b);
        }
        path
    }

    /// Exhaustive enumeration of every path, summing from the source.
    fn brute_force_best(real: &ChannelRealization) -> (Vec<usize>, f64) {
        let n = real.n_hops();
        let l = real.relays();
        let total = l.pow((n - 1) as u32);
        let mut best = (Vec::new(), f64::INFINITY);
        for code in 0..total {
            let mut c = code;
            let mut path = vec![0; n - 1];
            for slot in path.iter_mut().rev() {
                *slot = c % l;
                c /= l;
            }
            let cost = real.path_reciprocal_sum(&path);
            if cost < best.1 {
                best = (path, cost);
            }
        }
        best
    }

    #[test]
    fn ap1_fixture() {
        let r = route_ap1(&fixture_n3_l2());
        assert_eq!(r.relay_indices, vec![1, 0]);
        let want = 1.0 / (1.0 / 0.9 + 1.0 / 0.5 + 1.0 / 0.7);
        assert!((r.e2e_snr - want).abs() < 1e-15);
        assert!((r.e2e_snr - 0.22028).abs() < 1e-5);
        assert_eq!(r.csi_observed, 4);
    }

    #[test]
    fn ap1_single_relay_is_the_only_path() {
        let real = random(5, 1, 3);
        let r = route_ap1(&real);
        assert_eq!(r.relay_indices, vec![0; 4]);
        let snrs = real.path_snrs(&r.relay_indices);
        assert_eq!(r.e2e_snr, end_to_end_snr(&snrs).unwrap());
    }

    #[test]
    fn ap1_matches_greedy_oracle() {
        for t in 0..500 {
            let real = random(4, 3, t);
            assert_eq!(route_ap1(&real).relay_indices, greedy_oracle(&real));
        }
    }

    #[test]
    fn apn_one_is_ap1() {
        for t in 0..100 {
            let real = random(5, 3, t);
            assert_eq!(route_apn(&real, 1).unwrap(), route_ap1(&real));
        }
    }

    #[test]
    fn apn_out_of_range() {
        let real = random(4, 2, 0);
        assert!(matches!(route_apn(&real, 0), Err(Error::Domain(_))));
        assert!(matches!(route_apn(&real, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn ap2_two_candidate_arithmetic() {
        // Pairs (γ2, γ3) = (1, 4) for relay 0 and (2, 2) for relay 1.
        let real = ChannelRealization::from_parts(vec![5.0, 5.0], vec![vec![1.0, 2.0, 1.0, 2.0]], vec![4.0, 2.0]).unwrap();
        let r = route_apn(&real, 2).unwrap();
        assert_eq!(r.relay_indices[1], 1);
    }

    #[test]
    fn apn_full_window_equals_brute_force() {
        for &(n, l) in &[(2, 3), (3, 2), (4, 3), (5, 3), (5, 2)] {
            for t in 0..200 {
                let real = random(n, l, t);
                let (path, cost) = brute_force_best(&real);
                let opt = route_optimal(&real);
                assert_eq!(opt.relay_indices, path);
                assert_eq!(opt.e2e_snr, 1.0 / cost);
                assert_eq!(route_apn(&real, n).unwrap().e2e_snr, opt.e2e_snr);
            }
        }
    }

    #[test]
    fn optimal_single_relay() {
        let real = random(4, 1, 9);
        assert_eq!(route_optimal(&real).relay_indices, vec![0, 0, 0]);
    }

    #[test]
    fn csi_counts_follow_table_formulas() {
        for &(n_hops, l) in &[(2usize, 2usize), (4, 3), (6, 4), (7, 3)] {
            let real = random(n_hops, l, 1);
            assert_eq!(route_ap1(&real).csi_observed, l * (n_hops - 1));
            assert_eq!(route_apn(&real, 2).unwrap().csi_observed, l * n_hops);
            for n in 2..=n_hops {
                let want = l * (n_hops - n) + 2 * l + (n - 2) * l * l;
                assert_eq!(route_apn(&real, n).unwrap().csi_observed, want);
            }
            assert_eq!(route_optimal(&real).csi_observed, l * l * (n_hops - 2) + 2 * l);
        }
    }

    #[test]
    fn backward_on_symmetric_realization_matches_forward() {
        let m = vec![3.0, 1.0, 1.0, 2.0];
        let real = ChannelRealization::from_parts(vec![4.0, 1.5], vec![m.clone(), m], vec![4.0, 1.5]).unwrap();
        let f = route_ap1(&real);
        let b = route_backward(&real, &ScanProtocol::Ap { n: 1 }).unwrap();
        assert_eq!(b.snr(), f.e2e_snr);
    }

    #[test]
    fn backward_optimal_equals_forward_optimal() {
        for t in 0..300 {
            let real = random(5, 3, t);
            let f = route_optimal(&real);
            let b = route_backward(&real, &ScanProtocol::Optimal).unwrap();
            assert!((b.snr() - f.e2e_snr).abs() <= 1e-12 * f.e2e_snr);
        }
    }

    #[test]
    fn backward_ap1_matches_reversal_oracle() {
        for t in 0..200 {
            let real = random(4, 3, t);
            let mut want = greedy_oracle(&real.reversed());
            want.reverse();
            let got = route_backward(&real, &ScanProtocol::Ap { n: 1 }).unwrap();
            assert_eq!(got.selected_route().relay_indices, want);
            let snrs = real.path_snrs(&want);
            assert_eq!(got.snr(), end_to_end_snr(&snrs).unwrap());
        }
    }

    #[test]
    fn combiner_rules() {
        assert_eq!(CombinerSpec::Sc.combine(0.4, 0.7), (0.7, RouteChoice::Secondary));
        let (mrc, _) = CombinerSpec::Mrc.combine(0.4, 0.7);
        assert!((mrc - 1.1).abs() < 1e-15);
        let ssc = CombinerSpec::Ssc { threshold: 0.5 };
        assert_eq!(ssc.combine(0.4, 0.01), (0.01, RouteChoice::Secondary));
        assert_eq!(ssc.combine(0.6, 9.0), (0.6, RouteChoice::Primary));
    }

    #[test]
    fn combiner_parsing() {
        assert_eq!(CombinerSpec::from_parts("sc", None).unwrap(), CombinerSpec::Sc);
        assert!(CombinerSpec::from_parts("ssc", None).is_err());
        assert!(CombinerSpec::from_parts("mrc", Some(1.0)).is_err());
        assert!(CombinerSpec::from_parts("ssc", Some(-1.0)).is_err());
        assert!(CombinerSpec::from_parts("egc", None).is_err());
    }

    #[test]
    fn fb_rejects_optimal_scan() {
        let real = random(3, 2, 0);
        assert!(route_fb(&real, &ScanProtocol::Optimal, &CombinerSpec::Sc).is_err());
    }

    #[test]
    fn protocol_labels() {
        assert_eq!(Protocol::ap(2).label(), "AP-2");
        assert_eq!(Protocol::fbap(2, CombinerSpec::Mrc).label(), "FBAP-2 (MRC)");
        assert_eq!(Protocol::fbdpp(CombinerSpec::Sc).label(), "FBDPP (SC)");
        assert_eq!(Protocol::optimal().label(), "OPT");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn realization() -> impl Strategy<Value = ChannelRealization> {
            (2usize..6, 1usize..4).prop_flat_map(|(n, l)| {
                let g = || 0.01f64..50.0;
                (
                    proptest::collection::vec(g(), l),
                    proptest::collection::vec(proptest::collection::vec(g(), l * l), n - 2),
                    proptest::collection::vec(g(), l),
                )
                    .prop_map(|(f, m, last)| ChannelRealization::from_parts(f, m, last).unwrap())
            })
        }

        proptest! {
            #[test]
            fn window_monotone(real in realization()) {
                let n = real.n_hops();
                let snrs: Vec<f64> = (1..=n).map(|k| route_apn(&real, k).unwrap().e2e_snr).collect();
                for w in snrs.windows(2) {
                    prop_assert!(w[0] <= w[1]);
                }
                prop_assert_eq!(snrs[n - 1], route_optimal(&real).e2e_snr);
            }

            #[test]
            fn routes_round_trip(real in realization()) {
                let l = real.relays();
                for r in [route_ap1(&real), route_apn(&real, 2.min(real.n_hops())).unwrap(), route_optimal(&real)] {
                    prop_assert_eq!(r.relay_indices.len(), real.n_hops() - 1);
                    prop_assert!(r.relay_indices.iter().all(|&i| i < l));
                    let e2e = end_to_end_snr(&real.path_snrs(&r.relay_indices)).unwrap();
                    prop_assert!((r.e2e_snr - e2e).abs() <= 1e-12 * e2e);
                }
            }

            #[test]
            fn fb_combiners(real in realization(), n in 1usize..3) {
                let n = n.min(real.n_hops());
                let scan = ScanProtocol::Ap { n };
                let sc = route_fb(&real, &scan, &CombinerSpec::Sc).unwrap();
                let mrc = route_fb(&real, &scan, &CombinerSpec::Mrc).unwrap();
                prop_assert_eq!(sc.combined_snr, sc.primary_route.e2e_snr.max(sc.secondary_route.e2e_snr));
                prop_assert!(mrc.combined_snr >= sc.combined_snr);
                if real.relays() >= 2 {
                    let d = route_fb(&real, &ScanProtocol::Dpp, &CombinerSpec::Sc).unwrap();
                    prop_assert!(d.combined_snr >= route_ap1(&real).e2e_snr);
                }
            }

            #[test]
            fn dpp_disjoint(real in realization()) {
                prop_assume!(real.relays() >= 2);
                let d = route_dpp(&real).unwrap();
                for (a, b) in d.primary_route.relay_indices.iter().zip(&d.secondary_route.relay_indices) {
                    prop_assert_ne!(a, b);
                }
            }
        }
    }
}
