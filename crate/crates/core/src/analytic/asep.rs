//! Average SEP by a single integral over the MGF of the reciprocal
//! end-to-end SNR.

use super::mgf::{mgf_last_hop, mgf_max_recip, mgf_pair_bound, MgfHandle};
use super::modulation::ModulationSpec;
use super::z::{Kernel, DEFAULT_TOL};
use crate::channel::Topology;
use crate::special::{gcq_rule, NeumaierSum};
use crate::{Error, Result};

/// Largest rule tried before giving up on convergence.
pub const MAX_QUAD_ORDER: usize = 1 << 17;
const ABS_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-9;
/// `ln(1e-300)`: below this the end-to-end MGF no longer contributes.
const LOG_TAIL: f64 = -690.775_527_898_213_7;
/// Nodes whose weighted contribution is provably below this are skipped.
const NODE_FLOOR: f64 = 1e-20;
/// Accuracy target for one node's weighted contribution.
const NODE_TOL: f64 = 1e-17;

/// `E[P(γ_end)]` for `1/γ_end = Σ 1/γ_i` with independent hops whose
/// reciprocal-SNR MGFs are `mgfs`.
///
/// Evaluates `-∫_0^∞ Z(u) M'_end(u) du` with `M'_end = M_end Σ M'_i/M_i`.
/// The half-line is mapped onto (-1, 1) by `u = c ((1+x)/(1-x))^4`, which
/// flattens the logarithmic singularity of `M'` at the origin, and the
/// Gauss–Chebyshev rule is doubled from `quad_order` until two successive
/// values agree. The result is clamped to `[0, P(0)]`.
pub fn asep_from_mgfs(mgfs: &[MgfHandle], m: &ModulationSpec, quad_order: usize) -> Result<f64> {
    if mgfs.is_empty() {
        return Err(Error::domain("need at least one hop"));
    }
    if quad_order < 8 {
        return Err(Error::domain(format!("quadrature order must be at least 8, got {quad_order}")));
    }
    let kernel = Kernel::new(m)?;
    let scale = mgfs.iter().map(|h| h.omega.sqrt().recip()).sum::<f64>().powi(-2);

    let mut order = quad_order;
    let mut prev = integrate_once(mgfs, &kernel, scale, order)?;
    loop {
        order *= 2;
        if order > MAX_QUAD_ORDER {
            return Err(Error::numerical(format!(
                "ASEP quadrature did not settle by order {MAX_QUAD_ORDER} (last value {prev})"
            )));
        }
        let cur = integrate_once(mgfs, &kernel, scale, order)?;
        if (cur - prev).abs() <= ABS_TOL + REL_TOL * cur.abs() {
            return Ok(cur.clamp(0.0, m.sep_at_zero()?));
        }
        prev = cur;
    }
}

fn integrate_once(mgfs: &[MgfHandle], kernel: &Kernel<'_>, scale: f64, order: usize) -> Result<f64> {
    let rule = gcq_rule(order)?;
    let z_max = kernel.bound();
    let mut acc = NeumaierSum::default();
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let t = (1.0 + x) / (1.0 - x);
        let u = scale * t.powi(4);
        if u <= 0.0 || !u.is_finite() {
            continue;
        }
        let mut log_m = 0.0;
        let mut ratio = 0.0;
        for h in mgfs {
            let (lm, r) = h.log_value_and_ratio(u);
            log_m += lm;
            ratio += r;
        }
        if log_m < LOG_TAIL {
            continue;
        }
        let jac = 8.0 * scale * t.powi(3) / ((1.0 - x) * (1.0 - x));
        let weight = -w * log_m.exp() * ratio * jac;
        if weight * z_max < NODE_FLOOR {
            continue;
        }
        let tol = (NODE_TOL / weight).clamp(DEFAULT_TOL, 1e-3);
        acc.add(weight * kernel.eval(u, tol)?);
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(Error::numerical("ASEP integrand produced a non-finite value"));
    }
    Ok(v)
}

/// MGFs of the hops of an AP-1 route: every relay hop carries the best of
/// `L` channels, the last hop is forced.
pub fn ap1_mgfs(topo: &Topology) -> Result<Vec<MgfHandle>> {
    let n = topo.n_hops();
    let mut v = Vec::with_capacity(n);
    for hop in 0..n - 1 {
        v.push(mgf_max_recip(topo.relays(), topo.hop_mean(hop))?.at_hop(hop));
    }
    v.push(mgf_last_hop(topo.last_hop_avg_power())?.at_hop(n - 1));
    Ok(v)
}

/// Exact ASEP of AP-1 routing.
pub fn asep_ap1(topo: &Topology, m: &ModulationSpec, quad_order: usize) -> Result<f64> {
    asep_from_mgfs(&ap1_mgfs(topo)?, m, quad_order)
}

/// Bound on the ASEP of AP-2 routing: the final relay hop and the last hop
/// are replaced by the best of `L` per-relay minima scaled by `c`. `c = 1`
/// gives a lower bound on the ASEP, `c = 1/2` an upper bound.
pub fn asep_ap2_bound(topo: &Topology, m: &ModulationSpec, c: f64, quad_order: usize) -> Result<f64> {
    let n = topo.n_hops();
    let mut v = Vec::with_capacity(n - 1);
    for hop in 0..n - 2 {
        v.push(mgf_max_recip(topo.relays(), topo.hop_mean(hop))?.at_hop(hop));
    }
    v.push(mgf_pair_bound(topo.relays(), topo.hop_mean(n - 2), topo.last_hop_avg_power(), c)?.at_hop(n - 2));
    asep_from_mgfs(&v, m, quad_order)
}

/// Rayleigh-averaged DPSK error rate of a single hop, `1/(2(1+Ω))`.
pub fn asep_singlehop_dpsk(omega: f64) -> f64 {
    0.5 / (1.0 + omega)
}
