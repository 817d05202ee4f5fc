//! Browser bindings for relaygrid. Every entry point returns a JSON string
//! so the page needs no generated glue types.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use relaygrid::analytic::{asep_ap1, asep_ap2_bound, ModulationSpec, AP2_LOWER, AP2_UPPER};
use relaygrid::channel::Topology;
use relaygrid::mc::{estimate_paired_curve, McConfig};
use relaygrid::routing::{complexity_table, CombinerSpec, Protocol, TableProtocol};
use relaygrid::{db_to_linear, Error};

/// Largest trial count the page may request per grid point.
pub const MAX_TRIALS: u32 = 200_000;
/// Largest number of grid points per curve.
pub const MAX_POINTS: usize = 41;
const QUAD_ORDER: usize = 256;

#[derive(Serialize)]
struct AnalyticCurve {
    modulation: String,
    snr_db: Vec<f64>,
    exact: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize)]
struct Series {
    label: String,
    asep: Vec<f64>,
    ci_low: Vec<f64>,
    ci_high: Vec<f64>,
}

#[derive(Serialize)]
struct McCurve {
    trials: u32,
    seed: u32,
    snr_db: Vec<f64>,
    series: Vec<Series>,
}

#[derive(Serialize)]
struct ComplexityRow {
    protocol: &'static str,
    n: Option<usize>,
    n_csi: f64,
    n_comparisons: f64,
}

fn message(e: Error) -> String {
    e.to_string()
}

fn grid(lo_db: f64, hi_db: f64, step_db: f64) -> Result<Vec<f64>, String> {
    if !(lo_db.is_finite() && hi_db.is_finite() && step_db.is_finite()) || step_db <= 0.0 || hi_db < lo_db {
        return Err(format!("bad SNR grid {lo_db}..{hi_db} step {step_db}"));
    }
    let count = ((hi_db - lo_db) / step_db + 1e-9).floor() as usize + 1;
    if count > MAX_POINTS {
        return Err(format!("SNR grid has {count} points, at most {MAX_POINTS} allowed"));
    }
    Ok((0..count).map(|i| lo_db + i as f64 * step_db).collect())
}

/// Parse one protocol token: `ap-N`, `opt`, `dpp`, `fbap-N` or `fbdpp`,
/// with forward-backward variants optionally suffixed `/sc` or `/mrc`.
fn parse_protocol(token: &str) -> Result<Protocol, String> {
    let token = token.trim().to_ascii_lowercase();
    let (name, combiner) = match token.split_once('/') {
        Some((name, c)) => (name, CombinerSpec::from_parts(c, None).map_err(message)?),
        None => (token.as_str(), CombinerSpec::Sc),
    };
    let window = |rest: &str| rest.parse::<usize>().map_err(|_| format!("bad hop window in '{token}'"));
    let protocol = match name {
        "opt" | "optimal" => Protocol::optimal(),
        "dpp" => Protocol::dpp(),
        "fbdpp" => Protocol::fbdpp(combiner),
        _ => {
            if let Some(rest) = name.strip_prefix("fbap-") {
                Protocol::fbap(window(rest)?, combiner)
            } else if let Some(rest) = name.strip_prefix("ap-") {
                Protocol::ap(window(rest)?)
            } else {
                return Err(format!("unknown protocol '{token}'"));
            }
        }
    };
    Ok(protocol)
}

/// AP-1 exact ASEP and the AP-2 bounds over an SNR grid, as JSON with keys
/// `modulation`, `snr_db`, `exact`, `lower` and `upper`.
#[wasm_bindgen]
pub fn analytic_curve(
    n_hops: usize,
    relays: usize,
    modulation: &str,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
) -> Result<String, String> {
    let m = ModulationSpec::from_name(modulation).map_err(message)?;
    let grid = grid(lo_db, hi_db, step_db)?;
    let template = Topology::uniform(n_hops, relays, 1.0).map_err(message)?;
    let mut curve = AnalyticCurve {
        modulation: m.label(),
        snr_db: grid.clone(),
        exact: Vec::new(),
        lower: Vec::new(),
        upper: Vec::new(),
    };
    for &db in &grid {
        let topo = template.scaled(db_to_linear(db)).map_err(message)?;
        curve.exact.push(asep_ap1(&topo, &m, QUAD_ORDER).map_err(message)?);
        curve.lower.push(asep_ap2_bound(&topo, &m, AP2_LOWER, QUAD_ORDER).map_err(message)?);
        curve.upper.push(asep_ap2_bound(&topo, &m, AP2_UPPER, QUAD_ORDER).map_err(message)?);
    }
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

/// Monte-Carlo ASEP of several protocols on common channel draws. The
/// `protocols` argument is a comma-separated token list such as
/// `"ap-1,ap-2,fbap-2/mrc,opt"`.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn mc_curve(
    n_hops: usize,
    relays: usize,
    modulation: &str,
    protocols: &str,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
    trials: u32,
    seed: u32,
) -> Result<String, String> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must lie in 1..={MAX_TRIALS}"));
    }
    let m = ModulationSpec::from_name(modulation).map_err(message)?;
    let grid = grid(lo_db, hi_db, step_db)?;
    let protocols: Vec<Protocol> = protocols
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_protocol)
        .collect::<Result<_, _>>()?;
    if protocols.is_empty() {
        return Err("protocol list is empty".into());
    }
    let template = Topology::uniform(n_hops, relays, 1.0).map_err(message)?;
    let cfg = McConfig::new(protocols[0], m, trials as u64, seed as u64);
    let points = estimate_paired_curve(&template, &grid, &protocols, &cfg).map_err(message)?;
    let series = protocols
        .iter()
        .enumerate()
        .map(|(i, p)| Series {
            label: p.label(),
            asep: points.iter().map(|(_, e)| e.estimates[i].mean).collect(),
            ci_low: points.iter().map(|(_, e)| e.estimates[i].ci95.0).collect(),
            ci_high: points.iter().map(|(_, e)| e.estimates[i].ci95.1).collect(),
        })
        .collect();
    let curve = McCurve {
        trials,
        seed,
        snr_db: grid,
        series,
    };
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

/// Signalling cost of every protocol for an `N`-hop, `L`-relay cluster with
/// AP-n window `n`, as a JSON array of rows.
#[wasm_bindgen]
pub fn complexity(n_hops: usize, relays: usize, n: usize) -> Result<String, String> {
    let rows: Vec<ComplexityRow> = complexity_table(n_hops, relays, n)
        .map_err(message)?
        .into_iter()
        .map(|r| ComplexityRow {
            protocol: r.protocol.name(),
            n: r.n.filter(|_| matches!(r.protocol, TableProtocol::ApN | TableProtocol::FbApN)),
            n_csi: r.n_csi,
            n_comparisons: r.n_comparisons,
        })
        .collect();
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}
