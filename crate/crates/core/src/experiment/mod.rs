//! Config-driven sweeps producing CSV tables and SVG charts.

mod config;
mod svg;

pub use config::ExperimentConfig;
pub use svg::{emit_svg, render_svg, SvgStyle};

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::analytic::{asep_ap1, asep_ap2_bound, AP2_LOWER, AP2_UPPER};
use crate::channel::Topology;
use crate::mc::{estimate_paired, AsepEstimate, McConfig, Method};
use crate::routing::{complexity_table, Protocol, ScanProtocol, TableProtocol};
use crate::{db_to_linear, Error, Result};

/// Column names of the result CSV, in order.
pub const CSV_COLUMNS: [&str; 14] = [
    "experiment",
    "protocol",
    "n",
    "combiner",
    "N",
    "L",
    "snr_db",
    "method",
    "asep",
    "ci_low",
    "ci_high",
    "trials",
    "seed",
    "quad_order",
];

/// One data row of the result CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment: String,
    pub protocol: String,
    pub n: Option<usize>,
    pub combiner: Option<String>,
    #[serde(rename = "N")]
    pub n_hops: usize,
    #[serde(rename = "L")]
    pub relays: usize,
    pub snr_db: f64,
    pub method: String,
    pub asep: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: Option<u64>,
    pub seed: u64,
    pub quad_order: Option<usize>,
}

impl CsvRow {
    /// Series label used by the charts, e.g. `FBAP-2 (SC) N=4 L=3 mc`.
    pub fn series_label(&self) -> String {
        let mut s = self.protocol.clone();
        if let Some(n) = self.n {
            s.push_str(&format!("-{n}"));
        }
        if let Some(c) = &self.combiner {
            s.push_str(&format!(" ({c})"));
        }
        format!("{s} N={} L={} {}", self.n_hops, self.relays, self.method)
    }
}

/// Artifacts of a finished run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    pub rows: Vec<CsvRow>,
    /// Self-check violations; empty when the check was not requested or passed.
    pub check_failures: Vec<String>,
}

fn row(cfg: &ExperimentConfig, p: &Protocol, topo: &Topology, snr_db: f64, est: &AsepEstimate) -> CsvRow {
    let mc = est.method == Method::Mc;
    CsvRow {
        experiment: cfg.experiment.clone(),
        protocol: p.family().to_string(),
        n: p.hop_window(),
        combiner: p.combiner().map(|c| c.name().to_string()),
        n_hops: topo.n_hops(),
        relays: topo.relays(),
        snr_db,
        method: est.method.as_str().to_string(),
        asep: est.mean,
        ci_low: est.ci95.0,
        ci_high: est.ci95.1,
        trials: mc.then_some(est.trials),
        seed: cfg.seed,
        quad_order: (!mc).then_some(cfg.quad_order),
    }
}

/// Analytic companions of a protocol, where they exist: AP-1 has an exact
/// value and AP-2 a pair of bounds.
fn analytic_rows(cfg: &ExperimentConfig, p: &Protocol, topo: &Topology) -> Result<Vec<AsepEstimate>> {
    Ok(match p {
        Protocol::Forward(ScanProtocol::Ap { n: 1 }) => vec![AsepEstimate::analytic(
            asep_ap1(topo, &cfg.modulation, cfg.quad_order)?,
            Method::AnalyticExact,
        )],
        Protocol::Forward(ScanProtocol::Ap { n: 2 }) => vec![
            AsepEstimate::analytic(
                asep_ap2_bound(topo, &cfg.modulation, AP2_LOWER, cfg.quad_order)?,
                Method::AnalyticLower,
            ),
            AsepEstimate::analytic(
                asep_ap2_bound(topo, &cfg.modulation, AP2_UPPER, cfg.quad_order)?,
                Method::AnalyticUpper,
            ),
        ],
        _ => Vec::new(),
    })
}

/// Compare analytic rows against the MC row they accompany: the exact AP-1
/// value must fall within 3σ, the AP-2 bounds must bracket the estimate
/// within 3σ.
fn self_check(mc: &AsepEstimate, analytic: &[AsepEstimate], what: &str) -> Option<String> {
    let slack = 3.0 * mc.std_error;
    for a in analytic {
        let ok = match a.method {
            Method::AnalyticExact => mc.within_sigma(a.mean, 3.0),
            Method::AnalyticLower => a.mean <= mc.mean + slack,
            Method::AnalyticUpper => a.mean >= mc.mean - slack,
            Method::Mc => true,
        };
        if !ok {
            return Some(format!(
                "{what}: {} = {:e} against mc {:e} ± {:e}",
                a.method, a.mean, mc.mean, mc.std_error
            ));
        }
    }
    None
}

/// Evaluate every (topology, protocol, grid point) of the experiment.
/// Protocols of one topology share common random numbers.
pub fn compute_rows(cfg: &ExperimentConfig, self_check_on: bool) -> Result<(Vec<CsvRow>, Vec<String>)> {
    let mc_cfg = McConfig::new(cfg.protocols[0], cfg.modulation.clone(), cfg.trials, cfg.seed).with_workers(cfg.workers);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for template in &cfg.topologies {
        let mut per_protocol: Vec<Vec<CsvRow>> = vec![Vec::new(); cfg.protocols.len()];
        for &snr_db in &cfg.snr_grid_db {
            let topo = template.scaled(db_to_linear(snr_db))?;
            let paired = estimate_paired(&topo, &cfg.protocols, &mc_cfg)?;
            for (k, p) in cfg.protocols.iter().enumerate() {
                let mc = paired.estimates[k];
                per_protocol[k].push(row(cfg, p, &topo, snr_db, &mc));
                let analytic = analytic_rows(cfg, p, &topo)?;
                if self_check_on {
                    let what = format!("{} N={} L={} at {snr_db} dB", p.label(), topo.n_hops(), topo.relays());
                    failures.extend(self_check(&mc, &analytic, &what));
                }
                per_protocol[k].extend(analytic.iter().map(|a| row(cfg, p, &topo, snr_db, a)));
            }
        }
        rows.extend(per_protocol.into_iter().flatten());
    }
    Ok((rows, failures))
}

fn header_comment(cfg: &ExperimentConfig) -> String {
    format!(
        "# relaygrid experiment={} modulation={}; snr_db is added to every hop's omega_db, \
         so with uniform omega_db = 0 it is the per-hop average SNR in dB\n",
        cfg.experiment,
        cfg.modulation.label()
    )
}

fn fmt_float(x: f64) -> String {
    format!("{x:e}")
}

/// Serialise rows under a `#` comment line and the header row.
pub fn render_csv(comment: &str, rows: &[CsvRow]) -> Result<String> {
    let mut out = String::new();
    for line in comment.lines() {
        out.push_str(if line.starts_with('#') { "" } else { "# " });
        out.push_str(line);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).map_err(|e| Error::Csv(e.to_string()))?;
    for r in rows {
        let opt = |v: Option<String>| v.unwrap_or_default();
        w.write_record([
            r.experiment.clone(),
            r.protocol.clone(),
            opt(r.n.map(|n| n.to_string())),
            opt(r.combiner.clone()),
            r.n_hops.to_string(),
            r.relays.to_string(),
            r.snr_db.to_string(),
            r.method.clone(),
            fmt_float(r.asep),
            fmt_float(r.ci_low),
            fmt_float(r.ci_high),
            opt(r.trials.map(|t| t.to_string())),
            r.seed.to_string(),
            opt(r.quad_order.map(|q| q.to_string())),
        ])
        .map_err(|e| Error::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))?);
    Ok(out)
}

/// Parse a result CSV, skipping `#` comment lines.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::Csv(format!("unexpected header {headers:?}")));
    }
    rdr.deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| Error::Csv(e.to_string()))
}

fn resolve(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match (out_dir, path.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Run the experiment and write its CSV (and SVG when configured). With
/// `out_dir` the output file names are kept but placed in that directory.
/// When `self_check` is set and an analytic value disagrees with its MC
/// row, the artifacts are still written and [`Error::SelfCheck`] is returned.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>, self_check: bool) -> Result<RunSummary> {
    let (rows, check_failures) = compute_rows(cfg, self_check)?;
    let csv_text = render_csv(&header_comment(cfg), &rows)?;
    let csv_path = resolve(&cfg.csv_path, out_dir);
    write_file(&csv_path, &csv_text)?;
    let svg_path = match &cfg.svg_path {
        Some(p) => {
            let path = resolve(p, out_dir);
            write_file(&path, &render_svg(&csv_text, &SvgStyle::default())?)?;
            Some(path)
        }
        None => None,
    };
    if !check_failures.is_empty() {
        return Err(Error::SelfCheck(check_failures.join("; ")));
    }
    Ok(RunSummary {
        csv_path,
        svg_path,
        rows,
        check_failures,
    })
}

/// Complexity rows for `N` hops and `L` relays: the window-free protocols
/// once, then AP-n and FBAP-n for every window in `n_list`. Columns are
/// `protocol, n, n_csi, n_comparisons`.
pub fn emit_complexity_table(hops: usize, relays: usize, n_list: &[usize]) -> Result<String> {
    let fixed = complexity_table(hops, relays, 1)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(["protocol", "n", "n_csi", "n_comparisons"]).map_err(csv_err)?;
    let mut emit = |r: &crate::routing::ComplexityReport| {
        w.write_record([
            r.protocol.name().to_string(),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.n_csi.to_string(),
            r.n_comparisons.to_string(),
        ])
    };
    for r in fixed.iter().filter(|r| !matches!(r.protocol, TableProtocol::ApN | TableProtocol::FbApN)) {
        emit(r).map_err(csv_err)?;
    }
    for &n in n_list {
        for r in complexity_table(hops, relays, n)?
            .iter()
            .filter(|r| matches!(r.protocol, TableProtocol::ApN | TableProtocol::FbApN))
        {
            emit(r).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(protocols: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            r#"
experiment = "unit"
modulation = "dpsk"
snr_grid_db = [0, 10]
trials = 3000
seed = 9

[[topology]]
n_hops = 3
relays = 2

{protocols}

[outputs]
csv = "unit.csv"
"#
        ))
        .unwrap()
    }

    #[test]
    fn rows_follow_protocol_then_grid_order() {
        let cfg = small_config("[[protocol]]\nkind = \"ap\"\n\n[[protocol]]\nkind = \"ap\"\nn = 2\n\n[[protocol]]\nkind = \"dpp\"");
        let (rows, failures) = compute_rows(&cfg, true).unwrap();
        assert!(failures.is_empty(), "{failures:?}");
        let tags: Vec<String> = rows.iter().map(|r| format!("{}{:?}@{}:{}", r.protocol, r.n, r.snr_db, r.method)).collect();
        assert_eq!(
            tags,
            [
                "APSome(1)@0:mc",
                "APSome(1)@0:analytic-exact",
                "APSome(1)@10:mc",
                "APSome(1)@10:analytic-exact",
                "APSome(2)@0:mc",
                "APSome(2)@0:analytic-lower",
                "APSome(2)@0:analytic-upper",
                "APSome(2)@10:mc",
                "APSome(2)@10:analytic-lower",
                "APSome(2)@10:analytic-upper",
                "DPPNone@0:mc",
                "DPPNone@10:mc",
            ]
        );
        assert_eq!(rows[0].trials, Some(3000));
        assert_eq!(rows[0].quad_order, None);
        assert_eq!(rows[1].trials, None);
        assert_eq!(rows[1].quad_order, Some(256));
    }

    #[test]
    fn csv_round_trips() {
        let cfg = small_config("[[protocol]]\nkind = \"fbap\"\nn = 2\ncombiner = \"mrc\"");
        let (rows, _) = compute_rows(&cfg, false).unwrap();
        let text = render_csv(&header_comment(&cfg), &rows).unwrap();
        assert!(text.starts_with("# relaygrid experiment=unit"));
        assert_eq!(text.lines().nth(1).unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(parse_csv(&text).unwrap(), rows);
        assert_eq!(rows[0].series_label(), "FBAP-2 (MRC) N=3 L=2 mc");
    }

    #[test]
    fn quoting_survives_commas() {
        let mut cfg = small_config("[[protocol]]\nkind = \"ap\"");
        cfg.experiment = "a, \"quoted\" name".into();
        let (rows, _) = compute_rows(&cfg, false).unwrap();
        let text = render_csv("note", &rows).unwrap();
        assert!(text.contains("\"a, \"\"quoted\"\" name\""));
        assert_eq!(parse_csv(&text).unwrap()[0].experiment, cfg.experiment);
    }

    #[test]
    fn self_check_flags_disagreement() {
        let mc = AsepEstimate {
            mean: 0.1,
            std_error: 0.001,
            ci95: (0.098, 0.102),
            trials: 10,
            method: Method::Mc,
        };
        assert!(self_check(&mc, &[AsepEstimate::analytic(0.1025, Method::AnalyticExact)], "x").is_none());
        assert!(self_check(&mc, &[AsepEstimate::analytic(0.2, Method::AnalyticExact)], "x").is_some());
        assert!(self_check(&mc, &[AsepEstimate::analytic(0.11, Method::AnalyticLower)], "x").is_some());
        assert!(self_check(&mc, &[AsepEstimate::analytic(0.09, Method::AnalyticUpper)], "x").is_some());
        assert!(self_check(
            &mc,
            &[
                AsepEstimate::analytic(0.05, Method::AnalyticLower),
                AsepEstimate::analytic(0.2, Method::AnalyticUpper)
            ],
            "x"
        )
        .is_none());
    }

    #[test]
    fn complexity_csv_rows() {
        let text = emit_complexity_table(6, 7, &[3]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "protocol,n,n_csi,n_comparisons");
        assert!(lines[1].starts_with("Optimal,,210,"));
        assert!(lines.iter().any(|l| l.starts_with("AP-n,3,")));
        let text = emit_complexity_table(6, 4, &[4]).unwrap();
        assert!(text.lines().any(|l| l.starts_with("AP-n,4,") && l.ends_with(",69")));
        assert!(text.lines().any(|l| l.starts_with("FBAP-2,,") && l.ends_with(",39")));
        let text = emit_complexity_table(2, 1, &[]).unwrap();
        assert!(text.lines().any(|l| l == "AP-1,,1,0"));
        assert!(emit_complexity_table(3, 2, &[4]).is_err());
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
        let bad = format!("{}\nx,AP,1,,3,2,zero,mc,1,1,1,1,1,\n", CSV_COLUMNS.join(","));
        assert!(parse_csv(&bad).is_err());
    }
}
