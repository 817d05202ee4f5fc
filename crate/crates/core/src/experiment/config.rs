//! TOML experiment configuration.
//!
//! ```toml
//! experiment = "ap1-vs-analytic"
//! modulation = "dpsk"            # or { a = 1.0, b = 2.0 }
//! snr_grid_db = [0, 5, 10, 15, 20]
//! trials = 100000
//! seed = 7
//! workers = 1
//! quad_order = 256
//!
//! [[topology]]
//! n_hops = 4
//! relays = 3
//! omega_db = 0.0                 # or one value per hop, last hop included
//!
//! [[protocol]]
//! kind = "fbap"                  # ap, optimal, dpp, bap, bdpp, fbap, fbdpp
//! n = 2
//! combiner = "ssc"               # sc, mrc, ssc
//! ssc_threshold_db = 3.0
//!
//! [outputs]
//! csv = "ap1.csv"
//! svg = "ap1.svg"
//! ```

use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::analytic::ModulationSpec;
use crate::channel::Topology;
use crate::routing::{CombinerSpec, Protocol, ScanProtocol};
use crate::{db_to_linear, Error, Result};

/// A parsed and validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub modulation: ModulationSpec,
    /// Topology templates; average powers are offsets scaled by each grid point.
    pub topologies: Vec<Topology>,
    pub protocols: Vec<Protocol>,
    pub snr_grid_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub quad_order: usize,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    modulation: RawModulation,
    #[serde(default)]
    topology: Vec<RawTopology>,
    #[serde(default)]
    protocol: Vec<RawProtocol>,
    snr_grid_db: Vec<f64>,
    trials: u64,
    seed: u64,
    #[serde(default = "default_workers")]
    workers: usize,
    #[serde(default = "default_quad_order")]
    quad_order: usize,
    outputs: RawOutputs,
}

fn default_workers() -> usize {
    1
}

fn default_quad_order() -> usize {
    256
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawModulation {
    Name(String),
    Binary { a: f64, b: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawOmega {
    Uniform(f64),
    PerHop(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    n_hops: usize,
    relays: usize,
    #[serde(default)]
    omega_db: Option<RawOmega>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    kind: String,
    n: Option<usize>,
    combiner: Option<String>,
    ssc_threshold_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    csv: PathBuf,
    svg: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Read and validate a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        raw.into_config()
    }
}

impl RawConfig {
    fn into_config(self) -> Result<ExperimentConfig> {
        if self.experiment.trim().is_empty() {
            return Err(Error::config("experiment name is empty"));
        }
        if self.protocol.is_empty() {
            return Err(Error::config("protocol list is empty"));
        }
        if self.topology.is_empty() {
            return Err(Error::config("topology list is empty"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::config("snr_grid_db is empty"));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) || self.snr_grid_db.iter().any(|g| !g.is_finite()) {
            return Err(Error::config("snr_grid_db must be finite and strictly increasing"));
        }
        if self.trials < 1 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers must be at least 1"));
        }
        if self.quad_order < 8 {
            return Err(Error::config("quad_order must be at least 8"));
        }
        let modulation = match self.modulation {
            RawModulation::Name(name) => ModulationSpec::from_name(&name)?,
            RawModulation::Binary { a, b } => ModulationSpec::binary(a, b).map_err(|e| Error::config(e.to_string()))?,
        };
        let topologies = self
            .topology
            .iter()
            .map(RawTopology::build)
            .collect::<Result<Vec<_>>>()?;
        let protocols = self
            .protocol
            .iter()
            .map(RawProtocol::build)
            .collect::<Result<Vec<_>>>()?;
        for topo in &topologies {
            for p in &protocols {
                p.validate(topo.n_hops(), topo.relays()).map_err(|e| {
                    Error::config(format!(
                        "{} on N={} L={}: {e}",
                        p.label(),
                        topo.n_hops(),
                        topo.relays()
                    ))
                })?;
            }
        }
        Ok(ExperimentConfig {
            experiment: self.experiment,
            modulation,
            topologies,
            protocols,
            snr_grid_db: self.snr_grid_db,
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
            quad_order: self.quad_order,
            csv_path: self.outputs.csv,
            svg_path: self.outputs.svg,
        })
    }
}

impl RawTopology {
    fn build(&self) -> Result<Topology> {
        if self.n_hops < 2 {
            return Err(Error::config(format!("n_hops must be at least 2, got {}", self.n_hops)));
        }
        let per_hop = match &self.omega_db {
            None => vec![0.0; self.n_hops],
            Some(RawOmega::Uniform(db)) => vec![*db; self.n_hops],
            Some(RawOmega::PerHop(v)) => {
                if v.len() != self.n_hops {
                    return Err(Error::config(format!(
                        "omega_db lists {} values for {} hops",
                        v.len(),
                        self.n_hops
                    )));
                }
                v.clone()
            }
        };
        let lin: Vec<f64> = per_hop.iter().map(|&db| db_to_linear(db)).collect();
        let (last, relay_hops) = lin.split_last().expect("n_hops >= 2");
        Topology::new(self.n_hops, self.relays, relay_hops.to_vec(), *last).map_err(|e| Error::config(e.to_string()))
    }
}

impl RawProtocol {
    fn build(&self) -> Result<Protocol> {
        let kind = self.kind.to_ascii_lowercase();
        let windowed = matches!(kind.as_str(), "ap" | "bap" | "fbap");
        let combined = matches!(kind.as_str(), "fbap" | "fbdpp");
        if self.n.is_some() && !windowed {
            return Err(Error::config(format!("protocol '{}' takes no hop window n", self.kind)));
        }
        if !combined && (self.combiner.is_some() || self.ssc_threshold_db.is_some()) {
            return Err(Error::config(format!("protocol '{}' takes no combiner", self.kind)));
        }
        let scan = match kind.as_str() {
            "ap" | "bap" | "fbap" => ScanProtocol::Ap { n: self.n.unwrap_or(1) },
            "optimal" => ScanProtocol::Optimal,
            "dpp" | "bdpp" | "fbdpp" => ScanProtocol::Dpp,
            _ => return Err(Error::config(format!("unknown protocol kind '{}'", self.kind))),
        };
        Ok(match kind.as_str() {
            "bap" | "bdpp" => Protocol::Backward(scan),
            "fbap" | "fbdpp" => {
                let name = self
                    .combiner
                    .as_deref()
                    .ok_or_else(|| Error::config(format!("protocol '{}' needs a combiner", self.kind)))?;
                let threshold = self.ssc_threshold_db.map(db_to_linear);
                let combiner = CombinerSpec::from_parts(name, threshold).map_err(|e| Error::config(e.to_string()))?;
                Protocol::ForwardBackward { scan, combiner }
            }
            _ => Protocol::Forward(scan),
        })
    }
}
