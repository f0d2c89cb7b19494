//! Run configuration: one TOML file, dotted keys allowed, e.g.
//!
//! ```toml
//! experiment.trials = 1000
//! experiment.beta_db = [0.0, 3.0, 6.0]
//! experiment.propagation.mu_per_km = 40.0
//! topology.file = "stations.csv"
//! output.dir = "results"
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use uplink_core::experiment::{synthetic_stations, ExperimentConfig};
use uplink_core::topology::{NetworkTopology, Rect};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub topology: TopologySource,
    pub output: OutputConfig,
    pub rate_curve: RateCurveConfig,
}

/// Where the base stations come from: a CSV file, or a synthetic jittered
/// grid when no file is given. The region is a `region_km` square with its
/// corner at the origin; the measurement window is centered in it.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologySource {
    pub file: Option<PathBuf>,
    pub stations: usize,
    pub region_km: f64,
    pub window_km: f64,
    pub jitter: f64,
    pub seed: u64,
}

impl Default for TopologySource {
    fn default() -> Self {
        Self {
            file: None,
            stations: 121,
            region_km: 30.0,
            window_km: 20.0,
            jitter: 0.35,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateCurveConfig {
    pub cm_ratio: f64,
    pub uplinks: usize,
    pub rate_min: f64,
    pub rate_max: f64,
    pub rate_step: f64,
    pub shadowing: bool,
}

impl Default for RateCurveConfig {
    fn default() -> Self {
        Self {
            cm_ratio: 0.1,
            uplinks: 8,
            rate_min: 0.05,
            rate_max: 4.0,
            rate_step: 0.05,
            shadowing: true,
        }
    }
}

impl RateCurveConfig {
    pub fn rates(&self) -> Result<Vec<f64>, CliError> {
        if !(self.rate_min > 0.0 && self.rate_step > 0.0 && self.rate_max >= self.rate_min) {
            return Err(CliError::Config(
                "rate grid needs 0 < rate_min <= rate_max and rate_step > 0".into(),
            ));
        }
        let n = ((self.rate_max - self.rate_min) / self.rate_step + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|k| self.rate_min + k as f64 * self.rate_step)
            .collect())
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(f) = cfg.topology.file.take() {
            cfg.topology.file = Some(base.join(f));
        }
        cfg.output.dir = base.join(&cfg.output.dir);
        Ok(cfg)
    }

    pub fn build_topology(&self) -> Result<NetworkTopology, CliError> {
        let t = &self.topology;
        let region = Rect::sized(t.region_km, t.region_km)?;
        let window = region.centered_sub(t.window_km, t.window_km)?;
        let stations = match &t.file {
            Some(path) => {
                let file = fs::File::open(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                NetworkTopology::read_stations(file)?
            }
            None => synthetic_stations(t.stations, region, t.jitter, t.seed)?,
        };
        Ok(NetworkTopology::new(
            stations,
            self.experiment.beam.sectors_per_station,
            region,
            window,
        )?)
    }
}
