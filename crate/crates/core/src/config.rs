//! Run configuration: documented defaults, a flat TOML file loader, and
//! validation. Precedence is defaults < file < CLI flags; the CLI applies
//! flag overrides onto the struct this module produces.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gfm::GfmConfig;
use crate::miner::MinerConfig;

/// Everything a pipeline run needs. Field defaults are the documented
/// defaults of the method (neighborhood of 50 parents, 100 replicates each,
/// top-5 rules per sign, conditions from 3 bins per feature).
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Half-hourly consumption CSV (meter_id, timestamp, kwh).
    pub consumption: PathBuf,
    /// Daily temperature CSV (meter_id, date, mean, min, max).
    pub temperature: PathBuf,
    /// Directory all outputs are written under.
    pub out_dir: PathBuf,
    /// Real neighbors selected per explained meter.
    pub n_filt: usize,
    /// Bootstrap replicates generated per neighbor.
    pub n_synthetic: usize,
    pub miner: MinerConfig<f64>,
    /// Quantile bins per numeric feature when building the condition universe.
    pub bins: usize,
    pub gfm: GfmConfig<f64>,
    /// Root seed; every random stream derives from it.
    pub seed: u64,
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
    /// Sakoe-Chiba band radius for DTW; None means unconstrained.
    pub dtw_band: Option<usize>,
    /// Days to forecast past the end of each series.
    pub horizon: usize,
    /// Also write per-meter neighborhood and feature-table CSVs.
    pub debug_dumps: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            consumption: PathBuf::new(),
            temperature: PathBuf::new(),
            out_dir: PathBuf::new(),
            n_filt: 50,
            n_synthetic: 100,
            miner: MinerConfig::default(),
            bins: 3,
            gfm: GfmConfig::default(),
            seed: 42,
            jobs: 0,
            dtw_band: None,
            horizon: 365,
            debug_dumps: false,
        }
    }
}

/// Flat key-value TOML view of `RunConfig`. Every key is optional; absent
/// keys keep their defaults. Unknown keys are rejected so typos surface.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    consumption: Option<PathBuf>,
    temperature: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    n_filt: Option<usize>,
    n_synth: Option<usize>,
    k: Option<usize>,
    max_rule_len: Option<usize>,
    min_coverage: Option<f64>,
    bins: Option<usize>,
    window: Option<usize>,
    tau_long: Option<f64>,
    tau_short: Option<f64>,
    long_series_threshold: Option<usize>,
    ridge_penalty: Option<f64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    dtw_band: Option<usize>,
    horizon: Option<usize>,
    debug_dumps: Option<bool>,
}

impl RunConfig {
    /// Defaults overlaid with whatever keys the TOML text sets.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: FileConfig = toml::from_str(text)
            .map_err(|e| Error::invalid(format!("config file: {e}")))?;
        let mut cfg = RunConfig::default();
        macro_rules! take {
            ($field:expr, $src:expr) => {
                if let Some(v) = $src {
                    $field = v;
                }
            };
        }
        take!(cfg.consumption, file.consumption);
        take!(cfg.temperature, file.temperature);
        take!(cfg.out_dir, file.out_dir);
        take!(cfg.n_filt, file.n_filt);
        take!(cfg.n_synthetic, file.n_synth);
        take!(cfg.miner.k, file.k);
        take!(cfg.miner.max_len, file.max_rule_len);
        take!(cfg.miner.min_coverage, file.min_coverage);
        take!(cfg.bins, file.bins);
        take!(cfg.gfm.window, file.window);
        take!(cfg.gfm.tau_long, file.tau_long);
        take!(cfg.gfm.tau_short, file.tau_short);
        take!(cfg.gfm.long_series_threshold, file.long_series_threshold);
        take!(cfg.gfm.ridge_penalty, file.ridge_penalty);
        take!(cfg.seed, file.seed);
        take!(cfg.jobs, file.jobs);
        cfg.dtw_band = file.dtw_band.or(cfg.dtw_band);
        take!(cfg.horizon, file.horizon);
        take!(cfg.debug_dumps, file.debug_dumps);
        Ok(cfg)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml_str(&text)
    }

    /// Reject configurations no run could satisfy. Called after all
    /// overrides are applied, so file/flag combinations are checked as a
    /// whole.
    pub fn validate(&self) -> Result<()> {
        if self.consumption.as_os_str().is_empty() {
            return Err(Error::invalid("consumption path is required"));
        }
        if self.temperature.as_os_str().is_empty() {
            return Err(Error::invalid("temperature path is required"));
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::invalid("out_dir is required"));
        }
        if self.n_filt == 0 {
            return Err(Error::invalid("n_filt must be at least 1"));
        }
        if self.bins < 2 {
            return Err(Error::invalid("bins must be at least 2"));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        self.miner.validate()?;
        self.gfm.validate()?;
        Ok(())
    }
}
