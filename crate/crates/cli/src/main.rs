//! Command-line front end: resolves configuration (defaults < file < flags),
//! sets up the worker pool, and dispatches to the pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use fex_core::config::RunConfig;
use fex_core::error::{Error, ErrorCategory, Result};
use fex_core::pipeline;
use fex_core::synth::{self, SyntheticSpec};

#[derive(Parser)]
#[command(
    name = "fex",
    version,
    about = "Explain per-meter consumption forecasts with k-optimal impact rules"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the config file; any flag given wins over the file value.
#[derive(Args)]
struct Overrides {
    /// TOML config file (flat keys; see README).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Half-hourly consumption CSV (meter_id,timestamp,kwh).
    #[arg(long, global = true)]
    consumption: Option<PathBuf>,
    /// Daily temperature CSV (meter_id,date,mean_temp,min_temp,max_temp).
    #[arg(long, global = true)]
    temperature: Option<PathBuf>,
    /// Directory all outputs are written under.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Real neighbors per explained meter.
    #[arg(long, global = true)]
    n_filt: Option<usize>,
    /// Bootstrap replicates per neighbor.
    #[arg(long, global = true)]
    n_synth: Option<usize>,
    /// Quantile bins per numeric feature.
    #[arg(long, global = true)]
    bins: Option<usize>,
    /// Rules kept per impact sign.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Maximum conditions per rule.
    #[arg(long, global = true)]
    max_rule_len: Option<usize>,
    /// Minimum fraction of rows a rule must cover.
    #[arg(long, global = true)]
    min_coverage: Option<f64>,
    /// Root seed for all randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Sakoe-Chiba band radius for DTW (unset = unconstrained).
    #[arg(long, global = true)]
    dtw_band: Option<usize>,
    /// Days to forecast past the end of each series.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Also write per-meter neighborhood and feature-table CSVs.
    #[arg(long, global = true)]
    debug_dumps: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the forecasting model and persist it under out_dir.
    Train,
    /// Explain one meter's forecast for one month.
    Explain {
        #[arg(long)]
        meter: String,
        /// Calendar month (1-12) within the forecast horizon.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
        month: u32,
    },
    /// Explain every meter for every month its forecast covers.
    ExplainAll,
    /// Score rule/linear/tree explainers for fidelity and accuracy.
    Eval,
    /// Generate a synthetic consumption/temperature panel.
    Synth {
        /// TOML generator spec.
        #[arg(long)]
        spec: PathBuf,
    },
}

fn resolve_config(overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &overrides.config {
        Some(path) => RunConfig::from_toml_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &overrides.consumption {
        cfg.consumption = v.clone();
    }
    if let Some(v) = &overrides.temperature {
        cfg.temperature = v.clone();
    }
    if let Some(v) = &overrides.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = overrides.n_filt {
        cfg.n_filt = v;
    }
    if let Some(v) = overrides.n_synth {
        cfg.n_synthetic = v;
    }
    if let Some(v) = overrides.bins {
        cfg.bins = v;
    }
    if let Some(v) = overrides.k {
        cfg.miner.k = v;
    }
    if let Some(v) = overrides.max_rule_len {
        cfg.miner.max_len = v;
    }
    if let Some(v) = overrides.min_coverage {
        cfg.miner.min_coverage = v;
    }
    if let Some(v) = overrides.seed {
        cfg.seed = v;
    }
    if let Some(v) = overrides.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = overrides.dtw_band {
        cfg.dtw_band = Some(v);
    }
    if let Some(v) = overrides.horizon {
        cfg.horizon = v;
    }
    if overrides.debug_dumps {
        cfg.debug_dumps = true;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(&cli.overrides)?;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Train => {
            let summary = pipeline::run_train(&cfg)?;
            println!(
                "trained on {} meters ({} long / {} short training instances)",
                summary.n_meters, summary.stats.long_instances, summary.stats.short_instances
            );
            for path in &summary.model_files {
                println!("wrote {}", path.display());
            }
            if !summary.rejections.is_empty() {
                println!("{} meters rejected (details in the log)", summary.rejections.len());
            }
        }
        Command::Explain { meter, month } => {
            let out = pipeline::run_explain(&cfg, meter, *month)?;
            print!("{}", std::fs::read_to_string(&out.text_path)?);
            println!("wrote {}", out.json_path.display());
            println!("wrote {}", out.text_path.display());
        }
        Command::ExplainAll => {
            let out = pipeline::run_explain_all(&cfg)?;
            println!(
                "wrote {} guidance files and {}",
                out.json_paths.len(),
                out.text_path.display()
            );
        }
        Command::Eval => {
            let out = pipeline::run_eval(&cfg)?;
            for row in &out.rows {
                println!(
                    "{:>5} {:<6} {:<8} rae {:.4}  rmse {:.4}  mae {:.4}",
                    row.explainer,
                    row.scope,
                    row.metric_mode,
                    row.metrics.rae,
                    row.metrics.rmse,
                    row.metrics.mae
                );
            }
            println!("wrote {}", out.results_path.display());
            println!("wrote {}", out.importance_path.display());
        }
        Command::Synth { spec } => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| Error::io(spec.display().to_string(), e))?;
            let spec: SyntheticSpec =
                toml::from_str(&text).map_err(|e| Error::invalid(format!("synth spec: {e}")))?;
            if cfg.consumption.as_os_str().is_empty() || cfg.temperature.as_os_str().is_empty() {
                return Err(Error::invalid(
                    "synth needs --consumption and --temperature output paths (or a config file)",
                ));
            }
            synth::write_synthetic_panel(&spec, &cfg.consumption, &cfg.temperature)?;
            println!(
                "wrote {} and {}",
                cfg.consumption.display(),
                cfg.temperature.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            match e.category() {
                ErrorCategory::Numerical => ExitCode::from(3),
                ErrorCategory::Validation => ExitCode::from(2),
            }
        }
    }
}
