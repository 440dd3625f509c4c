//! Rule-based local explanations for global time-series forecasting models.
//!
//! A single global model forecasts every meter in a panel; this crate
//! explains what that model predicts for *one* meter by:
//!
//! 1. collecting the meter's nearest neighbors under dynamic time warping
//!    and densifying them with bootstrap replicates ([`neighborhood`]),
//! 2. forecasting every member and summarizing each as interpretable
//!    per-month feature rows ([`gfm`], [`surrogate`]),
//! 3. mining k-optimal impact rules over those rows ([`miner`]), and
//! 4. classifying each rule against the meter's own situation into six
//!    guidance types — what supports the current forecast, what would raise
//!    it, and what would lower it ([`guidance`]).
//!
//! [`eval`] scores the rule set (and linear/tree baselines) for fidelity to
//! the forecaster and accuracy against held-out data; [`pipeline`] wires the
//! stages together behind [`config::RunConfig`]; [`synth`] generates panels
//! with known structure for testing.
//!
//! Numeric code is generic over [`num::Float`]; the `*F64` aliases at the
//! crate root name the instantiations the command-line tool uses.

pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod gfm;
pub mod guidance;
pub mod linalg;
pub mod miner;
pub mod neighborhood;
pub mod num;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod surrogate;
pub mod synth;

pub use config::RunConfig;
pub use error::{Error, ErrorCategory, Result};
pub use num::Float;

pub type DailySeriesF64 = data::DailySeries<f64>;
pub type TemperatureSeriesF64 = data::TemperatureSeries<f64>;
pub type SeriesPanelF64 = data::SeriesPanel<f64>;
pub type NeighborhoodF64 = neighborhood::Neighborhood<f64>;
pub type GfmConfigF64 = gfm::GfmConfig<f64>;
pub type GfmModelF64 = gfm::GfmModel<f64>;
pub type ForecastResultF64 = gfm::ForecastResult<f64>;
pub type RuleTableF64 = miner::RuleTable<f64>;
pub type MinerConfigF64 = miner::MinerConfig<f64>;
pub type ImpactRuleF64 = miner::ImpactRule<f64>;
pub type MinedRulesF64 = miner::MinedRules<f64>;
pub type GuidanceReportF64 = guidance::GuidanceReport<f64>;
