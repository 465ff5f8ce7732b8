//! Hybrid exchange-rate forecasting.
//!
//! Three base forecasters (ARFIMA, a discrete grey model with fuzzy-weight
//! Markov residual correction, and a variable-fractal-dimension Kalman filter)
//! are combined with least-squares, effective-degree or grey-relation weights
//! and scored on a holdout window with MAFE, RMSFE, MAPFE and directional
//! accuracy.

// `!(x > 0.0)` style checks deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arfima;
pub mod backtest;
pub mod error;
pub mod grey;
pub mod hybrid;
pub mod ingest;
pub mod kalman;
pub mod metrics;
pub mod report;
pub mod series;
pub mod simulate;
pub mod stats;

pub use backtest::{run_backtest, BacktestReport, RunConfig};
pub use error::{ForecastError, Result};
pub use report::{emit_report, ReportFormat};
pub use series::{split, ForecastResult, Series};
