//! Rendering of backtest reports as a text table, JSON or per-point CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backtest::BacktestReport;
use crate::error::{ForecastError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "table" | "text-table" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(ForecastError::InvalidParameter(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

pub fn emit_report(report: &BacktestReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Text => Ok(text_table(report)),
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| ForecastError::Numerical(format!("cannot serialize report: {e}"))),
        ReportFormat::Csv => Ok(points_csv(report)),
    }
}

pub fn parse_json_report(text: &str) -> Result<BacktestReport> {
    serde_json::from_str(text).map_err(|e| ForecastError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

fn text_table(report: &BacktestReport) -> String {
    let mut out = String::new();
    let h = report.config.horizon;
    let _ = writeln!(
        out,
        "Prediction performance (train {} points, holdout {} points, h = {h})",
        report.train_len,
        report.points.len()
    );
    let _ = writeln!(
        out,
        "{:<14}{:>10}{:>8}{:>12}{:>10}",
        "Method", "MAPFE", "DA", "MAFE", "RMSFE"
    );
    for m in &report.methods {
        let _ = writeln!(
            out,
            "{:<14}{:>10.4}{:>8.1}{:>12.5}{:>10.4}",
            m.id, m.mapfe, m.da, m.mafe, m.rmsfe
        );
    }
    out.push('\n');
    let w = &report.weights;
    let _ = writeln!(
        out,
        "Weights (fitted on training positions {}..)",
        w.window_start
    );
    let _ = writeln!(
        out,
        "{:<14}{:>10}{:>13}{:>10}",
        "", "ARFIMA", "DGM-FMarkov", "F-Kalman"
    );
    for (name, wr) in [
        ("Method 1", &w.method_1),
        ("Method 2", &w.method_2),
        ("Method 3", &w.method_3),
        ("Average", &w.average),
    ] {
        let _ = writeln!(
            out,
            "{:<14}{:>10.3}{:>13.3}{:>10.3}",
            name, wr.values[0], wr.values[1], wr.values[2]
        );
    }
    match &report.markov_test {
        Some(t) => {
            let _ = writeln!(
                out,
                "\nMarkov test: chi2 = {:.4}, critical({}, dof {}) = {:.4}, Markov property {}",
                t.chi2,
                t.alpha,
                t.dof,
                t.critical_value,
                if t.is_markov { "accepted" } else { "rejected" }
            );
        }
        None => {
            let _ = writeln!(out, "\nMarkov test: not run (residual ratios constant)");
        }
    }
    out
}

fn points_csv(report: &BacktestReport) -> String {
    let mut out = String::from("method,index,label,actual,predicted,error\n");
    for m in &report.methods {
        for p in &report.points {
            if let Some(q) = p.predictions.iter().find(|q| q.method == m.id) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    m.id, p.index, p.label, p.actual, q.predicted, q.error
                );
            }
        }
    }
    out
}
