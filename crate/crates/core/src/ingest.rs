//! Two-column `date,value` CSV input.

use std::path::Path;

use crate::error::{ForecastError, Result};
use crate::series::Series;

const HEADER_NAMES: [&str; 5] = ["date", "time", "period", "month", "timestamp"];

fn is_header(record: &csv::StringRecord) -> bool {
    record.len() == 2
        && HEADER_NAMES.contains(&record[0].to_ascii_lowercase().as_str())
        && record[1].parse::<f64>().is_err()
}

// The reader's own line counter skips blank lines; count from the byte offset.
fn line_of(text: &str, position: &csv::Position) -> usize {
    let bytes = text.as_bytes();
    let mut end = (position.byte() as usize).min(bytes.len());
    while end < bytes.len() && (bytes[end] == b'\n' || bytes[end] == b'\r') {
        end += 1;
    }
    bytes[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Parses `date,value` rows. A first line naming the columns is skipped;
/// blank lines are ignored. Line numbers in errors are 1-based.
pub fn parse_csv(text: &str) -> Result<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ForecastError::Parse {
            line: e.position().map_or(0, |p| line_of(text, p)),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| line_of(text, p));
        if i == 0 && is_header(&record) {
            continue;
        }
        if record.len() != 2 {
            return Err(ForecastError::Parse {
                line,
                message: format!("expected 2 fields `date,value`, found {}", record.len()),
            });
        }
        let value: f64 = record[1].parse().map_err(|_| ForecastError::Parse {
            line,
            message: format!("cannot parse value {:?}", &record[1]),
        })?;
        if !value.is_finite() {
            return Err(ForecastError::Parse {
                line,
                message: "value is not finite".into(),
            });
        }
        labels.push(record[0].to_string());
        values.push(value);
    }
    if values.is_empty() {
        return Err(ForecastError::Length("input contains no data rows".into()));
    }
    let index = (0..values.len() as i64).collect();
    Series::new(index, values, Some(labels))
}

pub fn ingest_csv(path: &Path) -> Result<Series> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ForecastError::Io(format!("{}: {e}", path.display())))?;
    parse_csv(&text)
}

/// Renders a series in the same `date,value` format.
pub fn to_csv(series: &Series) -> String {
    let mut out = String::from("date,value\n");
    for (i, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", series.label(i), v));
    }
    out
}
