//! Time series container, train/test splitting and forecast output.

use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

/// Real-valued observations over strictly increasing integer periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    index: Vec<i64>,
    labels: Option<Vec<String>>,
    values: Vec<f64>,
}

impl Series {
    /// Builds a series indexed `0..n`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let index = (0..values.len() as i64).collect();
        Self::new(index, values, None)
    }

    pub fn new(index: Vec<i64>, values: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.is_empty() {
            return Err(ForecastError::Length(
                "series must hold at least one value".into(),
            ));
        }
        if index.len() != values.len() {
            return Err(ForecastError::Shape(format!(
                "{} indices for {} values",
                index.len(),
                values.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != values.len() {
                return Err(ForecastError::Shape(format!(
                    "{} labels for {} values",
                    l.len(),
                    values.len()
                )));
            }
        }
        if let Some(w) = index.windows(2).find(|w| w[1] <= w[0]) {
            return Err(ForecastError::Domain(format!(
                "time index not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(ForecastError::Domain(format!(
                "non-finite value at position {pos}"
            )));
        }
        Ok(Series {
            index,
            labels,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self) -> &[i64] {
        &self.index
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of the `i`-th point, falling back to its period index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => self.index[i].to_string(),
        }
    }

    fn slice(&self, range: std::ops::Range<usize>) -> Series {
        Series {
            index: self.index[range.clone()].to_vec(),
            labels: self.labels.as_ref().map(|l| l[range.clone()].to_vec()),
            values: self.values[range].to_vec(),
        }
    }

    /// Rejects non-positive values; price-based models work in the log domain.
    pub fn require_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0) {
            Some(pos) => Err(ForecastError::Domain(format!(
                "value {} at position {pos} is not strictly positive",
                self.values[pos]
            ))),
            None => Ok(()),
        }
    }
}

/// Holds out the last `horizon + 1` points.
///
/// The evaluation window runs over `t = s, s+1, ..., s+h`, i.e. `h + 1` points.
/// At least two training points must remain.
pub fn split(series: &Series, horizon: usize) -> Result<(Series, Series)> {
    let n = series.len();
    if horizon + 1 + 2 > n {
        return Err(ForecastError::Length(format!(
            "horizon {horizon} needs at least {} points, series has {n}",
            horizon + 3
        )));
    }
    let cut = n - (horizon + 1);
    Ok((series.slice(0..cut), series.slice(cut..n)))
}

/// Output of a single forecaster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub method_id: String,
    /// In-sample one-step predictions aligned with the training values.
    pub fitted: Vec<f64>,
    /// First training position whose fitted value is a genuine prediction.
    /// Positions before it carry the actual value.
    pub fitted_from: usize,
    /// Out-of-sample forecasts for the steps following the training data.
    pub forecasts: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Series {
        Series::from_values((0..n).map(|i| i as f64 + 1.0).collect()).unwrap()
    }

    #[test]
    fn split_ten_by_two() {
        let (train, test) = split(&ramp(10), 2).unwrap();
        assert_eq!(train.len(), 7);
        assert_eq!(test.len(), 3);
        let joined: Vec<f64> = train
            .values()
            .iter()
            .chain(test.values())
            .copied()
            .collect();
        assert_eq!(joined, ramp(10).values());
        assert_eq!(test.index(), &[7, 8, 9]);
    }

    #[test]
    fn split_456_point_series() {
        let (train, test) = split(&ramp(456), 12).unwrap();
        assert_eq!(test.len(), 13);
        assert_eq!(train.len(), 443);
    }

    #[test]
    fn split_rejects_large_horizon() {
        assert!(matches!(split(&ramp(4), 3), Err(ForecastError::Length(_))));
    }

    #[test]
    fn rejects_bad_series() {
        assert!(Series::from_values(vec![]).is_err());
        assert!(Series::from_values(vec![1.0, f64::NAN]).is_err());
        assert!(Series::new(vec![0, 0], vec![1.0, 2.0], None).is_err());
        assert!(Series::from_values(vec![1.0, 0.0])
            .unwrap()
            .require_positive()
            .is_err());
    }
}
