//! Holdout accuracy metrics: MAFE, RMSFE, MAPFE and directional accuracy.
//!
//! All four average over the `h + 1` evaluation points. MAPFE divides by the
//! *predicted* value rather than the actual one, and directional accuracy
//! counts a zero product (no movement) as a hit.

use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(ForecastError::Shape(format!(
            "{} actual values vs {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(ForecastError::Shape("empty evaluation window".into()));
    }
    Ok(())
}

/// Mean absolute forecast error.
pub fn mafe(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (p - a).abs())
        .sum();
    Ok(total / actual.len() as f64)
}

/// Root mean square forecast error.
pub fn rmsfe(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (p - a) * (p - a))
        .sum();
    Ok((total / actual.len() as f64).sqrt())
}

/// Mean absolute percentage forecast error, relative to the prediction.
pub fn mapfe(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    if let Some(pos) = predicted.iter().position(|&p| p == 0.0) {
        return Err(ForecastError::Domain(format!(
            "zero prediction at position {pos}"
        )));
    }
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| ((p - a) / p).abs())
        .sum();
    Ok(100.0 * total / actual.len() as f64)
}

/// Directional accuracy in percent.
///
/// `actual` starts with the value preceding the first forecast, so it is one
/// longer than `predicted`.
pub fn da(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() + 1 {
        return Err(ForecastError::Shape(format!(
            "directional accuracy needs {} actual values (one pre-period), got {}",
            predicted.len() + 1,
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(ForecastError::Shape("empty evaluation window".into()));
    }
    let hits = actual
        .windows(2)
        .zip(predicted)
        .filter(|(w, &p)| (w[1] - w[0]) * (p - w[0]) >= 0.0)
        .count();
    Ok(100.0 * hits as f64 / predicted.len() as f64)
}

/// The four holdout metrics for one forecaster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mapfe: f64,
    pub da: f64,
    pub mafe: f64,
    pub rmsfe: f64,
}

impl EvalReport {
    /// `previous` is the last value observed before the evaluation window.
    pub fn evaluate(previous: f64, actual: &[f64], predicted: &[f64]) -> Result<Self> {
        let mut with_prev = Vec::with_capacity(actual.len() + 1);
        with_prev.push(previous);
        with_prev.extend_from_slice(actual);
        Ok(EvalReport {
            mapfe: mapfe(actual, predicted)?,
            da: da(&with_prev, predicted)?,
            mafe: mafe(actual, predicted)?,
            rmsfe: rmsfe(actual, predicted)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_cases() {
        assert_eq!(mafe(&[2.0, 4.0], &[1.0, 2.0]).unwrap(), 1.5);
        assert_eq!(mafe(&[1.0], &[1.25]).unwrap(), 0.25);
        assert_eq!(rmsfe(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 12.5f64.sqrt());
        assert_eq!(rmsfe(&[1.0], &[3.0]).unwrap(), 2.0);
        assert_eq!(mapfe(&[1.0], &[2.0]).unwrap(), 50.0);
    }

    #[test]
    fn directional_cases() {
        assert_eq!(da(&[1.0, 2.0], &[1.5]).unwrap(), 100.0);
        assert_eq!(da(&[1.0, 2.0], &[0.5]).unwrap(), 0.0);
        // flat actual counts as a hit whatever the prediction
        assert_eq!(da(&[1.0, 1.0], &[7.0]).unwrap(), 100.0);
        assert_eq!(da(&[1.0, 1.0], &[-7.0]).unwrap(), 100.0);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            mafe(&[1.0], &[1.0, 2.0]),
            Err(ForecastError::Shape(_))
        ));
        assert!(matches!(rmsfe(&[], &[]), Err(ForecastError::Shape(_))));
        assert!(matches!(
            mapfe(&[1.0, 2.0], &[1.0, 0.0]),
            Err(ForecastError::Domain(_))
        ));
        assert!(matches!(da(&[1.0], &[1.0]), Err(ForecastError::Shape(_))));
    }

    #[test]
    fn perfect_forecast() {
        let a = [1.0, 3.0, 2.0, 2.0];
        let r = EvalReport::evaluate(0.5, &a, &a).unwrap();
        assert_eq!(
            r,
            EvalReport {
                mapfe: 0.0,
                da: 100.0,
                mafe: 0.0,
                rmsfe: 0.0
            }
        );
    }

    proptest! {
        #[test]
        fn rmsfe_matches_loop(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let mut sq = 0.0;
            for i in 0..a.len() {
                sq += (a[i] - p[i]).powi(2);
            }
            let r = rmsfe(&a, &p).unwrap();
            prop_assert!((r * r * a.len() as f64 - sq).abs() <= 1e-9 * (1.0 + sq));
        }

        #[test]
        fn permutation_invariant(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
            let (a, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            let (ra, rp): (Vec<f64>, Vec<f64>) = pairs.iter().rev().copied().unzip();
            prop_assert!((mafe(&a, &p).unwrap() - mafe(&ra, &rp).unwrap()).abs() < 1e-9);
            prop_assert!((rmsfe(&a, &p).unwrap() - rmsfe(&ra, &rp).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn da_affine_invariant(
            actual in prop::collection::vec(-1000i32..1000, 2..20),
            noise in prop::collection::vec(-1000i32..1000, 20),
            scale in 1i32..50,
            shift in -500i32..500,
        ) {
            // integer-valued data keeps the affine map exact
            let actual: Vec<f64> = actual.into_iter().map(f64::from).collect();
            let pred: Vec<f64> = noise[..actual.len() - 1].iter().map(|&v| f64::from(v)).collect();
            let (scale, shift) = (f64::from(scale), f64::from(shift));
            let a2: Vec<f64> = actual.iter().map(|v| scale * v + shift).collect();
            let p2: Vec<f64> = pred.iter().map(|v| scale * v + shift).collect();
            let d1 = da(&actual, &pred).unwrap();
            prop_assert!((0.0..=100.0).contains(&d1));
            prop_assert_eq!(d1, da(&a2, &p2).unwrap());
        }
    }
}
