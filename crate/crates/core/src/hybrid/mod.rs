//! Forecast combination.
//!
//! Three ways of choosing simplex weights for `m` base forecasters:
//! least-squares (closed form on the per-method squared errors), effective
//! degree (accuracy mean discounted by its dispersion) and grey relation
//! degree. A simple average serves as the control.

mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};
pub use simplex::{Goal, SimplexSearch};

/// Forecast errors `e_j(t) = y(t) - yhat_j(t)`, one row per method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodErrors {
    e: Vec<Vec<f64>>,
    method_ids: Vec<String>,
}

impl MethodErrors {
    pub fn new(e: Vec<Vec<f64>>, method_ids: Vec<String>) -> Result<Self> {
        if e.is_empty() {
            return Err(ForecastError::Shape("no methods".into()));
        }
        if method_ids.len() != e.len() {
            return Err(ForecastError::Shape(format!(
                "{} ids for {} methods",
                method_ids.len(),
                e.len()
            )));
        }
        let n = e[0].len();
        if n == 0 || e.iter().any(|row| row.len() != n) {
            return Err(ForecastError::Shape(
                "error rows must be non-empty and equally long".into(),
            ));
        }
        if e.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ForecastError::Domain("non-finite forecast error".into()));
        }
        Ok(MethodErrors { e, method_ids })
    }

    /// Errors of each prediction sequence against `actual`.
    pub fn from_predictions(
        actual: &[f64],
        predictions: &[Vec<f64>],
        method_ids: Vec<String>,
    ) -> Result<Self> {
        let e = predictions
            .iter()
            .map(|p| {
                if p.len() != actual.len() {
                    return Err(ForecastError::Shape(format!(
                        "{} predictions for {} actual values",
                        p.len(),
                        actual.len()
                    )));
                }
                Ok(actual.iter().zip(p).map(|(y, f)| y - f).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Self::new(e, method_ids)
    }

    pub fn methods(&self) -> usize {
        self.e.len()
    }

    pub fn len(&self) -> usize {
        self.e[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.e
    }

    pub fn method_ids(&self) -> &[String] {
        &self.method_ids
    }

    /// `h_jj = sum_t e_j(t)^2`.
    pub fn squared_sums(&self) -> Vec<f64> {
        self.e
            .iter()
            .map(|row| row.iter().map(|v| v * v).sum())
            .collect()
    }

    fn require_combination(&self) -> Result<()> {
        if self.methods() < 2 {
            return Err(ForecastError::InvalidParameter(
                "combination needs m >= 2 methods".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    LeastSquares,
    EffectiveDegree,
    GreyRelation,
    Average,
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub scheme: WeightScheme,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, scheme: WeightScheme) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(ForecastError::InvalidParameter(format!(
                "invalid weights {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ForecastError::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(WeightVector { weights, scheme })
    }

    pub fn average(m: usize) -> Self {
        WeightVector {
            weights: vec![1.0 / m as f64; m],
            scheme: WeightScheme::Average,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Least-squares weights `w_j = (1/h_jj) / sum_i (1/h_ii)`, minimizing
/// `sum_j w_j^2 h_jj` on the simplex.
///
/// Methods with zero squared error share all the weight equally.
pub fn ls_weights(errors: &MethodErrors) -> Result<WeightVector> {
    let h = errors.squared_sums();
    let zero: Vec<usize> = (0..h.len()).filter(|&j| h[j] == 0.0).collect();
    let weights = if zero.is_empty() {
        let inv_total: f64 = h.iter().map(|v| 1.0 / v).sum();
        h.iter().map(|v| 1.0 / (v * inv_total)).collect()
    } else {
        let share = 1.0 / zero.len() as f64;
        (0..h.len())
            .map(|j| if h[j] == 0.0 { share } else { 0.0 })
            .collect()
    };
    WeightVector::new(weights, WeightScheme::LeastSquares)
}

/// Accuracy statistics of a combined forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDegree {
    /// `A(t) = 1 - |(y(t) - yhat(t)) / y(t)|`.
    pub accuracy: Vec<f64>,
    pub mean_e: f64,
    /// `(1/N) sqrt(sum (A(t) - E)^2)`; note the `1/N` sits outside the root.
    pub sd: f64,
    /// `S = E (1 - sd)`.
    pub s: f64,
}

pub fn effective_degree(actual: &[f64], combined: &[f64]) -> Result<EffectiveDegree> {
    if actual.len() != combined.len() || actual.is_empty() {
        return Err(ForecastError::Shape(format!(
            "{} actual values vs {} combined predictions",
            actual.len(),
            combined.len()
        )));
    }
    if let Some(pos) = actual.iter().position(|&y| y == 0.0) {
        return Err(ForecastError::Domain(format!(
            "zero actual value at position {pos}"
        )));
    }
    let accuracy: Vec<f64> = actual
        .iter()
        .zip(combined)
        .map(|(y, f)| 1.0 - ((y - f) / y).abs())
        .collect();
    let n = accuracy.len() as f64;
    let mean_e = accuracy.iter().sum::<f64>() / n;
    let sd = accuracy
        .iter()
        .map(|a| (a - mean_e).powi(2))
        .sum::<f64>()
        .sqrt()
        / n;
    Ok(EffectiveDegree {
        accuracy,
        mean_e,
        sd,
        s: mean_e * (1.0 - sd),
    })
}

/// Pointwise weighted sum of prediction sequences.
pub fn combine(predictions: &[Vec<f64>], weights: &WeightVector) -> Result<Vec<f64>> {
    if predictions.len() != weights.len() || predictions.is_empty() {
        return Err(ForecastError::Shape(format!(
            "{} prediction sequences for {} weights",
            predictions.len(),
            weights.len()
        )));
    }
    let n = predictions[0].len();
    if predictions.iter().any(|p| p.len() != n) {
        return Err(ForecastError::Shape(
            "prediction sequences differ in length".into(),
        ));
    }
    Ok((0..n)
        .map(|t| {
            predictions
                .iter()
                .zip(&weights.weights)
                .map(|(p, w)| w * p[t])
                .sum()
        })
        .collect())
}

/// Whether the effective degree is maximized (larger is better) or minimized
/// as literally printed in some formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectiveDegreeDirection {
    #[default]
    Maximize,
    Minimize,
}

/// Weights optimizing the effective degree `S` of the combination.
pub fn optimize_effective_degree(
    actual: &[f64],
    predictions: &[Vec<f64>],
    direction: EffectiveDegreeDirection,
    search: &SimplexSearch,
) -> Result<WeightVector> {
    let m = predictions.len();
    if m < 2 {
        return Err(ForecastError::InvalidParameter(
            "combination needs m >= 2 methods".into(),
        ));
    }
    // validates shapes and the zero-actual domain once up front
    effective_degree(actual, &combine(predictions, &WeightVector::average(m))?)?;
    let goal = match direction {
        EffectiveDegreeDirection::Maximize => Goal::Maximize,
        EffectiveDegreeDirection::Minimize => Goal::Minimize,
    };
    let n = actual.len();
    let (w, _) = search.optimize(m, goal, |w| {
        let combined: Vec<f64> = (0..n)
            .map(|t| predictions.iter().zip(w).map(|(p, wj)| wj * p[t]).sum())
            .collect();
        effective_degree(actual, &combined)
            .map(|e| e.s)
            .unwrap_or(f64::NAN)
    });
    WeightVector::new(w, WeightScheme::EffectiveDegree)
}

/// Per-method grey relation degrees plus the objective at chosen weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreyRelation {
    pub gamma: Vec<f64>,
    pub rho: f64,
    pub gamma_combined: f64,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(ForecastError::InvalidParameter(format!(
            "rho {rho} not in (0, 1)"
        )));
    }
    Ok(())
}

/// Global `min_j min_t |e_j(t)|` and `max_j max_t |e_j(t)|`.
fn envelope(errors: &MethodErrors) -> (f64, f64) {
    errors
        .rows()
        .iter()
        .flatten()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v.abs()), hi.max(v.abs()))
        })
}

fn relation_of(series: impl Iterator<Item = f64>, lo: f64, hi: f64, rho: f64, n: usize) -> f64 {
    if hi == 0.0 {
        // every error is zero: each term is 0/0, taken as its zero-error limit
        return 1.0;
    }
    let num = lo + rho * hi;
    series.map(|e| num / (e.abs() + rho * hi)).sum::<f64>() / n as f64
}

/// `gamma_0j = (1/N) sum_t (min + rho max) / (|e_j(t)| + rho max)`.
pub fn grey_relation_degree(errors: &MethodErrors, rho: f64) -> Result<Vec<f64>> {
    check_rho(rho)?;
    let (lo, hi) = envelope(errors);
    Ok(errors
        .rows()
        .iter()
        .map(|row| relation_of(row.iter().copied(), lo, hi, rho, errors.len()))
        .collect())
}

/// `gamma(W)`: the relation degree of the combined error `sum_j w_j e_j(t)`,
/// keeping the envelope constants of the individual methods.
pub fn grey_relation_of_weights(errors: &MethodErrors, rho: f64, weights: &[f64]) -> f64 {
    let (lo, hi) = envelope(errors);
    let rows = errors.rows();
    let combined = (0..errors.len()).map(|t| rows.iter().zip(weights).map(|(r, w)| w * r[t]).sum());
    relation_of(combined, lo, hi, rho, errors.len())
}

/// Weights maximizing `gamma(W)` over the simplex.
pub fn optimize_grey_relation(
    errors: &MethodErrors,
    rho: f64,
    search: &SimplexSearch,
) -> Result<(WeightVector, GreyRelation)> {
    check_rho(rho)?;
    errors.require_combination()?;
    let gamma = grey_relation_degree(errors, rho)?;
    let (w, best) = search.optimize(errors.methods(), Goal::Maximize, |w| {
        grey_relation_of_weights(errors, rho, w)
    });
    Ok((
        WeightVector::new(w, WeightScheme::GreyRelation)?,
        GreyRelation {
            gamma,
            rho,
            gamma_combined: best,
        },
    ))
}
