//! Fractionally integrated autoregressive models.
//!
//! The model is `phi(B) (1 - B)^d (X_t - mu) = e_t` with `-1/2 < d < 1/2`.
//! Estimation minimizes the conditional sum of squares (CSS): for a candidate
//! `d` the centered series is fractionally differenced and an AR(p) is fit by
//! OLS on lagged values; `d` itself is located by a coarse scan followed by
//! golden-section search.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};
use crate::series::ForecastResult;
use crate::stats::{ar_is_stationary, ols_normal};

/// Open search interval for `d`.
pub const D_BOUND: f64 = 0.49;
/// Points discarded from the CSS at the start of the series.
pub const DEFAULT_BURN_IN: usize = 50;
/// Maximum lag of the infinite-AR representation used for forecasting.
pub const DEFAULT_TRUNCATION: usize = 200;

/// Truncated expansion of `(1 - B)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracDiffWeights {
    pub d: f64,
    pub pi: Vec<f64>,
}

/// Coefficients `pi_0..pi_{length-1}` of `(1 - B)^d`.
pub fn frac_diff_weights(d: f64, length: usize) -> FracDiffWeights {
    let mut pi = Vec::with_capacity(length);
    if length > 0 {
        pi.push(1.0);
    }
    for j in 1..length {
        let prev = pi[j - 1];
        pi.push(prev * ((j as f64 - 1.0 - d) / j as f64));
    }
    FracDiffWeights { d, pi }
}

/// Applies `(1 - B)^d` using only the history available at each point.
pub fn frac_diff(values: &[f64], d: f64) -> Vec<f64> {
    let pi = frac_diff_weights(d, values.len()).pi;
    convolve_causal(values, &pi)
}

/// `y_t = sum_{j<=t} w_j x_{t-j}`, truncated at the series start.
fn convolve_causal(values: &[f64], weights: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|t| {
            let lags = weights.len().min(t + 1);
            (0..lags).map(|j| weights[j] * values[t - j]).sum()
        })
        .collect()
}

/// How the process mean is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanMode {
    #[default]
    Sample,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArfimaOptions {
    pub mean: MeanMode,
    pub burn_in: usize,
    pub truncation: usize,
}

impl Default for ArfimaOptions {
    fn default() -> Self {
        ArfimaOptions {
            mean: MeanMode::Sample,
            burn_in: DEFAULT_BURN_IN,
            truncation: DEFAULT_TRUNCATION,
        }
    }
}

/// A fitted ARFIMA(p, d, q) model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArfimaModel {
    pub p: usize,
    pub q: usize,
    pub d: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub mean: f64,
    pub sigma2: f64,
    /// First position included in the CSS.
    pub burn_in: usize,
    pub truncation: usize,
}

/// Estimation output: the model plus its CSS residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ArfimaFit {
    pub model: ArfimaModel,
    /// Residuals for positions `burn_in..n`.
    pub residuals: Vec<f64>,
    pub css: f64,
}

/// Burn-in actually used for a series of length `n`: the configured value,
/// capped at a fifth of the data but never below the AR order.
fn effective_burn_in(n: usize, p: usize, burn_in: usize) -> usize {
    burn_in.min(n / 5).max(p)
}

struct Inner {
    phi: Vec<f64>,
    residuals: Vec<f64>,
    css: f64,
}

fn css_for_d(centered: &[f64], d: f64, p: usize, start: usize) -> Result<Inner> {
    let u = frac_diff(centered, d);
    let rows = u.len() - start;
    if p == 0 {
        let residuals = u[start..].to_vec();
        let css = residuals.iter().map(|r| r * r).sum();
        return Ok(Inner {
            phi: Vec::new(),
            residuals,
            css,
        });
    }
    let design = DMatrix::from_fn(rows, p, |r, c| u[start + r - c - 1]);
    let target = DVector::from_iterator(rows, u[start..].iter().copied());
    let beta = ols_normal(&design, &target).ok_or_else(|| {
        ForecastError::Estimation(format!("singular AR({p}) normal equations at d = {d:.6}"))
    })?;
    let fitted = &design * &beta;
    let residuals: Vec<f64> = (0..rows).map(|r| target[r] - fitted[r]).collect();
    let css = residuals.iter().map(|r| r * r).sum();
    Ok(Inner {
        phi: beta.iter().copied().collect(),
        residuals,
        css,
    })
}

/// Conditional-sum-of-squares estimation of ARFIMA(p, d, 0).
pub fn estimate_css(
    values: &[f64],
    p: usize,
    q: usize,
    options: &ArfimaOptions,
) -> Result<ArfimaFit> {
    if q != 0 {
        return Err(ForecastError::InvalidParameter(
            "moving-average terms are not supported (q must be 0)".into(),
        ));
    }
    let n = values.len();
    let needed = 10 * (p + q + 1);
    if n < needed {
        return Err(ForecastError::Length(format!(
            "ARFIMA({p}, d, {q}) needs at least {needed} points, got {n}"
        )));
    }
    let mean = match options.mean {
        MeanMode::Sample => values.iter().sum::<f64>() / n as f64,
        MeanMode::Zero => 0.0,
    };
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let start = effective_burn_in(n, p, options.burn_in);

    let objective = |d: f64| -> Result<f64> { Ok(css_for_d(&centered, d, p, start)?.css) };

    // Coarse scan; strict improvement keeps the smaller d on ties.
    let steps = 98;
    let grid_step = 2.0 * D_BOUND / steps as f64;
    let mut best = (-D_BOUND, objective(-D_BOUND)?);
    for i in 1..=steps {
        let d = -D_BOUND + i as f64 * grid_step;
        let v = objective(d)?;
        if v < best.1 {
            best = (d, v);
        }
    }

    // Golden-section refinement inside the neighbouring grid cells.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = (best.0 - grid_step).max(-D_BOUND);
    let mut b = (best.0 + grid_step).min(D_BOUND);
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fe = objective(e)?;
    while b - a > 1e-6 {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = objective(e)?;
        }
    }
    let golden = 0.5 * (a + b);
    let d = if objective(golden)? <= best.1 {
        golden
    } else {
        best.0
    };

    let inner = css_for_d(&centered, d, p, start)?;
    if !ar_is_stationary(&inner.phi) {
        return Err(ForecastError::Estimation(format!(
            "fitted AR polynomial {:?} is not stationary",
            inner.phi
        )));
    }
    let sigma2 = inner.css / inner.residuals.len() as f64;
    Ok(ArfimaFit {
        model: ArfimaModel {
            p,
            q,
            d,
            phi: inner.phi,
            theta: Vec::new(),
            mean,
            sigma2,
            burn_in: start,
            truncation: options.truncation,
        },
        residuals: inner.residuals,
        css: inner.css,
    })
}

impl ArfimaModel {
    /// Coefficients `c_0..c_{len-1}` of `phi(B) (1 - B)^d`, with `c_0 = 1`.
    pub fn ar_infinity(&self, len: usize) -> Vec<f64> {
        let pi = frac_diff_weights(self.d, len).pi;
        let mut poly = vec![1.0];
        poly.extend(self.phi.iter().map(|a| -a));
        (0..len)
            .map(|j| {
                (0..poly.len().min(j + 1))
                    .map(|i| poly[i] * pi[j - i])
                    .sum()
            })
            .collect()
    }

    /// In-sample one-step predictions using the full available history.
    pub fn one_step_predictions(&self, values: &[f64]) -> Vec<f64> {
        let c = self.ar_infinity(values.len());
        let centered: Vec<f64> = values.iter().map(|v| v - self.mean).collect();
        (0..values.len())
            .map(|t| {
                let past: f64 = (1..=t).map(|j| c[j] * centered[t - j]).sum();
                self.mean - past
            })
            .collect()
    }

    /// Conditional sum of squares of this model on `values`, over the same
    /// positions the estimator used.
    pub fn css(&self, values: &[f64]) -> f64 {
        let fitted = self.one_step_predictions(values);
        values[self.burn_in..]
            .iter()
            .zip(&fitted[self.burn_in..])
            .map(|(x, f)| (x - f) * (x - f))
            .sum()
    }
}

/// Akaike information criterion `m ln(CSS/m) + 2 (p + q + 1)` where `m`
/// counts the CSS terms.
pub fn aic(model: &ArfimaModel, values: &[f64]) -> f64 {
    let m = (values.len() - model.burn_in) as f64;
    m * (model.css(values) / m).ln() + 2.0 * (model.p + model.q + 1) as f64
}

/// Forecasts `h` steps past the end of `values`.
///
/// Future innovations are zero; the infinite-AR representation is cut at
/// `min(n, truncation)` lags.
pub fn forecast(model: &ArfimaModel, values: &[f64], h: usize) -> Result<ForecastResult> {
    if h == 0 {
        return Err(ForecastError::InvalidParameter(
            "forecast horizon must be >= 1".into(),
        ));
    }
    let n = values.len();
    let lags = n.min(model.truncation).max(1);
    let c = model.ar_infinity(lags + 1);
    let mut path: Vec<f64> = values.iter().map(|v| v - model.mean).collect();
    for _ in 0..h {
        let t = path.len();
        let next = -(1..=lags.min(t)).map(|j| c[j] * path[t - j]).sum::<f64>();
        path.push(next);
    }
    Ok(ForecastResult {
        method_id: "ARFIMA".into(),
        fitted: model.one_step_predictions(values),
        fitted_from: model.burn_in,
        forecasts: path[n..].iter().map(|v| v + model.mean).collect(),
    })
}
