use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};

/// An original sequence together with its accumulated sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GreySequence {
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
}

/// Accumulated generating operation (running sum).
pub fn ago(x0: &[f64]) -> GreySequence {
    let x1 = x0
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    GreySequence {
        x0: x0.to_vec(),
        x1,
    }
}

/// Inverse AGO: first element kept, then first differences.
pub fn iago(x1: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x1.len());
    if let Some(&first) = x1.first() {
        out.push(first);
    }
    out.extend(x1.windows(2).map(|w| w[1] - w[0]));
    out
}

/// Fitted non-homogeneous discrete grey model
/// `x1(k+1) = b1 x1(k) + b2 x0(k) + b3 k + b4`, `x1(1) = xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgmModel {
    pub beta: [f64; 4],
    pub xi: f64,
    /// Fitted original-scale values for the training positions.
    pub fitted0: Vec<f64>,
    /// Sum of squared fit errors at the optimal `xi`.
    pub q_value: f64,
    /// Numerical rank of the regression design.
    pub rank: usize,
    last_x0: f64,
    last_x1_hat: f64,
}

/// Fitted accumulated values as an affine function of `xi`:
/// `x1_hat(k) = slope[k] * xi + offset[k]`.
fn affine_path(beta: &[f64; 4], x0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x0.len();
    let mut slope = vec![1.0; n];
    let mut offset = vec![0.0; n];
    for k in 1..n {
        // array index k-1 holds position k, so the trend term uses k
        slope[k] = beta[0] * slope[k - 1];
        offset[k] = beta[0] * offset[k - 1] + beta[1] * x0[k - 1] + beta[2] * k as f64 + beta[3];
    }
    (slope, offset)
}

/// Squared error `Q(xi)` of the fitted original sequence for a given
/// initial value.
pub fn q_of_xi(beta: &[f64; 4], x0: &[f64], xi: f64) -> f64 {
    let (slope, offset) = affine_path(beta, x0);
    let x1_hat: Vec<f64> = slope.iter().zip(&offset).map(|(s, o)| s * xi + o).collect();
    iago(&x1_hat)
        .iter()
        .zip(x0)
        .map(|(f, x)| (f - x) * (f - x))
        .sum()
}

/// Fits the model by least squares and picks `xi` minimizing `Q`.
///
/// `Q` is quadratic in `xi` because every fitted value is affine in it, so the
/// stationary point `dQ/dxi = 0` is solved directly.
pub fn fit_dgm(x0: &[f64]) -> Result<DgmModel> {
    let n = x0.len();
    if n < 5 {
        return Err(ForecastError::Length(format!(
            "grey model needs at least 5 points, got {n}"
        )));
    }
    let seq = ago(x0);
    let rows = n - 1;
    let design = DMatrix::from_fn(rows, 4, |r, c| match c {
        0 => seq.x1[r],
        1 => seq.x0[r],
        2 => (r + 1) as f64,
        _ => 1.0,
    });
    let target = DVector::from_iterator(rows, seq.x1[1..].iter().copied());

    let svd = design.clone().svd(true, true);
    let tol = svd.singular_values.max() * rows.max(4) as f64 * f64::EPSILON;
    let rank = svd.rank(tol);
    let solution = svd
        .solve(&target, tol)
        .map_err(|e| ForecastError::Fit(format!("least squares failed: {e}")))?;
    let beta = [solution[0], solution[1], solution[2], solution[3]];
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(ForecastError::Fit(format!(
            "non-finite parameters {beta:?}"
        )));
    }
    if rank < 4 {
        log::debug!("grey design has rank {rank}; using the minimum-norm solution");
    }
    if beta[0].abs() > 1e6 {
        log::warn!("grey model is badly conditioned: beta1 = {}", beta[0]);
    }

    // x0_hat(k) = alpha_k xi + gamma_k; alpha_1 = 1 so the quadratic never degenerates
    let (slope, offset) = affine_path(&beta, x0);
    let alpha = iago(&slope);
    let gamma = iago(&offset);
    let num: f64 = (0..n).map(|k| alpha[k] * (x0[k] - gamma[k])).sum();
    let den: f64 = alpha.iter().map(|a| a * a).sum();
    let xi = num / den;

    let x1_hat: Vec<f64> = slope.iter().zip(&offset).map(|(s, o)| s * xi + o).collect();
    let fitted0 = iago(&x1_hat);
    let q_value = fitted0.iter().zip(x0).map(|(f, x)| (f - x) * (f - x)).sum();
    Ok(DgmModel {
        beta,
        xi,
        fitted0,
        q_value,
        rank,
        last_x0: x0[n - 1],
        last_x1_hat: x1_hat[n - 1],
    })
}

impl DgmModel {
    pub fn len(&self) -> usize {
        self.fitted0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitted0.is_empty()
    }
}

/// Extends the fitted recursion `steps` periods past the training data and
/// returns the original-scale forecasts.
///
/// The last observed value drives the first step; later steps feed back the
/// model's own forecasts.
pub fn dgm_forecast(model: &DgmModel, steps: usize) -> Vec<f64> {
    let [b1, b2, b3, b4] = model.beta;
    let mut k = model.len() as f64;
    let mut x1 = model.last_x1_hat;
    let mut x0 = model.last_x0;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = b1 * x1 + b2 * x0 + b3 * k + b4;
        x0 = next - x1;
        x1 = next;
        k += 1.0;
        out.push(x0);
    }
    out
}
