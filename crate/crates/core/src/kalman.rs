//! Variable-fractal-dimension Kalman filter on base-10 log price ratios.
//!
//! The state `[x_k, d_k]` pairs the log ratio `x_k = lg(N_{k-1} / N_k)` with
//! the fractal degree `d_k = x_k / t_k`, where `t_k = lg((k-1)/k)` is the log
//! ratio of consecutive time indices. Writing `x_{k+1} = d_{k+1} t_{k+1}` with
//! `d_{k+1} = d_k + w_k` gives
//!
//! ```text
//! x_{k+1} = x_k + (t_{k+1} - t_k) d_k + t_{k+1} w_k
//! ```
//!
//! and the increment `w_k` is treated as white process noise.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};
use crate::series::ForecastResult;

/// `lg((k-1)/k)` for `k >= 2`.
pub fn time_scale(k: usize) -> f64 {
    assert!(k >= 2, "time scale starts at k = 2");
    -(1.0 / (k as f64 - 1.0)).ln_1p() / std::f64::consts::LN_10
}

/// Log-ratio observations of a positive price series.
#[derive(Debug, Clone, PartialEq)]
pub struct FractalObservation {
    /// `lg(N_k / N_{k+1})` for `k = 1..n-1`.
    pub z: Vec<f64>,
    /// `t_k` for `k = 2..n`.
    pub t: Vec<f64>,
    pub n: usize,
}

pub fn build_observations(prices: &[f64]) -> Result<FractalObservation> {
    let n = prices.len();
    if n < 3 {
        return Err(ForecastError::Length(format!(
            "fractal filter needs 3 prices, got {n}"
        )));
    }
    if let Some(pos) = prices.iter().position(|&p| !(p > 0.0)) {
        return Err(ForecastError::Domain(format!(
            "price {} at position {pos} is not positive",
            prices[pos]
        )));
    }
    let z = prices.windows(2).map(|w| (w[0] / w[1]).log10()).collect();
    let t = (2..=n).map(time_scale).collect();
    Ok(FractalObservation { z, t, n })
}

/// How the transition matrices are built after the first step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionMode {
    /// Literal entries `lg((k^2 - 1)/k^2)` in both `Phi` and `Gamma`.
    Paper,
    /// Exact increments of the time scale: `Phi` carries `t_{k+1} - t_k` and
    /// `Gamma` carries `t_{k+1}`.
    #[default]
    Derived,
}

/// `Phi(k+1, k)` and `Gamma(k+1, k)` for the transition out of state `k`.
///
/// The first transition (`k = 2`, the filter's first step) uses the fixed
/// values `Phi = [[1, lg(1/4)], [0, 1]]` and `Gamma = [lg(1/2), 1]`
/// in both modes.
pub fn state_transition(k: usize, mode: TransitionMode) -> (Matrix2<f64>, Vector2<f64>) {
    assert!(k >= 2, "states are indexed from k = 2");
    let (phi_entry, gamma_entry) = if k == 2 {
        (0.25f64.log10(), 0.5f64.log10())
    } else {
        let kf = k as f64;
        match mode {
            TransitionMode::Paper => {
                let e = (-1.0 / (kf * kf)).ln_1p() / std::f64::consts::LN_10;
                (e, e)
            }
            TransitionMode::Derived => {
                let dt = -(-1.0 / (kf * kf)).ln_1p() / std::f64::consts::LN_10;
                (dt, time_scale(k + 1))
            }
        }
    };
    (
        Matrix2::new(1.0, phi_entry, 0.0, 1.0),
        Vector2::new(gamma_entry, 1.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanConfig {
    /// Process noise variance of the fractal-degree increment.
    pub q: f64,
    /// Observation noise variance.
    pub r: f64,
    /// Initial covariance is `p0_scale * I`.
    pub p0_scale: f64,
    pub transition: TransitionMode,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        KalmanConfig {
            q: 1e-4,
            r: 1.0,
            p0_scale: 1e-4,
            transition: TransitionMode::Derived,
        }
    }
}

impl KalmanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 0.0 && self.r > 0.0 && self.p0_scale >= 0.0) {
            return Err(ForecastError::InvalidParameter(format!(
                "need q >= 0, r > 0, p0 >= 0 (got q={}, r={}, p0={})",
                self.q, self.r, self.p0_scale
            )));
        }
        Ok(())
    }
}

/// Filtered estimate of `[x_k, d_k]` and its covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanState {
    pub x_hat: Vector2<f64>,
    pub p: Matrix2<f64>,
    pub k: usize,
}

impl KalmanState {
    /// Initial estimate from the first two prices: `[lg(N1/N2), lg(N1/N2)/lg 2]`.
    pub fn initial(n1: f64, n2: f64, config: &KalmanConfig) -> Self {
        let x = (n1 / n2).log10();
        KalmanState {
            x_hat: Vector2::new(x, x / 2f64.log10()),
            p: Matrix2::identity() * config.p0_scale,
            k: 2,
        }
    }

    /// One-step prediction of the next state.
    pub fn predict(&self, config: &KalmanConfig) -> (Vector2<f64>, Matrix2<f64>) {
        let (phi, gamma) = state_transition(self.k, config.transition);
        let x = phi * self.x_hat;
        let p = phi * self.p * phi.transpose() + gamma * config.q * gamma.transpose();
        (x, p)
    }
}

/// Predict-then-update with the next observation. Returns the new state and
/// the innovation.
pub fn kalman_step(
    state: &KalmanState,
    z_next: f64,
    config: &KalmanConfig,
) -> Result<(KalmanState, f64)> {
    let (x_pred, p_pred) = state.predict(config);
    let innovation = z_next - x_pred[0];
    let s = p_pred[(0, 0)] + config.r;
    if !(s > 0.0) {
        return Err(ForecastError::Numerical(format!(
            "innovation variance {s} is not positive"
        )));
    }
    let gain = Vector2::new(p_pred[(0, 0)], p_pred[(1, 0)]) / s;
    let x_hat = x_pred + gain * innovation;
    let ikc = Matrix2::new(1.0 - gain[0], 0.0, -gain[1], 1.0);
    let p = ikc * p_pred;
    let p = (p + p.transpose()) * 0.5;
    Ok((
        KalmanState {
            x_hat,
            p,
            k: state.k + 1,
        },
        innovation,
    ))
}

/// Runs the filter through a price series.
///
/// `fitted[i]` for `i >= 2` is the one-step prediction of price `i` made from
/// prices `0..i`. The `steps` forecasts past the end are produced by feeding
/// each prediction back as if it had been observed.
pub fn kalman_forecast(
    prices: &[f64],
    config: &KalmanConfig,
    steps: usize,
) -> Result<ForecastResult> {
    config.validate()?;
    let obs = build_observations(prices)?;
    let mut state = KalmanState::initial(prices[0], prices[1], config);
    let mut fitted = prices[..2].to_vec();
    for (i, &z) in obs.z.iter().enumerate().skip(1) {
        let (x_pred, _) = state.predict(config);
        fitted.push(prices[i] / 10f64.powf(x_pred[0]));
        state = kalman_step(&state, z, config)?.0;
    }

    let mut forecasts = Vec::with_capacity(steps);
    let mut last = prices[prices.len() - 1];
    for _ in 0..steps {
        let (x_pred, _) = state.predict(config);
        last /= 10f64.powf(x_pred[0]);
        forecasts.push(last);
        state = kalman_step(&state, x_pred[0], config)?.0;
    }
    Ok(ForecastResult {
        method_id: "F-Kalman".into(),
        fitted,
        fitted_from: 2,
        forecasts,
    })
}

/// `N_hat_{n+1} = N_n / 10^{x_hat(n+1|n)}`.
pub fn kalman_one_step(prices: &[f64], config: &KalmanConfig) -> Result<f64> {
    Ok(kalman_forecast(prices, config, 1)?.forecasts[0])
}
