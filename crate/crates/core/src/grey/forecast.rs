use serde::{Deserialize, Serialize};

use super::dgm::{dgm_forecast, fit_dgm, DgmModel};
use super::fuzzy::{fuzzy_transition, FuzzyMarkovModel, TriangularMemberships};
use super::markov::{markov_test, partition_states, ChiSquareVariant, PartitionScheme};
use crate::error::{ForecastError, Result};
use crate::series::ForecastResult;

/// Relative residuals `Z_t = (Y_t - Xhat_t) / Y_{t-1}` for `t = 2..N`.
pub fn residual_ratio_series(y: &[f64], fitted: &[f64]) -> Result<Vec<f64>> {
    if y.len() != fitted.len() {
        return Err(ForecastError::Shape(format!(
            "{} observations vs {} fitted values",
            y.len(),
            fitted.len()
        )));
    }
    (1..y.len())
        .map(|t| {
            if y[t - 1] == 0.0 {
                Err(ForecastError::Domain(format!(
                    "zero lagged value at position {}",
                    t - 1
                )))
            } else {
                Ok((y[t] - fitted[t]) / y[t - 1])
            }
        })
        .collect()
}

/// Which interval midpoint weights the transition probabilities in the
/// correction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MidpointMode {
    /// Midpoint of the source state; the inner sum collapses to it.
    Source,
    /// Midpoint of the target state: the expected next ratio.
    #[default]
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreyMarkovOptions {
    pub states: usize,
    pub alpha: f64,
    pub scheme: PartitionScheme,
    pub midpoint: MidpointMode,
    pub chi_square: ChiSquareVariant,
}

impl Default for GreyMarkovOptions {
    fn default() -> Self {
        GreyMarkovOptions {
            states: 4,
            alpha: 0.05,
            scheme: PartitionScheme::Quantile,
            midpoint: MidpointMode::Target,
            chi_square: ChiSquareVariant::Absolute,
        }
    }
}

/// DGM-FMarkov output.
#[derive(Debug, Clone, PartialEq)]
pub struct GreyMarkovFit {
    pub result: ForecastResult,
    pub base: DgmModel,
    /// Uncorrected grey forecasts for the same horizon.
    pub base_forecasts: Vec<f64>,
    /// `None` when every residual ratio is identical (the grey fit is exact
    /// up to a constant ratio) and no correction is applied.
    pub chain: Option<FuzzyMarkovModel>,
}

impl FuzzyMarkovModel {
    /// Predicted next residual ratio given the current one.
    pub fn expected_ratio(&self, current: f64, mode: MidpointMode) -> f64 {
        let mu = self.memberships.degrees(current);
        let centers = self.memberships.centers();
        match mode {
            MidpointMode::Target => mu
                .iter()
                .zip(&self.transition.p)
                .map(|(m, row)| m * row.iter().zip(centers).map(|(p, c)| p * c).sum::<f64>())
                .sum(),
            MidpointMode::Source => mu
                .iter()
                .zip(centers)
                .zip(&self.transition.p)
                .map(|((m, c), row)| m * c * row.iter().sum::<f64>())
                .sum(),
        }
    }
}

const FLAT_RATIO_SPREAD: f64 = 1e-12;

/// Grey model with fuzzy-weight Markov residual correction.
///
/// In sample, `Yhat_t = Xhat_t + E[Z_t | Z_{t-1}] Y_{t-1}`. Out of sample the
/// previous prediction and the previous predicted ratio stand in for the
/// unknown actuals.
pub fn dgm_fmarkov_forecast(
    y: &[f64],
    options: &GreyMarkovOptions,
    horizon: usize,
) -> Result<GreyMarkovFit> {
    let base = fit_dgm(y)?;
    let base_forecasts = dgm_forecast(&base, horizon);
    let ratios = residual_ratio_series(y, &base.fitted0)?;
    if ratios.len() < 3 {
        return Err(ForecastError::Length(
            "need at least three residual ratios".into(),
        ));
    }

    let n = y.len();
    // Ratios that agree to rounding carry no state information.
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
    if hi - lo <= FLAT_RATIO_SPREAD {
        let result = ForecastResult {
            method_id: "DGM-FMarkov".into(),
            fitted: base.fitted0.clone(),
            fitted_from: 2,
            forecasts: base_forecasts.clone(),
        };
        return Ok(GreyMarkovFit {
            result,
            base,
            base_forecasts,
            chain: None,
        });
    }

    let partition = partition_states(&ratios, options.states, options.scheme)?;
    let test = markov_test(&ratios, &partition, options.alpha, options.chi_square)?;
    if !test.is_markov {
        log::info!(
            "residual ratios fail the Markov test (chi2 {:.4} <= {:.4}); correcting anyway",
            test.chi2,
            test.critical_value
        );
    }
    let memberships = TriangularMemberships::from_partition(&partition);
    let transition = fuzzy_transition(&ratios, &memberships)?;
    let chain = FuzzyMarkovModel {
        partition,
        memberships,
        transition,
        test,
        base: base.clone(),
        ratios,
    };

    let mut fitted = base.fitted0.clone();
    for t in 2..n {
        let r = chain.expected_ratio(chain.ratios[t - 2], options.midpoint);
        fitted[t] = base.fitted0[t] + r * y[t - 1];
    }

    let mut forecasts = Vec::with_capacity(horizon);
    let mut ratio = chain.ratios[n - 2];
    let mut level = y[n - 1];
    for &x in &base_forecasts {
        ratio = chain.expected_ratio(ratio, options.midpoint);
        level = x + ratio * level;
        forecasts.push(level);
    }

    let result = ForecastResult {
        method_id: "DGM-FMarkov".into(),
        fitted,
        fitted_from: 2,
        forecasts,
    };
    Ok(GreyMarkovFit {
        result,
        base,
        base_forecasts,
        chain: Some(chain),
    })
}
