//! Holdout backtest: fit the three base forecasters on the training part,
//! derive combination weights from their in-sample errors, and score every
//! forecaster on the last `h + 1` points.

use serde::{Deserialize, Serialize};

use crate::arfima::{self, ArfimaOptions, MeanMode};
use crate::error::{ForecastError, Result};
use crate::grey::{
    dgm_fmarkov_forecast, ChiSquareVariant, GreyMarkovOptions, MidpointMode, PartitionScheme,
};
use crate::hybrid::{
    combine, effective_degree, ls_weights, optimize_effective_degree, optimize_grey_relation,
    EffectiveDegreeDirection, MethodErrors, SimplexSearch, WeightScheme, WeightVector,
};
use crate::kalman::{kalman_forecast, KalmanConfig, TransitionMode};
use crate::metrics::EvalReport;
use crate::series::{split, ForecastResult, Series};

pub const ARFIMA_ID: &str = "ARFIMA";
pub const GREY_ID: &str = "DGM-FMarkov";
pub const KALMAN_ID: &str = "F-Kalman";
pub const METHOD1_ID: &str = "Method 1";
pub const METHOD2_ID: &str = "Method 2";
pub const METHOD3_ID: &str = "Method 3";
pub const AVERAGE_ID: &str = "Average";

/// Everything a backtest run depends on. Defaults: `h = 12`, `rho = 0.5`, `Q = 1e-4`, `R = 1`, `P0 = 1e-4 I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: Option<String>,
    pub horizon: usize,
    pub arfima_p: usize,
    pub arfima_q: usize,
    pub zero_mean: bool,
    pub difference_first: bool,
    pub arfima_burn_in: usize,
    pub arfima_truncation: usize,
    pub dgm_states: usize,
    pub alpha: f64,
    pub partition: PartitionScheme,
    pub markov_midpoint: MidpointMode,
    pub chi_square: ChiSquareVariant,
    pub rho: f64,
    pub kalman_q: f64,
    pub kalman_r: f64,
    pub kalman_p0: f64,
    pub fractal_transition: TransitionMode,
    pub effective_degree_direction: EffectiveDegreeDirection,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            horizon: 12,
            arfima_p: 3,
            arfima_q: 0,
            zero_mean: false,
            difference_first: false,
            arfima_burn_in: arfima::DEFAULT_BURN_IN,
            arfima_truncation: arfima::DEFAULT_TRUNCATION,
            dgm_states: 4,
            alpha: 0.05,
            partition: PartitionScheme::Quantile,
            markov_midpoint: MidpointMode::Target,
            chi_square: ChiSquareVariant::Absolute,
            rho: 0.5,
            kalman_q: 1e-4,
            kalman_r: 1.0,
            kalman_p0: 1e-4,
            fractal_transition: TransitionMode::Derived,
            effective_degree_direction: EffectiveDegreeDirection::Maximize,
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn arfima_options(&self) -> ArfimaOptions {
        ArfimaOptions {
            mean: if self.zero_mean {
                MeanMode::Zero
            } else {
                MeanMode::Sample
            },
            burn_in: self.arfima_burn_in,
            truncation: self.arfima_truncation,
        }
    }

    pub fn grey_options(&self) -> GreyMarkovOptions {
        GreyMarkovOptions {
            states: self.dgm_states,
            alpha: self.alpha,
            scheme: self.partition,
            midpoint: self.markov_midpoint,
            chi_square: self.chi_square,
        }
    }

    pub fn kalman_config(&self) -> KalmanConfig {
        KalmanConfig {
            q: self.kalman_q,
            r: self.kalman_r,
            p0_scale: self.kalman_p0,
            transition: self.fractal_transition,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(ForecastError::InvalidParameter(
                "horizon must be at least 1".into(),
            ));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(ForecastError::InvalidParameter(format!(
                "rho {} not in (0, 1)",
                self.rho
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ForecastError::InvalidParameter(format!(
                "alpha {} not in (0, 1)",
                self.alpha
            )));
        }
        self.kalman_config().validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub id: String,
    pub mapfe: f64,
    pub da: f64,
    pub mafe: f64,
    pub rmsfe: f64,
}

impl MethodReport {
    pub fn metrics(&self) -> EvalReport {
        EvalReport {
            mapfe: self.mapfe,
            da: self.da,
            mafe: self.mafe,
            rmsfe: self.rmsfe,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub scheme: WeightScheme,
    pub methods: Vec<String>,
    pub values: Vec<f64>,
}

impl WeightReport {
    fn new(w: &WeightVector) -> Self {
        WeightReport {
            scheme: w.scheme,
            methods: vec![ARFIMA_ID.into(), GREY_ID.into(), KALMAN_ID.into()],
            values: w.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub method_1: WeightReport,
    pub method_2: WeightReport,
    pub method_3: WeightReport,
    pub average: WeightReport,
    /// First training position of the window the weights were fitted on.
    pub window_start: usize,
    /// Effective degree S of Method 2 on that window.
    pub effective_degree: f64,
    /// Per-method grey relation degrees on that window.
    pub grey_relation: Vec<f64>,
    /// gamma(W) at the Method 3 weights.
    pub grey_relation_combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovSummary {
    pub bounds: Vec<f64>,
    pub transition_counts: Vec<Vec<u64>>,
    pub chi2: f64,
    pub dof: usize,
    pub alpha: f64,
    pub critical_value: f64,
    pub variant: ChiSquareVariant,
    pub is_markov: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub arfima_d: f64,
    pub arfima_phi: Vec<f64>,
    pub arfima_mean: f64,
    pub arfima_sigma2: f64,
    pub dgm_beta: [f64; 4],
    pub dgm_xi: f64,
    pub dgm_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub method: String,
    pub predicted: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub index: i64,
    pub label: String,
    pub actual: f64,
    pub predictions: Vec<Prediction>,
}

/// Full backtest outcome. Every metric can be recomputed from `origin_value`
/// and `points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub config: RunConfig,
    pub train_len: usize,
    /// Last training value; the pre-period for directional accuracy.
    pub origin_value: f64,
    pub methods: Vec<MethodReport>,
    pub weights: Weights,
    pub markov_test: Option<MarkovSummary>,
    pub models: ModelSummary,
    pub points: Vec<Point>,
}

fn arfima_result(
    train: &[f64],
    steps: usize,
    config: &RunConfig,
) -> Result<(ForecastResult, arfima::ArfimaModel)> {
    let opts = config.arfima_options();
    if !config.difference_first {
        let fit =
            arfima::estimate_css(train, config.arfima_p, config.arfima_q, &opts).map_err(|e| {
                match e {
                    ForecastError::Estimation(msg) => ForecastError::Estimation(format!(
                        "{msg} (price levels; consider differencing first)"
                    )),
                    other => other,
                }
            })?;
        let result = arfima::forecast(&fit.model, train, steps)?;
        return Ok((result, fit.model));
    }
    let diffs: Vec<f64> = train.windows(2).map(|w| w[1] - w[0]).collect();
    let fit = arfima::estimate_css(&diffs, config.arfima_p, config.arfima_q, &opts)?;
    let on_diffs = arfima::forecast(&fit.model, &diffs, steps)?;
    let mut fitted = vec![train[0]];
    fitted.extend(
        train
            .iter()
            .zip(&on_diffs.fitted)
            .map(|(level, d)| level + d),
    );
    let mut level = train[train.len() - 1];
    let forecasts = on_diffs
        .forecasts
        .iter()
        .map(|d| {
            level += d;
            level
        })
        .collect();
    Ok((
        ForecastResult {
            method_id: ARFIMA_ID.into(),
            fitted,
            fitted_from: on_diffs.fitted_from + 1,
            forecasts,
        },
        fit.model,
    ))
}

/// Runs the full holdout experiment on `series`.
pub fn run_backtest(series: &Series, config: &RunConfig) -> Result<BacktestReport> {
    config.validate()?;
    series.require_positive()?;
    let (train, test) = split(series, config.horizon)?;
    let steps = test.len();
    let y = train.values();

    let (arfima_res, arfima_model) = arfima_result(y, steps, config)?;
    log::debug!(
        "ARFIMA d = {:.6}, phi = {:?}",
        arfima_model.d,
        arfima_model.phi
    );
    let grey = dgm_fmarkov_forecast(y, &config.grey_options(), steps)?;
    let kalman = kalman_forecast(y, &config.kalman_config(), steps)?;
    let base = [&arfima_res, &grey.result, &kalman];

    let window_start = base.iter().map(|r| r.fitted_from).max().unwrap_or(0);
    if y.len() < window_start + 2 {
        return Err(ForecastError::Length(format!(
            "training part of {} points leaves no room for weight estimation after position {window_start}",
            y.len()
        )));
    }
    let actual_w = &y[window_start..];
    let preds_w: Vec<Vec<f64>> = base
        .iter()
        .map(|r| r.fitted[window_start..].to_vec())
        .collect();
    let ids: Vec<String> = vec![ARFIMA_ID.into(), GREY_ID.into(), KALMAN_ID.into()];
    let errors = MethodErrors::from_predictions(actual_w, &preds_w, ids)?;

    let search = SimplexSearch::default();
    let w1 = ls_weights(&errors)?;
    let w2 = optimize_effective_degree(
        actual_w,
        &preds_w,
        config.effective_degree_direction,
        &search,
    )?;
    let (w3, relation) = optimize_grey_relation(&errors, config.rho, &search)?;
    let avg = WeightVector::average(3);
    let s2 = effective_degree(actual_w, &combine(&preds_w, &w2)?)?.s;

    let base_forecasts: Vec<Vec<f64>> = base.iter().map(|r| r.forecasts.clone()).collect();
    let mut forecasters: Vec<(String, Vec<f64>)> = vec![
        (ARFIMA_ID.into(), arfima_res.forecasts.clone()),
        (GREY_ID.into(), grey.result.forecasts.clone()),
        (KALMAN_ID.into(), kalman.forecasts.clone()),
    ];
    for (id, w) in [
        (METHOD1_ID, &w1),
        (METHOD2_ID, &w2),
        (METHOD3_ID, &w3),
        (AVERAGE_ID, &avg),
    ] {
        forecasters.push((id.into(), combine(&base_forecasts, w)?));
    }

    let origin_value = y[y.len() - 1];
    let actual = test.values();
    let methods = forecasters
        .iter()
        .map(|(id, f)| {
            let m = EvalReport::evaluate(origin_value, actual, f)?;
            Ok(MethodReport {
                id: id.clone(),
                mapfe: m.mapfe,
                da: m.da,
                mafe: m.mafe,
                rmsfe: m.rmsfe,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let points = (0..steps)
        .map(|i| Point {
            index: test.index()[i],
            label: test.label(i),
            actual: actual[i],
            predictions: forecasters
                .iter()
                .map(|(id, f)| Prediction {
                    method: id.clone(),
                    predicted: f[i],
                    error: actual[i] - f[i],
                })
                .collect(),
        })
        .collect();

    let markov_test = grey.chain.as_ref().map(|c| MarkovSummary {
        bounds: c.partition.bounds().to_vec(),
        transition_counts: c.test.transition_counts.clone(),
        chi2: c.test.chi2,
        dof: c.test.dof,
        alpha: c.test.alpha,
        critical_value: c.test.critical_value,
        variant: c.test.variant,
        is_markov: c.test.is_markov,
    });

    Ok(BacktestReport {
        config: config.clone(),
        train_len: y.len(),
        origin_value,
        methods,
        weights: Weights {
            method_1: WeightReport::new(&w1),
            method_2: WeightReport::new(&w2),
            method_3: WeightReport::new(&w3),
            average: WeightReport::new(&avg),
            window_start,
            effective_degree: s2,
            grey_relation: relation.gamma,
            grey_relation_combined: relation.gamma_combined,
        },
        markov_test,
        models: ModelSummary {
            arfima_d: arfima_model.d,
            arfima_phi: arfima_model.phi.clone(),
            arfima_mean: arfima_model.mean,
            arfima_sigma2: arfima_model.sigma2,
            dgm_beta: grey.base.beta,
            dgm_xi: grey.base.xi,
            dgm_q: grey.base.q_value,
        },
        points,
    })
}

impl BacktestReport {
    pub fn method(&self, id: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.id == id)
    }

    /// Holdout predictions of one method, in time order.
    pub fn predictions_of(&self, id: &str) -> Vec<f64> {
        self.points
            .iter()
            .filter_map(|p| {
                p.predictions
                    .iter()
                    .find(|q| q.method == id)
                    .map(|q| q.predicted)
            })
            .collect()
    }

    pub fn actuals(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.actual).collect()
    }
}
