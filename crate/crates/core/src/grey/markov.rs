use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};
use crate::stats::{chi_square_quantile, normal_quantile};

/// Interval bounds `m_0 < m_1 < ... < m_k` splitting the residual range into
/// `k` states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePartition {
    bounds: Vec<f64>,
}

impl StatePartition {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.len() < 3 {
            return Err(ForecastError::Partition("need at least two states".into()));
        }
        if bounds.iter().any(|b| !b.is_finite()) || bounds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ForecastError::Partition(format!(
                "bounds must be finite and strictly increasing: {bounds:?}"
            )));
        }
        Ok(StatePartition { bounds })
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn states(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Interval midpoints `(m_{i-1} + m_i) / 2`.
    pub fn midpoints(&self) -> Vec<f64> {
        self.bounds
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// Crisp state of `u`: intervals are half-open except the last one, and
    /// values outside the range go to the nearest boundary state.
    pub fn state_of(&self, u: f64) -> usize {
        let k = self.states();
        self.bounds[1..k].iter().take_while(|&&b| u >= b).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionScheme {
    /// Equal-frequency bounds from empirical quantiles.
    #[default]
    Quantile,
    /// Interior bounds at `mean + sd * z_{i/k}` (normal quantiles).
    Sigma,
}

fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Splits the range of `z` into `k` states.
///
/// The outer bounds are pushed out by `1e-9` of the range so every sample is
/// interior.
pub fn partition_states(z: &[f64], k: usize, scheme: PartitionScheme) -> Result<StatePartition> {
    if k < 2 {
        return Err(ForecastError::InvalidParameter(format!(
            "need k >= 2 states, got {k}"
        )));
    }
    if z.len() < k {
        return Err(ForecastError::Length(format!(
            "{} residuals for {k} states",
            z.len()
        )));
    }
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let range = max - min;
    if !(range > 0.0) {
        return Err(ForecastError::Partition(
            "all residual ratios are equal".into(),
        ));
    }
    let pad = 1e-9 * range;
    let mut bounds = Vec::with_capacity(k + 1);
    match scheme {
        PartitionScheme::Quantile => {
            bounds.push(min - pad);
            bounds.extend((1..k).map(|i| empirical_quantile(&sorted, i as f64 / k as f64)));
            bounds.push(max + pad);
        }
        PartitionScheme::Sigma => {
            let n = z.len() as f64;
            let mean = z.iter().sum::<f64>() / n;
            let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            let interior: Vec<f64> = (1..k)
                .map(|i| mean + sd * normal_quantile(i as f64 / k as f64))
                .collect();
            bounds.push(min.min(interior[0]) - pad);
            bounds.extend_from_slice(&interior);
            bounds.push(max.max(interior[k - 2]) + pad);
        }
    }
    StatePartition::new(bounds)
}

/// Form of the Markov-property statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiSquareVariant {
    /// `2 sum M_ij |ln(P_ij / P_0j)|`.
    #[default]
    Absolute,
    /// Classical likelihood ratio `2 sum M_ij ln(P_ij / P_0j)`.
    LikelihoodRatio,
}

/// Outcome of the chi-square test for the Markov property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovTest {
    pub transition_counts: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub marginal: Vec<f64>,
    pub chi2: f64,
    pub dof: usize,
    pub alpha: f64,
    pub critical_value: f64,
    pub variant: ChiSquareVariant,
    pub is_markov: bool,
}

/// Counts crisp one-step transitions of `z` and tests them against the
/// marginal next-state distribution.
pub fn markov_test(
    z: &[f64],
    partition: &StatePartition,
    alpha: f64,
    variant: ChiSquareVariant,
) -> Result<MarkovTest> {
    if z.len() < 2 {
        return Err(ForecastError::Length(
            "Markov test needs at least two values".into(),
        ));
    }
    let k = partition.states();
    let states: Vec<usize> = z.iter().map(|&u| partition.state_of(u)).collect();
    let mut counts = vec![vec![0u64; k]; k];
    for w in states.windows(2) {
        counts[w[0]][w[1]] += 1;
    }
    let row_totals: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let total: u64 = row_totals.iter().sum();
    let marginal: Vec<f64> = (0..k)
        .map(|j| counts.iter().map(|r| r[j]).sum::<u64>() as f64 / total as f64)
        .collect();

    let mut chi2 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let m = counts[i][j];
            if m == 0 || marginal[j] == 0.0 {
                continue;
            }
            let log_ratio = (m as f64 / row_totals[i] as f64 / marginal[j]).ln();
            chi2 += m as f64
                * match variant {
                    ChiSquareVariant::Absolute => log_ratio.abs(),
                    ChiSquareVariant::LikelihoodRatio => log_ratio,
                };
        }
    }
    chi2 *= 2.0;
    let dof = (k - 1) * (k - 1);
    let critical_value = chi_square_quantile(alpha, dof)?;
    Ok(MarkovTest {
        transition_counts: counts,
        row_totals,
        marginal,
        chi2,
        dof,
        alpha,
        critical_value,
        variant,
        is_markov: chi2 > critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_quantile_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        let p = partition_states(&z, 4, PartitionScheme::Quantile).unwrap();
        for (b, e) in p.bounds().iter().zip([0.0, 0.25, 0.5, 0.75, 1.0]) {
            assert!((b - e).abs() < 0.05, "{:?}", p.bounds());
        }
        assert!(z.iter().all(|&u| u > p.bounds()[0] && u < p.bounds()[4]));
    }

    #[test]
    fn two_state_median_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z: Vec<f64> = (0..200)
            .map(|i| if i % 2 == 0 { -1.0 } else { 1.0 } + 1e-3 * rng.gen::<f64>())
            .collect();
        let p = partition_states(&z, 2, PartitionScheme::Quantile).unwrap();
        assert!(p.bounds()[1].abs() < 0.01);
    }

    #[test]
    fn sigma_scheme_is_valid() {
        let z = [0.1, -0.3, 0.2, 0.05, -0.1, 0.4, -0.2, 0.0];
        let p = partition_states(&z, 4, PartitionScheme::Sigma).unwrap();
        assert_eq!(p.states(), 4);
        assert!(z.iter().all(|&u| u > p.bounds()[0] && u < p.bounds()[4]));
    }

    #[test]
    fn degenerate_input() {
        assert!(matches!(
            partition_states(&[0.2; 6], 3, PartitionScheme::Quantile),
            Err(ForecastError::Partition(_))
        ));
        assert!(partition_states(&[0.1, 0.2], 3, PartitionScheme::Quantile).is_err());
        assert!(partition_states(&[0.1, 0.2], 1, PartitionScheme::Quantile).is_err());
    }

    #[test]
    fn state_assignment() {
        let p = StatePartition::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.state_of(0.5), 0);
        assert_eq!(p.state_of(1.0), 1);
        assert_eq!(p.state_of(3.0), 2);
        assert_eq!(p.state_of(-4.0), 0);
        assert_eq!(p.state_of(9.0), 2);
    }

    #[test]
    fn alternating_sequence_is_markov() {
        let z: Vec<f64> = (0..30)
            .map(|i| if i % 2 == 0 { -1.0 } else { 1.0 })
            .collect();
        let p = partition_states(&z, 2, PartitionScheme::Quantile).unwrap();
        let t = markov_test(&z, &p, 0.05, ChiSquareVariant::Absolute).unwrap();
        assert_eq!(t.transition_counts, vec![vec![0, 15], vec![14, 0]]);
        let expected = 2.0 * (15.0 * (29.0f64 / 15.0).ln() + 14.0 * (29.0f64 / 14.0).ln());
        assert!((t.chi2 - expected).abs() < 1e-9);
        assert_eq!(t.dof, 1);
        assert!(t.is_markov);
    }

    #[test]
    fn single_transition_gives_zero() {
        let p = StatePartition::new(vec![0.0, 1.0, 2.0]).unwrap();
        let t = markov_test(&[0.5, 1.5], &p, 0.05, ChiSquareVariant::Absolute).unwrap();
        assert_eq!(t.chi2, 0.0);
        assert!(!t.is_markov);
        assert!(markov_test(&[0.5], &p, 0.05, ChiSquareVariant::Absolute).is_err());
    }

    #[test]
    fn count_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: Vec<f64> = (0..120).map(|_| rng.gen::<f64>()).collect();
        let p = partition_states(&z, 3, PartitionScheme::Quantile).unwrap();
        let t = markov_test(&z, &p, 0.05, ChiSquareVariant::LikelihoodRatio).unwrap();
        for (row, total) in t.transition_counts.iter().zip(&t.row_totals) {
            assert_eq!(row.iter().sum::<u64>(), *total);
        }
        let all: u64 = t.row_totals.iter().sum();
        for j in 0..3 {
            let col: u64 = t.transition_counts.iter().map(|r| r[j]).sum();
            assert_eq!(t.marginal[j], col as f64 / all as f64);
        }
        assert_eq!(t.dof, 4);
    }

    #[test]
    fn iid_data_is_rarely_markov_under_likelihood_ratio() {
        let mut small = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
            let p = partition_states(&z, 4, PartitionScheme::Quantile).unwrap();
            let t = markov_test(&z, &p, 0.05, ChiSquareVariant::LikelihoodRatio).unwrap();
            if t.chi2 < t.critical_value {
                small += 1;
            }
        }
        assert!(small >= 16, "only {small} of 20 below the critical value");
    }
}
