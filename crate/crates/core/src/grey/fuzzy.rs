use serde::{Deserialize, Serialize};

use super::dgm::DgmModel;
use super::markov::{MarkovTest, StatePartition};
use crate::error::{ForecastError, Result};

/// Triangular membership functions peaking at the state midpoints.
///
/// Neighbouring triangles overlap so the degrees always sum to one; the
/// boundary states saturate at 1 beyond the outermost midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangularMemberships {
    centers: Vec<f64>,
}

impl TriangularMemberships {
    pub fn from_partition(partition: &StatePartition) -> Self {
        TriangularMemberships {
            centers: partition.midpoints(),
        }
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn states(&self) -> usize {
        self.centers.len()
    }

    /// Membership degree of `u` in every state.
    pub fn degrees(&self, u: f64) -> Vec<f64> {
        let k = self.centers.len();
        let mut mu = vec![0.0; k];
        if u <= self.centers[0] {
            mu[0] = 1.0;
        } else if u >= self.centers[k - 1] {
            mu[k - 1] = 1.0;
        } else {
            let i = self
                .centers
                .windows(2)
                .position(|w| u < w[1])
                .unwrap_or(k - 2);
            let right = (u - self.centers[i]) / (self.centers[i + 1] - self.centers[i]);
            mu[i] = 1.0 - right;
            mu[i + 1] = right;
        }
        mu
    }
}

/// Fuzzy transition frequencies and their row-normalized probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyTransition {
    pub a: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
}

/// `a_ij = sum_t mu_i(z_t) mu_j(z_{t+1})`, with `P` its row-normalization.
/// Rows that never receive mass become uniform.
pub fn fuzzy_transition(z: &[f64], memberships: &TriangularMemberships) -> Result<FuzzyTransition> {
    if z.len() < 2 {
        return Err(ForecastError::Length(
            "fuzzy transitions need at least two values".into(),
        ));
    }
    let k = memberships.states();
    let degrees: Vec<Vec<f64>> = z.iter().map(|&u| memberships.degrees(u)).collect();
    let mut a = vec![vec![0.0; k]; k];
    for w in degrees.windows(2) {
        for i in 0..k {
            if w[0][i] == 0.0 {
                continue;
            }
            for j in 0..k {
                a[i][j] += w[0][i] * w[1][j];
            }
        }
    }
    let p = a
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter().map(|v| v / total).collect()
            } else {
                vec![1.0 / k as f64; k]
            }
        })
        .collect();
    Ok(FuzzyTransition { a, p })
}

/// The residual-correction half of the grey-Markov forecaster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyMarkovModel {
    pub partition: StatePartition,
    pub memberships: TriangularMemberships,
    pub transition: FuzzyTransition,
    pub test: MarkovTest,
    pub base: DgmModel,
    /// Relative residual ratios the chain was estimated from.
    pub ratios: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn memberships(bounds: Vec<f64>) -> TriangularMemberships {
        TriangularMemberships::from_partition(&StatePartition::new(bounds).unwrap())
    }

    #[test]
    fn peaks_and_crossovers() {
        let m = memberships(vec![0.0, 1.0, 3.0, 4.0]);
        assert_eq!(m.centers(), &[0.5, 2.0, 3.5]);
        assert_eq!(m.degrees(2.0), vec![0.0, 1.0, 0.0]);
        assert_eq!(m.degrees(0.5), vec![1.0, 0.0, 0.0]);
        assert_eq!(m.degrees(1.25), vec![0.5, 0.5, 0.0]);
        assert_eq!(m.degrees(-7.0), vec![1.0, 0.0, 0.0]);
        assert_eq!(m.degrees(3.9), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn partition_of_unity_on_grid() {
        let m = memberships(vec![-0.3, -0.1, 0.0, 0.05, 0.4]);
        for i in 0..1000 {
            let u = -0.3 + 0.7 * i as f64 / 999.0;
            let s: f64 = m.degrees(u).iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn hopping_between_midpoints() {
        let m = memberships(vec![0.0, 1.0, 2.0]);
        let z: Vec<f64> = (0..9).map(|i| if i % 2 == 0 { 0.5 } else { 1.5 }).collect();
        let t = fuzzy_transition(&z, &m).unwrap();
        assert_eq!(t.a, vec![vec![0.0, 4.0], vec![4.0, 0.0]]);
        assert_eq!(t.p, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn constant_at_first_midpoint() {
        let m = memberships(vec![0.0, 1.0, 2.0, 3.0]);
        let t = fuzzy_transition(&[0.5; 6], &m).unwrap();
        assert_eq!(t.p[0], vec![1.0, 0.0, 0.0]);
        // unvisited rows fall back to uniform
        assert_eq!(t.p[2], vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn rows_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = memberships(vec![0.0, 0.2, 0.5, 0.7, 1.0]);
        let z: Vec<f64> = (0..300).map(|_| rng.gen::<f64>()).collect();
        let t = fuzzy_transition(&z, &m).unwrap();
        for row in &t.p {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        // frequencies recomputed directly
        for i in 0..4 {
            for j in 0..4 {
                let direct: f64 = z
                    .windows(2)
                    .map(|w| m.degrees(w[0])[i] * m.degrees(w[1])[j])
                    .sum();
                assert!((direct - t.a[i][j]).abs() <= 1e-12);
            }
        }
    }
}
