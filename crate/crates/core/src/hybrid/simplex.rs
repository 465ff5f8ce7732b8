//! Deterministic search over the probability simplex.
//!
//! Weights live on an integer lattice of `resolution` units so every candidate
//! sums to one exactly in lattice units. A full scan at the coarse step is
//! followed by pairwise mass transfers of one fine unit until no move
//! improves the objective. Values within a relative 1e-12 of each other count
//! as ties, and ties always resolve to the lexicographically smallest weight
//! vector.

use std::cmp::Ordering;

/// Objective direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSearch {
    /// Fine lattice units per unit mass.
    pub resolution: u32,
    /// Coarse step, in fine units.
    pub coarse_step: u32,
    pub max_refinements: usize,
}

impl Default for SimplexSearch {
    fn default() -> Self {
        // coarse grid at 0.01, refinement at 0.001
        SimplexSearch {
            resolution: 1000,
            coarse_step: 10,
            max_refinements: 100_000,
        }
    }
}

const TIE_TOLERANCE: f64 = 1e-12;

fn better(goal: Goal, candidate: f64, incumbent: f64) -> bool {
    let margin = TIE_TOLERANCE * (1.0 + incumbent.abs());
    match goal {
        Goal::Maximize => candidate > incumbent + margin,
        Goal::Minimize => candidate < incumbent - margin,
    }
}

impl SimplexSearch {
    fn weights_of(&self, units: &[u32]) -> Vec<f64> {
        units
            .iter()
            .map(|&u| u as f64 / self.resolution as f64)
            .collect()
    }

    /// Returns the best weights found and the objective there.
    ///
    /// NaN objective values never win.
    pub fn optimize<F>(&self, m: usize, goal: Goal, mut objective: F) -> (Vec<f64>, f64)
    where
        F: FnMut(&[f64]) -> f64,
    {
        assert!(m >= 1);
        let coarse_total = self.resolution / self.coarse_step;

        let mut best_units: Option<Vec<u32>> = None;
        let mut best_value = f64::NAN;
        // compositions of coarse_total into m parts, in lexicographic order
        let mut parts = vec![0u32; m];
        parts[m - 1] = coarse_total;
        loop {
            let units: Vec<u32> = parts.iter().map(|p| p * self.coarse_step).collect();
            let v = objective(&self.weights_of(&units));
            if !v.is_nan() && (best_units.is_none() || better(goal, v, best_value)) {
                best_units = Some(units);
                best_value = v;
            }
            if !next_composition(&mut parts) {
                break;
            }
        }
        let mut units = best_units.unwrap_or_else(|| {
            let mut u = vec![0; m];
            u[m - 1] = self.resolution;
            u
        });

        for _ in 0..self.max_refinements {
            let mut step: Option<(Vec<u32>, f64)> = None;
            for from in 0..m {
                if units[from] == 0 {
                    continue;
                }
                for to in 0..m {
                    if to == from {
                        continue;
                    }
                    let mut cand = units.clone();
                    cand[from] -= 1;
                    cand[to] += 1;
                    let v = objective(&self.weights_of(&cand));
                    if v.is_nan() || !better(goal, v, best_value) {
                        continue;
                    }
                    let replace = match &step {
                        None => true,
                        Some((u, sv)) => {
                            better(goal, v, *sv)
                                || (!better(goal, *sv, v) && cand.cmp(u) == Ordering::Less)
                        }
                    };
                    if replace {
                        step = Some((cand, v));
                    }
                }
            }
            match step {
                Some((u, v)) => {
                    units = u;
                    best_value = v;
                }
                None => break,
            }
        }
        (self.weights_of(&units), best_value)
    }
}

/// Advances `parts` to the next composition of the same total in
/// lexicographic order. Returns false after the last one.
fn next_composition(parts: &mut [u32]) -> bool {
    let m = parts.len();
    if m < 2 {
        return false;
    }
    // rightmost position before the last with mass somewhere after it
    let Some((i, later)) = (0..m - 1)
        .rev()
        .map(|i| (i, parts[i + 1..].iter().sum::<u32>()))
        .find(|&(_, later)| later > 0)
    else {
        return false;
    };
    parts[i] += 1;
    for p in parts[i + 1..].iter_mut() {
        *p = 0;
    }
    parts[m - 1] = later - 1;
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_compositions_in_order() {
        let mut parts = vec![0, 0, 3];
        let mut seen = vec![parts.clone()];
        while next_composition(&mut parts) {
            seen.push(parts.clone());
        }
        assert_eq!(seen.len(), 10);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        assert_eq!(seen.last().unwrap(), &vec![3, 0, 0]);

        let mut parts = vec![0, 0, 100];
        let mut count = 1;
        while next_composition(&mut parts) {
            count += 1;
        }
        assert_eq!(count, 5151);
    }

    #[test]
    fn finds_interior_quadratic_optimum() {
        let target = [0.2345, 0.5, 0.2655];
        let (w, v) = SimplexSearch::default().optimize(3, Goal::Minimize, |w| {
            w.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum()
        });
        for (a, b) in w.iter().zip(target) {
            assert!((a - b).abs() <= 1e-3 + 1e-12, "{w:?}");
        }
        assert!(v < 1e-6);
    }

    #[test]
    fn flat_objective_returns_lexicographic_minimum() {
        let (w, _) = SimplexSearch::default().optimize(3, Goal::Maximize, |_| 1.0);
        assert_eq!(w, vec![0.0, 0.0, 1.0]);
    }
}
