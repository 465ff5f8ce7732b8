//! Distribution quantiles and small dense least-squares helpers.

use nalgebra::{DMatrix, DVector};
use statrs::function::{erf, gamma};

use crate::error::{ForecastError, Result};

/// Upper-`alpha` quantile of the chi-square distribution with `dof` degrees
/// of freedom: the `x` with `P(X > x) = alpha`.
///
/// Inverts the regularized lower incomplete gamma function by bisection,
/// stopping once the bracket is narrower than 1e-8.
pub fn chi_square_quantile(alpha: f64, dof: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ForecastError::InvalidParameter(format!(
            "alpha {alpha} not in (0, 1)"
        )));
    }
    if dof == 0 {
        return Err(ForecastError::InvalidParameter(
            "chi-square needs dof >= 1".into(),
        ));
    }
    let shape = dof as f64 / 2.0;
    let target = 1.0 - alpha;
    let cdf = |x: f64| gamma::gamma_lr(shape, x / 2.0);

    let mut lo = 0.0;
    let mut hi = dof as f64 + 10.0;
    while cdf(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * erf::erf_inv(2.0 * p - 1.0)
}

/// Ordinary least squares via the normal equations.
///
/// Returns `None` when the Gram matrix is numerically singular.
pub(crate) fn ols_normal(design: &DMatrix<f64>, target: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = design.transpose() * design;
    let scale = gram.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let chol = gram.clone().cholesky()?;
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    if min_pivot <= 1e-12 * scale {
        return None;
    }
    Some(chol.solve(&(design.transpose() * target)))
}

/// Stationarity of `1 - a_1 B - ... - a_p B^p` via the Schur-Cohn step-down
/// recursion: every reflection coefficient must lie strictly inside (-1, 1).
pub(crate) fn ar_is_stationary(coefs: &[f64]) -> bool {
    let mut a: Vec<f64> = coefs.to_vec();
    while let Some(&k) = a.last() {
        if !(k.abs() < 1.0) {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..p - 1)
            .map(|j| (a[j] + k * a[p - 2 - j]) / denom)
            .collect();
        a = next;
    }
    true
}
