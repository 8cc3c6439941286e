//! Hodrick-Prescott trend/cycle decomposition.
//!
//! The trend solves `(I + lambda * D'D) tau = s` with `D` the second-difference
//! operator; the system is symmetric positive definite and pentadiagonal, and
//! is solved in O(n) by a banded Cholesky factorization.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Symmetric pentadiagonal SPD system solver. Bands are the main diagonal and
/// the first and second sub-diagonals (`sub1[i] = A[i+1][i]`,
/// `sub2[i] = A[i+2][i]`).
pub(crate) fn solve_pentadiagonal(
    diag: &[f64],
    sub1: &[f64],
    sub2: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert_eq!(sub1.len(), n.saturating_sub(1));
    debug_assert_eq!(sub2.len(), n.saturating_sub(2));
    debug_assert_eq!(rhs.len(), n);

    // Banded Cholesky A = L L' with bandwidth 2.
    let mut l0 = vec![0.0; n]; // L[i][i]
    let mut l1 = vec![0.0; n.saturating_sub(1)]; // L[i+1][i]
    let mut l2 = vec![0.0; n.saturating_sub(2)]; // L[i+2][i]
    for i in 0..n {
        let mut d = diag[i];
        if i >= 1 {
            d -= l1[i - 1] * l1[i - 1];
        }
        if i >= 2 {
            d -= l2[i - 2] * l2[i - 2];
        }
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: i });
        }
        l0[i] = d.sqrt();
        if i + 1 < n {
            let mut s = sub1[i];
            if i >= 1 {
                s -= l1[i - 1] * l2[i - 1];
            }
            l1[i] = s / l0[i];
        }
        if i + 2 < n {
            l2[i] = sub2[i] / l0[i];
        }
    }

    // Forward substitution L y = rhs.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut v = rhs[i];
        if i >= 1 {
            v -= l1[i - 1] * y[i - 1];
        }
        if i >= 2 {
            v -= l2[i - 2] * y[i - 2];
        }
        y[i] = v / l0[i];
    }

    // Back substitution L' x = y.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = y[i];
        if i + 1 < n {
            v -= l1[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= l2[i] * x[i + 2];
        }
        x[i] = v / l0[i];
    }
    Ok(x)
}

/// Bands of `I + lambda * D'D` for a series of length `n`.
pub(crate) fn hp_bands(n: usize, lambda: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut sub1 = vec![0.0; n - 1];
    let mut sub2 = vec![0.0; n - 2];
    for (i, d) in diag.iter_mut().enumerate() {
        let interior = match i {
            0 => 1.0,
            1 => 5.0,
            _ if i == n - 1 => 1.0,
            _ if i == n - 2 => 5.0,
            _ => 6.0,
        };
        *d = 1.0 + lambda * interior;
    }
    for (i, v) in sub1.iter_mut().enumerate() {
        let edge = i == 0 || i == n - 2;
        *v = lambda * if edge { -2.0 } else { -4.0 };
    }
    for v in sub2.iter_mut() {
        *v = lambda;
    }
    (diag, sub1, sub2)
}

/// Trend extraction on raw values. `lambda > 0`, `values.len() >= 4`.
pub fn hp_trend(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidArg(format!("lambda must be positive, got {lambda}")));
    }
    let (diag, sub1, sub2) = hp_bands(n, lambda);
    solve_pentadiagonal(&diag, &sub1, &sub2, values)
}

/// Splits a complete series into trend and cycle (`cycle = s - trend`).
pub fn hp_filter(s: &TimeSeries, lambda: f64) -> Result<(TimeSeries, TimeSeries)> {
    let values = s.complete_values()?;
    let trend = hp_trend(&values, lambda)?;
    let cycle: Vec<f64> = values.iter().zip(&trend).map(|(v, t)| v - t).collect();
    let trend_series =
        TimeSeries::from_values(format!("{}_TREND", s.name()), s.index().clone(), trend)?;
    let cycle_series =
        TimeSeries::from_values(format!("{}_CYCLE", s.name()), s.index().clone(), cycle)?;
    Ok((trend_series, cycle_series))
}
