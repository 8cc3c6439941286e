//! Model stability (inverse AR roots) and residual serial-correlation tests.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::table::{Cell, Table};

use super::{multi_ols, VarModel};

/// Companion form of the lag polynomial: `k p` by `k p`.
pub fn companion_matrix(coefs: &[DMatrix<f64>], k: usize, p: usize) -> DMatrix<f64> {
    let dim = k * p;
    let mut c = DMatrix::zeros(dim, dim);
    for (j, a) in coefs.iter().enumerate() {
        for r in 0..k {
            for col in 0..k {
                c[(r, j * k + col)] = a[(r, col)];
            }
        }
    }
    for j in 1..p {
        for r in 0..k {
            c[(j * k + r, (j - 1) * k + r)] = 1.0;
        }
    }
    c
}

/// Eigenvalues of the companion matrix, sorted by modulus (largest first),
/// and the stability verdict (all moduli strictly inside the unit circle).
pub fn companion_roots(model: &VarModel) -> (Vec<Complex<f64>>, bool) {
    if model.p == 0 {
        return (Vec::new(), true);
    }
    let c = companion_matrix(&model.coefs, model.k, model.p);
    let mut roots: Vec<Complex<f64>> = c.complex_eigenvalues().iter().copied().collect();
    roots.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    let stable = roots.iter().all(|r| r.norm() < 1.0);
    (roots, stable)
}

/// One lag order of the serial-correlation LM test.
#[derive(Debug, Clone, Serialize)]
pub struct LmRow {
    pub lag: usize,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub df: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LmSerialTest {
    pub rows: Vec<LmRow>,
}

/// Multivariate Breusch-Godfrey LM test against serial correlation at each
/// lag order `1..=max_lag`: auxiliary regression of the residuals on the
/// original regressors plus the lag-h residuals (initial values padded with
/// zeros), `LM = T (k - tr(S^-1 S_aux))`, chi-squared with `k^2` degrees of
/// freedom. A lag whose auxiliary regression cannot be run is reported with
/// its error while the other lags still are.
pub fn lm_serial_test(model: &VarModel, max_lag: usize) -> Result<LmSerialTest> {
    if max_lag == 0 {
        return Err(Error::InvalidArg("max_lag must be >= 1".into()));
    }
    let k = model.k;
    let m = model.n_used();
    let e = &model.residuals;
    let n_eq = model.design.ncols();

    let s0 = e.transpose() * e / m as f64;
    let s0_inv = s0
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular residual covariance".into()))?;
    let chi2 = ChiSquared::new((k * k) as f64)
        .map_err(|err| Error::Numerical(format!("chi-squared: {err}")))?;

    let mut rows = Vec::with_capacity(max_lag);
    for h in 1..=max_lag {
        rows.push(lm_at_lag(model, &s0_inv, &chi2, h, m, k, n_eq));
    }
    Ok(LmSerialTest { rows })
}

fn lm_at_lag(
    model: &VarModel,
    s0_inv: &DMatrix<f64>,
    chi2: &ChiSquared,
    h: usize,
    m: usize,
    k: usize,
    n_eq: usize,
) -> LmRow {
    let df = k * k;
    let aux_cols = n_eq + k;
    if m <= aux_cols {
        return LmRow {
            lag: h,
            statistic: None,
            p_value: None,
            df,
            error: Some(Error::TooShort { needed: aux_cols + 1, got: m }.to_string()),
        };
    }

    // [original design | residuals lagged h, zero-padded]
    let mut z = DMatrix::zeros(m, aux_cols);
    z.view_mut((0, 0), (m, n_eq)).copy_from(&model.design);
    for row in h..m {
        for v in 0..k {
            z[(row, n_eq + v)] = model.residuals[(row - h, v)];
        }
    }
    let names: Vec<String> = (0..aux_cols).map(|i| format!("aux{i}")).collect();
    match multi_ols(&z, &model.residuals, &names) {
        Ok(fit) => {
            let s_aux = fit.residuals.transpose() * &fit.residuals / m as f64;
            let lm = m as f64 * (k as f64 - (s0_inv * s_aux).trace());
            let p_value = 1.0 - chi2.cdf(lm.max(0.0));
            LmRow { lag: h, statistic: Some(lm), p_value: Some(p_value), df, error: None }
        }
        Err(err) => LmRow { lag: h, statistic: None, p_value: None, df, error: Some(err.to_string()) },
    }
}

/// Lags | LM-Stat | Prob table.
pub fn lm_table(test: &LmSerialTest) -> Table {
    let mut t = Table::new(vec!["Lags".into(), "LM-Stat".into(), "Prob".into()])
        .with_title("VAR Residual Serial Correlation LM Tests")
        .with_decimals(4);
    for row in &test.rows {
        match (row.statistic, row.p_value) {
            (Some(stat), Some(p)) => t.push_row(vec![
                Cell::Int(row.lag as i64),
                Cell::Prec(stat, 5),
                Cell::Prec(p, 4),
            ]),
            _ => t.push_row(vec![
                Cell::Int(row.lag as i64),
                Cell::text(row.error.clone().unwrap_or_default()),
                Cell::Empty,
            ]),
        }
    }
    t.push_note("Null Hypothesis: no serial correlation at lag order h");
    t
}
