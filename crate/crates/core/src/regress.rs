//! OLS engine (column-pivoted QR) and the dynamic regression applications:
//! lagged-dependent-variable regressions with a stability check, the
//! Feldstein-Horioka capital-mobility regression and the absolute
//! financial-size regression.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{Dataset, TimeSeries};
use crate::stats::{student_critical, student_p_value};
use crate::table::{stars, Cell, Table};

/// Name used for the intercept column.
pub const INTERCEPT: &str = "C";

/// Reciprocal-condition threshold below which the design is declared rank
/// deficient.
const RCOND_TOL: f64 = 1e-12;

/// A fitted least-squares regression.
///
/// `r_squared` follows the centered definition (explained over total
/// variation around the mean); with an intercept it lies in `[0, 1]`, without
/// one it can leave that range.
#[derive(Debug, Clone, Serialize)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coef: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub rss: f64,
    pub residuals: Vec<f64>,
    /// Observations used.
    pub n: usize,
    /// Regressors counted including the intercept when present.
    pub k: usize,
    pub has_intercept: bool,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Result<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coef[i])
            .ok_or_else(|| Error::UnknownSeries(name.to_string()))
    }

    /// Coefficient table: estimate with significance stars, standard error,
    /// t statistic and two-sided p-value.
    pub fn to_table(&self, title: &str) -> Table {
        let mut table = Table::new(vec![
            "Variable".into(),
            "Estimate".into(),
            "Std. Error".into(),
            "t-Statistic".into(),
            "p-value".into(),
        ])
        .with_title(title);
        for i in 0..self.names.len() {
            table.push_row(vec![
                Cell::text(&self.names[i]),
                Cell::marked(Cell::Prec(self.coef[i], 4), stars(self.p_values[i])),
                Cell::Prec(self.se[i], 4),
                Cell::Prec(self.t[i], 4),
                Cell::Prec(self.p_values[i], 4),
            ]);
        }
        table.push_note(format!(
            "R² = {:.4}   R² ajusté = {:.4}   n = {} observations",
            self.r_squared, self.adj_r_squared, self.n
        ));
        table.push_note("*/**/*** : significatif à 10/5/1%");
        table
    }
}

/// Least squares of `y` on the columns of `x` (already including any
/// intercept column). Standard errors from `sigma^2 (X'X)^-1` with
/// `sigma^2 = RSS/(n-k)`; p-values from Student t with `n - k` degrees of
/// freedom.
pub fn ols_matrix(
    y: &DVector<f64>,
    x: &DMatrix<f64>,
    names: Vec<String>,
    has_intercept: bool,
) -> Result<OlsFit> {
    let n = x.nrows();
    let k = x.ncols();
    debug_assert_eq!(names.len(), k);
    if y.len() != n {
        return Err(Error::LengthMismatch { values: y.len(), index: n });
    }
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }

    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let permutation: Vec<usize> = {
        // Recover the column permutation by tracking where each index lands.
        let mut probe = DMatrix::<f64>::zeros(1, k);
        for j in 0..k {
            probe[(0, j)] = j as f64;
        }
        qr.p().permute_columns(&mut probe);
        (0..k).map(|j| probe[(0, j)] as usize).collect()
    };

    // Pivoted |R| diagonal is non-increasing; rcond estimate from its range.
    let r_diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let r_max = r_diag.iter().cloned().fold(0.0f64, f64::max);
    if r_max == 0.0 {
        return Err(Error::RankDeficient { column: names[permutation[0]].clone() });
    }
    if let Some(bad) = (0..k).find(|&i| r_diag[i] < RCOND_TOL * r_max) {
        return Err(Error::RankDeficient { column: names[permutation[bad]].clone() });
    }

    // X P = Q R  =>  coefficients in pivot order are R^-1 Q' y.
    let qty = qr.q().transpose() * y;
    let c = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let mut coef = vec![0.0; k];
    for i in 0..k {
        coef[permutation[i]] = c[i];
    }

    let fitted = x * DVector::from_column_slice(&coef);
    let residuals: Vec<f64> = (y - &fitted).iter().copied().collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();

    // (X'X)^-1 = P (R'R)^-1 P'.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Numerical("triangular inversion failed".into()))?;
    let rtr_inv = &r_inv * r_inv.transpose();
    let sigma2 = rss / (n - k) as f64;
    let mut se = vec![0.0; k];
    for i in 0..k {
        se[permutation[i]] = (sigma2 * rtr_inv[(i, i)]).sqrt();
    }

    let t: Vec<f64> = coef.iter().zip(&se).map(|(b, s)| b / s).collect();
    let p_values = t
        .iter()
        .map(|&ti| student_p_value(ti, n - k))
        .collect::<Result<Vec<f64>>>()?;

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { f64::NAN };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / (n - k) as f64;

    Ok(OlsFit {
        names,
        coef,
        se,
        t,
        p_values,
        r_squared,
        adj_r_squared,
        rss,
        residuals,
        n,
        k,
        has_intercept,
    })
}

/// Builds the design matrix from a dataset (intercept appended last when
/// requested) after aligning `y` and the regressors on their common complete
/// span.
pub fn ols(y: &TimeSeries, x: &Dataset, intercept: bool) -> Result<OlsFit> {
    let mut series = vec![y.clone()];
    series.extend(x.series().iter().cloned());
    let aligned = Dataset::new(series)?.align(true)?.dataset;
    let cols = aligned.complete_columns()?;
    let n = aligned.len();
    let k_x = cols.len() - 1;

    let yv = DVector::from_column_slice(&cols[0]);
    let k = k_x + intercept as usize;
    let mut xm = DMatrix::zeros(n, k);
    let mut names = Vec::with_capacity(k);
    for (j, col) in cols[1..].iter().enumerate() {
        for t in 0..n {
            xm[(t, j)] = col[t];
        }
        names.push(aligned.series()[j + 1].name().to_string());
    }
    if intercept {
        for t in 0..n {
            xm[(t, k_x)] = 1.0;
        }
        names.push(INTERCEPT.to_string());
    }
    ols_matrix(&yv, &xm, names, intercept)
}

/// Fit of a regression that includes the lagged dependent variable.
#[derive(Debug, Clone, Serialize)]
pub struct DynamicFit {
    pub fit: OlsFit,
    /// Coefficient on the lagged dependent variable.
    pub gamma2: f64,
    /// `|gamma2| < 1`.
    pub stable: bool,
    pub warnings: Vec<String>,
}

impl DynamicFit {
    pub fn to_table(&self, title: &str) -> Table {
        let mut table = self.fit.to_table(title);
        if self.stable {
            table.push_note(format!("Stabilité : |γ₂| = {:.4} < 1", self.gamma2.abs()));
        } else {
            table.push_note(format!(
                "STABILITY WARNING : |γ₂| = {:.4} >= 1, solution explosive",
                self.gamma2.abs()
            ));
        }
        for w in &self.warnings {
            table.push_note(w.clone());
        }
        table
    }
}

/// Regresses `y` on the regressors in `x` plus `y` lagged once (plus an
/// intercept) and checks the `|gamma2| < 1` stability condition.
pub fn dynamic_regression(y: &TimeSeries, x: &Dataset) -> Result<DynamicFit> {
    dynamic_regression_opts(y, x, true)
}

fn dynamic_regression_opts(y: &TimeSeries, x: &Dataset, intercept: bool) -> Result<DynamicFit> {
    let lagged = y.lag(1)?;
    let lag_name = lagged.name().to_string();
    let with_lag = x.with_series(lagged)?;
    let fit = ols(y, &with_lag, intercept)?;
    let gamma2 = fit.coefficient(&lag_name)?;
    Ok(DynamicFit {
        fit,
        gamma2,
        stable: gamma2.abs() < 1.0,
        warnings: vec![
            "Note : la variable dépendante retardée est corrélée avec l'erreur retardée ; \
             les estimateurs OLS sont biaisés en petit échantillon."
                .into(),
        ],
    })
}

/// Feldstein-Horioka regression of the investment rate on the saving rate
/// and the lagged investment rate.
#[derive(Debug, Clone, Serialize)]
pub struct FhFit {
    pub fit: DynamicFit,
    /// Saving-retention coefficient (slope on the saving rate).
    pub retention: f64,
    /// `1 - retention`: share of investment financed by foreign saving.
    pub foreign_share: f64,
}

impl FhFit {
    /// Short verdict on capital mobility implied by the retention
    /// coefficient: near 1 means saving stays home (low mobility), near 0
    /// means investment is financed abroad (high mobility).
    pub fn mobility(&self) -> &'static str {
        if self.retention >= 2.0 / 3.0 {
            "faible mobilité des capitaux"
        } else if self.retention <= 1.0 / 3.0 {
            "forte mobilité des capitaux"
        } else {
            "mobilité des capitaux modérée"
        }
    }

    pub fn interpretation(&self) -> String {
        format!(
            "rétention = {:.2} : {:.0}% de l'investissement financé par l'épargne intérieure, \
             {:.0}% par l'épargne étrangère ({})",
            self.retention,
            self.retention * 100.0,
            self.foreign_share * 100.0,
            self.mobility()
        )
    }

    /// Fitted equation with two-sided p-values in parentheses underneath,
    /// the compact layout used for saving-retention results.
    pub fn equation_summary(&self) -> String {
        let fit = &self.fit.fit;
        let lhs = "I/PIB = ";
        let mut coef_line = lhs.to_string();
        let mut p_line = " ".repeat(lhs.len());
        for i in 0..fit.names.len() {
            let term = if fit.names[i] == INTERCEPT {
                format!("{:.2}", fit.coef[i])
            } else {
                format!("{:.2} {}", fit.coef[i], fit.names[i])
            };
            let p = format!("({:.2})", fit.p_values[i]);
            let width = term.len().max(p.len());
            if i > 0 {
                coef_line.push_str(" + ");
                p_line.push_str("   ");
            }
            coef_line.push_str(&format!("{term:width$}"));
            p_line.push_str(&format!("{p:width$}"));
        }
        format!("{coef_line}\n{p_line}\n() sont les valeurs-p")
    }

    pub fn to_table(&self) -> Table {
        let mut table = self.fit.to_table("Test du degré de mobilité des capitaux");
        table.push_note(self.equation_summary());
        table.push_note(self.interpretation());
        table
    }
}

/// Estimates `I/GDP_t = b0 + b1 S/GDP_t + b2 I/GDP_{t-1}`; `b0` only when
/// `include_intercept`. Both rates are expected in percent of GDP.
pub fn feldstein_horioka(
    inv_rate: &TimeSeries,
    sav_rate: &TimeSeries,
    include_intercept: bool,
) -> Result<FhFit> {
    let x = Dataset::new(vec![sav_rate.clone()])?;
    let fit = dynamic_regression_opts(inv_rate, &x, include_intercept)?;
    let retention = fit.fit.coefficient(sav_rate.name())?;
    Ok(FhFit { fit, retention, foreign_share: 1.0 - retention })
}

/// Absolute financial size: regression of real GDP per capita on private
/// credit, financial depth and its own lag. The adjusted R² is the headline
/// statistic.
pub fn absolute_size(
    y_percap: &TimeSeries,
    credit_gdp: &TimeSeries,
    depth: &TimeSeries,
) -> Result<OlsFit> {
    let lagged = y_percap.lag(1)?;
    let x = Dataset::new(vec![credit_gdp.clone(), depth.clone(), lagged])?;
    ols(y_percap, &x, true)
}

/// 95% confidence half-width for a fitted coefficient.
pub fn confidence_half_width(fit: &OlsFit, name: &str, alpha: f64) -> Result<f64> {
    let i = fit
        .names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownSeries(name.to_string()))?;
    Ok(student_critical(alpha, fit.n - fit.k)? * fit.se[i])
}
