//! VAR lag-order selection: sequential modified LR plus the FPE, AIC, SC and
//! HQ criteria, all evaluated on a common sample.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::series::Dataset;
use crate::table::{Cell, Table};

use super::multi_ols;

/// Criteria values for one candidate lag order.
#[derive(Debug, Clone, Serialize)]
pub struct LagCriteria {
    pub lag: usize,
    pub loglik: f64,
    /// Modified LR statistic against the previous lag (absent at lag 0).
    pub lr: Option<f64>,
    pub lr_p_value: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagSelection {
    pub rows: Vec<LagCriteria>,
    /// Lag preferred by the sequential modified LR test (0 when no test in
    /// the top-down sweep rejects).
    pub selected_lr: usize,
    pub selected_fpe: usize,
    pub selected_aic: usize,
    pub selected_sc: usize,
    pub selected_hq: usize,
    /// Common estimation sample size.
    pub sample: usize,
    pub alpha: f64,
}

impl LagSelection {
    pub fn selected_by(&self, criterion: &str) -> Option<usize> {
        match criterion.to_ascii_uppercase().as_str() {
            "LR" => Some(self.selected_lr),
            "FPE" => Some(self.selected_fpe),
            "AIC" => Some(self.selected_aic),
            "SC" => Some(self.selected_sc),
            "HQ" => Some(self.selected_hq),
            _ => None,
        }
    }
}

/// Evaluates lags `0..=p_max` on the common sample of `T - p_max` rows.
///
/// Per-observation criteria: `AIC = -2 lnL/T + 2 n/T`, `SC` and `HQ` with
/// `ln T` and `2 ln ln T` penalties (`n` = total estimated parameters);
/// `FPE = ((T + m)/(T - m))^k |Omega|` with `m` regressors per equation and
/// the maximum-likelihood covariance. The modified LR statistic is
/// `(T - m)(ln|Omega_{p-1}| - ln|Omega_p|)` against chi-squared(k²),
/// applied from `p_max` downward at level `alpha`.
pub fn lag_select(d: &Dataset, p_max: usize, alpha: f64) -> Result<LagSelection> {
    let columns = d.complete_columns()?;
    let k = columns.len();
    let t_raw = d.len();
    if t_raw <= p_max || t_raw - p_max <= k * p_max + 1 {
        return Err(Error::TooShort { needed: p_max + k * p_max + 2, got: t_raw });
    }
    let m = t_raw - p_max; // common sample
    let chi2 = ChiSquared::new((k * k) as f64)
        .map_err(|e| Error::Numerical(format!("chi-squared: {e}")))?;

    let mut log_dets = Vec::with_capacity(p_max + 1);
    let mut rows: Vec<LagCriteria> = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let n_eq = k * p + 1;
        let mut z = DMatrix::zeros(m, n_eq);
        let mut ys = DMatrix::zeros(m, k);
        for (row, t) in (p_max..t_raw).enumerate() {
            for v in 0..k {
                ys[(row, v)] = columns[v][t];
            }
            for lag in 1..=p {
                for v in 0..k {
                    z[(row, (lag - 1) * k + v)] = columns[v][t - lag];
                }
            }
            z[(row, n_eq - 1)] = 1.0;
        }
        let names: Vec<String> = (0..n_eq).map(|i| format!("z{i}")).collect();
        let fit = multi_ols(&z, &ys, &names)?;
        let omega_ml = fit.residuals.transpose() * &fit.residuals / m as f64;
        let det = omega_ml.determinant();
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::Numerical(format!(
                "residual covariance is singular at lag {p}"
            )));
        }
        let log_det = det.ln();
        log_dets.push(log_det);

        let tf = m as f64;
        let loglik = -0.5 * tf * (k as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln()) + log_det);
        let n_par = (k * n_eq) as f64;
        let aic = -2.0 * loglik / tf + 2.0 * n_par / tf;
        let sc = -2.0 * loglik / tf + tf.ln() * n_par / tf;
        let hq = -2.0 * loglik / tf + 2.0 * tf.ln().ln() * n_par / tf;
        let fpe = ((tf + n_eq as f64) / (tf - n_eq as f64)).powi(k as i32) * det;

        let (lr, lr_p_value) = if p == 0 {
            (None, None)
        } else {
            let stat = (tf - n_eq as f64) * (log_dets[p - 1] - log_det);
            let pv = 1.0 - chi2.cdf(stat.max(0.0));
            (Some(stat), Some(pv))
        };

        rows.push(LagCriteria { lag: p, loglik, lr, lr_p_value, fpe, aic, sc, hq });
    }

    let argmin = |f: &dyn Fn(&LagCriteria) -> f64| -> usize {
        let mut best = 0usize;
        for (i, row) in rows.iter().enumerate() {
            if f(row) < f(&rows[best]) {
                best = i;
            }
        }
        rows[best].lag
    };
    let selected_fpe = argmin(&|r| r.fpe);
    let selected_aic = argmin(&|r| r.aic);
    let selected_sc = argmin(&|r| r.sc);
    let selected_hq = argmin(&|r| r.hq);

    // Top-down sequential LR at level alpha.
    let mut selected_lr = 0usize;
    for p in (1..=p_max).rev() {
        if rows[p].lr_p_value.is_some_and(|pv| pv < alpha) {
            selected_lr = p;
            break;
        }
    }

    Ok(LagSelection {
        rows,
        selected_lr,
        selected_fpe,
        selected_aic,
        selected_sc,
        selected_hq,
        sample: m,
        alpha,
    })
}

/// Annex-style criteria table with `*` on each criterion's selected lag and
/// the legend block.
pub fn lag_selection_table(s: &LagSelection) -> Table {
    let mut t = Table::new(vec![
        "Lag".into(),
        "LogL".into(),
        "LR".into(),
        "FPE".into(),
        "AIC".into(),
        "SC".into(),
        "HQ".into(),
    ])
    .with_title("Détermination du décalage optimal du processus VAR");
    let mark = |cell: Cell, starred: bool| -> Cell {
        if starred {
            Cell::marked(cell, "*")
        } else {
            cell
        }
    };
    for row in &s.rows {
        t.push_row(vec![
            Cell::Int(row.lag as i64),
            Cell::Prec(row.loglik, 4),
            match row.lr {
                Some(lr) => {
                    mark(Cell::Prec(lr, 4), row.lag == s.selected_lr && s.selected_lr > 0)
                }
                None => Cell::text("NA"),
            },
            mark(Cell::Sci(row.fpe), row.lag == s.selected_fpe),
            mark(Cell::Prec(row.aic, 4), row.lag == s.selected_aic),
            mark(Cell::Prec(row.sc, 4), row.lag == s.selected_sc),
            mark(Cell::Prec(row.hq, 4), row.lag == s.selected_hq),
        ]);
    }
    t.push_note("* indicates lag order selected by the criterion");
    t.push_note(format!(
        "LR: sequential modified LR test statistic (each test at {:.0}% level)",
        s.alpha * 100.0
    ));
    t.push_note("FPE: Final prediction error");
    t.push_note("AIC: Akaike information criterion");
    t.push_note("SC: Schwarz information criterion");
    t.push_note("HQ: Hannan-Quinn information criterion");
    t
}
