//! Vector autoregression: estimation, lag-order selection, stability and
//! serial-correlation diagnostics, Granger causality, the moving-average
//! expansion and Cholesky forecast-error variance decomposition.

mod diagnostics;
mod fevd;
mod granger;
mod lagsel;

pub use diagnostics::{companion_matrix, companion_roots, lm_serial_test, lm_table, LmRow, LmSerialTest};
pub use fevd::{cholesky_factor, fevd, fevd_table, vma_coefficients, FevdTable};
pub use granger::{granger_matrix, granger_pairwise, granger_table, GrangerEntry, GrangerMatrix, GrangerResult};
pub use lagsel::{lag_select, lag_selection_table, LagCriteria, LagSelection};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::Dataset;
use crate::table::{Cell, Table};

/// Multi-response least squares on a shared design, with rank checking.
pub(crate) struct MultiOls {
    /// Coefficients, one column per response.
    pub b: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    /// `(Z'Z)^-1`, for standard errors.
    pub zz_inv: DMatrix<f64>,
}

pub(crate) fn multi_ols(z: &DMatrix<f64>, ys: &DMatrix<f64>, names: &[String]) -> Result<MultiOls> {
    let n = z.nrows();
    let k = z.ncols();
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }
    let qr = z.clone().col_piv_qr();
    let r = qr.r();
    let permutation: Vec<usize> = {
        let mut probe = DMatrix::<f64>::zeros(1, k);
        for j in 0..k {
            probe[(0, j)] = j as f64;
        }
        qr.p().permute_columns(&mut probe);
        (0..k).map(|j| probe[(0, j)] as usize).collect()
    };
    let r_diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let r_max = r_diag.iter().cloned().fold(0.0f64, f64::max);
    if let Some(bad) = (0..k).find(|&i| r_max == 0.0 || r_diag[i] < 1e-12 * r_max) {
        let name = names
            .get(permutation[bad])
            .cloned()
            .unwrap_or_else(|| format!("column {}", permutation[bad]));
        return Err(Error::RankDeficient { column: name });
    }

    let qty = qr.q().transpose() * ys;
    let c = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let mut b = DMatrix::zeros(k, ys.ncols());
    for i in 0..k {
        for j in 0..ys.ncols() {
            b[(permutation[i], j)] = c[(i, j)];
        }
    }

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Numerical("triangular inversion failed".into()))?;
    let rtr_inv = &r_inv * r_inv.transpose();
    let mut zz_inv = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            zz_inv[(permutation[i], permutation[j])] = rtr_inv[(i, j)];
        }
    }

    let residuals = ys - z * &b;
    Ok(MultiOls { b, residuals, zz_inv })
}

/// An estimated VAR(p).
///
/// Coefficient layout: `coefs[j-1]` is the k-by-k matrix on lag `j`, with
/// entry `(r, c)` the effect of variable `c` lagged `j` on variable `r`.
/// `omega` is the residual covariance with the degrees-of-freedom-adjusted
/// divisor `(T - p) - (k p + 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct VarModel {
    pub names: Vec<String>,
    pub k: usize,
    pub p: usize,
    pub intercept: DVector<f64>,
    pub coefs: Vec<DMatrix<f64>>,
    pub omega: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    /// Raw sample length before lag trimming.
    pub t_raw: usize,
    /// Stacked parameter matrix, `(k p + 1)` rows by `k` columns
    /// (lag blocks then intercept), with matching standard errors.
    pub bmat: DMatrix<f64>,
    pub bmat_se: DMatrix<f64>,
    /// Estimation design (lag blocks then intercept), kept for residual
    /// diagnostics.
    #[serde(skip)]
    pub design: DMatrix<f64>,
}

impl VarModel {
    /// Builds a model directly from parameters (no estimation), for
    /// scenario analysis and simulation-based checks. The residual block is
    /// empty; diagnostics that need residuals will reject it.
    pub fn from_parameters(
        names: Vec<String>,
        intercept: DVector<f64>,
        coefs: Vec<DMatrix<f64>>,
        omega: DMatrix<f64>,
    ) -> Result<VarModel> {
        let k = names.len();
        let p = coefs.len();
        if intercept.len() != k || omega.nrows() != k || omega.ncols() != k {
            return Err(Error::InvalidArg("parameter dimensions disagree".into()));
        }
        if coefs.iter().any(|a| a.nrows() != k || a.ncols() != k) {
            return Err(Error::InvalidArg("coefficient matrices must be k-by-k".into()));
        }
        let n_eq = k * p + 1;
        let mut bmat = DMatrix::zeros(n_eq, k);
        for (j, a) in coefs.iter().enumerate() {
            for r in 0..k {
                for c in 0..k {
                    bmat[(j * k + c, r)] = a[(r, c)];
                }
            }
        }
        for r in 0..k {
            bmat[(n_eq - 1, r)] = intercept[r];
        }
        Ok(VarModel {
            names,
            k,
            p,
            intercept,
            coefs,
            omega,
            residuals: DMatrix::zeros(0, k),
            t_raw: p + n_eq + 1,
            bmat: bmat.clone(),
            bmat_se: DMatrix::from_element(n_eq, k, f64::NAN),
            design: DMatrix::zeros(0, n_eq),
        })
    }

    /// Observations entering the estimation.
    pub fn n_used(&self) -> usize {
        self.t_raw - self.p
    }

    /// Name of design row `i` (lag blocks then intercept).
    pub fn regressor_name(&self, i: usize) -> String {
        if i == self.k * self.p {
            "C".to_string()
        } else {
            let lag = i / self.k + 1;
            let var = i % self.k;
            format!("{}(-{lag})", self.names[var])
        }
    }

    /// EViews-style coefficient table: per regressor a coefficient row, a
    /// standard-error row in parentheses and a t-ratio row in brackets.
    pub fn to_table(&self) -> Table {
        let mut columns = vec!["".to_string()];
        columns.extend(self.names.iter().cloned());
        let mut t = Table::new(columns)
            .with_title(format!("Estimation VAR({})", self.p))
            .with_decimals(4);
        for row in 0..self.k * self.p + 1 {
            let mut coef_row = vec![Cell::text(self.regressor_name(row))];
            let mut se_row = vec![Cell::Empty];
            let mut t_row = vec![Cell::Empty];
            for eq in 0..self.k {
                let b = self.bmat[(row, eq)];
                let se = self.bmat_se[(row, eq)];
                coef_row.push(Cell::Num(b));
                se_row.push(Cell::text(format!("({se:.4})")));
                t_row.push(Cell::text(format!("[{:.4}]", b / se)));
            }
            t.push_row(coef_row);
            t.push_row(se_row);
            t.push_row(t_row);
        }
        t.push_note(format!(
            "Échantillon : {} observations, {} équations",
            self.n_used(),
            self.k
        ));
        t
    }
}

/// Per-equation OLS estimation of a VAR(p) on a complete dataset.
pub fn var_estimate(d: &Dataset, p: usize) -> Result<VarModel> {
    let columns = d.complete_columns()?;
    let names = d.names();
    var_estimate_values(&columns, names, p, d.len())
}

pub(crate) fn var_estimate_values(
    columns: &[Vec<f64>],
    names: Vec<String>,
    p: usize,
    t_raw: usize,
) -> Result<VarModel> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::InvalidArg("VAR needs at least one variable".into()));
    }
    let n_eq = k * p + 1;
    if t_raw <= p || t_raw - p <= n_eq {
        return Err(Error::TooShort { needed: p + n_eq + 1, got: t_raw });
    }
    let m = t_raw - p;

    let mut z = DMatrix::zeros(m, n_eq);
    let mut ys = DMatrix::zeros(m, k);
    for (row, t) in (p..t_raw).enumerate() {
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

    let mut reg_names: Vec<String> = Vec::with_capacity(n_eq);
    for lag in 1..=p {
        for name in &names {
            reg_names.push(format!("{name}(-{lag})"));
        }
    }
    reg_names.push("C".into());

    let fit = multi_ols(&z, &ys, &reg_names)?;

    let df = m - n_eq;
    let omega = fit.residuals.transpose() * &fit.residuals / df as f64;

    let mut bmat_se = DMatrix::zeros(n_eq, k);
    for eq in 0..k {
        let rss: f64 = fit.residuals.column(eq).iter().map(|e| e * e).sum();
        let sigma2 = rss / df as f64;
        for row in 0..n_eq {
            bmat_se[(row, eq)] = (sigma2 * fit.zz_inv[(row, row)]).sqrt();
        }
    }

    let mut coefs = Vec::with_capacity(p);
    for lag in 0..p {
        let mut a = DMatrix::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                a[(r, c)] = fit.b[(lag * k + c, r)];
            }
        }
        coefs.push(a);
    }
    let intercept = DVector::from_fn(k, |r, _| fit.b[(n_eq - 1, r)]);

    Ok(VarModel {
        names,
        k,
        p,
        intercept,
        coefs,
        omega,
        residuals: fit.residuals,
        t_raw,
        bmat: fit.b,
        bmat_se,
        design: z,
    })
}

/// Simulates a VAR path of `steps` observations after a burn-in, innovations
/// `eps = shock_chol * eta` with standard-normal `eta`.
pub fn simulate_var(
    intercept: &DVector<f64>,
    coefs: &[DMatrix<f64>],
    shock_chol: &DMatrix<f64>,
    steps: usize,
    burnin: usize,
    rng: &mut impl Rng,
) -> DMatrix<f64> {
    let k = intercept.len();
    let p = coefs.len();
    let total = steps + burnin;
    let mut history: Vec<DVector<f64>> = vec![DVector::zeros(k); p.max(1)];
    let mut out = DMatrix::zeros(steps, k);
    for t in 0..total {
        let eta = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut y = intercept + shock_chol * eta;
        for (j, a) in coefs.iter().enumerate() {
            y += a * &history[j];
        }
        if t >= burnin {
            for v in 0..k {
                out[(t - burnin, v)] = y[v];
            }
        }
        history.rotate_right(1);
        if !history.is_empty() {
            history[0] = y;
        }
    }
    out
}

/// Draws a random VAR(p) whose companion spectral radius equals
/// `spectral_radius`, with a random well-conditioned innovation covariance.
pub fn random_stable_var(
    k: usize,
    p: usize,
    spectral_radius: f64,
    rng: &mut impl Rng,
) -> (DVector<f64>, Vec<DMatrix<f64>>, DMatrix<f64>) {
    let mut coefs: Vec<DMatrix<f64>> = (0..p)
        .map(|_| DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal) / k as f64))
        .collect();
    let radius = companion_spectral_radius(&coefs, k, p);
    if radius > 0.0 {
        // Scaling lag j by c^j scales every companion root by c.
        let c = spectral_radius / radius;
        for (j, a) in coefs.iter_mut().enumerate() {
            *a *= c.powi(j as i32 + 1);
        }
    }
    let m = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let omega = &m * m.transpose() + DMatrix::identity(k, k) * 0.2;
    let intercept = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal) * 0.1);
    (intercept, coefs, omega)
}

fn companion_spectral_radius(coefs: &[DMatrix<f64>], k: usize, p: usize) -> f64 {
    if p == 0 {
        return 0.0;
    }
    let c = companion_matrix(coefs, k, p);
    c.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// Turns a simulated matrix into a [`Dataset`] with a synthetic monthly index.
pub fn matrix_to_dataset(data: &DMatrix<f64>, names: &[String]) -> Result<Dataset> {
    use crate::series::{Frequency, Period, TimeIndex, TimeSeries};
    let start = Period::new(Frequency::Monthly, 2005, 0)?;
    let index = TimeIndex::new(start, data.nrows())?;
    let series = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            TimeSeries::from_values(name, index.clone(), data.column(j).iter().copied().collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}
