//! Granger causality: pairwise F-tests and the all-pairs table.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::exec;
use crate::series::{Dataset, TimeSeries};
use crate::table::{stars, Cell, Table};

/// One direction of a Granger test: the null is "`cause` does not
/// Granger-cause `effect`" (joint nullity of the cross lags).
#[derive(Debug, Clone, Serialize)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub lags: usize,
    pub f: f64,
    pub p_value: f64,
    /// Observations in the test regressions.
    pub n: usize,
}

impl GrangerResult {
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Both feedback directions: `xy` tests x -> y, `yx` tests y -> x, computed
/// on the identical aligned sample.
pub fn granger_pairwise(
    x: &TimeSeries,
    y: &TimeSeries,
    p: usize,
) -> Result<(GrangerResult, GrangerResult)> {
    if p == 0 {
        return Err(Error::InvalidArg("lag order must be >= 1".into()));
    }
    let pair = Dataset::new(vec![x.clone(), y.clone()])?.align(true)?.dataset;
    let xv = pair.series()[0].complete_values()?;
    let yv = pair.series()[1].complete_values()?;
    let xy = granger_direction(&xv, &yv, x.name(), y.name(), p)?;
    let yx = granger_direction(&yv, &xv, y.name(), x.name(), p)?;
    Ok((xy, yx))
}

/// Restricted vs unrestricted RSS comparison:
/// `F = ((RSS_r - RSS_u)/p) / (RSS_u/(n - 2p - 1))` with `n` the regression
/// sample size, referred to `F(p, n - 2p - 1)`.
fn granger_direction(
    cause: &[f64],
    effect: &[f64],
    cause_name: &str,
    effect_name: &str,
    p: usize,
) -> Result<GrangerResult> {
    let total = effect.len();
    if total <= p || total - p <= 2 * p + 1 {
        return Err(Error::TooShort { needed: 3 * p + 2, got: total });
    }
    let n = total - p;
    let df_denominator = n - 2 * p - 1;

    let y = DVector::from_fn(n, |row, _| effect[p + row]);

    // Unrestricted: own lags, cause lags, intercept.
    let mut xu = DMatrix::zeros(n, 2 * p + 1);
    // Restricted: own lags, intercept.
    let mut xr = DMatrix::zeros(n, p + 1);
    for row in 0..n {
        let t = p + row;
        for j in 1..=p {
            xu[(row, j - 1)] = effect[t - j];
            xu[(row, p + j - 1)] = cause[t - j];
            xr[(row, j - 1)] = effect[t - j];
        }
        xu[(row, 2 * p)] = 1.0;
        xr[(row, p)] = 1.0;
    }

    let rss = |x: &DMatrix<f64>| -> Result<f64> {
        let names: Vec<String> = (0..x.ncols()).map(|i| format!("g{i}")).collect();
        let fit = super::multi_ols(x, &DMatrix::from_column_slice(n, 1, y.as_slice()), &names)?;
        Ok(fit.residuals.column(0).iter().map(|e| e * e).sum())
    };
    let rss_u = rss(&xu)?;
    let rss_r = rss(&xr)?;

    let f = ((rss_r - rss_u).max(0.0) / p as f64) / (rss_u / df_denominator as f64);
    let dist = FisherSnedecor::new(p as f64, df_denominator as f64)
        .map_err(|e| Error::Numerical(format!("F distribution: {e}")))?;
    let p_value = 1.0 - dist.cdf(f);

    Ok(GrangerResult {
        cause: cause_name.to_string(),
        effect: effect_name.to_string(),
        lags: p,
        f,
        p_value: p_value.max(f64::MIN_POSITIVE),
        n,
    })
}

/// Both directions of a pair annotated with any per-pair failure.
#[derive(Debug, Clone, Serialize)]
pub struct GrangerEntry {
    pub cause: String,
    pub effect: String,
    pub result: std::result::Result<GrangerResult, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrangerMatrix {
    pub lags: usize,
    /// Two entries per unordered pair, in annex order: (i -> j) then (j -> i).
    pub entries: Vec<GrangerEntry>,
}

impl GrangerMatrix {
    /// Pairs where both directions reject at `alpha`: the feedback loops.
    pub fn feedback_pairs(&self, alpha: f64) -> Vec<(String, String)> {
        let mut loops = Vec::new();
        for chunk in self.entries.chunks(2) {
            if let [a, b] = chunk {
                if let (Ok(ra), Ok(rb)) = (&a.result, &b.result) {
                    if ra.rejects_at(alpha) && rb.rejects_at(alpha) {
                        loops.push((ra.cause.clone(), rb.cause.clone()));
                    }
                }
            }
        }
        loops
    }
}

/// All ordered pairs of the dataset's series. Per-pair errors are recorded on
/// their rows; the matrix is still returned.
pub fn granger_matrix(d: &Dataset, p: usize) -> Result<GrangerMatrix> {
    let k = d.n_series();
    if k < 2 {
        return Err(Error::InvalidArg("granger matrix needs at least 2 series".into()));
    }
    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let computed = exec::map_collect(pairs, |(i, j)| {
        let x = &d.series()[i];
        let y = &d.series()[j];
        (i, j, granger_pairwise(x, y, p))
    });

    let mut entries = Vec::with_capacity(k * (k - 1));
    for (i, j, outcome) in computed {
        let (xn, yn) = (d.series()[i].name().to_string(), d.series()[j].name().to_string());
        match outcome {
            Ok((xy, yx)) => {
                entries.push(GrangerEntry { cause: xn.clone(), effect: yn.clone(), result: Ok(xy) });
                entries.push(GrangerEntry { cause: yn, effect: xn, result: Ok(yx) });
            }
            Err(e) => {
                let msg = e.to_string();
                entries.push(GrangerEntry {
                    cause: xn.clone(),
                    effect: yn.clone(),
                    result: Err(msg.clone()),
                });
                entries.push(GrangerEntry { cause: yn, effect: xn, result: Err(msg) });
            }
        }
    }
    Ok(GrangerMatrix { lags: p, entries })
}

/// Annex-style causality table: two rows per pair with the French null
/// hypothesis wording, observation count on the first row, stars at 10/5/1%.
pub fn granger_table(m: &GrangerMatrix) -> Table {
    let mut t = Table::new(vec![
        "Hypothèse nulle".into(),
        "Obs".into(),
        "F-Statistic".into(),
        "p-value".into(),
    ])
    .with_title("Résultats des tests de causalité")
    .with_decimals(4);
    for (i, entry) in m.entries.iter().enumerate() {
        let label = format!("{} ne cause pas (au sens de granger) {}", entry.cause, entry.effect);
        match &entry.result {
            Ok(r) => {
                let obs = if i % 2 == 0 { Cell::Int(r.n as i64) } else { Cell::Empty };
                t.push_row(vec![
                    Cell::text(label),
                    obs,
                    Cell::Prec(r.f, 5),
                    Cell::marked(Cell::Prec(r.p_value, 4), stars(r.p_value)),
                ]);
            }
            Err(msg) => {
                t.push_row(vec![Cell::text(label), Cell::Empty, Cell::text(msg.clone()), Cell::Empty]);
            }
        }
    }
    t.push_note(format!("Nombre de retards inclus : {}", m.lags));
    t.push_note("*/**/*** : significatif à 10/5/1%");
    t
}
