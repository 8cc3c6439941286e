//! Augmented Dickey-Fuller unit-root testing and integration-order
//! determination.
//!
//! The test regresses the first difference on the lagged level, lagged
//! differences and deterministic terms; the statistic is the t-ratio on the
//! lagged level and is compared against response-surface critical values
//! (MacKinnon-style polynomials in 1/T), left-tailed.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regress::ols_matrix;
use crate::series::TimeSeries;
use crate::table::{Cell, Table};

/// Deterministic terms included in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

impl std::str::FromStr for Deterministic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "n" => Ok(Deterministic::None),
            "constant" | "c" => Ok(Deterministic::Constant),
            "constant-trend" | "ct" | "trend" => Ok(Deterministic::ConstantTrend),
            other => Err(Error::InvalidArg(format!("unknown deterministic spec {other:?}"))),
        }
    }
}

/// Lag-order choice for the augmented terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagSpec {
    Fixed(usize),
    /// Minimize AIC over `0..=floor(12 (T/100)^(1/4))` on a common sample.
    Auto,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

// Response-surface coefficients cv = b0 + b1/T + b2/T^2 + b3/T^3 at the
// 1/5/10% levels for each deterministic case (MacKinnon 2010, one variable).
const CV_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const CV_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const CV_CONSTANT_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// Critical values for a regression with `nobs` observations.
pub fn critical_values(deterministic: Deterministic, nobs: usize) -> CriticalValues {
    let table = match deterministic {
        Deterministic::None => &CV_NONE,
        Deterministic::Constant => &CV_CONSTANT,
        Deterministic::ConstantTrend => &CV_CONSTANT_TREND,
    };
    let t = nobs as f64;
    let eval = |b: &[f64; 4]| b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
    CriticalValues { one: eval(&table[0]), five: eval(&table[1]), ten: eval(&table[2]) }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdfResult {
    /// t-ratio on the lagged level.
    pub statistic: f64,
    pub critical_values: CriticalValues,
    pub deterministic: Deterministic,
    /// Augmentation lags used.
    pub lags: usize,
    /// Observations in the test regression.
    pub nobs: usize,
    /// Left-tailed rejection at 5%: `statistic < critical_values.five`.
    pub reject_unit_root: bool,
}

/// Left-tailed rejection rule shared by every reporting path.
pub fn adf_decision(statistic: f64, critical_5pct: f64) -> bool {
    statistic < critical_5pct
}

/// Schwert's rule for the largest candidate lag.
pub fn schwert_max_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

struct AdfFit {
    statistic: f64,
    nobs: usize,
    rss: f64,
    n_params: usize,
}

/// Fits the test regression with `lags` augmentation terms. When
/// `trim_to` is given the sample starts there instead of `lags + 1`
/// (used to compare lag orders on a common sample).
fn fit_adf(
    y: &[f64],
    lags: usize,
    deterministic: Deterministic,
    trim_to: Option<usize>,
) -> Result<AdfFit> {
    let n = y.len();
    let first = trim_to.unwrap_or(lags + 1);
    debug_assert!(first > lags);
    if n <= first {
        return Err(Error::TooShort { needed: first + 1, got: n });
    }
    let m = n - first;
    let det_cols = match deterministic {
        Deterministic::None => 0,
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    let k = 1 + lags + det_cols;
    if m <= k {
        return Err(Error::TooShort { needed: first + k + 1, got: n });
    }

    let mut x = DMatrix::zeros(m, k);
    let mut rhs = DVector::zeros(m);
    for (row, t) in (first..n).enumerate() {
        rhs[row] = y[t] - y[t - 1];
        x[(row, 0)] = y[t - 1];
        for j in 1..=lags {
            x[(row, j)] = y[t - j] - y[t - j - 1];
        }
        match deterministic {
            Deterministic::None => {}
            Deterministic::Constant => x[(row, k - 1)] = 1.0,
            Deterministic::ConstantTrend => {
                x[(row, k - 2)] = 1.0;
                x[(row, k - 1)] = (row + 1) as f64;
            }
        }
    }
    let mut names = vec!["level".to_string()];
    for j in 1..=lags {
        names.push(format!("dlag{j}"));
    }
    if det_cols >= 1 {
        names.push("const".into());
    }
    if det_cols == 2 {
        names.push("trend".into());
    }
    let fit = ols_matrix(&rhs, &x, names, det_cols >= 1)?;
    Ok(AdfFit { statistic: fit.t[0], nobs: m, rss: fit.rss, n_params: k })
}

/// Augmented Dickey-Fuller test on a complete series of raw values.
pub fn adf_test(values: &[f64], deterministic: Deterministic, lags: LagSpec) -> Result<AdfResult> {
    let n = values.len();
    let fixed_needed = match lags {
        LagSpec::Fixed(d) => d,
        LagSpec::Auto => 0,
    };
    if n < 20 + fixed_needed {
        return Err(Error::TooShort { needed: 20 + fixed_needed, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if values.iter().all(|v| (v - mean).abs() < 1e-300) {
        return Err(Error::ZeroVariance("adf input".into()));
    }

    let chosen = match lags {
        LagSpec::Fixed(d) => d,
        LagSpec::Auto => {
            let max_lag = schwert_max_lags(n).min(n.saturating_sub(20));
            let common_first = max_lag + 1;
            let mut best = (0usize, f64::INFINITY);
            for d in 0..=max_lag {
                let fit = fit_adf(values, d, deterministic, Some(common_first))?;
                let m = fit.nobs as f64;
                let aic = (fit.rss / m).ln() + 2.0 * fit.n_params as f64 / m;
                if aic < best.1 {
                    best = (d, aic);
                }
            }
            best.0
        }
    };

    let fit = fit_adf(values, chosen, deterministic, None)?;
    let critical = critical_values(deterministic, fit.nobs);
    Ok(AdfResult {
        statistic: fit.statistic,
        critical_values: critical,
        deterministic,
        lags: chosen,
        nobs: fit.nobs,
        reject_unit_root: fit.statistic < critical.five,
    })
}

/// Series-level wrapper for [`adf_test`]; the series must be complete.
pub fn adf_test_series(
    s: &TimeSeries,
    deterministic: Deterministic,
    lags: LagSpec,
) -> Result<AdfResult> {
    adf_test(&s.complete_values()?, deterministic, lags)
}

/// Outcome of successive ADF tests on a series and its differences.
#[derive(Debug, Clone, Serialize)]
pub struct IntegrationOrder {
    pub name: String,
    /// First differencing depth at which the unit root is rejected; `None`
    /// when no rejection occurs through `max_d`.
    pub order: Option<usize>,
    pub max_d: usize,
    /// Test at depth `d` is `tests[d]`.
    pub tests: Vec<AdfResult>,
}

impl IntegrationOrder {
    pub fn order_label(&self) -> String {
        match self.order {
            Some(d) => format!("I({d})"),
            None => format!("> {}", self.max_d),
        }
    }

    /// The annex-style decision label: a series whose order was determined is
    /// reported "Stationnaire" (meaning stationary after that many
    /// differences).
    pub fn decision_label(&self) -> &'static str {
        if self.order.is_some() {
            "Stationnaire"
        } else {
            "Non stationnaire"
        }
    }
}

/// Tests the level and successive differences until rejection or `max_d`.
pub fn integration_order(
    s: &TimeSeries,
    max_d: usize,
    deterministic: Deterministic,
    lags: LagSpec,
) -> Result<IntegrationOrder> {
    let mut current = s.complete_values()?;
    let mut tests = Vec::new();
    let mut order = None;
    for d in 0..=max_d {
        let result = adf_test(&current, deterministic, lags)?;
        let reject = result.reject_unit_root;
        tests.push(result);
        if reject {
            order = Some(d);
            break;
        }
        if d < max_d {
            current = current.windows(2).map(|w| w[1] - w[0]).collect();
        }
    }
    Ok(IntegrationOrder { name: s.name().to_string(), order, max_d, tests })
}

/// Annex-style unit-root table: Variable | ADF | 5% critical value | order |
/// decision. `assumed` rows are carried without a test.
pub fn unitroot_table(results: &[IntegrationOrder], assumed: &[String]) -> Table {
    let mut t = Table::new(vec![
        "Variables".into(),
        "ADF".into(),
        "VCM au seuil de 5%".into(),
        "Ordre d'intégration".into(),
        "Décision".into(),
    ])
    .with_title("Test de racine unitaire")
    .with_decimals(1);
    for r in results {
        let last = r.tests.last().expect("at least one test");
        t.push_row(vec![
            Cell::text(&r.name),
            Cell::Num(last.statistic),
            Cell::Num(last.critical_values.five),
            Cell::text(r.order_label()),
            Cell::text(r.decision_label()),
        ]);
    }
    for name in assumed {
        t.push_row(vec![
            Cell::text(name),
            Cell::Empty,
            Cell::Empty,
            Cell::text("—"),
            Cell::text("Stationnaire (par hypothèse)"),
        ]);
    }
    if !assumed.is_empty() {
        t.push_note("Les composantes cycliques sont considérées comme étant stationnaires.");
    }
    t
}
