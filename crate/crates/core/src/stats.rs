//! Pearson correlation with Student-t significance testing and the starred
//! correlation-matrix report.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::exec;
use crate::series::Dataset;
use crate::table::{Cell, Table};

/// Two-sided Student-t critical value at significance `alpha` with `df`
/// degrees of freedom.
pub fn student_critical(alpha: f64, df: usize) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidArg(format!("alpha must be in (0,1), got {alpha}")));
    }
    if df == 0 {
        return Err(Error::InvalidArg("degrees of freedom must be positive".into()));
    }
    let t = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::Numerical(format!("student t: {e}")))?;
    Ok(t.inverse_cdf(1.0 - alpha / 2.0))
}

/// Two-sided Student-t p-value for a statistic `t` with `df` degrees of
/// freedom.
pub fn student_p_value(t: f64, df: usize) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::Numerical(format!("student t: {e}")))?;
    Ok(2.0 * (1.0 - dist.cdf(t.abs())))
}

/// Pearson correlation coefficient, computed from the raw sums
/// `(sum xy - n x y) / sqrt((sum x^2 - n x^2)(sum y^2 - n y^2))`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { values: x.len(), index: y.len() });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let nf = n as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    let mx = sx / nf;
    let my = sy / nf;
    let vx = sxx - nf * mx * mx;
    let vy = syy - nf * my * my;
    if vx <= 0.0 {
        return Err(Error::ZeroVariance("x".into()));
    }
    if vy <= 0.0 {
        return Err(Error::ZeroVariance("y".into()));
    }
    let r = (sxy - nf * mx * my) / (vx * vy).sqrt();
    Ok(r.clamp(-1.0, 1.0))
}

/// Outcome of a correlation significance test.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Significance {
    pub t: f64,
    pub significant: bool,
}

/// Student test of a correlation coefficient: `t = |r| / sqrt((1-r^2)/(n-2))`,
/// significant when `t` exceeds the two-sided critical value at `alpha` with
/// `n - 2` degrees of freedom. `|r| = 1` is reported significant with an
/// infinite statistic.
pub fn corr_significance(r: f64, n: usize, alpha: f64) -> Result<Significance> {
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    if r.abs() > 1.0 {
        return Err(Error::InvalidArg(format!("|r| must be <= 1, got {r}")));
    }
    if r.abs() >= 1.0 {
        return Ok(Significance { t: f64::INFINITY, significant: true });
    }
    let t = r.abs() / ((1.0 - r * r) / (n as f64 - 2.0)).sqrt();
    let critical = student_critical(alpha, n - 2)?;
    Ok(Significance { t, significant: t > critical })
}

/// Pairwise correlation matrix with significance flags and per-pair
/// observation counts (pairwise-complete alignment).
#[derive(Debug, Clone, Serialize)]
pub struct CorrMatrix {
    pub names: Vec<String>,
    pub alpha: f64,
    pub r: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
    pub significant: Vec<Vec<bool>>,
    pub n: Vec<Vec<usize>>,
}

impl CorrMatrix {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Text report in the style of a starred correlation matrix: coefficients
    /// at 2 decimals, `**` when significant at the chosen level.
    pub fn to_table(&self) -> Table {
        let mut columns = vec!["".to_string()];
        columns.extend(self.names.iter().cloned());
        let mut table = Table::new(columns).with_title("Matrice de corrélation");
        for i in 0..self.dim() {
            let mut row = vec![Cell::text(&self.names[i])];
            for j in 0..self.dim() {
                let cell = if i != j && self.significant[i][j] {
                    Cell::marked(Cell::Num(self.r[i][j]), "**")
                } else {
                    Cell::Num(self.r[i][j])
                };
                row.push(cell);
            }
            table.push_row(row);
        }
        table.push_note(format!("** significatif au seuil de {:.0}%", self.alpha * 100.0));
        table
    }
}

/// All-pairs correlation matrix over a dataset. Pairs are aligned on their
/// pairwise-complete observations; errors name the offending pair.
pub fn corr_matrix(d: &Dataset, alpha: f64) -> Result<CorrMatrix> {
    let k = d.n_series();
    if k < 2 {
        return Err(Error::InvalidArg("correlation matrix needs at least 2 series".into()));
    }
    let names = d.names();

    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let computed = exec::map_collect(pairs, |(i, j)| {
        let result = pair_corr(d, i, j, alpha);
        (i, j, result)
    });

    let mut r = vec![vec![1.0; k]; k];
    let mut t = vec![vec![f64::INFINITY; k]; k];
    let mut significant = vec![vec![true; k]; k];
    let mut n = vec![vec![0usize; k]; k];
    for (i, series) in d.series().iter().enumerate() {
        n[i][i] = series.values().iter().flatten().count();
    }
    for (i, j, result) in computed {
        let (rij, sig, nij) = result.map_err(|e| {
            Error::InvalidArg(format!("pair ({}, {}): {e}", names[i], names[j]))
        })?;
        r[i][j] = rij;
        r[j][i] = rij;
        t[i][j] = sig.t;
        t[j][i] = sig.t;
        significant[i][j] = sig.significant;
        significant[j][i] = sig.significant;
        n[i][j] = nij;
        n[j][i] = nij;
    }
    Ok(CorrMatrix { names, alpha, r, t, significant, n })
}

fn pair_corr(d: &Dataset, i: usize, j: usize, alpha: f64) -> Result<(f64, Significance, usize)> {
    let a = &d.series()[i];
    let b = &d.series()[j];
    let mut x = Vec::new();
    let mut y = Vec::new();
    for t in 0..d.len() {
        if let (Some(av), Some(bv)) = (a.get(t), b.get(t)) {
            x.push(av);
            y.push(bv);
        }
    }
    if x.len() < 3 {
        return Err(Error::TooShort { needed: 3, got: x.len() });
    }
    let r = pearson(&x, &y).map_err(|e| match e {
        Error::ZeroVariance(which) => Error::ZeroVariance(if which == "x" {
            a.name().to_string()
        } else {
            b.name().to_string()
        }),
        other => other,
    })?;
    let sig = corr_significance(r, x.len(), alpha)?;
    Ok((r, sig, x.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Frequency, Period, TimeIndex, TimeSeries};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn dataset(columns: Vec<(&str, Vec<Option<f64>>)>) -> Dataset {
        let len = columns[0].1.len();
        let start = Period::new(Frequency::Monthly, 2005, 0).unwrap();
        let index = TimeIndex::new(start, len).unwrap();
        Dataset::new(
            columns
                .into_iter()
                .map(|(n, v)| TimeSeries::new(n, index.clone(), v).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Two-pass covariance / (sd * sd) implementation, kept independent of
    /// the production single-pass formula.
    fn pearson_two_pass(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
        let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / n).sqrt();
        let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / n).sqrt();
        cov / (sx * sy)
    }

    #[test]
    fn perfect_correlation() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap(), -1.0);
    }

    #[test]
    fn matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..50).map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0 + 1.0).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 0.6 * v + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let r = pearson(&x, &y).unwrap();
        assert!((r - pearson_two_pass(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn constant_input_errors() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn significance_zero_r() {
        let s = corr_significance(0.0, 100, 0.05).unwrap();
        assert_eq!(s.t, 0.0);
        assert!(!s.significant);
    }

    #[test]
    fn significance_table_value() {
        // r = 0.38, n = 132: t = 4.68 >> 1.98, clearly significant at 5%.
        let s = corr_significance(0.38, 132, 0.05).unwrap();
        assert!(s.significant);

        // Direct re-evaluation of the formula at r = 0.25, n = 132.
        let s = corr_significance(0.25, 132, 0.05).unwrap();
        let direct = 0.25_f64 / ((1.0_f64 - 0.0625) / 130.0).sqrt();
        assert!((s.t - direct).abs() < 1e-10);
    }

    #[test]
    fn perfect_r_is_infinite_sentinel() {
        let s = corr_significance(1.0, 10, 0.05).unwrap();
        assert!(s.t.is_infinite());
        assert!(s.significant);
    }

    #[test]
    fn matrix_shape_and_diagonal() {
        let vals: Vec<Option<f64>> = (0..30).map(|i| Some((i as f64 * 0.7).sin())).collect();
        let mut cols = Vec::new();
        for c in 0..6 {
            let shifted: Vec<Option<f64>> =
                (0..30).map(|i| Some(((i + c) as f64 * 0.7).cos())).collect();
            cols.push((["a", "b", "c", "d", "e", "f"][c], shifted));
        }
        let _ = vals;
        let d = dataset(cols);
        let m = corr_matrix(&d, 0.05).unwrap();
        assert_eq!(m.dim(), 6);
        for i in 0..6 {
            assert_eq!(m.r[i][i], 1.0);
            for j in 0..6 {
                assert_eq!(m.r[i][j], m.r[j][i]);
                assert!(m.r[i][j].abs() <= 1.0);
            }
        }
    }

    #[test]
    fn identical_series_correlate_perfectly() {
        let v: Vec<Option<f64>> = (0..20).map(|i| Some((i as f64).sin())).collect();
        let d = dataset(vec![("a", v.clone()), ("b", v)]);
        let m = corr_matrix(&d, 0.05).unwrap();
        assert_eq!(m.r[0][1], 1.0);
    }

    #[test]
    fn pairwise_complete_counts() {
        let mut a: Vec<Option<f64>> = (0..20).map(|i| Some(i as f64)).collect();
        let b: Vec<Option<f64>> = (0..20).map(|i| Some((i as f64 * 1.3).cos())).collect();
        a[0] = None;
        a[1] = None;
        let d = dataset(vec![("a", a), ("b", b)]);
        let m = corr_matrix(&d, 0.05).unwrap();
        assert_eq!(m.n[0][1], 18);
        assert_eq!(m.n[1][1], 20);
    }

    #[test]
    fn white_noise_rarely_correlates() {
        // Monte Carlo: independent pairs of length 1000 should essentially
        // never reach |r| >= 0.1.
        let hits = crate::exec::replicate(1000, 99, |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..1000).map(|_| rng.sample(StandardNormal)).collect();
            let y: Vec<f64> = (0..1000).map(|_| rng.sample(StandardNormal)).collect();
            (pearson(&x, &y).unwrap().abs() < 0.1) as usize
        })
        .into_iter()
        .sum::<usize>();
        assert!(hits >= 990, "only {hits}/1000 under 0.1");
    }

    #[test]
    fn render_marks_significance() {
        let v: Vec<Option<f64>> = (0..40).map(|i| Some(i as f64)).collect();
        let w: Vec<Option<f64>> = (0..40).map(|i| Some(i as f64 + (i as f64 * 0.9).sin())).collect();
        let d = dataset(vec![("a", v), ("b", w)]);
        let m = corr_matrix(&d, 0.05).unwrap();
        let text = m.to_table().to_text(crate::table::Locale::Comma);
        assert!(text.contains("**"), "{text}");
        assert!(text.contains("1,00"), "{text}");
    }
}
