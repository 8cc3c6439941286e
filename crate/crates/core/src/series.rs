//! Time-series containers: periods, indexes, series and aligned datasets.
//!
//! All types are immutable after construction; transformations return new
//! values. Missing observations are explicit (`None`), never silent zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Quarterly,
    Annual,
}

impl Frequency {
    pub fn periods_per_year(self) -> u32 {
        match self {
            Frequency::Monthly => 12,
            Frequency::Quarterly => 4,
            Frequency::Annual => 1,
        }
    }

    /// Conventional Hodrick-Prescott smoothing parameter for this frequency.
    pub fn default_hp_lambda(self) -> f64 {
        match self {
            Frequency::Monthly => 14_400.0,
            Frequency::Quarterly => 1_600.0,
            Frequency::Annual => 100.0,
        }
    }
}

impl std::str::FromStr for Frequency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "monthly" | "m" => Ok(Frequency::Monthly),
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            "annual" | "a" | "yearly" | "y" => Ok(Frequency::Annual),
            other => Err(Error::InvalidArg(format!("unknown frequency {other:?}"))),
        }
    }
}

/// One point on a calendar at a given frequency: a year plus a sub-period
/// (0-based month or quarter; always 0 for annual data).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub frequency: Frequency,
    pub year: i32,
    pub sub: u32,
}

impl Period {
    pub fn new(frequency: Frequency, year: i32, sub: u32) -> Result<Self> {
        if sub >= frequency.periods_per_year() {
            return Err(Error::InvalidArg(format!(
                "sub-period {sub} out of range for {frequency:?}"
            )));
        }
        Ok(Period { frequency, year, sub })
    }

    /// Parses a period label. Accepted forms: monthly `YYYY-MM` or `YYYYMM`,
    /// quarterly `YYYY-Qn` or `YYYYQn`, annual `YYYY`.
    pub fn parse(s: &str, frequency: Frequency) -> Option<Self> {
        let s = s.trim();
        match frequency {
            Frequency::Monthly => {
                let (y, m) = if let Some((y, m)) = s.split_once('-') {
                    (y, m)
                } else if s.len() == 6 {
                    s.split_at(4)
                } else {
                    return None;
                };
                let year: i32 = y.parse().ok()?;
                let month: u32 = m.parse().ok()?;
                if !(1..=12).contains(&month) {
                    return None;
                }
                Some(Period { frequency, year, sub: month - 1 })
            }
            Frequency::Quarterly => {
                let compact = s.replace('-', "");
                let (y, q) = compact.split_once(['Q', 'q'])?;
                let year: i32 = y.parse().ok()?;
                let quarter: u32 = q.parse().ok()?;
                if !(1..=4).contains(&quarter) {
                    return None;
                }
                Some(Period { frequency, year, sub: quarter - 1 })
            }
            Frequency::Annual => {
                let year: i32 = s.parse().ok()?;
                Some(Period { frequency, year, sub: 0 })
            }
        }
    }

    /// Signed number of frequency steps from the epoch; total order on
    /// periods of one frequency.
    fn ordinal(&self) -> i64 {
        self.year as i64 * self.frequency.periods_per_year() as i64 + self.sub as i64
    }

    pub fn add(&self, steps: i64) -> Period {
        let ppy = self.frequency.periods_per_year() as i64;
        let ord = self.ordinal() + steps;
        Period {
            frequency: self.frequency,
            year: ord.div_euclid(ppy) as i32,
            sub: ord.rem_euclid(ppy) as u32,
        }
    }

    /// Steps from `other` to `self`.
    pub fn distance_from(&self, other: &Period) -> i64 {
        debug_assert_eq!(self.frequency, other.frequency);
        self.ordinal() - other.ordinal()
    }

    pub fn label(&self) -> String {
        match self.frequency {
            Frequency::Monthly => format!("{:04}-{:02}", self.year, self.sub + 1),
            Frequency::Quarterly => format!("{:04}-Q{}", self.year, self.sub + 1),
            Frequency::Annual => format!("{:04}", self.year),
        }
    }
}

impl PartialOrd for Period {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.frequency != other.frequency {
            return None;
        }
        Some(self.ordinal().cmp(&other.ordinal()))
    }
}

impl std::fmt::Display for Period {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Equally spaced run of periods: a start plus a length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeIndex {
    start: Period,
    len: usize,
}

impl TimeIndex {
    pub fn new(start: Period, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArg("index length must be >= 1".into()));
        }
        Ok(TimeIndex { start, len })
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn frequency(&self) -> Frequency {
        self.start.frequency
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // len >= 1 by construction
    }

    pub fn period(&self, i: usize) -> Period {
        debug_assert!(i < self.len);
        self.start.add(i as i64)
    }

    pub fn label(&self, i: usize) -> String {
        self.period(i).label()
    }

    /// Position of `p` in this index, if covered.
    pub fn position(&self, p: &Period) -> Option<usize> {
        let d = p.distance_from(&self.start);
        if d >= 0 && (d as usize) < self.len {
            Some(d as usize)
        } else {
            None
        }
    }

    /// Contiguous sub-index `[from, from+len)`.
    pub fn slice(&self, from: usize, len: usize) -> Result<TimeIndex> {
        if from + len > self.len {
            return Err(Error::InvalidArg(format!(
                "slice {from}+{len} out of bounds for index of length {}",
                self.len
            )));
        }
        TimeIndex::new(self.start.add(from as i64), len)
    }

    pub fn iter(&self) -> impl Iterator<Item = Period> + '_ {
        (0..self.len).map(|i| self.period(i))
    }
}

/// A named series of observations on a [`TimeIndex`]. Missing values are
/// explicit `None`s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    index: TimeIndex,
    values: Vec<Option<f64>>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, index: TimeIndex, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::LengthMismatch { values: values.len(), index: index.len() });
        }
        Ok(TimeSeries { name: name.into(), index, values })
    }

    pub fn from_values(name: impl Into<String>, index: TimeIndex, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(Some).collect();
        Self::new(name, index, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> &TimeIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.values[i]
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// All observations, failing if any is missing.
    pub fn complete_values(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|v| v.ok_or_else(|| Error::MissingValues { name: self.name.clone() }))
            .collect()
    }

    /// Shifts the series back by `k` steps: `result(t) = self(t-k)`. The
    /// first `k` observations become missing; the index is unchanged.
    pub fn lag(&self, k: usize) -> Result<TimeSeries> {
        if k >= self.len() {
            return Err(Error::TooShort { needed: k + 1, got: self.len() });
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let mut values = vec![None; k];
        values.extend_from_slice(&self.values[..self.len() - k]);
        TimeSeries::new(format!("{}(-{k})", self.name), self.index.clone(), values)
    }

    /// `result(t) = self(t) - self(t-k)`; the first `k` observations become
    /// missing.
    pub fn difference(&self, k: usize) -> Result<TimeSeries> {
        if k >= self.len() {
            return Err(Error::TooShort { needed: k + 1, got: self.len() });
        }
        if k == 0 {
            return Err(Error::InvalidArg("difference order must be >= 1".into()));
        }
        let mut values = vec![None; k];
        for t in k..self.len() {
            values.push(match (self.values[t], self.values[t - k]) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            });
        }
        TimeSeries::new(format!("D{}", self.name), self.index.clone(), values)
    }

    /// Natural logarithm; errors on non-positive observations.
    pub fn log(&self) -> Result<TimeSeries> {
        let mut values = Vec::with_capacity(self.len());
        for v in &self.values {
            match v {
                Some(x) if *x > 0.0 => values.push(Some(x.ln())),
                Some(x) => {
                    return Err(Error::InvalidArg(format!(
                        "log of non-positive value {x} in series {:?}",
                        self.name
                    )))
                }
                None => values.push(None),
            }
        }
        TimeSeries::new(format!("LOG{}", self.name), self.index.clone(), values)
    }
}

/// Outcome of [`Dataset::align`].
#[derive(Debug, Clone)]
pub struct Aligned {
    pub dataset: Dataset,
    /// Rows removed relative to the input index.
    pub dropped: usize,
}

/// An ordered collection of series sharing one index, with unique names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    index: TimeIndex,
    series: Vec<TimeSeries>,
}

impl Dataset {
    pub fn new(series: Vec<TimeSeries>) -> Result<Self> {
        let first = series
            .first()
            .ok_or_else(|| Error::InvalidArg("dataset needs at least one series".into()))?;
        let index = first.index().clone();
        let mut seen = std::collections::HashSet::new();
        for s in &series {
            if s.index() != &index {
                return Err(Error::InvalidArg(format!(
                    "series {:?} does not share the dataset index",
                    s.name()
                )));
            }
            if !seen.insert(s.name().to_string()) {
                return Err(Error::DuplicateSeries(s.name().to_string()));
            }
        }
        Ok(Dataset { index, series })
    }

    pub fn index(&self) -> &TimeIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn n_series(&self) -> usize {
        self.series.len()
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn names(&self) -> Vec<String> {
        self.series.iter().map(|s| s.name().to_string()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&TimeSeries> {
        self.series
            .iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownSeries(name.to_string()))
    }

    /// New dataset with the named series, in the given order.
    pub fn select(&self, names: &[impl AsRef<str>]) -> Result<Dataset> {
        let series = names
            .iter()
            .map(|n| self.get(n.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(series)
    }

    pub fn with_series(&self, s: TimeSeries) -> Result<Dataset> {
        let mut series = self.series.clone();
        series.push(s);
        Dataset::new(series)
    }

    /// Restricts to the maximal contiguous span of rows where every series is
    /// observed (listwise deletion with contiguity preserved, so lagged
    /// regressions stay equally spaced). With `drop_missing = false` the
    /// dataset is returned unchanged.
    pub fn align(&self, drop_missing: bool) -> Result<Aligned> {
        if !drop_missing {
            return Ok(Aligned { dataset: self.clone(), dropped: 0 });
        }
        let n = self.len();
        let complete: Vec<bool> =
            (0..n).map(|t| self.series.iter().all(|s| s.get(t).is_some())).collect();

        // Longest run of complete rows; first such run on ties.
        let (mut best_start, mut best_len) = (0usize, 0usize);
        let mut run_start = 0usize;
        let mut run_len = 0usize;
        for (t, &ok) in complete.iter().enumerate() {
            if ok {
                if run_len == 0 {
                    run_start = t;
                }
                run_len += 1;
                if run_len > best_len {
                    best_start = run_start;
                    best_len = run_len;
                }
            } else {
                run_len = 0;
            }
        }
        if best_len == 0 {
            return Err(Error::EmptyIntersection);
        }
        let index = self.index.slice(best_start, best_len)?;
        let series = self
            .series
            .iter()
            .map(|s| {
                TimeSeries::new(
                    s.name(),
                    index.clone(),
                    s.values()[best_start..best_start + best_len].to_vec(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Aligned { dataset: Dataset::new(series)?, dropped: n - best_len })
    }

    /// Column-major complete data, for estimators. Fails if any value in any
    /// series is missing; call [`Dataset::align`] first.
    pub fn complete_columns(&self) -> Result<Vec<Vec<f64>>> {
        self.series.iter().map(|s| s.complete_values()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monthly(year: i32, month: u32) -> Period {
        Period::new(Frequency::Monthly, year, month - 1).unwrap()
    }

    fn series(name: &str, start: Period, values: Vec<Option<f64>>) -> TimeSeries {
        let index = TimeIndex::new(start, values.len()).unwrap();
        TimeSeries::new(name, index, values).unwrap()
    }

    #[test]
    fn period_arithmetic_wraps_years() {
        let p = monthly(2005, 11);
        assert_eq!(p.add(3).label(), "2006-02");
        assert_eq!(p.add(-11).label(), "2004-12");
        assert_eq!(p.add(14).distance_from(&p), 14);
    }

    #[test]
    fn period_parse_forms() {
        assert_eq!(Period::parse("2005-01", Frequency::Monthly), Some(monthly(2005, 1)));
        assert_eq!(Period::parse("200512", Frequency::Monthly), Some(monthly(2005, 12)));
        assert_eq!(Period::parse("2005-13", Frequency::Monthly), None);
        assert_eq!(
            Period::parse("2005-Q3", Frequency::Quarterly).unwrap().label(),
            "2005-Q3"
        );
        assert_eq!(Period::parse("2005", Frequency::Annual).unwrap().label(), "2005");
    }

    #[test]
    fn lag_shifts_and_marks_missing() {
        let s = series("x", monthly(2005, 1), vec![Some(1.0), Some(2.0), Some(3.0)]);
        let l = s.lag(1).unwrap();
        assert_eq!(l.values(), &[None, Some(1.0), Some(2.0)]);
        assert_eq!(l.index(), s.index());
    }

    #[test]
    fn lag_zero_is_identity() {
        let s = series("x", monthly(2005, 1), vec![Some(1.0), Some(2.0), Some(3.0)]);
        assert_eq!(s.lag(0).unwrap(), s);
    }

    #[test]
    fn lag_composes() {
        let vals: Vec<Option<f64>> = (0..20).map(|i| Some(i as f64 * 1.5 - 3.0)).collect();
        let s = series("x", monthly(2005, 1), vals);
        let twice = s.lag(1).unwrap().lag(1).unwrap();
        let once = s.lag(2).unwrap();
        assert_eq!(twice.values(), once.values());
    }

    #[test]
    fn lag_too_long_errors() {
        let s = series("x", monthly(2005, 1), vec![Some(1.0), Some(2.0)]);
        assert!(matches!(s.lag(2), Err(Error::TooShort { .. })));
    }

    #[test]
    fn difference_basics() {
        let s = series("x", monthly(2005, 1), vec![Some(1.0), Some(3.0), Some(6.0)]);
        let d = s.difference(1).unwrap();
        assert_eq!(d.values(), &[None, Some(2.0), Some(3.0)]);

        let c = series("c", monthly(2005, 1), vec![Some(5.0); 6]);
        let dc = c.difference(1).unwrap();
        assert!(dc.values()[1..].iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn difference_inverts_cumulative_sum() {
        let x: Vec<f64> = (0..30).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let mut cum = Vec::with_capacity(x.len());
        let mut acc = 0.0;
        for v in &x {
            acc += v;
            cum.push(Some(acc));
        }
        let s = series("cum", monthly(2005, 1), cum);
        let d = s.difference(1).unwrap();
        for (t, expected) in x.iter().enumerate().skip(1) {
            assert!((d.get(t).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn log_transform() {
        let s = series("x", monthly(2005, 1), vec![Some(1.0), None, Some(std::f64::consts::E)]);
        let l = s.log().unwrap();
        assert_eq!(l.get(0), Some(0.0));
        assert_eq!(l.get(1), None);
        assert!((l.get(2).unwrap() - 1.0).abs() < 1e-15);

        let bad = series("x", monthly(2005, 1), vec![Some(1.0), Some(-2.0)]);
        assert!(matches!(bad.log(), Err(Error::InvalidArg(_))));
    }

    #[test]
    fn align_trims_to_common_span() {
        let a = series("a", monthly(2005, 1), vec![None, Some(1.0), Some(2.0), Some(3.0)]);
        let b = series("b", monthly(2005, 1), vec![None, None, Some(5.0), Some(6.0)]);
        let d = Dataset::new(vec![a, b]).unwrap();
        let al = d.align(true).unwrap();
        assert_eq!(al.dataset.len(), 2);
        assert_eq!(al.dropped, 2);
        assert_eq!(al.dataset.index().label(0), "2005-03");
    }

    #[test]
    fn align_complete_is_identity() {
        let a = series("a", monthly(2005, 1), vec![Some(1.0), Some(2.0)]);
        let d = Dataset::new(vec![a]).unwrap();
        let al = d.align(true).unwrap();
        assert_eq!(al.dropped, 0);
        assert_eq!(al.dataset.len(), 2);
    }

    #[test]
    fn align_counts_usable_rows_like_hand_enumeration() {
        // 132 monthly observations; one series differenced (1 leading miss),
        // one differenced then lagged (2 leading), one with the last 10
        // unobserved. Hand count: rows 3..=122 usable -> 120.
        let n = 132;
        let raw: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + i as f64 * 0.01).collect();
        let base = series("base", monthly(2005, 1), raw.iter().copied().map(Some).collect());
        let d1 = base.difference(1).unwrap().with_name("d1");
        let d1l1 = d1.lag(1).unwrap().with_name("d1l1");
        let mut tail = raw.iter().copied().map(Some).collect::<Vec<_>>();
        for v in tail.iter_mut().skip(n - 10) {
            *v = None;
        }
        let short = series("short", monthly(2005, 1), tail);
        let d = Dataset::new(vec![d1, d1l1, short]).unwrap();
        let al = d.align(true).unwrap();
        assert_eq!(al.dataset.len(), 120);
        assert_eq!(al.dropped, 12);
    }

    #[test]
    fn align_empty_intersection_errors() {
        let a = series("a", monthly(2005, 1), vec![Some(1.0), None]);
        let b = series("b", monthly(2005, 1), vec![None, Some(2.0)]);
        let d = Dataset::new(vec![a, b]).unwrap();
        assert!(matches!(d.align(true), Err(Error::EmptyIntersection)));
    }

    #[test]
    fn dataset_rejects_duplicate_names() {
        let a = series("a", monthly(2005, 1), vec![Some(1.0)]);
        let b = series("a", monthly(2005, 1), vec![Some(2.0)]);
        assert!(matches!(Dataset::new(vec![a, b]), Err(Error::DuplicateSeries(_))));
    }
}
