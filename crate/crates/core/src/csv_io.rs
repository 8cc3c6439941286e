//! CSV ingestion and export.
//!
//! Expected layout: a header row, one date column (`YYYY-MM`, `YYYYMM`,
//! `YYYY-Qn` or `YYYY` depending on frequency) and numeric value columns.
//! Empty cells are missing observations. Both `.` and `,` are accepted as
//! decimal separators on input.

use std::path::Path;

use crate::error::{Error, Result};
use crate::series::{Dataset, Frequency, Period, TimeIndex, TimeSeries};

/// Parses a decimal cell, accepting both point and comma separators.
/// Empty (or whitespace-only) cells are missing.
pub fn parse_decimal(cell: &str) -> std::result::Result<Option<f64>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let normalized = cell.replace(',', ".");
    normalized
        .parse::<f64>()
        .map(Some)
        .map_err(|_| format!("cannot parse {cell:?} as a number"))
}

/// Loads a CSV file into a [`Dataset`]: one series per non-date column, rows
/// sorted ascending by period, interior gaps kept as missing rows.
pub fn load_csv(path: impl AsRef<Path>, date_column: &str, frequency: Frequency) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())
        .map_err(|e| Error::Csv { row: None, msg: e.to_string() })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Csv { row: Some(1), msg: e.to_string() })?
        .clone();
    let date_pos = headers
        .iter()
        .position(|h| h == date_column)
        .ok_or_else(|| Error::UnknownSeries(date_column.to_string()))?;
    let value_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != date_pos)
        .map(|(_, h)| h.to_string())
        .collect();
    if value_names.is_empty() {
        return Err(Error::Csv { row: Some(1), msg: "no value columns besides the date".into() });
    }

    // Header is row 1; data starts at row 2.
    let mut rows: Vec<(Period, Vec<Option<f64>>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Csv { row: Some(row), msg: e.to_string() })?;
        let date_cell = &record[date_pos];
        let period = Period::parse(date_cell, frequency)
            .ok_or_else(|| Error::BadDate { row, value: date_cell.to_string() })?;
        let mut values = Vec::with_capacity(value_names.len());
        for (j, cell) in record.iter().enumerate() {
            if j == date_pos {
                continue;
            }
            values.push(
                parse_decimal(cell).map_err(|msg| Error::Csv { row: Some(row), msg })?,
            );
        }
        rows.push((period, values));
    }
    if rows.is_empty() {
        return Err(Error::Csv { row: None, msg: "no data rows".into() });
    }

    let origin = rows[0].0;
    rows.sort_by_key(|(p, _)| p.distance_from(&origin));
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            // Ordinal row numbers are lost after sorting; name the period.
            return Err(Error::DuplicatePeriod {
                row: 0,
                period: w[0].0.label(),
            });
        }
    }

    let start = rows[0].0;
    let span = rows.last().unwrap().0.distance_from(&start) as usize + 1;
    let index = TimeIndex::new(start, span)?;

    let mut columns = vec![vec![None; span]; value_names.len()];
    for (period, values) in &rows {
        let t = period.distance_from(&start) as usize;
        for (c, v) in values.iter().enumerate() {
            columns[c][t] = *v;
        }
    }

    let series = value_names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| TimeSeries::new(name, index.clone(), values))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}

/// Writes a dataset back to CSV with full-precision values (shortest
/// round-trip formatting) and empty cells for missing observations.
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>, date_column: &str) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())
        .map_err(|e| Error::Csv { row: None, msg: e.to_string() })?;
    let mut header = vec![date_column.to_string()];
    header.extend(d.names());
    writer
        .write_record(&header)
        .map_err(|e| Error::Csv { row: None, msg: e.to_string() })?;
    for t in 0..d.len() {
        let mut record = vec![d.index().label(t)];
        for s in d.series() {
            record.push(match s.get(t) {
                Some(v) => format!("{v}"),
                None => String::new(),
            });
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::Csv { row: None, msg: e.to_string() })?;
    }
    writer.flush()?;
    Ok(())
}
