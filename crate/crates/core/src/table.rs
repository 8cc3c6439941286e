//! Lightweight output tables with text, CSV and JSON renderers.
//!
//! Text output prints numbers at a fixed number of decimals (2 by default,
//! matching the reporting convention of the source tables) and honors the
//! decimal-separator locale; CSV and JSON carry full precision.

use serde_json::{json, Value};

/// Decimal separator used by the text renderer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Locale {
    #[default]
    Point,
    Comma,
}

impl std::str::FromStr for Locale {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "point" | "." => Ok(Locale::Point),
            "comma" | "," => Ok(Locale::Comma),
            other => Err(crate::error::Error::InvalidArg(format!("unknown locale {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    /// Number rendered at the table's default precision.
    Num(f64),
    /// Number rendered at an explicit precision.
    Prec(f64, usize),
    /// Number rendered in scientific notation.
    Sci(f64),
    Int(i64),
    /// Numeric cell with a textual marker (significance stars, selection
    /// flag). Text mode appends the marker; CSV and JSON carry the bare
    /// full-precision value.
    Marked(Box<Cell>, String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn marked(inner: Cell, marker: impl Into<String>) -> Cell {
        Cell::Marked(Box::new(inner), marker.into())
    }

    fn render(&self, decimals: usize, locale: Locale) -> String {
        let out = match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => format!("{v:.decimals$}"),
            Cell::Prec(v, d) => format!("{:.*}", *d, v),
            Cell::Sci(v) => format!("{v:.4e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Marked(inner, marker) => {
                return format!("{}{marker}", inner.render(decimals, locale))
            }
        };
        match (self, locale) {
            (Cell::Num(_) | Cell::Prec(..) | Cell::Sci(_), Locale::Comma) => {
                out.replace('.', ",")
            }
            _ => out,
        }
    }

    fn csv_value(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Num(v) | Cell::Prec(v, _) | Cell::Sci(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Marked(inner, _) => inner.csv_value(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Num(v) | Cell::Prec(v, _) | Cell::Sci(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Marked(inner, _) => inner.json_value(),
        }
    }

    fn is_numeric(&self) -> bool {
        match self {
            Cell::Num(_) | Cell::Prec(..) | Cell::Sci(_) | Cell::Int(_) => true,
            Cell::Marked(inner, _) => inner.is_numeric(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form note lines printed below the table (legends, footers).
    pub notes: Vec<String>,
    /// Default decimals for `Cell::Num` in text mode.
    pub decimals: usize,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Table {
        Table { columns, decimals: 2, ..Table::default() }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Table {
        self.title = Some(title.into());
        self
    }

    pub fn with_decimals(mut self, decimals: usize) -> Table {
        self.decimals = decimals;
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn to_text(&self, locale: Locale) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.render(self.decimals, locale)).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &rendered {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }

        let mut out = String::new();
        if let Some(title) = &self.title {
            out.push_str(title);
            out.push('\n');
        }
        let header: Vec<String> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:w$}", c, w = widths[i]))
            .collect();
        out.push_str(header.join("  ").trim_end());
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&rendered) {
            let line: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if row[i].is_numeric() {
                        format!("{:>w$}", c, w = widths[i])
                    } else {
                        format!("{:w$}", c, w = widths[i])
                    }
                })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        for note in &self.notes {
            out.push('\n');
            out.push_str(note);
        }
        if !self.notes.is_empty() {
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory csv");
        for row in &self.rows {
            let record: Vec<String> = row.iter().map(|c| c.csv_value()).collect();
            writer.write_record(&record).expect("in-memory csv");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("utf8")
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json_value()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "title": self.title,
            "columns": self.columns,
            "rows": rows,
            "notes": self.notes,
        })
    }
}

/// Significance stars at the 10/5/1% levels.
pub fn stars(p_value: f64) -> &'static str {
    if p_value <= 0.01 {
        "***"
    } else if p_value <= 0.05 {
        "**"
    } else if p_value <= 0.10 {
        "*"
    } else {
        ""
    }
}
