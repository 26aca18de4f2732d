//! CSV tables with a `#`-prefixed metadata header.

use std::fmt::Write as _;

/// Formats like C's `%.9g`.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(u64),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => fmt_g(*x),
            Cell::Int(n) => n.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
#[doc(hidden)]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::cli::csv::Cell::from($x)),*]
    };
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra metadata lines written after the standard header.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn header_line(&self) -> String {
        self.columns.join(",")
    }

    pub fn render_rows(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Run metadata written at the top of every CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Metadata {
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("# ntn-tilt {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {}", self.command),
            format!("# config_sha256: {}", self.config_sha256),
            format!("# seed: {}", self.seed),
        ]
    }
}

pub fn render(meta: &Metadata, table: &Table) -> String {
    let mut out = String::new();
    for line in meta.lines() {
        let _ = writeln!(out, "{line}");
    }
    for note in &table.notes {
        let _ = writeln!(out, "# {note}");
    }
    let _ = writeln!(out, "{}", table.header_line());
    out.push_str(&table.render_rows());
    out
}

/// Parsed view of an existing CSV: its metadata lines, header and row keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Existing {
    pub meta: Vec<String>,
    pub header: Option<String>,
    pub first_column: Vec<String>,
}

pub fn parse_existing(text: &str) -> Existing {
    let mut e = Existing::default();
    for line in text.lines() {
        if let Some(m) = line.strip_prefix('#') {
            e.meta.push(m.trim().to_string());
        } else if e.header.is_none() {
            e.header = Some(line.to_string());
        } else if !line.is_empty() {
            e.first_column.push(line.split(',').next().unwrap_or_default().to_string());
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_g(0.1), "0.1");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_g(123456789.0), "123456789");
        assert_eq!(fmt_g(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_g(1e-5), "1e-05");
        assert_eq!(fmt_g(2.5e-6), "2.5e-06");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(-30.0), "-30");
        assert_eq!(fmt_g(0.999999999999), "1");
        assert_eq!(fmt_g(99999999.95), "100000000");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn render_and_parse_round_trip() {
        let mut t = Table::new(&["x", "p"]);
        t.push(crate::row![1.5, "a"]);
        t.push(crate::row![2.0, 7u64]);
        t.note("optimum: 1.5");
        let meta = Metadata {
            command: "sweep".into(),
            config_sha256: "abc".into(),
            seed: 7,
        };
        let text = render(&meta, &t);
        assert!(text.starts_with("# ntn-tilt "));
        assert!(text.contains("# optimum: 1.5\nx,p\n1.5,a\n2,7\n"));
        let e = parse_existing(&text);
        assert_eq!(e.header.as_deref(), Some("x,p"));
        assert_eq!(e.first_column, vec!["1.5", "2"]);
        assert!(e.meta.contains(&"config_sha256: abc".to_string()));
    }
}
