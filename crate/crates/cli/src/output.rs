//! Rendering of tables in the three output formats.

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// `x` with 6 significant digits, trailing zeros removed, `%g` style.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Shortest representation that parses back to `x`.
pub fn full(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// A cell of a rendered table.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self, format: Format) -> String {
        match self {
            Cell::Num(x) if format == Format::Human => sig6(*x),
            Cell::Num(x) => full(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Text(String::new()), Cell::Num)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        writer.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|c| c.render(Format::Csv))).map_err(io)?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Space-aligned columns; numbers right-aligned.
    pub fn to_human(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| c.render(Format::Human)).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |items: &[String]| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for row in &cells {
            out += &line(row);
        }
        out
    }
}

/// Key/value listing for single results in human mode.
pub fn key_values(pairs: &[(&str, Cell)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {}\n", v.render(Format::Human))).collect()
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.820_612_345), "0.820612");
        assert_eq!(sig6(138.0), "138");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(999_999.7), "1e6");
        assert_eq!(sig6(1.5e-7), "1.5e-7");
        assert_eq!(sig6(0.000_123_456_7), "0.000123457");
        assert_eq!(sig6(0.000_076_608_7), "7.66087e-5");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(f64::NAN), "nan");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.123, -0.0] {
            assert_eq!(full(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_has_header_and_unix_newlines() {
        let mut t = Table::new(["T", "p1", "utilization"]);
        t.push(vec![1.0.into(), 0.5.into(), f64::NAN.into()]);
        assert_eq!(t.to_csv().unwrap(), "T,p1,utilization\n1.0,0.5,nan\n");
    }

    #[test]
    fn human_table_aligns() {
        let mut t = Table::new(["a", "bbb"]);
        t.push(vec![10.0.into(), 2.0.into()]);
        assert_eq!(t.to_human(), " a  bbb\n10    2\n");
    }
}
