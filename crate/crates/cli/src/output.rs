use std::io::Write;

use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// C-style `%.12g`.
pub fn fmt_g(x: f64) -> String {
    const PREC: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (PREC - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PREC).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PREC - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A JSON number rounded to the `%.12g` text, or `null` when not finite.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = fmt_g(x).parse().expect("formatted float parses");
        json!(rounded)
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_num(*x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular result with its provenance header.
#[derive(Debug)]
pub struct Table {
    pub command: &'static str,
    pub config: Value,
    pub summary: Option<Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Replaces the row listing in JSON output when present.
    pub body: Option<Value>,
}

impl Table {
    pub fn new(command: &'static str, config: Value, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            config,
            summary: None,
            columns,
            rows: Vec::new(),
            body: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn schema(&self) -> String {
        format!("rabi-regimes/{}/v{SCHEMA_VERSION}", self.command)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "# schema: {}", self.schema())?;
                writeln!(out, "# config: {}", self.config)?;
                if let Some(s) = &self.summary {
                    writeln!(out, "# summary: {s}")?;
                }
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let doc = match &self.body {
                    Some(body) => json!({
                        "schema": self.schema(),
                        "config": self.config,
                        "result": body,
                    }),
                    None => json!({
                        "schema": self.schema(),
                        "config": self.config,
                        "summary": self.summary,
                        "columns": self.columns,
                        "rows": rows,
                    }),
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_g_formatting() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-0.5), "-0.5");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(24.547_123_456_789_1), "24.5471234568");
        assert_eq!(fmt_g(1e-5), "1e-05");
        assert_eq!(fmt_g(1.5e13), "1.5e+13");
        assert_eq!(fmt_g(123_456_789_012.0), "123456789012");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(Cell::from("a,b").csv(), "\"a,b\"");
        assert_eq!(Cell::from(None::<f64>).csv(), "");
    }

    #[test]
    fn json_rounding() {
        assert_eq!(json_num(0.1 + 0.2), json!(0.3));
        assert_eq!(json_num(f64::INFINITY), Value::Null);
    }
}
