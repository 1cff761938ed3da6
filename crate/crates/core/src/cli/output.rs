//! Tables, number formatting and CSV / JSON writers for the command line.

use serde_json::{Map, Number, Value};
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rounds `v` to `precision` significant digits.
pub fn round_sig(v: f64, precision: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    let digits = precision.clamp(1, 17);
    format!("{:.*e}", digits - 1, v).parse().unwrap_or(v)
}

/// Shortest decimal that round-trips the value rounded to `precision`
/// significant digits. Plain notation for `1e-4 ≤ |v| < 1e15`, scientific
/// otherwise.
pub fn format_number(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(v, precision);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self, precision: usize) -> String {
        match self {
            Cell::Num(v) => format_number(*v, precision),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self, precision: usize) -> Value {
        match self {
            Cell::Num(v) => number_value(*v, precision),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

fn number_value(v: f64, precision: usize) -> Value {
    match Number::from_f64(round_sig(v, precision)) {
        Some(n) => Value::Number(n),
        None => Value::String(format_number(v, precision)),
    }
}

/// Keeps the underlying io error (and its kind) when csv wraps one.
fn io_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut dyn Write, precision: usize) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(out);
        w.write_record(&self.columns).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(precision))).map_err(io_error)?;
        }
        w.flush()
    }

    pub fn to_json(&self, precision: usize) -> Value {
        let mut m = Map::new();
        m.insert("columns".into(), Value::from(self.columns.clone()));
        m.insert(
            "rows".into(),
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|c| c.to_json(precision)).collect()))
                    .collect(),
            ),
        );
        Value::Object(m)
    }
}

/// Rounds every number in a JSON document to `precision` significant digits.
pub fn round_json(v: Value, precision: usize) -> Value {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            n.as_f64().map_or(Value::Number(n), |f| number_value(f, precision))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_json(x, precision)).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_json(x, precision))).collect()),
        other => other,
    }
}

/// Flattens a JSON document into `field,value` rows with dotted paths.
pub fn flatten_json(v: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, t: &mut Table) {
        match v {
            Value::Object(o) => {
                for (k, x) in o {
                    let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&path, x, t);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, t);
                }
            }
            Value::Null => t.push(vec![Cell::Text(prefix.into()), Cell::Text(String::new())]),
            Value::Bool(b) => t.push(vec![Cell::Text(prefix.into()), Cell::Bool(*b)]),
            Value::Number(n) => {
                let cell = match n.as_i64() {
                    Some(i) if n.is_i64() => Cell::Int(i),
                    _ => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                };
                t.push(vec![Cell::Text(prefix.into()), cell]);
            }
            Value::String(s) => t.push(vec![Cell::Text(prefix.into()), Cell::Text(s.clone())]),
        }
    }
    let mut t = Table::new(["field", "value"]);
    walk("", v, &mut t);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0, 12), "0");
        assert_eq!(format_number(1.5, 12), "1.5");
        assert_eq!(format_number(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_number(1.0 / 3.0, 4), "0.3333");
        assert_eq!(format_number(1.234e-5, 12), "1.234e-5");
        assert_eq!(format_number(0.000123, 12), "0.000123");
        assert_eq!(format_number(2.5e20, 12), "2.5e20");
        assert_eq!(format_number(-42.0, 12), "-42");
        assert_eq!(format_number(f64::INFINITY, 12), "inf");
        assert_eq!(format_number(f64::NAN, 12), "nan");
        let v = std::f64::consts::PI;
        assert_eq!(format_number(v, 17).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_quoting_and_header() {
        let mut t = Table::new(["name", "value"]);
        t.push(vec![Cell::Text("a,b".into()), Cell::Num(1.0)]);
        t.push(vec![Cell::Text("say \"hi\"".into()), Cell::Bool(true)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, 12).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "name,value\n\"a,b\",1\n\"say \"\"hi\"\"\",true\n"
        );
    }

    #[test]
    fn json_rounding_and_flattening() {
        let v = serde_json::json!({"a": 0.123456789, "b": [1, 2.0000000001], "c": {"d": null}});
        let r = round_json(v, 3);
        assert_eq!(r["a"], 0.123);
        assert_eq!(r["b"][0], 1);
        let t = flatten_json(&r);
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[1][0], Cell::Text("b.0".into()));
    }
}
