use serde_json::{Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
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

/// Shortest text that parses back to the same double.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Named columns and rows of cells, written as CSV or a JSON list of flat objects.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // writing into memory cannot fail
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format_number(*x),
                Cell::Flag(b) => b.to_string(),
                Cell::Text(s) => s.clone(),
            }))
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        // non-finite numbers become null
                        Cell::Num(x) => Value::from(*x),
                        Cell::Flag(b) => Value::Bool(*b),
                        Cell::Text(s) => Value::String(s.clone()),
                    };
                    obj.insert((*name).to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&records).expect("plain values serialize");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["x", "ok", "note"]);
        t.push(vec![0.1.into(), true.into(), "plain".into()]);
        t.push(vec![1e-20.into(), false.into(), "a, b".into()]);
        t
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-20, 6.02e23, 1.030776406404415, 1e-4, 9.99e-5] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_number(100.0), "100");
        assert_eq!(format_number(1e-20), "1e-20");
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(csv, "x,ok,note\n0.1,true,plain\n1e-20,false,\"a, b\"\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let json = sample().to_json();
        let v: Value = serde_json::from_str(&json).unwrap();
        let first = v[0].as_object().unwrap();
        assert_eq!(first.keys().collect::<Vec<_>>(), ["x", "ok", "note"]);
        assert_eq!(v[1]["x"], 1e-20);
        assert!(Table::new(vec!["a"]).to_json().starts_with("[]"));
    }

    #[test]
    fn infinite_values_are_null_in_json() {
        let mut t = Table::new(vec!["n"]);
        t.push(vec![f64::INFINITY.into()]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert!(v[0]["n"].is_null());
        assert_eq!(t.to_csv(), "n\ninf\n");
    }
}
