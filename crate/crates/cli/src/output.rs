//! Reports as JSON or CSV.
//!
//! A record is one JSON object, or a CSV header plus one row in field order.
//! A table is a JSON array of objects, or a CSV header plus one row per entry.
//! Nested values inside CSV cells are written as compact JSON.

use serde_json::{Map, Value};

use crate::config::Format;

pub enum Report {
    Record(Vec<(&'static str, Value)>),
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>> },
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(_) | Value::Bool(_) => v.to_string(),
        _ => v.to_string(),
    }
}

fn object(columns: &[&'static str], values: &[Value]) -> Value {
    let map: Map<String, Value> = columns.iter().map(|c| c.to_string()).zip(values.iter().cloned()).collect();
    Value::Object(map)
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let value = match self {
                    Report::Record(fields) => {
                        let (cols, vals): (Vec<_>, Vec<_>) = fields.iter().cloned().unzip();
                        object(&cols, &vals)
                    }
                    Report::Table { columns, rows } => Value::Array(rows.iter().map(|r| object(columns, r)).collect()),
                };
                serde_json::to_string_pretty(&value).expect("reports serialize")
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                match self {
                    Report::Record(fields) => {
                        w.write_record(fields.iter().map(|(k, _)| *k)).expect("in-memory write");
                        w.write_record(fields.iter().map(|(_, v)| cell(v))).expect("in-memory write");
                    }
                    Report::Table { columns, rows } => {
                        w.write_record(columns).expect("in-memory write");
                        for r in rows {
                            w.write_record(r.iter().map(cell)).expect("in-memory write");
                        }
                    }
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
            }
        }
    }
}

/// JSON number for finite values, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_keeps_field_order_and_precision() {
        let r = Report::Record(vec![("b", num(0.1 + 0.2)), ("a", json!("x,y")), ("c", json!([1, 2]))]);
        let text = r.render(Format::Csv);
        assert_eq!(text, "b,a,c\n0.30000000000000004,\"x,y\",\"[1,2]\"\n");
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["b"].as_f64().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn tables_render_rows() {
        let t = Report::Table { columns: vec!["check", "passed"], rows: vec![vec![json!("a"), json!(true)], vec![json!("b"), json!(false)]] };
        assert_eq!(t.render(Format::Csv), "check,passed\na,true\nb,false\n");
        let v: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v[1]["passed"], json!(false));
    }
}
