//! Column tables rendered as CSV (metadata comment header) or JSON.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use deltawall::io::{fmt_num, Metadata};
use serde_json::{json, Map, Value};

use crate::config::{CliResult, Format};

pub struct Table {
    pub meta: Metadata,
    pub columns: Vec<(String, Vec<f64>)>,
    /// Key/value block written after the data (the exponential fit).
    pub trailer: Option<(String, Vec<(String, String)>)>,
}

impl Table {
    pub fn new(meta: Metadata) -> Self {
        Self {
            meta,
            columns: Vec::new(),
            trailer: None,
        }
    }

    pub fn column(&mut self, name: &str, values: Vec<f64>) -> &mut Self {
        self.columns.push((name.to_string(), values));
        self
    }

    fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
        }
    }

    fn csv(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.meta.write(&mut buf)?;
        let names: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        writeln!(buf, "{}", names.join(","))?;
        for i in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| fmt_num(c.1[i])).collect();
            writeln!(buf, "{}", row.join(","))?;
        }
        if let Some((title, entries)) = &self.trailer {
            writeln!(buf, "# {title}")?;
            for (k, v) in entries {
                writeln!(buf, "# {k}={v}")?;
            }
        }
        Ok(String::from_utf8(buf).expect("ascii output"))
    }

    fn json(&self) -> String {
        let mut meta = Map::new();
        meta.insert(
            "generated-by".into(),
            Value::String(format!("deltawall {}", env!("CARGO_PKG_VERSION"))),
        );
        for (k, v) in self.meta.entries() {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        let rows: Vec<Value> = (0..self.rows())
            .map(|i| Value::Array(self.columns.iter().map(|c| number(c.1[i])).collect()))
            .collect();
        let mut doc = json!({ "metadata": meta, "columns": names, "rows": rows });
        if let Some((title, entries)) = &self.trailer {
            let block: Map<String, Value> = entries
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect();
            doc[title.as_str()] = Value::Object(block);
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

/// JSON has no NaN or infinities; those become null.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut m = Metadata::new();
        m.push_num("L", 3.0);
        let mut t = Table::new(m);
        t.column("t", vec![0.0, 1.0]).column("p_in", vec![0.5, f64::NAN]);
        t.trailer = Some(("fit".into(), vec![("a".into(), "1".into())]));
        t
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# generated-by=deltawall"));
        assert_eq!(lines[1], "# L=3.0000000000000000e0");
        assert_eq!(lines[2], "t,p_in");
        assert_eq!(lines[4], "1.0000000000000000e0,nan");
        assert_eq!(&lines[5..], ["# fit", "# a=1"]);
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["columns"], json!(["t", "p_in"]));
        assert_eq!(v["rows"][1], json!([1.0, null]));
        assert_eq!(v["fit"]["a"], "1");
    }
}
