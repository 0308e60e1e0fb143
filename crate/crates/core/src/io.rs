//! Text output conventions shared by every CSV/metadata writer.

use std::io::Write;

use crate::error::Result;

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Ordered `# key=value` metadata lines. The first line is always the
/// generator stamp, which carries the crate version and nothing time-dependent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_num(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, fmt_num(value))
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn write<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# generated-by=deltawall {}", env!("CARGO_PKG_VERSION"))?;
        for (k, v) in &self.entries {
            writeln!(out, "# {k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &x in &[0.0, 1.0, -2.5e-300, std::f64::consts::PI, 1.0 / 3.0, 6.02e23] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn metadata_block() {
        let mut m = Metadata::new();
        m.push_num("L", 3.0).push("mode", "closed_form");
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# generated-by=deltawall "));
        assert_eq!(lines[1], "# L=3.0000000000000000e0");
        assert_eq!(lines[2], "# mode=closed_form");
        assert_eq!(m.get("mode"), Some("closed_form"));
    }
}
