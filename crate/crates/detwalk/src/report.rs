//! Deterministic machine-readable output: JSON reports with sorted keys and
//! CSV tables. Every real is printed with 17 significant digits so reruns
//! are byte-identical and golden files stay exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// A real formatted with 17 significant digits, round-trip exact for f64.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columnar artifact attached to a report and exportable as CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// Comma-separated rendering: header row then data rows, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_real(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Outcome of one CLI command.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Option<Table>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            pass: true,
            metrics: BTreeMap::new(),
            artifacts: None,
        }
    }

    pub fn metric(&mut self, key: &str, value: f64) -> &mut Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    /// JSON rendering with keys in sorted order at every level.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push('{');
        if let Some(table) = &self.artifacts {
            out.push_str("\"artifacts\":{\"columns\":[");
            for (i, c) in table.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_json_string(&mut out, c);
            }
            out.push_str("],\"rows\":[");
            for (i, row) in table.rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('[');
                for (j, &x) in row.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    out.push_str(&fmt_real(x));
                }
                out.push(']');
            }
            out.push_str("]},");
        }
        out.push_str("\"command\":");
        push_json_string(&mut out, &self.command);
        out.push_str(",\"metrics\":{");
        for (i, (k, v)) in self.metrics.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_json_string(&mut out, k);
            out.push(':');
            out.push_str(&fmt_real(*v));
        }
        out.push_str("},\"pass\":");
        out.push_str(if self.pass { "true" } else { "false" });
        out.push('}');
        out
    }
}

fn push_json_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_through_the_fixed_format() {
        for &x in &[0.0, 1.0, -1.5, std::f64::consts::PI, 1.2915e-300, 6.02e23] {
            let printed = fmt_real(x);
            let back: f64 = printed.parse().unwrap();
            assert_eq!(back, x, "{printed}");
        }
    }

    #[test]
    fn json_keys_are_sorted_and_stable() {
        let mut r = Report::new("demo");
        r.metric("zeta", 2.0);
        r.metric("alpha", 1.0);
        let text = r.to_json();
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        assert_eq!(text, r.to_json());
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }

    #[test]
    fn csv_has_header_and_lf_endings() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 2.0]);
        let text = t.to_csv();
        let mut lines = text.split('\n');
        assert_eq!(lines.next(), Some("a,b"));
        assert!(lines.next().unwrap().contains(','));
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn table_embeds_in_json() {
        let mut r = Report::new("sweep");
        let mut t = Table::new(&["j"]);
        t.push(vec![2.0]);
        r.artifacts = Some(t);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["artifacts"]["columns"][0], "j");
    }
}
