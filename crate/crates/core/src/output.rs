//! CSV tables with leading `#` comment lines for provenance.

use std::io::Write;

use crate::closedform::BottomCurve;
use crate::error::Result;

/// Shortest decimal that round-trips, so identical inputs give identical bytes.
pub fn format_value(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    /// Written as `# line` before the header.
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn with_comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8_lossy(&buf).into_owned()
    }
}

impl BottomCurve {
    pub fn to_table(&self) -> CsvTable {
        CsvTable {
            comments: vec!["spectral bottom mu(B0, 1) of the parallel layer; root tolerance: machine precision".into()],
            header: ["B0", "mu", "weak_asy", "strong_asy", "lower_bound"].map(String::from).to_vec(),
            rows: self
                .samples
                .iter()
                .map(|s| [s.b0, s.mu, s.weak_asy, s.strong_asy, s.lower_bound].map(format_value).to_vec())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_precede_header_and_quoting_is_rfc4180() {
        let t = CsvTable {
            comments: vec!["grid: N=8".into(), "two\nlines".into()],
            header: vec!["a".into(), "b,c".into()],
            rows: vec![vec!["1".into(), "x\"y".into()]],
        };
        let s = t.to_string_lossy();
        assert_eq!(s, "# grid: N=8\n# two\n# lines\na,\"b,c\"\n1,\"x\"\"y\"\n");
    }

    #[test]
    fn values_round_trip() {
        for v in [0.1, 2.5, 1e-300, -3.0e12, std::f64::consts::PI] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
    }
}
