//! Experiment records and the versioned CSV they are written to.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "# fillab-csv v1";

/// One measured instance. Optional columns stay empty when they do not apply.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRecord {
    pub experiment: String,
    pub size: u32,
    pub sample_id: u32,
    pub k: usize,
    pub vol: usize,
    pub diam: u32,
    /// Fill volume, divergence value, or assembled volume; empty is ∞.
    pub value: Option<u64>,
    pub finite: bool,
    /// A reference value: the oracle volume in comparisons, the unrestricted fill for divergence.
    pub reference: Option<u64>,
    pub fill_rad: Option<f64>,
    pub pieces: Option<usize>,
    pub c_cone: Option<f64>,
    pub eta: Option<f64>,
    pub sigma: Option<f64>,
    pub kappa: Option<f64>,
    pub passed: usize,
    pub failed: usize,
    /// Names of failed assertions, `;`-separated.
    pub failures: String,
    #[serde(rename = "runtime_ms")]
    pub runtime_ms: Option<u128>,
    pub config_hash: String,
}

impl ExperimentRecord {
    /// Counts assertions into `passed` / `failed`.
    pub fn tally<'a>(&mut self, checks: impl IntoIterator<Item = (&'a str, bool)>) {
        for (name, pass) in checks {
            if pass {
                self.passed += 1;
            } else {
                self.failed += 1;
                if !self.failures.is_empty() {
                    self.failures.push(';');
                }
                self.failures.push_str(name);
            }
        }
    }
}

/// Writes rows under the `# fillab-csv v1` comment line.
pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{CSV_HEADER}").map_err(|e| Error::io("<csv>", e))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(f), rows)
}

/// Reads a CSV written by [`write_csv`] back as string rows, header first.
pub fn read_csv(text: &str) -> Result<Vec<Vec<String>>> {
    let body = text
        .strip_prefix(CSV_HEADER)
        .ok_or_else(|| Error::parse("<csv>", 1, format!("expected {CSV_HEADER:?}")))?
        .trim_start_matches(['\r', '\n']);
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
    r.records().map(|rec| Ok(rec?.iter().map(str::to_string).collect())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut r = ExperimentRecord { experiment: "iso".into(), size: 4, value: Some(32), finite: true, ..Default::default() };
        r.tally([("a", true), ("b", false), ("c", false)]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# fillab-csv v1\nexperiment,size,sampleId,"));
        let rows = read_csv(&text).unwrap();
        assert_eq!(rows.len(), 2);
        let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
        assert_eq!(rows[1][col("value")], "32");
        assert_eq!(rows[1][col("failures")], "b;c");
        assert_eq!(rows[1][col("fillRad")], "");
        assert!(rows[0].contains(&"runtime_ms".to_string()));
    }

    #[test]
    fn missing_header_is_rejected() {
        assert!(read_csv("a,b\n1,2\n").is_err());
    }
}
