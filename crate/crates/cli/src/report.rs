//! Deterministic CSV emission and pass/fail bookkeeping. CSV files carry a
//! header line, '.' decimal separators (Rust float formatting is
//! locale-independent), and are written atomically via a temp file rename.

use std::fs;
use std::path::{Path, PathBuf};

use crate::HarnessError;

/// One named assertion with the measured value and its admissible interval.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl Check {
    /// Check that `value` lies in `[lo, hi]` (either side may be infinite).
    pub fn bounded(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lo,
            hi,
            pass: value >= lo && value <= hi && value.is_finite(),
        }
    }

    /// Report-only entry: always passes, records the measured value.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            pass: true,
        }
    }

    pub fn summary_line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        format!(
            "{status} {name}: value = {value} bounds = [{lo}, {hi}]",
            name = self.name,
            value = self.value,
            lo = self.lo,
            hi = self.hi
        )
    }
}

/// Result of one experiment: its checks and the files it wrote.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }
}

/// Writes rows as CSV (first line is the header) atomically.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), HarnessError> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

/// Writes the checks table next to a report.
pub fn write_checks(path: &Path, checks: &[Check]) -> Result<(), HarnessError> {
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.value.to_string(),
                c.lo.to_string(),
                c.hi.to_string(),
                c.pass.to_string(),
            ]
        })
        .collect();
    write_csv(path, &["check", "value", "lower", "upper", "pass"], &rows)
}

/// Write-temp-then-rename within the destination directory.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Formats an f64 for CSV (shortest round-trip representation).
pub fn fmt(v: f64) -> String {
    v.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::bounded("x", 0.5, 0.0, 1.0).pass);
        assert!(!Check::bounded("x", 1.5, 0.0, 1.0).pass);
        assert!(Check::bounded("x", 1.5, 0.0, f64::INFINITY).pass);
        assert!(!Check::bounded("x", f64::NAN, 0.0, 1.0).pass);
        assert!(Check::info("measured", f64::NAN).pass);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &["a", "b"],
            &[vec!["1".into(), "0.5".into()], vec!["2".into(), "inf".into()]],
        )
        .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1,0.5\n2,inf\n");
        assert!(!path.with_extension("tmp").exists());
    }
}
