//! Residual checks and deterministic table output.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Temperature(f64),
    Tau(f64),
    Global,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Temperature(t) => write!(f, "T={}", num(*t)),
            Location::Tau(t) => write!(f, "tau={}", num(*t)),
            Location::Global => f.write_str("global"),
        }
    }
}

/// One named check; `pass` iff `|value| <= tolerance`, so NaN fails.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub check: String,
    pub location: Location,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(check: impl Into<String>, location: Location, value: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            location,
            value,
            tolerance,
            pass: value.abs() <= tolerance,
        }
    }

    /// A boolean condition, recorded as value 0 (holds) or 1 (fails) against
    /// tolerance 0.
    pub fn flag(check: impl Into<String>, location: Location, holds: bool) -> Self {
        Self::new(check, location, if holds { 0.0 } else { 1.0 }, 0.0)
    }
}

/// Full-precision scientific notation: 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        // no negative zero in tables
        format!("{:.16e}", 0.0)
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-check tallies in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub check: String,
    pub count: usize,
    pub failed: usize,
    /// Largest `|value|/tolerance` (or `|value|` when the tolerance is 0).
    pub worst: f64,
    pub worst_at: Location,
    pub tolerance: f64,
}

pub fn summarize(reports: &[ResidualReport]) -> Vec<CheckSummary> {
    let mut out: Vec<CheckSummary> = Vec::new();
    for r in reports {
        let score = if r.tolerance > 0.0 { r.value.abs() / r.tolerance } else { r.value.abs() };
        let score = if score.is_nan() { f64::INFINITY } else { score };
        let idx = match out.iter().position(|s| s.check == r.check) {
            Some(i) => i,
            None => {
                out.push(CheckSummary {
                    check: r.check.clone(),
                    count: 0,
                    failed: 0,
                    worst: f64::NEG_INFINITY,
                    worst_at: r.location,
                    tolerance: r.tolerance,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.count += 1;
        s.failed += usize::from(!r.pass);
        if score > s.worst {
            s.worst = score;
            s.worst_at = r.location;
        }
    }
    out
}

pub fn write_text<P: AsRef<Path>>(path: P, lines: &[String]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule() {
        assert!(ResidualReport::new("a", Location::Global, -1e-9, 1e-9).pass);
        assert!(!ResidualReport::new("a", Location::Global, 2e-9, 1e-9).pass);
        assert!(!ResidualReport::new("a", Location::Global, f64::NAN, 1.0).pass);
        assert!(ResidualReport::flag("b", Location::Global, true).pass);
        assert!(!ResidualReport::flag("b", Location::Global, false).pass);
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(num(-0.0), num(0.0));
        let x = 0.24262438195209418;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn summary_tallies() {
        let r = vec![
            ResidualReport::new("a", Location::Temperature(0.5), 1e-10, 1e-9),
            ResidualReport::new("b", Location::Global, 3.0, 1.0),
            ResidualReport::new("a", Location::Temperature(0.6), 5e-10, 1e-9),
        ];
        let s = summarize(&r);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].count, s[0].failed), (2, 0));
        assert_eq!(s[0].worst_at, Location::Temperature(0.6));
        assert_eq!((s[1].count, s[1].failed), (1, 1));
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_csv(&p, &["a", "b"], &[vec![num(1.0), "singular".into()]]).unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "a,b\n1.0000000000000000e0,singular\n");
    }
}
