//! Sample files: one decimal float per line, `#` starts a comment, blank
//! lines are skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ergoclust::Sample64;

use crate::error::{CliError, Result};

pub fn parse_sample(text: &str, path: &Path) -> Result<Sample64> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |reason: String| CliError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let v: f64 = line
            .parse()
            .map_err(|e| parse_err(format!("cannot parse {line:?} as a number: {e}")))?;
        if !v.is_finite() {
            return Err(parse_err(format!("value {line:?} is not finite")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: "sample has no values".into(),
        });
    }
    Ok(Sample64::new(values).expect("values checked finite and nonempty"))
}

pub fn read_sample(path: &Path) -> Result<Sample64> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sample(&text, path)
}

/// Shortest round-trip formatting, so a re-read is bit-identical.
pub fn format_sample(sample: &Sample64) -> String {
    let mut out = String::with_capacity(sample.len() * 20);
    for v in sample.values() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn write_sample(path: &Path, sample: &Sample64) -> Result<()> {
    fs::write(path, format_sample(sample))
        .map_err(|e| CliError::write(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks_are_skipped() {
        let s = parse_sample("# header\n0.25\n\n  0.5 # inline\n1e-3\n", Path::new("x")).unwrap();
        assert_eq!(s.values(), &[0.25, 0.5, 0.001]);
    }

    #[test]
    fn bad_line_reports_line_number() {
        let err = parse_sample("0.1\nabc\n", Path::new("f.txt")).unwrap_err();
        assert!(err.to_string().starts_with("f.txt:2:"), "{err}");
        assert_eq!(err.exit_code(), 2);
        assert!(parse_sample("nan\n", Path::new("f")).is_err());
        assert!(parse_sample("# only\n", Path::new("f")).is_err());
    }

    #[test]
    fn format_round_trips_bits() {
        let values = vec![0.1 + 0.2, 1.0 / 3.0, 5e-324, 0.0, -0.0, 1.0];
        let s = Sample64::new(values.clone()).unwrap();
        let back = parse_sample(&format_sample(&s), Path::new("r")).unwrap();
        for (a, b) in values.iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
