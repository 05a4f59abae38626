//! Published reference results and their comparison with our own average runtimes.
//!
//! A reference file is tab separated with the header `function dimension target aRT`. Lines
//! starting with `#` and blank lines are skipped. `aRT` may be `inf`. A file is imported
//! whole or not at all: the first bad line aborts the import with its line number.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::RunnerError;
use crate::report::ArtRow;
use crate::FORMAT_VERSION;

pub const REFERENCE_FILE: &str = "reference.tsv";
pub const COMPARISON_FILE: &str = "comparison.tsv";
pub const REFERENCE_HEADER: &str = "function\tdimension\ttarget\taRT";
pub const COMPARISON_HEADER: &str = "function\tdimension\ttarget\taRT\treference_aRT\tratio";

/// Relative tolerance when matching target precisions.
pub const TARGET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub function: u32,
    pub dimension: usize,
    pub target: f64,
    pub art: f64,
}

pub fn same_target(a: f64, b: f64) -> bool {
    (a - b).abs() <= TARGET_TOLERANCE * a.abs().max(b.abs())
}

impl ReferenceRow {
    fn matches(&self, function: u32, dimension: usize, target: f64) -> bool {
        self.function == function && self.dimension == dimension && same_target(self.target, target)
    }
}

pub fn parse_reference(path: &Path, text: &str) -> Result<Vec<ReferenceRow>, RunnerError> {
    let mut rows: Vec<ReferenceRow> = Vec::new();
    let mut header_seen = false;
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            if cols != REFERENCE_HEADER.split('\t').collect::<Vec<_>>() {
                return Err(RunnerError::parse(
                    path,
                    line_no,
                    format!("expected header {REFERENCE_HEADER:?}"),
                ));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(RunnerError::parse(path, line_no, "expected 4 columns"));
        }
        let bad = |what: &str| RunnerError::parse(path, line_no, format!("invalid {what}"));
        let function: u32 = cols[0].parse().map_err(|_| bad("function id"))?;
        let dimension: usize = cols[1].parse().map_err(|_| bad("dimension"))?;
        let target: f64 = cols[2].parse().map_err(|_| bad("target"))?;
        let art: f64 = cols[3].parse().map_err(|_| bad("aRT"))?;
        if !(1..=24).contains(&function) {
            return Err(bad("function id"));
        }
        if dimension == 0 {
            return Err(bad("dimension"));
        }
        if !(target.is_finite() && target > 0.0) {
            return Err(bad("target"));
        }
        if art.is_nan() || art < 0.0 {
            return Err(bad("aRT"));
        }
        if rows.iter().any(|r| r.matches(function, dimension, target)) {
            return Err(RunnerError::parse(path, line_no, "duplicate entry"));
        }
        rows.push(ReferenceRow {
            function,
            dimension,
            target,
            art,
        });
    }
    if !header_seen {
        return Err(RunnerError::parse(path, 1, "missing header"));
    }
    Ok(rows)
}

pub fn read_reference(path: &Path) -> Result<Vec<ReferenceRow>, RunnerError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
    parse_reference(path, &text)
}

/// Canonical form of an imported reference table.
pub fn render_reference(rows: &[ReferenceRow]) -> String {
    let mut out = format!("# format-version: {FORMAT_VERSION}\n{REFERENCE_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{:e}\t{}",
            r.function, r.dimension, r.target, r.art
        )
        .unwrap();
    }
    out
}

/// Joins our average runtimes with the reference on (function, dimension, target). Rows
/// without a reference counterpart are left out.
pub fn render_comparison(ours: &[ArtRow], reference: &[ReferenceRow]) -> String {
    let mut out = format!("# format-version: {FORMAT_VERSION}\n{COMPARISON_HEADER}\n");
    for row in ours {
        let Some(r) = reference
            .iter()
            .find(|r| r.matches(row.function, row.dimension, row.target))
        else {
            continue;
        };
        writeln!(
            out,
            "{}\t{}\t{:e}\t{}\t{}\t{}",
            row.function,
            row.dimension,
            row.target,
            row.art,
            r.art,
            row.art / r.art
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "# from a published run\nfunction\tdimension\ttarget\taRT\n\
                        1\t2\t1e1\t12.5\n1\t2\t1e-8\tinf\n3\t5\t1e0\t4000\n";

    #[test]
    fn imports_and_normalizes() {
        let rows = parse_reference(Path::new("r"), GOOD).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].art, f64::INFINITY);
        let again = parse_reference(Path::new("r"), &render_reference(&rows)).unwrap();
        assert_eq!(again, rows);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            (GOOD.replace("12.5", "abc"), 3),
            (
                GOOD.replace(
                    "3\t5\t1e0\t4000",
                    "3\t5\t1.0000000000001e0\t1\n3\t5\t1e0\t4000",
                ),
                6,
            ),
            (GOOD.replace("\t4000", ""), 5),
            (GOOD.replace("aRT", "art"), 2),
            (GOOD.replace("1\t2\t1e1", "1\t2\t-1"), 3),
        ];
        for (text, line) in cases {
            match parse_reference(Path::new("r"), &text) {
                Err(RunnerError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("expected a parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn comparison_joins_with_tolerance() {
        let reference = parse_reference(Path::new("r"), GOOD).unwrap();
        let ours = vec![
            ArtRow {
                function: 1,
                dimension: 2,
                target: 10.000000000001,
                successes: 15,
                fevals: 375,
                art: 25.0,
            },
            ArtRow {
                function: 1,
                dimension: 3,
                target: 10.0,
                successes: 15,
                fevals: 30,
                art: 2.0,
            },
        ];
        let text = render_comparison(&ours, &reference);
        let rows: Vec<&str> = text.lines().skip(2).collect();
        assert_eq!(rows, vec!["1\t2\t1.0000000000001e1\t25\t12.5\t2"]);
    }
}
