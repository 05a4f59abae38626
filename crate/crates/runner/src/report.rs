//! Report tables derived from run records.
//!
//! All tables are tab separated, start with a `# format-version:` line and a header row:
//!
//! - `art.tsv`: `function dimension target n_s fevals aRT`, one row per function, dimension
//!   and target precision. `aRT` is `inf` when no run succeeded.
//! - `ecdf/ecdf_<group>_d<D>.tsv`: `group dimension evals_per_dim fraction`, the share of
//!   (instance, target) pairs solved within `evals_per_dim · D` evaluations.
//! - `scaling/scaling_f<id>.tsv`: `function target dimension n_s aRT`, average runtime
//!   against dimension for each target.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fda_core::metrics::{aggregate, ecdf, RunRecord, TargetSet};
use fda_core::suite::FunctionGroup;

use crate::error::RunnerError;
use crate::FORMAT_VERSION;

pub const ART_FILE: &str = "art.tsv";
pub const ART_HEADER: &str = "function\tdimension\ttarget\tn_s\tfevals\taRT";
pub const ECDF_HEADER: &str = "group\tdimension\tevals_per_dim\tfraction";
pub const SCALING_HEADER: &str = "function\ttarget\tdimension\tn_s\taRT";

pub fn ecdf_file(group: FunctionGroup, dimension: usize) -> String {
    format!("ecdf/ecdf_{}_d{dimension}.tsv", group.slug())
}

pub fn scaling_file(function: u32) -> String {
    format!("scaling/scaling_f{function}.tsv")
}

fn version_line() -> String {
    format!("# format-version: {FORMAT_VERSION}\n")
}

/// Records grouped by (function, dimension), in key order.
fn by_problem(records: &[RunRecord]) -> BTreeMap<(u32, usize), Vec<RunRecord>> {
    let mut cells: BTreeMap<(u32, usize), Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.key.function, r.key.dimension))
            .or_default()
            .push(r.clone());
    }
    cells
}

pub fn render_art_table(records: &[RunRecord], targets: &TargetSet) -> Result<String, RunnerError> {
    let mut out = version_line();
    writeln!(out, "{ART_HEADER}").unwrap();
    for ((function, dimension), cell) in by_problem(records) {
        for &t in targets.precisions() {
            let s = aggregate(&cell, t)?;
            writeln!(
                out,
                "{function}\t{dimension}\t{t:e}\t{}\t{}\t{}",
                s.successes, s.total_evaluations, s.art
            )
            .unwrap();
        }
    }
    Ok(out)
}

pub fn render_ecdf_tables(
    records: &[RunRecord],
    budget_grid: &[f64],
) -> Result<Vec<(String, String)>, RunnerError> {
    let mut groups: BTreeMap<(FunctionGroup, usize), Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        let group = FunctionGroup::of(r.key.function)
            .ok_or_else(|| RunnerError::Config(format!("unknown function {}", r.key.function)))?;
        groups
            .entry((group, r.key.dimension))
            .or_default()
            .push(r.clone());
    }
    let mut files = Vec::new();
    for ((group, dimension), recs) in groups {
        let curve = ecdf(&recs, budget_grid)?;
        let mut out = version_line();
        writeln!(out, "{ECDF_HEADER}").unwrap();
        for (b, v) in budget_grid.iter().zip(curve) {
            writeln!(out, "{}\t{dimension}\t{b:e}\t{v}", group.slug()).unwrap();
        }
        files.push((ecdf_file(group, dimension), out));
    }
    Ok(files)
}

pub fn render_scaling_tables(
    records: &[RunRecord],
    targets: &TargetSet,
) -> Result<Vec<(String, String)>, RunnerError> {
    let mut per_function: BTreeMap<u32, Vec<(usize, Vec<RunRecord>)>> = BTreeMap::new();
    for ((function, dimension), cell) in by_problem(records) {
        per_function
            .entry(function)
            .or_default()
            .push((dimension, cell));
    }
    let mut files = Vec::new();
    for (function, cells) in per_function {
        let mut out = version_line();
        writeln!(out, "{SCALING_HEADER}").unwrap();
        for &t in targets.precisions() {
            for (dimension, cell) in &cells {
                let s = aggregate(cell, t)?;
                writeln!(
                    out,
                    "{function}\t{t:e}\t{dimension}\t{}\t{}",
                    s.successes, s.art
                )
                .unwrap();
            }
        }
        files.push((scaling_file(function), out));
    }
    Ok(files)
}

/// Every report file, keyed by path relative to the output directory.
pub fn build_reports(
    records: &[RunRecord],
    targets: &TargetSet,
    budget_grid: &[f64],
) -> Result<BTreeMap<String, String>, RunnerError> {
    let mut files = BTreeMap::new();
    if records.is_empty() {
        return Ok(files);
    }
    files.insert(ART_FILE.to_string(), render_art_table(records, targets)?);
    files.extend(render_ecdf_tables(records, budget_grid)?);
    files.extend(render_scaling_tables(records, targets)?);
    Ok(files)
}

/// Splits a versioned TSV into data rows, checking the version and header.
fn tsv_rows<'a>(
    path: &Path,
    text: &'a str,
    header: &str,
) -> Result<Vec<(usize, Vec<&'a str>)>, RunnerError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l == version_line().trim_end() => {}
        _ => {
            return Err(RunnerError::parse(
                path,
                1,
                "missing or unsupported format-version",
            ))
        }
    }
    match lines.next() {
        Some((_, l)) if l == header => {}
        _ => {
            return Err(RunnerError::parse(
                path,
                2,
                format!("expected header {header:?}"),
            ))
        }
    }
    let width = header.split('\t').count();
    lines
        .map(|(n, l)| {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() != width {
                return Err(RunnerError::parse(
                    path,
                    n + 1,
                    format!("expected {width} columns"),
                ));
            }
            Ok((n + 1, cols))
        })
        .collect()
}

fn num<T: std::str::FromStr>(path: &Path, line: usize, s: &str) -> Result<T, RunnerError> {
    s.parse()
        .map_err(|_| RunnerError::parse(path, line, format!("invalid number {s:?}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtRow {
    pub function: u32,
    pub dimension: usize,
    pub target: f64,
    pub successes: usize,
    pub fevals: u64,
    pub art: f64,
}

pub fn parse_art_table(path: &Path, text: &str) -> Result<Vec<ArtRow>, RunnerError> {
    tsv_rows(path, text, ART_HEADER)?
        .into_iter()
        .map(|(n, c)| {
            Ok(ArtRow {
                function: num(path, n, c[0])?,
                dimension: num(path, n, c[1])?,
                target: num(path, n, c[2])?,
                successes: num(path, n, c[3])?,
                fevals: num(path, n, c[4])?,
                art: num(path, n, c[5])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcdfCurve {
    pub group: FunctionGroup,
    pub dimension: usize,
    /// (evaluations / D, fraction solved)
    pub points: Vec<(f64, f64)>,
}

impl EcdfCurve {
    /// Describes the first violation of monotonicity or of the `[0, 1]` range, if any.
    pub fn check(&self) -> Option<String> {
        if let Some((b, v)) = self.points.iter().find(|(_, v)| !(0.0..=1.0).contains(v)) {
            return Some(format!("fraction {v} at {b} outside [0, 1]"));
        }
        self.points.windows(2).find(|w| w[1].1 < w[0].1).map(|w| {
            format!(
                "fraction decreases from {} to {} at {}",
                w[0].1, w[1].1, w[1].0
            )
        })
    }
}

pub fn parse_ecdf(path: &Path, text: &str) -> Result<EcdfCurve, RunnerError> {
    let rows = tsv_rows(path, text, ECDF_HEADER)?;
    let first = rows
        .first()
        .ok_or_else(|| RunnerError::parse(path, 3, "empty curve"))?;
    let group = FunctionGroup::from_slug(first.1[0])
        .ok_or_else(|| RunnerError::parse(path, first.0, "unknown group"))?;
    let dimension = num(path, first.0, first.1[1])?;
    let mut points = Vec::with_capacity(rows.len());
    for (n, c) in &rows {
        if c[0] != group.slug() || num::<usize>(path, *n, c[1])? != dimension {
            return Err(RunnerError::parse(path, *n, "mixed group or dimension"));
        }
        points.push((num(path, *n, c[2])?, num(path, *n, c[3])?));
    }
    Ok(EcdfCurve {
        group,
        dimension,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub function: u32,
    /// (target, dimension, aRT)
    pub rows: Vec<(f64, usize, f64)>,
}

pub fn parse_scaling(path: &Path, text: &str) -> Result<ScalingTable, RunnerError> {
    let rows = tsv_rows(path, text, SCALING_HEADER)?;
    let function = match rows.first() {
        Some((n, c)) => num(path, *n, c[0])?,
        None => return Err(RunnerError::parse(path, 3, "empty table")),
    };
    let rows = rows
        .iter()
        .map(|(n, c)| {
            Ok((
                num(path, *n, c[1])?,
                num(path, *n, c[2])?,
                num(path, *n, c[4])?,
            ))
        })
        .collect::<Result<_, RunnerError>>()?;
    Ok(ScalingTable { function, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fda_core::metrics::{standard_budget_grid, TargetHit};
    use fda_core::suite::ProblemKey;

    fn rec(f: u32, d: usize, i: u32, hits: &[Option<u64>], evals: u64) -> RunRecord {
        RunRecord {
            key: ProblemKey::new(f, d, i),
            hits: hits
                .iter()
                .zip([1.0, 0.1])
                .map(|(h, p)| TargetHit {
                    precision: p,
                    evaluation: *h,
                })
                .collect(),
            evaluations: evals,
        }
    }

    #[test]
    fn art_table_rows() {
        let targets = TargetSet::new(vec![1.0, 0.1]).unwrap();
        let records = vec![
            rec(1, 2, 1, &[Some(100), None], 1000),
            rec(1, 2, 2, &[Some(200), None], 1000),
            rec(1, 2, 3, &[None, None], 1000),
        ];
        let text = render_art_table(&records, &targets).unwrap();
        assert_eq!(
            text,
            "# format-version: 1\nfunction\tdimension\ttarget\tn_s\tfevals\taRT\n\
             1\t2\t1e0\t2\t1300\t650\n1\t2\t1e-1\t0\t3000\tinf\n"
        );
        let rows = parse_art_table(Path::new("art.tsv"), &text).unwrap();
        assert_eq!(rows[0].art, 650.0);
        assert_eq!(rows[1].art, f64::INFINITY);
    }

    #[test]
    fn ecdf_files_per_group_and_dimension() {
        let records = vec![
            rec(1, 2, 1, &[Some(2), Some(40)], 100),
            rec(3, 2, 1, &[None, None], 100),
            rec(15, 2, 1, &[Some(5), None], 100),
            rec(1, 5, 1, &[Some(5), None], 100),
        ];
        let files = render_ecdf_tables(&records, &standard_budget_grid()).unwrap();
        let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "ecdf/ecdf_separable_d2.tsv",
                "ecdf/ecdf_separable_d5.tsv",
                "ecdf/ecdf_multi-modal_d2.tsv"
            ]
        );
        let curve = parse_ecdf(Path::new(&files[0].0), &files[0].1).unwrap();
        assert_eq!(curve.group, FunctionGroup::Separable);
        assert_eq!(curve.points.len(), 61);
        assert_eq!(curve.points[0].1, 0.25);
        assert_eq!(curve.points[60].1, 0.5);
        assert_eq!(curve.check(), None);
    }

    #[test]
    fn ecdf_check_flags_violations() {
        let mut c = EcdfCurve {
            group: FunctionGroup::Separable,
            dimension: 2,
            points: vec![(1.0, 0.5), (2.0, 0.4)],
        };
        assert!(c.check().is_some());
        c.points = vec![(1.0, 0.5), (2.0, 1.5)];
        assert!(c.check().is_some());
    }

    #[test]
    fn scaling_has_one_point_per_dimension() {
        let targets = TargetSet::new(vec![1.0, 0.1]).unwrap();
        let records: Vec<RunRecord> = [2, 3, 5]
            .iter()
            .map(|&d| rec(1, d, 1, &[Some(10 * d as u64), None], 1000))
            .collect();
        let files = render_scaling_tables(&records, &targets).unwrap();
        assert_eq!(files.len(), 1);
        let table = parse_scaling(Path::new("s"), &files[0].1).unwrap();
        let first: Vec<_> = table.rows.iter().filter(|r| r.0 == 1.0).collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[2], &(1.0, 5, 50.0));
    }
}
