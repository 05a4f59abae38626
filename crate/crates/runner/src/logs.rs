//! Raw per-run logs.
//!
//! One CSV file per run. Metadata lines start with `# ` and precede a header and one row per
//! improvement of the best-so-far:
//!
//! ```text
//! # format-version: 1
//! # problem: f1_d2_i1
//! # budget: 2000
//! # evaluations_used: 2000
//! # f_opt: -12.34
//! # stop: budget
//! evaluation_index,best_error
//! 1,1.2345e2
//! 13,4.5e1
//! ```
//!
//! `best_error` is the best value found so far minus `f_opt`, written in shortest round-trip
//! form so the file reproduces the trace bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use fda_core::driver::{RunTrace, StopReason, TracePoint};
use fda_core::suite::ProblemKey;

use crate::error::RunnerError;
use crate::FORMAT_VERSION;

pub const HEADER: &str = "evaluation_index,best_error";

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub key: ProblemKey,
    pub budget: u64,
    pub evaluations_used: u64,
    pub f_opt: f64,
    pub stop: StopReason,
    pub points: Vec<TracePoint>,
}

impl RunLog {
    pub fn from_trace(key: ProblemKey, budget: u64, f_opt: f64, trace: &RunTrace) -> Self {
        Self {
            key,
            budget,
            evaluations_used: trace.evaluations_used,
            f_opt,
            stop: trace.stop,
            points: trace.points.clone(),
        }
    }

    pub fn file_name(key: &ProblemKey) -> String {
        format!("{key}.csv")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let stop = match self.stop {
            StopReason::Budget => "budget",
            StopReason::DepthExhausted => "depth-exhausted",
        };
        writeln!(out, "# format-version: {FORMAT_VERSION}").unwrap();
        writeln!(out, "# problem: {}", self.key).unwrap();
        writeln!(out, "# budget: {}", self.budget).unwrap();
        writeln!(out, "# evaluations_used: {}", self.evaluations_used).unwrap();
        writeln!(out, "# f_opt: {:e}", self.f_opt).unwrap();
        writeln!(out, "# stop: {stop}").unwrap();
        writeln!(out, "{HEADER}").unwrap();
        for p in &self.points {
            writeln!(out, "{},{:e}", p.evaluation, p.best_error).unwrap();
        }
        out
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, RunnerError> {
        let err = |line: usize, msg: String| RunnerError::parse(path, line, msg);
        let mut meta = std::collections::BTreeMap::new();
        let mut lines = text.lines().enumerate().peekable();
        while let Some((n, line)) = lines.next_if(|(_, l)| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            let (k, v) = body
                .split_once(':')
                .ok_or_else(|| err(n + 1, format!("malformed metadata {line:?}")))?;
            meta.insert(k.trim().to_string(), (n + 1, v.trim().to_string()));
        }
        let get = |k: &str| -> Result<&(usize, String), RunnerError> {
            meta.get(k)
                .ok_or_else(|| err(1, format!("missing metadata field {k:?}")))
        };
        let field = |k: &str| -> Result<u64, RunnerError> {
            let (n, v) = get(k)?;
            v.parse()
                .map_err(|_| err(*n, format!("{k} is not an integer")))
        };

        let version = field("format-version")?;
        if version != FORMAT_VERSION as u64 {
            return Err(err(1, format!("unsupported format version {version}")));
        }
        let (n, key) = get("problem")?;
        let key: ProblemKey = key.parse().map_err(|e| err(*n, format!("{e}")))?;
        let budget = field("budget")?;
        let evaluations_used = field("evaluations_used")?;
        let (n, f_opt) = get("f_opt")?;
        let f_opt: f64 = f_opt
            .parse()
            .map_err(|_| err(*n, "f_opt is not a number".into()))?;
        let (n, stop) = get("stop")?;
        let stop = match stop.as_str() {
            "budget" => StopReason::Budget,
            "depth-exhausted" => StopReason::DepthExhausted,
            other => return Err(err(*n, format!("unknown stop reason {other:?}"))),
        };

        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, other)) => return Err(err(n + 1, format!("expected header, got {other:?}"))),
            None => return Err(err(text.lines().count(), "missing header".into())),
        }
        let mut points: Vec<TracePoint> = Vec::new();
        for (n, line) in lines {
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| err(n + 1, format!("malformed row {line:?}")))?;
            let evaluation: u64 = a
                .parse()
                .map_err(|_| err(n + 1, "evaluation_index is not an integer".into()))?;
            let best_error: f64 = b
                .parse()
                .map_err(|_| err(n + 1, "best_error is not a number".into()))?;
            if let Some(prev) = points.last() {
                if evaluation <= prev.evaluation || best_error >= prev.best_error {
                    return Err(err(n + 1, "trace rows must improve strictly".into()));
                }
            }
            if evaluation > evaluations_used {
                return Err(err(
                    n + 1,
                    "evaluation index beyond evaluations_used".into(),
                ));
            }
            points.push(TracePoint {
                evaluation,
                best_error,
            });
        }
        if evaluations_used > budget {
            return Err(err(1, "evaluations_used exceeds budget".into()));
        }
        Ok(Self {
            key,
            budget,
            evaluations_used,
            f_opt,
            stop,
            points,
        })
    }

    pub fn read(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
        Self::parse(path, &text)
    }
}
