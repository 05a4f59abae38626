//! Experiment plans and the plain-text configuration format.
//!
//! A configuration file holds `key = value` lines; blank lines and lines starting with `#` are
//! ignored. Lists are comma separated and may contain inclusive ranges (`1-15`). Recognized
//! keys mirror the command-line flags:
//!
//! ```text
//! dims = 2, 3, 5
//! functions = 1, 3, 8          # or `implemented`, or `all`
//! instances = 1-15
//! budget_multiplier = 1000
//! depth = 2
//! alpha = 0.1
//! inflation = 1.75
//! ratio = 0.5
//! omega_min = 1e-10
//! order = descending
//! out = results
//! ```

use std::path::{Path, PathBuf};

use fda_core::bounds::Bounds;
use fda_core::driver::{FdaConfig, QualityOrder, DEFAULT_MAX_DEPTH};
use fda_core::geometry::{
    DEFAULT_ALPHA, DEFAULT_CHILD_RADIUS_RATIO, DEFAULT_INFLATION_COEFFICIENT,
};
use fda_core::local_search::DEFAULT_OMEGA_MIN;
use fda_core::suite::{
    ProblemKey, DOMAIN_LOWER, DOMAIN_UPPER, IMPLEMENTED, INSTANCES_PER_FUNCTION,
    STANDARD_DIMENSIONS,
};
use serde::Serialize;

use crate::error::RunnerError;

pub const DEFAULT_BUDGET_MULTIPLIER: u64 = 1000;

/// Optimizer parameters shared by every run of a plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdaParams {
    pub max_depth: usize,
    pub alpha: f64,
    pub child_radius_ratio: f64,
    pub inflation_coefficient: f64,
    pub omega_min: f64,
    pub order: &'static str,
}

impl Default for FdaParams {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            alpha: DEFAULT_ALPHA,
            child_radius_ratio: DEFAULT_CHILD_RADIUS_RATIO,
            inflation_coefficient: DEFAULT_INFLATION_COEFFICIENT,
            omega_min: DEFAULT_OMEGA_MIN,
            order: "descending",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentPlan {
    pub dimensions: Vec<usize>,
    pub functions: Vec<u32>,
    pub instances: Vec<u32>,
    pub budget_multiplier: u64,
    pub fda: FdaParams,
    #[serde(skip)]
    pub output: PathBuf,
    pub seedless: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            dimensions: STANDARD_DIMENSIONS.to_vec(),
            functions: IMPLEMENTED.to_vec(),
            instances: (1..=INSTANCES_PER_FUNCTION).collect(),
            budget_multiplier: DEFAULT_BUDGET_MULTIPLIER,
            fda: FdaParams::default(),
            output: PathBuf::from("fda-out"),
            seedless: false,
        }
    }
}

impl ExperimentPlan {
    /// Sorts and deduplicates the id lists and checks every parameter.
    pub fn normalize(&mut self) -> Result<(), RunnerError> {
        for list in [&mut self.functions, &mut self.instances] {
            list.sort_unstable();
            list.dedup();
        }
        self.dimensions.sort_unstable();
        self.dimensions.dedup();
        if self.dimensions.contains(&0) {
            return Err(RunnerError::Config("dimensions must be positive".into()));
        }
        if self.instances.contains(&0) {
            return Err(RunnerError::Config("instance ids start at 1".into()));
        }
        if self.budget_multiplier == 0 {
            return Err(RunnerError::Config(
                "budget multiplier must be positive".into(),
            ));
        }
        let probe = self.fda_config(self.dimensions.first().copied().unwrap_or(1))?;
        probe
            .validate()
            .map_err(|e| RunnerError::Config(e.to_string()))
    }

    pub fn budget(&self, dimension: usize) -> u64 {
        self.budget_multiplier * dimension as u64
    }

    pub fn fda_config(&self, dimension: usize) -> Result<FdaConfig, RunnerError> {
        let bounds = Bounds::hypercube(dimension, DOMAIN_LOWER, DOMAIN_UPPER)
            .map_err(|e| RunnerError::Config(e.to_string()))?;
        let mut config = FdaConfig::new(bounds, self.budget(dimension));
        config.max_depth = self.fda.max_depth;
        config.alpha = self.fda.alpha;
        config.child_radius_ratio = self.fda.child_radius_ratio;
        config.inflation_coefficient = self.fda.inflation_coefficient;
        config.omega_min = self.fda.omega_min;
        config.order = parse_order(self.fda.order)?;
        Ok(config)
    }

    /// Every planned run, ordered by function, dimension, then instance.
    pub fn problems(&self) -> Vec<ProblemKey> {
        let mut keys = Vec::new();
        for &f in &self.functions {
            for &d in &self.dimensions {
                for &i in &self.instances {
                    keys.push(ProblemKey::new(f, d, i));
                }
            }
        }
        keys
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunnerError> {
        let value = value.trim();
        let bad = |what: &str| RunnerError::Config(format!("{key}: invalid {what} {value:?}"));
        match key.trim() {
            "dims" | "dimensions" => {
                self.dimensions = parse_list(value)?.into_iter().map(|v| v as usize).collect()
            }
            "functions" => {
                self.functions = match value {
                    "implemented" => IMPLEMENTED.to_vec(),
                    "all" => (1..=24).collect(),
                    _ => parse_list(value)?
                        .into_iter()
                        .map(|v| u32::try_from(v).map_err(|_| bad("function id")))
                        .collect::<Result<_, _>>()?,
                }
            }
            "instances" => {
                self.instances = parse_list(value)?
                    .into_iter()
                    .map(|v| u32::try_from(v).map_err(|_| bad("instance id")))
                    .collect::<Result<_, _>>()?
            }
            "budget_multiplier" | "budget-multiplier" => {
                self.budget_multiplier = value.parse().map_err(|_| bad("integer"))?
            }
            "depth" | "max_depth" => {
                self.fda.max_depth = value.parse().map_err(|_| bad("integer"))?
            }
            "alpha" => self.fda.alpha = parse_real(value).ok_or_else(|| bad("number"))?,
            "inflation" => {
                self.fda.inflation_coefficient = parse_real(value).ok_or_else(|| bad("number"))?
            }
            "ratio" => {
                self.fda.child_radius_ratio = parse_real(value).ok_or_else(|| bad("number"))?
            }
            "omega_min" | "omega-min" => {
                self.fda.omega_min = parse_real(value).ok_or_else(|| bad("number"))?
            }
            "order" => {
                self.fda.order = match value {
                    "descending" => "descending",
                    "ascending" => "ascending",
                    _ => return Err(bad("order (descending|ascending)")),
                }
            }
            "out" | "output" => self.output = PathBuf::from(value),
            other => return Err(RunnerError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reads a configuration file on top of the current settings.
    pub fn load(&mut self, path: &Path) -> Result<(), RunnerError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| RunnerError::parse(path, n + 1, "expected `key = value`"))?;
            self.set(key, value).map_err(|e| match e {
                RunnerError::Config(msg) => RunnerError::parse(path, n + 1, msg),
                other => other,
            })?;
        }
        Ok(())
    }
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_order(s: &str) -> Result<QualityOrder, RunnerError> {
    match s {
        "descending" => Ok(QualityOrder::Descending),
        "ascending" => Ok(QualityOrder::Ascending),
        other => Err(RunnerError::Config(format!("unknown order {other:?}"))),
    }
}

/// Parses `1,3,5-8` into `[1, 3, 5, 6, 7, 8]`. An empty string is an empty list.
pub fn parse_list(s: &str) -> Result<Vec<u64>, RunnerError> {
    let bad = |part: &str| RunnerError::Config(format!("invalid list item {part:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad(part))?;
                let b: u64 = b.trim().parse().map_err(|_| bad(part))?;
                if a > b {
                    return Err(bad(part));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1,3, 5-7").unwrap(), vec![1, 3, 5, 6, 7]);
        assert_eq!(parse_list("").unwrap(), Vec::<u64>::new());
        assert!(parse_list("3-1").is_err());
        assert!(parse_list("a").is_err());
    }

    #[test]
    fn defaults_follow_protocol() {
        let plan = ExperimentPlan::default();
        assert_eq!(plan.dimensions, vec![2, 3, 5, 10, 20, 40]);
        assert_eq!(plan.instances.len(), 15);
        assert_eq!(plan.budget(2), 2000);
        assert_eq!(plan.budget(40), 40_000);
    }

    #[test]
    fn settings_apply() {
        let mut plan = ExperimentPlan::default();
        plan.set("dims", "5, 2, 2").unwrap();
        plan.set("functions", "8,1").unwrap();
        plan.set("order", "ascending").unwrap();
        plan.set("omega_min", "1e-6").unwrap();
        plan.normalize().unwrap();
        assert_eq!(plan.dimensions, vec![2, 5]);
        assert_eq!(plan.functions, vec![1, 8]);
        let config = plan.fda_config(5).unwrap();
        assert_eq!(config.order, QualityOrder::Ascending);
        assert_eq!(config.omega_min, 1e-6);
        assert_eq!(config.budget, 5000);
        assert_eq!(plan.problems().len(), 2 * 2 * 15);

        assert!(plan.set("seed", "3").is_err());
        assert!(plan.set("alpha", "nan").is_err());
        plan.set("inflation", "0.5").unwrap();
        assert!(plan.normalize().is_err());
    }

    #[test]
    fn config_file_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.conf");
        std::fs::write(&path, "# test\ndims = 2\n\nfunctions 1\n").unwrap();
        let err = ExperimentPlan::default().load(&path).unwrap_err();
        assert!(matches!(err, RunnerError::Parse { line: 4, .. }), "{err}");

        std::fs::write(&path, "dims = 3 # trailing\ninstances = 1-3\n").unwrap();
        let mut plan = ExperimentPlan::default();
        plan.load(&path).unwrap();
        assert_eq!(plan.dimensions, vec![3]);
        assert_eq!(plan.instances, vec![1, 2, 3]);
    }
}
