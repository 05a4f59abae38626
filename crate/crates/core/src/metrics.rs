//! Fixed-target performance measures.
//!
//! A run "hits" a target precision `ΔI` at the first evaluation whose best-so-far error is at
//! most `ΔI`. From the hits of a set of runs on the same problem we get the average runtime
//!
//! ```text
//! aRT = (Σ RT_s + Σ RT_us) / n_s
//! ```
//!
//! where unsuccessful runs contribute their full length. The same quantity is the expectation
//! of a restart scheme that keeps drawing runs until one succeeds, which
//! [`simulate_restart_runtime`] samples directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::driver::{RunTrace, TracePoint};
use crate::suite::ProblemKey;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("trace has no evaluations")]
    EmptyTrace,
    #[error("no run records given")]
    EmptyRecords,
    #[error("target {0:e} is not part of the record's target set")]
    UnknownTarget(f64),
    #[error("no run reached target {0:e}; the restart runtime is undefined")]
    NoSuccess(f64),
    #[error("invalid target set: {0}")]
    InvalidTargets(String),
    #[error("invalid budget grid: {0}")]
    InvalidGrid(String),
    #[error("records mix different problems ({0} and {1})")]
    MixedProblems(String, String),
}

/// Target precisions, strictly descending and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    precisions: Vec<f64>,
}

impl TargetSet {
    pub fn new(precisions: Vec<f64>) -> Result<Self, MetricsError> {
        if precisions.is_empty() {
            return Err(MetricsError::InvalidTargets("empty".into()));
        }
        if let Some(p) = precisions.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
            return Err(MetricsError::InvalidTargets(format!("{p} is not positive")));
        }
        if precisions.windows(2).any(|w| w[0] <= w[1]) {
            return Err(MetricsError::InvalidTargets(
                "not strictly descending".into(),
            ));
        }
        Ok(Self { precisions })
    }

    /// 51 log-uniform precisions from `1e2` down to `1e-8`, five per decade.
    pub fn standard() -> Self {
        let precisions = (0..=50)
            .map(|i| 10f64.powf((10 - i) as f64 / 5.0))
            .collect();
        Self { precisions }
    }

    pub fn precisions(&self) -> &[f64] {
        &self.precisions
    }

    pub fn len(&self) -> usize {
        self.precisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precisions.is_empty()
    }
}

/// Evaluation budgets per dimension, log-spaced from 1 to 1000 with 20 points per decade.
pub fn standard_budget_grid() -> Vec<f64> {
    (0..=60).map(|i| 10f64.powf(i as f64 / 20.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetHit {
    pub precision: f64,
    /// First evaluation reaching the precision, if any.
    pub evaluation: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Runtime {
    Success(u64),
    /// The run never reached the target; carries its total length.
    Failure(u64),
}

impl Runtime {
    pub fn evaluations(self) -> u64 {
        match self {
            Runtime::Success(n) | Runtime::Failure(n) => n,
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Runtime::Success(_))
    }
}

/// Per-target hitting times of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub key: ProblemKey,
    pub hits: Vec<TargetHit>,
    pub evaluations: u64,
}

impl RunRecord {
    pub fn from_trace(
        key: ProblemKey,
        trace: &RunTrace,
        targets: &TargetSet,
    ) -> Result<Self, MetricsError> {
        runtimes_from_trace(key, &trace.points, trace.evaluations_used, targets)
    }

    pub fn runtime(&self, target: f64) -> Result<Runtime, MetricsError> {
        let hit = self
            .hits
            .iter()
            .find(|h| h.precision.to_bits() == target.to_bits())
            .ok_or(MetricsError::UnknownTarget(target))?;
        Ok(match hit.evaluation {
            Some(n) => Runtime::Success(n),
            None => Runtime::Failure(self.evaluations),
        })
    }
}

/// Scans an improvement trace (errors already relative to the optimum) for the first hit of
/// each target.
pub fn runtimes_from_trace(
    key: ProblemKey,
    points: &[TracePoint],
    evaluations: u64,
    targets: &TargetSet,
) -> Result<RunRecord, MetricsError> {
    if points.is_empty() || evaluations == 0 {
        return Err(MetricsError::EmptyTrace);
    }
    let hits = targets
        .precisions()
        .iter()
        .map(|&precision| TargetHit {
            precision,
            evaluation: points
                .iter()
                .find(|p| p.best_error <= precision)
                .map(|p| p.evaluation),
        })
        .collect();
    Ok(RunRecord {
        key,
        hits,
        evaluations,
    })
}

/// Success counts and average runtime of a set of runs on one problem and dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub target: f64,
    pub successes: usize,
    pub failures: usize,
    pub total_evaluations: u64,
    /// Infinite when there is no success.
    pub art: f64,
    pub success_probability: f64,
}

pub fn aggregate(records: &[RunRecord], target: f64) -> Result<AggregateStats, MetricsError> {
    let first = records.first().ok_or(MetricsError::EmptyRecords)?;
    let (mut successes, mut failures, mut total) = (0usize, 0usize, 0u64);
    for r in records {
        if (r.key.function, r.key.dimension) != (first.key.function, first.key.dimension) {
            return Err(MetricsError::MixedProblems(
                first.key.to_string(),
                r.key.to_string(),
            ));
        }
        let rt = r.runtime(target)?;
        total += rt.evaluations();
        if rt.is_success() {
            successes += 1;
        } else {
            failures += 1;
        }
    }
    let art = if successes == 0 {
        f64::INFINITY
    } else {
        total as f64 / successes as f64
    };
    Ok(AggregateStats {
        target,
        successes,
        failures,
        total_evaluations: total,
        art,
        success_probability: successes as f64 / records.len() as f64,
    })
}

/// Average runtime to reach `target`: all evaluations spent divided by the number of
/// successful runs, or `+∞` without success.
pub fn art(records: &[RunRecord], target: f64) -> Result<f64, MetricsError> {
    aggregate(records, target).map(|s| s.art)
}

/// Samples the runtime of a restart scheme: draw runs uniformly with replacement, summing the
/// lengths of failed draws, until a successful one, whose hitting time is added last.
pub fn simulate_restart_runtime(
    records: &[RunRecord],
    target: f64,
    seed: u64,
    n_samples: usize,
) -> Result<Vec<f64>, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecords);
    }
    let runtimes = records
        .iter()
        .map(|r| r.runtime(target))
        .collect::<Result<Vec<_>, _>>()?;
    if !runtimes.iter().any(|r| r.is_success()) {
        return Err(MetricsError::NoSuccess(target));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n_samples)
        .map(|_| {
            let mut total = 0u64;
            loop {
                let rt = runtimes[rng.gen_range(0..runtimes.len())];
                total += rt.evaluations();
                if rt.is_success() {
                    break total as f64;
                }
            }
        })
        .collect();
    Ok(samples)
}

/// Fraction of (run, target) pairs solved within `b·D` evaluations, for each `b` in
/// `budget_grid`. Each record contributes all of its targets.
pub fn ecdf(records: &[RunRecord], budget_grid: &[f64]) -> Result<Vec<f64>, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecords);
    }
    if budget_grid.iter().any(|b| !(*b > 0.0)) {
        return Err(MetricsError::InvalidGrid("budgets must be positive".into()));
    }
    if budget_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MetricsError::InvalidGrid(
            "budgets must be ascending".into(),
        ));
    }
    let pairs: usize = records.iter().map(|r| r.hits.len()).sum();
    if pairs == 0 {
        return Err(MetricsError::EmptyRecords);
    }
    let curve = budget_grid
        .iter()
        .map(|b| {
            let solved = records
                .iter()
                .map(|r| {
                    let limit = b * r.key.dimension as f64;
                    r.hits
                        .iter()
                        .filter(|h| h.evaluation.is_some_and(|e| e as f64 <= limit))
                        .count()
                })
                .sum::<usize>();
            solved as f64 / pairs as f64
        })
        .collect();
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(instance: u32) -> ProblemKey {
        ProblemKey::new(1, 2, instance)
    }

    fn record(instance: u32, target: f64, hit: Option<u64>, evaluations: u64) -> RunRecord {
        RunRecord {
            key: key(instance),
            hits: vec![TargetHit {
                precision: target,
                evaluation: hit,
            }],
            evaluations,
        }
    }

    fn trace(points: &[(u64, f64)]) -> Vec<TracePoint> {
        points
            .iter()
            .map(|&(evaluation, best_error)| TracePoint {
                evaluation,
                best_error,
            })
            .collect()
    }

    #[test]
    fn standard_targets() {
        let t = TargetSet::standard();
        assert_eq!(t.len(), 51);
        assert_eq!(t.precisions()[0], 100.0);
        assert_eq!(t.precisions()[50], 1e-8);
        assert_eq!(t.precisions()[25], 0.001);
        let grid = standard_budget_grid();
        assert_eq!(grid.len(), 61);
        assert_eq!((grid[0], grid[20], grid[60]), (1.0, 10.0, 1000.0));
    }

    #[test]
    fn target_set_validation() {
        assert!(TargetSet::new(vec![1.0, 1.0]).is_err());
        assert!(TargetSet::new(vec![1.0, 2.0]).is_err());
        assert!(TargetSet::new(vec![1.0, 0.0]).is_err());
        assert!(TargetSet::new(vec![]).is_err());
        assert!(TargetSet::new(vec![1.0, 1e-8]).is_ok());
    }

    #[test]
    fn extract_hits() {
        let targets = TargetSet::new(vec![1.0, 1e-8]).unwrap();
        let r = runtimes_from_trace(
            key(1),
            &trace(&[(1, 5.0), (10, 0.5), (50, 1e-9)]),
            60,
            &targets,
        )
        .unwrap();
        assert_eq!(r.runtime(1.0), Ok(Runtime::Success(10)));
        assert_eq!(r.runtime(1e-8), Ok(Runtime::Success(50)));

        let r =
            runtimes_from_trace(key(1), &trace(&[(1, 5.0), (300, 1e-6)]), 2000, &targets).unwrap();
        assert_eq!(r.runtime(1e-8), Ok(Runtime::Failure(2000)));

        let targets = TargetSet::new(vec![1e-1, 1e-2, 1e-3]).unwrap();
        let r =
            runtimes_from_trace(key(1), &trace(&[(1, 3.0), (100, 5e-3)]), 500, &targets).unwrap();
        let hits: Vec<Option<u64>> = r.hits.iter().map(|h| h.evaluation).collect();
        assert_eq!(hits, vec![Some(100), Some(100), None]);

        assert_eq!(
            runtimes_from_trace(key(1), &[], 0, &targets),
            Err(MetricsError::EmptyTrace)
        );
    }

    #[test]
    fn art_examples() {
        let recs = vec![
            record(1, 1.0, Some(100), 1000),
            record(2, 1.0, Some(200), 1000),
            record(3, 1.0, None, 1000),
        ];
        assert_eq!(art(&recs, 1.0), Ok(650.0));
        assert_eq!(art(&[record(1, 1.0, Some(42), 100)], 1.0), Ok(42.0));
        assert_eq!(art(&[record(1, 1.0, None, 100)], 1.0), Ok(f64::INFINITY));
        assert_eq!(art(&recs, 0.5), Err(MetricsError::UnknownTarget(0.5)));
        assert_eq!(art(&[], 1.0), Err(MetricsError::EmptyRecords));

        let stats = aggregate(&recs, 1.0).unwrap();
        assert_eq!(
            (stats.successes, stats.failures, stats.total_evaluations),
            (2, 1, 1300)
        );
        assert!((stats.success_probability - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn art_rejects_mixed_problems() {
        let mut other = record(1, 1.0, Some(5), 10);
        other.key.dimension = 5;
        let recs = vec![record(1, 1.0, Some(5), 10), other];
        assert!(matches!(
            art(&recs, 1.0),
            Err(MetricsError::MixedProblems(..))
        ));
    }

    #[test]
    fn restart_simulation_examples() {
        let all = vec![record(1, 1.0, Some(100), 500); 3];
        let s = simulate_restart_runtime(&all, 1.0, 1, 1000).unwrap();
        assert!(s.iter().all(|v| *v == 100.0));

        let half = vec![record(1, 1.0, Some(10), 50), record(2, 1.0, None, 90)];
        let s = simulate_restart_runtime(&half, 1.0, 3, 100_000).unwrap();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 100.0).abs() / 100.0 < 0.03, "mean {mean}");
        assert!((mean - art(&half, 1.0).unwrap()).abs() / 100.0 < 0.03);

        assert_eq!(simulate_restart_runtime(&half, 1.0, 3, 0), Ok(vec![]));
        assert_eq!(
            simulate_restart_runtime(&[record(1, 1.0, None, 9)], 1.0, 0, 10),
            Err(MetricsError::NoSuccess(1.0))
        );
    }

    #[test]
    fn restart_simulation_is_reproducible() {
        let recs = vec![record(1, 1.0, Some(10), 50), record(2, 1.0, None, 90)];
        assert_eq!(
            simulate_restart_runtime(&recs, 1.0, 9, 100),
            simulate_restart_runtime(&recs, 1.0, 9, 100)
        );
    }

    fn two_target_record(instance: u32, a: Option<u64>, b: Option<u64>) -> RunRecord {
        RunRecord {
            key: ProblemKey::new(1, 3, instance),
            hits: vec![
                TargetHit {
                    precision: 1.0,
                    evaluation: a,
                },
                TargetHit {
                    precision: 0.1,
                    evaluation: b,
                },
            ],
            evaluations: 100,
        }
    }

    #[test]
    fn ecdf_examples() {
        let d = 3;
        let grid = [1.0, 2.0, 3.0, 4.0];
        let recs = vec![
            two_target_record(1, Some(d), Some(3 * d)),
            two_target_record(2, None, None),
        ];
        assert_eq!(ecdf(&recs, &grid), Ok(vec![0.25, 0.25, 0.5, 0.5]));

        let solved = vec![two_target_record(1, Some(1), Some(d))];
        assert_eq!(ecdf(&solved, &grid), Ok(vec![1.0; 4]));
        let unsolved = vec![two_target_record(1, None, None)];
        assert_eq!(ecdf(&unsolved, &grid), Ok(vec![0.0; 4]));

        assert!(ecdf(&[], &grid).is_err());
        assert!(ecdf(&recs, &[2.0, 1.0]).is_err());
        assert!(ecdf(&recs, &[0.0, 1.0]).is_err());
    }

    fn arb_records() -> impl Strategy<Value = Vec<RunRecord>> {
        prop::collection::vec((1u64..5000, prop::bool::ANY, 1u64..5000), 1..20).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (hit, ok, extra))| {
                    record(i as u32 + 1, 1.0, ok.then_some(hit), hit + extra)
                })
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn art_ignores_record_order(mut recs in arb_records(), seed in any::<u64>()) {
            let before = art(&recs, 1.0).unwrap();
            let mut rng = crate::suite::SplitMix64::new(seed);
            rng.shuffle(&mut recs);
            prop_assert_eq!(art(&recs, 1.0).unwrap(), before);
        }

        #[test]
        fn ecdf_is_monotone_and_bounded(
            hits in prop::collection::vec(
                prop::collection::vec(prop::option::of(1u64..5000), 1..6), 1..10),
        ) {
            let recs: Vec<RunRecord> = hits.iter().enumerate().map(|(i, h)| RunRecord {
                key: ProblemKey::new(1, 5, i as u32 + 1),
                hits: h.iter().enumerate().map(|(j, e)| TargetHit {
                    precision: 10f64.powi(-(j as i32)),
                    evaluation: *e,
                }).collect(),
                evaluations: 5000,
            }).collect();
            let curve = ecdf(&recs, &standard_budget_grid()).unwrap();
            prop_assert!(curve.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn harder_target_never_raises_ecdf(
            base in prop::collection::vec((1u64..3000, 0u64..3000, prop::bool::ANY), 1..10),
        ) {
            // the extra target is hit no earlier than the easier one in the same run
            let make = |with_hard: bool| -> Vec<RunRecord> {
                base.iter().enumerate().map(|(i, &(easy, delay, hard_ok))| {
                    let mut hits = vec![TargetHit { precision: 1.0, evaluation: Some(easy) }];
                    if with_hard {
                        hits.push(TargetHit {
                            precision: 1e-3,
                            evaluation: hard_ok.then_some(easy + delay),
                        });
                    }
                    RunRecord { key: ProblemKey::new(1, 2, i as u32 + 1), hits, evaluations: 6000 }
                }).collect()
            };
            let grid = standard_budget_grid();
            let easy = ecdf(&make(false), &grid).unwrap();
            let both = ecdf(&make(true), &grid).unwrap();
            prop_assert!(both.iter().zip(&easy).all(|(b, e)| b <= e));
        }

        #[test]
        fn extraction_matches_running_minimum(
            values in prop::collection::vec(-1.0f64..100.0, 1..200),
        ) {
            // raw evaluation log -> running-minimum trace -> hits, against a direct scan
            let mut best = f64::INFINITY;
            let mut points = Vec::new();
            for (i, v) in values.iter().enumerate() {
                if *v < best {
                    best = *v;
                    points.push(TracePoint { evaluation: i as u64 + 1, best_error: best });
                }
            }
            let targets = TargetSet::standard();
            let rec = runtimes_from_trace(key(1), &points, values.len() as u64, &targets).unwrap();
            for h in &rec.hits {
                let direct = values.iter().position(|v| *v <= h.precision).map(|i| i as u64 + 1);
                prop_assert_eq!(h.evaluation, direct);
            }
            let again = runtimes_from_trace(key(1), &points, values.len() as u64, &targets).unwrap();
            prop_assert_eq!(rec, again);
        }
    }
}
