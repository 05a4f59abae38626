//! The exploration/exploitation loop.
//!
//! The root hypersphere circumscribes the search box. Regions are taken level by level: every
//! region at level `l` is handled before any region at level `l + 1`, and within a level the
//! order follows the quality score. A region above the maximum depth is decomposed and its
//! children are scored and queued one level deeper; a region at the maximum depth is handed to
//! the local search. The run ends when the budget is spent or nothing is left to exploit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::bounds::{Bounds, BoundsError};
use crate::geometry::{
    self, decompose, inflate, probe_points, score_quality, BestSoFar, GeometryError, Hypersphere,
    Sample,
};
use crate::local_search::{self, run_ils, LocalSearchError};
use crate::objective::{BudgetExhausted, Budgeted, EvalHandle, Objective};

pub use crate::objective::TracePoint;

pub const DEFAULT_MAX_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("objective has dimension {objective}, bounds have dimension {bounds}")]
    DimensionMismatch { objective: usize, bounds: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    LocalSearch(#[from] LocalSearchError),
}

/// Which end of the quality scale is extracted first within a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QualityOrder {
    /// Largest score first.
    #[default]
    Descending,
    Ascending,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdaConfig {
    /// Deepest decomposition level; regions at this level are exploited.
    pub max_depth: usize,
    pub alpha: f64,
    pub child_radius_ratio: f64,
    pub inflation_coefficient: f64,
    pub omega_min: f64,
    pub budget: u64,
    pub bounds: Bounds,
    pub order: QualityOrder,
}

impl FdaConfig {
    /// Default parameters for the given box and evaluation budget.
    pub fn new(bounds: Bounds, budget: u64) -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            alpha: geometry::DEFAULT_ALPHA,
            child_radius_ratio: geometry::DEFAULT_CHILD_RADIUS_RATIO,
            inflation_coefficient: geometry::DEFAULT_INFLATION_COEFFICIENT,
            omega_min: local_search::DEFAULT_OMEGA_MIN,
            budget,
            bounds,
            order: QualityOrder::Descending,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        let fail = |msg: String| Err(DriverError::Config(msg));
        if self.budget < 1 {
            return fail("budget must be at least 1".into());
        }
        if self.max_depth < 1 {
            return fail("max_depth must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(GeometryError::InvalidAlpha(self.alpha).into());
        }
        if !(self.child_radius_ratio > 0.0 && self.child_radius_ratio < 1.0) {
            return Err(GeometryError::InvalidRatio(self.child_radius_ratio).into());
        }
        if !(self.inflation_coefficient >= 1.0 && self.inflation_coefficient.is_finite()) {
            return Err(GeometryError::InflationBelowOne(self.inflation_coefficient).into());
        }
        if !(self.omega_min > 0.0) {
            return fail(format!(
                "omega_min must be positive, got {}",
                self.omega_min
            ));
        }
        Ok(())
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    DepthExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Progress {
    Continue,
    Stop(StopReason),
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Every improvement of the best-so-far, in evaluation order.
    pub points: Vec<TracePoint>,
    pub best: BestSoFar,
    pub evaluations_used: u64,
    pub stop: StopReason,
}

impl RunTrace {
    pub fn final_error(&self) -> f64 {
        self.points.last().map_or(f64::INFINITY, |p| p.best_error)
    }
}

/// The circumscribed hypersphere of `bounds`: centered in the box with radius
/// `max_d (upper_d - lower_d) / 2 · √D`.
pub fn make_root(bounds: &Bounds) -> Result<Hypersphere, GeometryError> {
    let center = bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(lo, hi)| (lo + hi) / 2.0)
        .collect();
    let half = bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(lo, hi)| (hi - lo) / 2.0)
        .fold(0.0, f64::max);
    Hypersphere::new(center, half * (bounds.dimension() as f64).sqrt(), 0)
}

#[derive(Debug, Clone)]
struct Entry {
    sphere: Hypersphere,
    center_point: Vec<f64>,
    center_value: f64,
    key: f64,
    seq: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: larger key first, then earlier insertion
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// A scored region waiting in the frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub sphere: Hypersphere,
    /// The point at which the center was evaluated (the center projected onto the box).
    pub center_point: Vec<f64>,
    pub center_value: f64,
}

/// Per-level queues of scored, unprocessed hyperspheres.
#[derive(Debug, Clone)]
pub struct Frontier {
    levels: Vec<BinaryHeap<Entry>>,
    current_level: usize,
    order: QualityOrder,
    seq: u64,
}

impl Frontier {
    pub fn new(order: QualityOrder) -> Self {
        Self {
            levels: Vec::new(),
            current_level: 0,
            order,
            seq: 0,
        }
    }

    pub fn current_level(&self) -> usize {
        self.current_level
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(BinaryHeap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(BinaryHeap::is_empty)
    }

    /// Queues a scored region at its own level.
    ///
    /// # Panics
    ///
    /// If the region is unscored or lies above the current level.
    pub fn push(&mut self, region: Region) {
        let quality = region
            .sphere
            .quality
            .expect("frontier regions must be scored");
        let level = region.sphere.level;
        assert!(
            level >= self.current_level,
            "cannot queue above the current level"
        );
        if self.levels.len() <= level {
            self.levels.resize_with(level + 1, BinaryHeap::new);
        }
        let key = match self.order {
            QualityOrder::Descending => quality,
            QualityOrder::Ascending => -quality,
        };
        self.levels[level].push(Entry {
            sphere: region.sphere,
            center_point: region.center_point,
            center_value: region.center_value,
            key,
            seq: self.seq,
        });
        self.seq += 1;
    }

    /// Takes the next region, moving to the next level only once the current one is empty.
    pub fn pop(&mut self) -> Option<Region> {
        while self.current_level < self.levels.len() {
            if let Some(e) = self.levels[self.current_level].pop() {
                return Some(Region {
                    sphere: e.sphere,
                    center_point: e.center_point,
                    center_value: e.center_value,
                });
            }
            self.current_level += 1;
        }
        None
    }
}

pub fn stopping_check(evaluations_used: u64, budget: u64, frontier: &Frontier) -> Progress {
    if evaluations_used >= budget {
        Progress::Stop(StopReason::Budget)
    } else if frontier.is_empty() {
        Progress::Stop(StopReason::DepthExhausted)
    } else {
        Progress::Continue
    }
}

/// Minimizes `objective` over `config.bounds`.
pub fn optimize<O: Objective + ?Sized>(
    objective: &mut O,
    config: &FdaConfig,
) -> Result<RunTrace, DriverError> {
    config.validate()?;
    let bounds = &config.bounds;
    if objective.dimension() != bounds.dimension() {
        return Err(DriverError::DimensionMismatch {
            objective: objective.dimension(),
            bounds: bounds.dimension(),
        });
    }

    let mut root = make_root(bounds)?;
    let mut eval = Budgeted::new(objective, config.budget);
    let mut frontier = Frontier::new(config.order);

    let root_point = bounds.clamped(&root.center);
    let root_value = eval
        .eval(&root_point)
        .expect("budget is at least one evaluation");
    root.quality = Some(f64::INFINITY);
    frontier.push(Region {
        sphere: root,
        center_point: root_point,
        center_value: root_value,
    });

    let stop = loop {
        if let Progress::Stop(reason) = stopping_check(eval.used(), config.budget, &frontier) {
            break reason;
        }
        let region = frontier.pop().expect("frontier is not empty");
        if region.sphere.level < config.max_depth {
            if expand(&region.sphere, config, &mut eval, &mut frontier)?.is_err() {
                break StopReason::Budget;
            }
        } else if region.sphere.radius > config.omega_min {
            run_ils(
                &region.center_point,
                region.center_value,
                region.sphere.radius,
                config.omega_min,
                &mut eval,
                bounds,
            )?;
        }
    };

    let (best, points, evaluations_used) = eval.into_parts();
    Ok(RunTrace {
        points,
        best: best.expect("at least the root center was evaluated"),
        evaluations_used,
        stop,
    })
}

/// Decomposes `parent`, then inflates, probes and scores each child in order and queues it.
/// A child whose probes cannot all be evaluated is dropped.
fn expand<O: Objective + ?Sized>(
    parent: &Hypersphere,
    config: &FdaConfig,
    eval: &mut Budgeted<'_, O>,
    frontier: &mut Frontier,
) -> Result<Result<(), BudgetExhausted>, DriverError> {
    let bounds = &config.bounds;
    for mut child in decompose(parent, config.child_radius_ratio)? {
        child.radius = inflate(child.radius, config.inflation_coefficient)?;
        let (s1, s2) = probe_points(&child, config.alpha);
        let s1 = bounds.clamped(&s1);
        let s2 = bounds.clamped(&s2);
        let center = bounds.clamped(&child.center);
        let (f1, f2, fc) = match eval_three(eval, &s1, &s2, &center) {
            Ok(v) => v,
            Err(e) => return Ok(Err(e)),
        };
        let bsf = eval.best().expect("evaluated at least once");
        score_quality(
            &mut child,
            Sample {
                point: &s1,
                value: f1,
            },
            Sample {
                point: &s2,
                value: f2,
            },
            Sample {
                point: &center,
                value: fc,
            },
            bsf,
        );
        frontier.push(Region {
            sphere: child,
            center_point: center,
            center_value: fc,
        });
    }
    Ok(Ok(()))
}

fn eval_three<E: EvalHandle + ?Sized>(
    eval: &mut E,
    a: &[f64],
    b: &[f64],
    c: &[f64],
) -> Result<(f64, f64, f64), BudgetExhausted> {
    Ok((eval.eval(a)?, eval.eval(b)?, eval.eval(c)?))
}
