//! Hyperspheres and the fractal decomposition of the search space.
//!
//! A hypersphere of radius `r` is split into `2·D` children whose centers sit at distance
//! `r - r'` from the parent center along each axis, in both directions. Children are then
//! inflated so their union covers the parent. Each region is ranked by a quality score built
//! from three probe evaluations and their distances to the best point seen so far.

use thiserror::Error;

/// Ratio `r'/r` between child and parent radius before inflation.
pub const DEFAULT_CHILD_RADIUS_RATIO: f64 = 0.5;
pub const DEFAULT_INFLATION_COEFFICIENT: f64 = 1.75;
/// Probe offset, as a fraction of the radius.
pub const DEFAULT_ALPHA: f64 = 0.1;
/// Distances to the best-so-far below this are treated as zero when scoring.
pub const DEGENERATE_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("hypersphere radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("hypersphere center must have at least one coordinate")]
    EmptyCenter,
    #[error("child radius ratio must lie in (0, 1), got {0}")]
    InvalidRatio(f64),
    #[error("inflation coefficient must be at least 1, got {0}")]
    InflationBelowOne(f64),
    #[error("probe offset alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypersphere {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Decomposition depth; the root is level 0.
    pub level: usize,
    pub quality: Option<f64>,
}

impl Hypersphere {
    pub fn new(center: Vec<f64>, radius: f64, level: usize) -> Result<Self, GeometryError> {
        if center.is_empty() {
            return Err(GeometryError::EmptyCenter);
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self {
            center,
            radius,
            level,
            quality: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        distance(&self.center, x) <= self.radius
    }
}

/// Best point observed during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSoFar {
    pub position: Vec<f64>,
    pub value: f64,
}

impl BestSoFar {
    pub fn new(position: Vec<f64>, value: f64) -> Self {
        Self { position, value }
    }

    /// Replaces the record if `value` is strictly better. Returns whether it did.
    pub fn offer(&mut self, position: &[f64], value: f64) -> bool {
        if value < self.value {
            self.value = value;
            self.position.clear();
            self.position.extend_from_slice(position);
            true
        } else {
            false
        }
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Splits `parent` into `2·D` children of radius `ratio · r`, not yet inflated.
///
/// Child `i` (1-based) is displaced by `(-1)^i · (r - r')` along axis `ceil(i/2)`, so the
/// order is: axis 1 minus, axis 1 plus, axis 2 minus, axis 2 plus, and so on.
pub fn decompose(parent: &Hypersphere, ratio: f64) -> Result<Vec<Hypersphere>, GeometryError> {
    if !(parent.radius > 0.0) {
        return Err(GeometryError::NonPositiveRadius(parent.radius));
    }
    if parent.center.is_empty() {
        return Err(GeometryError::EmptyCenter);
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(GeometryError::InvalidRatio(ratio));
    }
    let child_radius = ratio * parent.radius;
    let offset = parent.radius - child_radius;
    let mut children = Vec::with_capacity(2 * parent.dimension());
    for axis in 0..parent.dimension() {
        for sign in [-1.0, 1.0] {
            let mut center = parent.center.clone();
            center[axis] += sign * offset;
            children.push(Hypersphere {
                center,
                radius: child_radius,
                level: parent.level + 1,
                quality: None,
            });
        }
    }
    Ok(children)
}

pub fn inflate(radius: f64, coefficient: f64) -> Result<f64, GeometryError> {
    if !(radius > 0.0) {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    if !(coefficient >= 1.0) || !coefficient.is_finite() {
        return Err(GeometryError::InflationBelowOne(coefficient));
    }
    Ok(radius * coefficient)
}

/// The two probe points `C ± α·(r/√D)·(1, …, 1)`; both lie at distance `α·r` from the center.
pub fn probe_points(h: &Hypersphere, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let step = alpha * h.radius / (h.dimension() as f64).sqrt();
    let s1 = h.center.iter().map(|c| c + step).collect();
    let s2 = h.center.iter().map(|c| c - step).collect();
    (s1, s2)
}

/// An evaluated point.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub point: &'a [f64],
    pub value: f64,
}

/// Scores `h` by the largest of the value-to-distance ratios of its three samples, measured
/// against the best-so-far position, and stores the score in `h.quality`.
///
/// Ratios whose distance falls below [`DEGENERATE_DISTANCE`] are skipped. When all three are
/// skipped the region contains the best-so-far and scores `+∞`.
pub fn score_quality(
    h: &mut Hypersphere,
    s1: Sample<'_>,
    s2: Sample<'_>,
    center: Sample<'_>,
    bsf: &BestSoFar,
) -> f64 {
    let q = [s1, s2, center]
        .iter()
        .filter_map(|s| {
            let d = distance(s.point, &bsf.position);
            (d >= DEGENERATE_DISTANCE).then(|| s.value / d)
        })
        .reduce(f64::max)
        .unwrap_or(f64::INFINITY);
    h.quality = Some(q);
    q
}
