//! Axis-aligned box constraints `lower <= x <= upper`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("bounds must have at least one dimension")]
    Empty,
    #[error("lower and upper bounds have different lengths ({lower} vs {upper})")]
    LengthMismatch { lower: usize, upper: usize },
    #[error("degenerate box in dimension {dim}: lower {lower} is not below upper {upper}")]
    Degenerate { dim: usize, lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, BoundsError> {
        if lower.len() != upper.len() {
            return Err(BoundsError::LengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(BoundsError::Empty);
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // also catches NaN
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(BoundsError::Degenerate {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The box `[lower, upper]^dimension`.
    pub fn hypercube(dimension: usize, lower: f64, upper: f64) -> Result<Self, BoundsError> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// Projects `x` onto the box in place.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(lo, hi);
        }
    }

    pub fn clamped(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.clamp(&mut out);
        out
    }
}
