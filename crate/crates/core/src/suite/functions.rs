//! Base functions in transformed coordinates `z`, each with its minimum 0 at `z = 0`.

use std::f64::consts::PI;

/// Largest value of `y·sin(√|y|)` on `[-500, 500]`, attained at `y ≈ 420.9687`; rounded up
/// in the last place so the Schwefel terms never go negative in floating point.
const SCHWEFEL_PEAK_VALUE: f64 = 418.982_887_272_433_8;
const SCHWEFEL_PEAK_ARG: f64 = 420.968_746_359_982_05;

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

fn ellipsoid_weight(i: usize, d: usize) -> f64 {
    if d == 1 {
        1.0
    } else {
        10f64.powf(6.0 * i as f64 / (d - 1) as f64)
    }
}

/// Axis-parallel ellipsoid with condition number 1e6.
pub fn ellipsoid(z: &[f64]) -> f64 {
    let d = z.len();
    z.iter()
        .enumerate()
        .map(|(i, v)| ellipsoid_weight(i, d) * v * v)
        .sum()
}

pub fn rastrigin(z: &[f64]) -> f64 {
    z.iter()
        .map(|v| 10.0 * (1.0 - (2.0 * PI * v).cos()) + v * v)
        .sum()
}

/// Quadratic that is 100 times steeper on the side of each axis where `z_i·sign_i > 0`.
pub fn attractive_sector(z: &[f64], sign: &[f64]) -> f64 {
    z.iter()
        .zip(sign)
        .map(|(v, s)| {
            let scale = if v * s > 0.0 { 100.0 } else { 1.0 };
            (scale * v).powi(2)
        })
        .sum()
}

/// Rosenbrock's banana in `w = c·z + 1`, `c = max(1, √D/8)`.
pub fn rosenbrock(z: &[f64]) -> f64 {
    let c = 1f64.max((z.len() as f64).sqrt() / 8.0);
    let w: Vec<f64> = z.iter().map(|v| c * v + 1.0).collect();
    if w.len() == 1 {
        return (w[0] - 1.0).powi(2);
    }
    rosenbrock_standard(&w)
}

/// The textbook form, minimum 0 at the all-ones point.
pub fn rosenbrock_standard(w: &[f64]) -> f64 {
    w.windows(2)
        .map(|p| 100.0 * (p[0] * p[0] - p[1]).powi(2) + (p[0] - 1.0).powi(2))
        .sum()
}

pub fn bent_cigar(z: &[f64]) -> f64 {
    match z.split_first() {
        Some((head, tail)) => head * head + 1e6 * sphere(tail),
        None => 0.0,
    }
}

/// Schwefel's deceptive function: `y = 420.97 + 100·z` is fed to `-y·sin(√|y|)`, whose
/// second-best basin lies far from the best one. Arguments outside `[-500, 500]` are clipped
/// and pay a quadratic penalty.
pub fn schwefel(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let mut core = 0.0;
    let mut penalty = 0.0;
    for v in z {
        let y = SCHWEFEL_PEAK_ARG + 100.0 * v;
        let clipped = y.clamp(-500.0, 500.0);
        core += SCHWEFEL_PEAK_VALUE - clipped * clipped.abs().sqrt().sin();
        penalty += (y.abs() - 500.0).max(0.0).powi(2);
    }
    core / (100.0 * d) + 0.01 * penalty
}

/// One Gaussian peak of a Gallagher-style landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub position: Vec<f64>,
    pub weight: f64,
    /// Diagonal of the peak's quadratic form.
    pub scales: Vec<f64>,
}

pub const GLOBAL_PEAK_WEIGHT: f64 = 10.0;

/// `(10 - max_i w_i·exp(-(1/2D)·Σ c_id (z_d - y_id)²))²`; the global peak sits at the origin
/// with weight 10 and every other peak is lower.
pub fn gallagher(z: &[f64], peaks: &[Peak]) -> f64 {
    let d = z.len() as f64;
    let top = peaks
        .iter()
        .map(|p| {
            let q: f64 = z
                .iter()
                .zip(&p.position)
                .zip(&p.scales)
                .map(|((zi, yi), c)| c * (zi - yi).powi(2))
                .sum();
            p.weight * (-q / (2.0 * d)).exp()
        })
        .fold(0.0, f64::max);
    (GLOBAL_PEAK_WEIGHT - top).powi(2)
}
