//! A noiseless benchmark suite with 24 function slots in five groups.
//!
//! An instance is a base function bound to a dimension and an instance number. The triple
//! seeds a [`SplitMix64`] stream that draws, in order, the optimum location `x_opt`, the optimal
//! value `f_opt`, the rotation (for non-separable functions) and any per-function extras.
//! Evaluation computes `f_raw(R·(x - x_opt)) + f_opt`.

mod functions;
mod rng;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds::Bounds;
use crate::objective::Objective;

pub use functions::Peak;
pub use rng::SplitMix64;

pub const DOMAIN_LOWER: f64 = -5.0;
pub const DOMAIN_UPPER: f64 = 5.0;
/// Optima are drawn strictly inside `[-OPTIMUM_RANGE, OPTIMUM_RANGE]^D`.
pub const OPTIMUM_RANGE: f64 = 4.0;
/// `f_opt` is drawn in `[-F_OPT_RANGE, F_OPT_RANGE]`, rounded to two decimals.
pub const F_OPT_RANGE: f64 = 100.0;
pub const INSTANCES_PER_FUNCTION: u32 = 15;
pub const STANDARD_DIMENSIONS: [usize; 6] = [2, 3, 5, 10, 20, 40];

const GALLAGHER_LOCAL_PEAKS: usize = 100;
const GALLAGHER_PEAK_RANGE: f64 = 4.9;
const GALLAGHER_GLOBAL_CONDITION: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown function id {0} (expected 1..=24)")]
    UnknownFunction(u32),
    #[error("function f{0} is not implemented")]
    NotImplemented(u32),
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("instance id must be at least 1")]
    InvalidInstance,
    #[error("point has {got} coordinates, instance has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed problem key {0:?} (expected fID_dD_iI)")]
    MalformedKey(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunctionGroup {
    Separable,
    MiscModerate,
    IllConditioned,
    MultiModal,
    WeakStructure,
}

impl FunctionGroup {
    pub const ALL: [FunctionGroup; 5] = [
        FunctionGroup::Separable,
        FunctionGroup::MiscModerate,
        FunctionGroup::IllConditioned,
        FunctionGroup::MultiModal,
        FunctionGroup::WeakStructure,
    ];

    pub fn of(function_id: u32) -> Option<Self> {
        match function_id {
            1..=5 => Some(Self::Separable),
            6..=9 => Some(Self::MiscModerate),
            10..=14 => Some(Self::IllConditioned),
            15..=19 => Some(Self::MultiModal),
            20..=24 => Some(Self::WeakStructure),
            _ => None,
        }
    }

    /// Stable identifier used in file names and tables.
    pub fn slug(self) -> &'static str {
        match self {
            Self::Separable => "separable",
            Self::MiscModerate => "moderate",
            Self::IllConditioned => "ill-conditioned",
            Self::MultiModal => "multi-modal",
            Self::WeakStructure => "weak-structure",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.slug() == s)
    }
}

impl fmt::Display for FunctionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FunctionDescriptor {
    pub id: u32,
    pub name: &'static str,
    pub group: FunctionGroup,
    pub implemented: bool,
}

const NAMES: [&str; 24] = [
    "sphere",
    "separable ellipsoid",
    "separable Rastrigin",
    "Bueche-Rastrigin",
    "linear slope",
    "attractive sector",
    "step ellipsoid",
    "Rosenbrock",
    "rotated Rosenbrock",
    "ellipsoid",
    "discus",
    "bent cigar",
    "sharp ridge",
    "different powers",
    "Rastrigin",
    "Weierstrass",
    "Schaffers F7",
    "Schaffers F7 ill-conditioned",
    "Griewank-Rosenbrock",
    "Schwefel",
    "Gallagher 101 peaks",
    "Gallagher 21 peaks",
    "Katsuura",
    "Lunacek bi-Rastrigin",
];

pub const IMPLEMENTED: [u32; 10] = [1, 2, 3, 6, 8, 10, 12, 15, 20, 21];

fn is_rotated(function_id: u32) -> bool {
    matches!(function_id, 6 | 10 | 12 | 15 | 21)
}

/// All 24 slots, in id order.
pub fn base_function_registry() -> Vec<FunctionDescriptor> {
    (1..=24)
        .map(|id| FunctionDescriptor {
            id,
            name: NAMES[id as usize - 1],
            group: FunctionGroup::of(id).expect("ids 1..=24 are grouped"),
            implemented: IMPLEMENTED.contains(&id),
        })
        .collect()
}

pub fn descriptor(function_id: u32) -> Result<FunctionDescriptor, SuiteError> {
    if !(1..=24).contains(&function_id) {
        return Err(SuiteError::UnknownFunction(function_id));
    }
    Ok(base_function_registry()[function_id as usize - 1])
}

/// Identity of an instance, written `fID_dD_iI` (for example `f1_d2_i1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProblemKey {
    pub function: u32,
    pub dimension: usize,
    pub instance: u32,
}

impl ProblemKey {
    pub fn new(function: u32, dimension: usize, instance: u32) -> Self {
        Self {
            function,
            dimension,
            instance,
        }
    }

    fn seed(&self) -> u64 {
        ((self.function as u64) << 40) ^ ((self.dimension as u64) << 20) ^ self.instance as u64
    }
}

impl fmt::Display for ProblemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f{}_d{}_i{}",
            self.function, self.dimension, self.instance
        )
    }
}

impl FromStr for ProblemKey {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SuiteError::MalformedKey(s.to_string());
        let mut parts = s.split('_');
        let mut field = |prefix: char| -> Result<u64, SuiteError> {
            let part = parts.next().ok_or_else(bad)?;
            let digits = part.strip_prefix(prefix).ok_or_else(bad)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            digits.parse().map_err(|_| bad())
        };
        let function = field('f')?;
        let dimension = field('d')?;
        let instance = field('i')?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self {
            function: u32::try_from(function).map_err(|_| bad())?,
            dimension: usize::try_from(dimension).map_err(|_| bad())?,
            instance: u32::try_from(instance).map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Extra {
    None,
    SectorSign(Vec<f64>),
    Peaks(Vec<Peak>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    key: ProblemKey,
    group: FunctionGroup,
    x_opt: Vec<f64>,
    f_opt: f64,
    /// Row-major `D×D` orthogonal matrix.
    rotation: Vec<f64>,
    bounds: Bounds,
    extra: Extra,
    evaluations_used: u64,
}

pub fn make_instance(
    function_id: u32,
    dimension: usize,
    instance_id: u32,
) -> Result<ProblemInstance, SuiteError> {
    let desc = descriptor(function_id)?;
    if !desc.implemented {
        return Err(SuiteError::NotImplemented(function_id));
    }
    if dimension == 0 {
        return Err(SuiteError::InvalidDimension);
    }
    if instance_id == 0 {
        return Err(SuiteError::InvalidInstance);
    }
    let key = ProblemKey::new(function_id, dimension, instance_id);
    let mut rng = SplitMix64::new(key.seed());

    let x_opt: Vec<f64> = (0..dimension)
        .map(|_| rng.uniform(-OPTIMUM_RANGE, OPTIMUM_RANGE))
        .collect();
    let f_opt = (rng.uniform(-F_OPT_RANGE, F_OPT_RANGE) * 100.0).round() / 100.0;
    let rotation = if is_rotated(function_id) {
        random_rotation(&mut rng, dimension)
    } else {
        identity(dimension)
    };

    let extra = match function_id {
        6 => Extra::SectorSign(
            mat_vec(&rotation, &x_opt)
                .into_iter()
                .map(|v| if v < 0.0 { -1.0 } else { 1.0 })
                .collect(),
        ),
        21 => Extra::Peaks(gallagher_peaks(&mut rng, &rotation, &x_opt)),
        _ => Extra::None,
    };

    Ok(ProblemInstance {
        key,
        group: desc.group,
        x_opt,
        f_opt,
        rotation,
        bounds: Bounds::hypercube(dimension, DOMAIN_LOWER, DOMAIN_UPPER)
            .expect("domain is a valid box"),
        extra,
        evaluations_used: 0,
    })
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

/// Gram-Schmidt orthonormalization of the rows of a standard normal matrix.
fn random_rotation(rng: &mut SplitMix64, d: usize) -> Vec<f64> {
    loop {
        let mut m: Vec<f64> = (0..d * d).map(|_| rng.normal()).collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let dot: f64 = (0..d).map(|k| m[i * d + k] * m[j * d + k]).sum();
                for k in 0..d {
                    m[i * d + k] -= dot * m[j * d + k];
                }
            }
            let norm = (0..d).map(|k| m[i * d + k].powi(2)).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for k in 0..d {
                m[i * d + k] /= norm;
            }
        }
        if ok {
            return m;
        }
    }
}

fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d)
        .map(|i| {
            m[i * d..(i + 1) * d]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

fn gallagher_peaks(rng: &mut SplitMix64, rotation: &[f64], x_opt: &[f64]) -> Vec<Peak> {
    let d = x_opt.len();
    let axis_scales = |rng: &mut SplitMix64, condition: f64| -> Vec<f64> {
        let mut scales: Vec<f64> = (0..d)
            .map(|i| {
                let e = if d == 1 {
                    0.5
                } else {
                    i as f64 / (d - 1) as f64
                };
                condition.powf(e) / condition.powf(0.25)
            })
            .collect();
        rng.shuffle(&mut scales);
        scales
    };

    let mut peaks = Vec::with_capacity(GALLAGHER_LOCAL_PEAKS + 1);
    let global_scales = axis_scales(rng, GALLAGHER_GLOBAL_CONDITION);
    peaks.push(Peak {
        position: vec![0.0; d],
        weight: functions::GLOBAL_PEAK_WEIGHT,
        scales: global_scales,
    });

    let mut conditions: Vec<f64> = (0..GALLAGHER_LOCAL_PEAKS)
        .map(|j| 1000f64.powf(2.0 * j as f64 / (GALLAGHER_LOCAL_PEAKS - 1) as f64))
        .collect();
    rng.shuffle(&mut conditions);
    for (i, condition) in conditions.into_iter().enumerate() {
        let location: Vec<f64> = x_opt
            .iter()
            .map(|xo| rng.uniform(-GALLAGHER_PEAK_RANGE, GALLAGHER_PEAK_RANGE) - xo)
            .collect();
        peaks.push(Peak {
            position: mat_vec(rotation, &location),
            weight: 1.1 + 8.0 * i as f64 / (GALLAGHER_LOCAL_PEAKS - 1) as f64,
            scales: axis_scales(rng, condition),
        });
    }
    peaks
}

impl ProblemInstance {
    pub fn key(&self) -> ProblemKey {
        self.key
    }

    pub fn function_id(&self) -> u32 {
        self.key.function
    }

    pub fn dimension(&self) -> usize {
        self.key.dimension
    }

    pub fn instance_id(&self) -> u32 {
        self.key.instance
    }

    pub fn group(&self) -> FunctionGroup {
        self.group
    }

    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    /// Row-major `D×D` rotation matrix.
    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn evaluations_used(&self) -> u64 {
        self.evaluations_used
    }

    /// `R·(x - x_opt)`.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = x.iter().zip(&self.x_opt).map(|(a, b)| a - b).collect();
        mat_vec(&self.rotation, &shifted)
    }

    /// The base function at transformed coordinates `z`, minimum 0 at the origin.
    pub fn raw(&self, z: &[f64]) -> f64 {
        match (self.key.function, &self.extra) {
            (1, _) => functions::sphere(z),
            (2 | 10, _) => functions::ellipsoid(z),
            (3 | 15, _) => functions::rastrigin(z),
            (6, Extra::SectorSign(sign)) => functions::attractive_sector(z, sign),
            (8, _) => functions::rosenbrock(z),
            (12, _) => functions::bent_cigar(z),
            (20, _) => functions::schwefel(z),
            (21, Extra::Peaks(peaks)) => functions::gallagher(z, peaks),
            (id, _) => unreachable!("f{id} cannot be instantiated"),
        }
    }

    /// Evaluates the instance at `x` and counts the evaluation.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64, SuiteError> {
        if x.len() != self.dimension() {
            return Err(SuiteError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        self.evaluations_used += 1;
        Ok(self.raw(&self.transform(x)) + self.f_opt)
    }
}

impl Objective for ProblemInstance {
    fn dimension(&self) -> usize {
        self.key.dimension
    }

    fn evaluate(&mut self, x: &[f64]) -> f64 {
        ProblemInstance::evaluate(self, x).expect("point dimension checked by the caller")
    }

    fn optimum_value(&self) -> Option<f64> {
        Some(self.f_opt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_layout() {
        let reg = base_function_registry();
        assert_eq!(reg.len(), 24);
        assert_eq!(reg[9].group, FunctionGroup::IllConditioned);
        assert!(reg[0].implemented);
        assert!(!reg[3].implemented);
        for g in FunctionGroup::ALL {
            assert!(
                reg.iter().any(|d| d.group == g && d.implemented),
                "{g} has no implemented function"
            );
        }
        let counts: Vec<usize> = FunctionGroup::ALL
            .iter()
            .map(|g| reg.iter().filter(|d| d.group == *g).count())
            .collect();
        assert_eq!(counts, vec![5, 4, 5, 5, 5]);
    }

    #[test]
    fn instances_are_seeded() {
        assert_eq!(make_instance(1, 2, 1), make_instance(1, 2, 1));
        assert_ne!(
            make_instance(1, 2, 1).unwrap().x_opt(),
            make_instance(1, 2, 2).unwrap().x_opt()
        );
    }

    #[test]
    fn separable_functions_are_not_rotated() {
        let inst = make_instance(3, 5, 7).unwrap();
        assert_eq!(inst.rotation(), identity(5).as_slice());
        assert_ne!(
            make_instance(15, 5, 7).unwrap().rotation(),
            identity(5).as_slice()
        );
    }

    #[test]
    fn errors_are_distinct() {
        assert_eq!(make_instance(0, 2, 1), Err(SuiteError::UnknownFunction(0)));
        assert_eq!(
            make_instance(25, 2, 1),
            Err(SuiteError::UnknownFunction(25))
        );
        assert_eq!(make_instance(4, 2, 1), Err(SuiteError::NotImplemented(4)));
        assert_eq!(make_instance(1, 0, 1), Err(SuiteError::InvalidDimension));
        assert_eq!(make_instance(1, 2, 0), Err(SuiteError::InvalidInstance));
        let mut inst = make_instance(1, 2, 1).unwrap();
        assert_eq!(
            inst.evaluate(&[0.0]),
            Err(SuiteError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
        assert_eq!(inst.evaluations_used(), 0);
    }

    #[test]
    fn f_opt_has_two_decimals() {
        for i in 1..=15 {
            let f = make_instance(1, 3, i).unwrap().f_opt();
            assert!((-100.0..=100.0).contains(&f));
            assert!(((f * 100.0).round() - f * 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_offset() {
        let mut inst = make_instance(1, 2, 3).unwrap();
        let mut x = inst.x_opt().to_vec();
        x[0] += 3.0;
        x[1] += 4.0;
        let v = inst.evaluate(&x).unwrap();
        assert!((v - inst.f_opt() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn evaluation_counting_is_exact() {
        let mut inst = make_instance(21, 3, 2).unwrap();
        for n in 0..37 {
            inst.evaluate(&[n as f64 * 0.1, 0.0, -1.0]).unwrap();
        }
        assert_eq!(inst.evaluations_used(), 37);
    }

    #[test]
    fn key_roundtrip() {
        let k = ProblemKey::new(1, 2, 1);
        assert_eq!(k.to_string(), "f1_d2_i1");
        assert_eq!(
            "f12_d40_i15".parse::<ProblemKey>(),
            Ok(ProblemKey::new(12, 40, 15))
        );
        for bad in [
            "f1_d2",
            "1_d2_i1",
            "f1_d2_i1_x",
            "f_d2_i1",
            "f1_d-2_i1",
            "f1_d2_i+1",
        ] {
            assert!(bad.parse::<ProblemKey>().is_err(), "{bad}");
        }
    }
}
