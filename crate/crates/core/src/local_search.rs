//! Intensive local search: coordinate-wise `±ω` probing with step halving.
//!
//! Each sweep visits the axes in ascending order and tries `x + ω·e_i` and `x - ω·e_i`,
//! keeping the best of the three points. A sweep that improves nothing halves `ω`. The search
//! stops once `ω` drops below `ω_min` or the evaluation budget runs out.

use thiserror::Error;

use crate::bounds::Bounds;
use crate::geometry::BestSoFar;
use crate::objective::{BudgetExhausted, EvalHandle};

pub const DEFAULT_OMEGA_MIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocalSearchError {
    #[error(
        "initial step {omega0} must exceed the minimum step {omega_min}, which must be positive"
    )]
    InvalidStep { omega0: f64, omega_min: f64 },
    #[error("start point has {got} coordinates, bounds have {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlsState {
    pub current: Vec<f64>,
    pub current_value: f64,
    pub omega: f64,
    pub sweep_improved: bool,
}

impl IlsState {
    pub fn new(current: Vec<f64>, current_value: f64, omega: f64) -> Self {
        Self {
            current,
            current_value,
            omega,
            sweep_improved: false,
        }
    }
}

/// Runs one sweep over all axes, updating `state` in place.
///
/// On budget exhaustion the state holds everything accepted so far. Ties between the two
/// candidates go to the `+ω` one; a candidate must be strictly better than the current point
/// to be accepted.
pub fn ils_sweep<E: EvalHandle + ?Sized>(
    state: &mut IlsState,
    eval: &mut E,
    bounds: &Bounds,
) -> Result<(), BudgetExhausted> {
    state.sweep_improved = false;
    let mut candidate = state.current.clone();
    for axis in 0..state.current.len() {
        let mut best: Option<(f64, f64)> = None;
        for sign in [1.0, -1.0] {
            let coord = (state.current[axis] + sign * state.omega)
                .clamp(bounds.lower()[axis], bounds.upper()[axis]);
            candidate[axis] = coord;
            let value = match eval.eval(&candidate) {
                Ok(v) => v,
                Err(e) => {
                    accept(state, axis, best);
                    return Err(e);
                }
            };
            if value < state.current_value && best.is_none_or(|(_, v)| value < v) {
                best = Some((coord, value));
            }
        }
        accept(state, axis, best);
        candidate[axis] = state.current[axis];
    }
    Ok(())
}

fn accept(state: &mut IlsState, axis: usize, best: Option<(f64, f64)>) {
    if let Some((coord, value)) = best {
        state.current[axis] = coord;
        state.current_value = value;
        state.sweep_improved = true;
    }
}

/// Repeats sweeps from `start`, halving the step after every sweep without improvement, until
/// the step falls below `omega_min` or the budget is spent.
pub fn run_ils<E: EvalHandle + ?Sized>(
    start: &[f64],
    start_value: f64,
    omega0: f64,
    omega_min: f64,
    eval: &mut E,
    bounds: &Bounds,
) -> Result<BestSoFar, LocalSearchError> {
    if !(omega_min > 0.0 && omega0 > omega_min) {
        return Err(LocalSearchError::InvalidStep { omega0, omega_min });
    }
    if start.len() != bounds.dimension() {
        return Err(LocalSearchError::DimensionMismatch {
            expected: bounds.dimension(),
            got: start.len(),
        });
    }
    let mut state = IlsState::new(start.to_vec(), start_value, omega0);
    while state.omega >= omega_min {
        if ils_sweep(&mut state, eval, bounds).is_err() {
            break;
        }
        if !state.sweep_improved {
            state.omega /= 2.0;
        }
    }
    Ok(BestSoFar::new(state.current, state.current_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{Budgeted, FnObjective};

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn box5(d: usize) -> Bounds {
        Bounds::hypercube(d, -5.0, 5.0).unwrap()
    }

    #[test]
    fn sweep_moves_toward_optimum() {
        let mut f = FnObjective::new(2, sphere);
        let mut eval = Budgeted::new(&mut f, 100);
        let mut state = IlsState::new(vec![3.0, 0.0], 9.0, 1.0);
        ils_sweep(&mut state, &mut eval, &box5(2)).unwrap();
        assert_eq!(state.current, vec![2.0, 0.0]);
        assert_eq!(state.current_value, 4.0);
        assert!(state.sweep_improved);
        assert_eq!(eval.used(), 4);
    }

    #[test]
    fn sweep_at_optimum_is_fixed_point() {
        let mut f = FnObjective::new(2, sphere);
        let mut eval = Budgeted::new(&mut f, 100);
        let mut state = IlsState::new(vec![0.0, 0.0], 0.0, 1.0);
        ils_sweep(&mut state, &mut eval, &box5(2)).unwrap();
        assert_eq!(state.current, vec![0.0, 0.0]);
        assert!(!state.sweep_improved);
    }

    #[test]
    fn sweep_rejects_worse_candidates() {
        let mut f = FnObjective::new(1, |x: &[f64]| (x[0] - 0.3).powi(2));
        let mut eval = Budgeted::new(&mut f, 100);
        let start_value = (0.0f64 - 0.3).powi(2);
        let mut state = IlsState::new(vec![0.0], start_value, 1.0);
        ils_sweep(&mut state, &mut eval, &box5(1)).unwrap();
        assert_eq!(state.current, vec![0.0]);
        assert!(!state.sweep_improved);
    }

    #[test]
    fn sweep_prefers_plus_on_ties() {
        let mut f = FnObjective::new(1, |x: &[f64]| -x[0].abs());
        let mut eval = Budgeted::new(&mut f, 100);
        let mut state = IlsState::new(vec![0.0], 0.0, 1.0);
        ils_sweep(&mut state, &mut eval, &box5(1)).unwrap();
        assert_eq!(state.current, vec![1.0]);
    }

    #[test]
    fn sweep_clamps_candidates() {
        let mut seen = Vec::new();
        let mut f = FnObjective::new(1, |x: &[f64]| {
            seen.push(x[0]);
            x[0]
        });
        let mut eval = Budgeted::new(&mut f, 100);
        let mut state = IlsState::new(vec![-4.5], -4.5, 1.0);
        ils_sweep(&mut state, &mut eval, &box5(1)).unwrap();
        drop(eval);
        assert_eq!(seen, vec![-3.5, -5.0]);
        assert_eq!(state.current, vec![-5.0]);
    }

    #[test]
    fn sweep_returns_partial_state_on_exhaustion() {
        let mut f = FnObjective::new(2, sphere);
        let mut eval = Budgeted::new(&mut f, 1);
        let mut state = IlsState::new(vec![0.0, 3.0], 9.0, 1.0);
        assert_eq!(
            ils_sweep(&mut state, &mut eval, &box5(2)),
            Err(BudgetExhausted)
        );
        assert_eq!(state.current, vec![0.0, 3.0]);
    }

    #[test]
    fn run_ils_converges_on_sphere() {
        let mut f = FnObjective::new(2, sphere);
        let mut eval = Budgeted::new(&mut f, 1_000_000);
        let best = run_ils(&[3.0, 4.0], 25.0, 4.0, 1e-6, &mut eval, &box5(2)).unwrap();
        let norm = best.value.sqrt();
        assert!(norm <= 1e-5, "‖x‖ = {norm}");
        assert_eq!(best.value, sphere(&best.position));

        // brute-force oracle: argmin of the objective over a 0.01 grid of the box
        let grid: Vec<f64> = (0..=1000).map(|i| -5.0 + i as f64 * 0.01).collect();
        let mut oracle = (f64::INFINITY, [0.0, 0.0]);
        for &a in &grid {
            for &b in &grid {
                let v = sphere(&[a, b]);
                if v < oracle.0 {
                    oracle = (v, [a, b]);
                }
            }
        }
        let gap = crate::geometry::distance(&best.position, &oracle.1);
        assert!(
            gap <= 1e-5,
            "ILS result {:?} is {gap} from grid argmin",
            best.position
        );
    }

    #[test]
    fn run_ils_checks_steps() {
        let mut f = FnObjective::new(1, sphere);
        let mut eval = Budgeted::new(&mut f, 10);
        assert_eq!(
            run_ils(&[1.0], 1.0, 1.0, 2.0, &mut eval, &box5(1)),
            Err(LocalSearchError::InvalidStep {
                omega0: 1.0,
                omega_min: 2.0
            })
        );
        assert!(run_ils(&[1.0], 1.0, 1.0, 0.0, &mut eval, &box5(1)).is_err());
        assert_eq!(eval.used(), 0);
    }

    #[test]
    fn run_ils_with_single_evaluation() {
        // first candidate (x + ω = 4) is worse: start is kept
        let mut f = FnObjective::new(1, sphere);
        let mut eval = Budgeted::new(&mut f, 1);
        let best = run_ils(&[3.0], 9.0, 1.0, 1e-3, &mut eval, &box5(1)).unwrap();
        assert_eq!(eval.used(), 1);
        assert_eq!((best.position, best.value), (vec![3.0], 9.0));

        // first candidate (x + ω = -2) is better and is taken
        let mut f = FnObjective::new(1, sphere);
        let mut eval = Budgeted::new(&mut f, 1);
        let best = run_ils(&[-3.0], 9.0, 1.0, 1e-3, &mut eval, &box5(1)).unwrap();
        assert_eq!((best.position, best.value), (vec![-2.0], 4.0));
    }

    #[test]
    fn separable_quadratic_converges_per_coordinate() {
        let target = [1.234_567, -3.3, 0.01];
        let omega_min = 1e-7;
        let mut f = FnObjective::new(3, |x: &[f64]| {
            x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum()
        });
        let start = [0.0; 3];
        let start_value = target.iter().map(|t| t * t).sum();
        let mut eval = Budgeted::new(&mut f, u64::MAX);
        let best = run_ils(&start, start_value, 2.0, omega_min, &mut eval, &box5(3)).unwrap();
        for (x, t) in best.position.iter().zip(&target) {
            assert!((x - t).abs() < 2.0 * omega_min);
        }
        assert!(best.value <= start_value);
    }
}
