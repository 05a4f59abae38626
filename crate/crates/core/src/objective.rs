//! Objective functions and the budget-enforcing evaluation handle shared by the driver and the
//! local search.

use thiserror::Error;

use crate::geometry::BestSoFar;

/// A function to minimize.
pub trait Objective {
    fn dimension(&self) -> usize;

    /// Evaluates the function at `x`, which has length [`Objective::dimension`].
    fn evaluate(&mut self, x: &[f64]) -> f64;

    /// Known optimal value, if any. Errors in a [`RunTrace`](crate::driver::RunTrace) are
    /// reported relative to it, or to zero when unknown.
    fn optimum_value(&self) -> Option<f64> {
        None
    }
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F> {
    dimension: usize,
    f: F,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&mut self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("evaluation budget exhausted")]
pub struct BudgetExhausted;

/// Something that evaluates points until its budget runs out.
pub trait EvalHandle {
    fn eval(&mut self, x: &[f64]) -> Result<f64, BudgetExhausted>;
}

/// One improvement of the best-so-far value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// 1-based index of the evaluation that produced the improvement.
    pub evaluation: u64,
    /// Best value found so far minus the reference (optimal) value.
    pub best_error: f64,
}

/// Wraps an [`Objective`] with an exact evaluation budget, best-so-far bookkeeping and an
/// improvement trace.
pub struct Budgeted<'a, O: ?Sized> {
    objective: &'a mut O,
    budget: u64,
    used: u64,
    reference: f64,
    best: Option<BestSoFar>,
    trace: Vec<TracePoint>,
}

impl<'a, O: Objective + ?Sized> Budgeted<'a, O> {
    pub fn new(objective: &'a mut O, budget: u64) -> Self {
        let reference = objective.optimum_value().unwrap_or(0.0);
        Self {
            objective,
            budget,
            used: 0,
            reference,
            best: None,
            trace: Vec::new(),
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    pub fn best(&self) -> Option<&BestSoFar> {
        self.best.as_ref()
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn into_parts(self) -> (Option<BestSoFar>, Vec<TracePoint>, u64) {
        (self.best, self.trace, self.used)
    }
}

impl<O: Objective + ?Sized> EvalHandle for Budgeted<'_, O> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, BudgetExhausted> {
        if self.used >= self.budget {
            return Err(BudgetExhausted);
        }
        let value = self.objective.evaluate(x);
        self.used += 1;
        let improved = match &mut self.best {
            Some(best) => best.offer(x, value),
            None => {
                self.best = Some(BestSoFar::new(x.to_vec(), value));
                true
            }
        };
        if improved {
            self.trace.push(TracePoint {
                evaluation: self.used,
                best_error: value - self.reference,
            });
        }
        Ok(value)
    }
}
