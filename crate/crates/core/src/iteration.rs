//! Fixed-point operators and the iteration engine.
//!
//! An operator exposes its step map together with the two maps its stopping
//! rule is built from: a *constraint map* (`P_C` or `Q_V`) and an *averaging
//! map* (`P_D` or `P_W`). The engine records exactly the monitored stopping
//! quantity for every applied step.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hilbert::{FiniteVector, ProductVector};

pub trait FixedPointOperator {
    /// One step `x ↦ T(x)`.
    fn apply(&self, x: &ProductVector) -> ProductVector;

    /// Constraint map used by the stopping rules (`Q_V` or `P_C`).
    fn constrain(&self, x: &ProductVector) -> ProductVector;

    /// Averaging map used by the stopping rules (`P_W` or `P_D`).
    fn average(&self, x: &ProductVector) -> ProductVector;

    /// Candidate solution carried by `x`.
    fn shadow(&self, x: &ProductVector) -> FiniteVector {
        x.mean_block()
    }
}

impl<T: FixedPointOperator + ?Sized> FixedPointOperator for &T {
    fn apply(&self, x: &ProductVector) -> ProductVector {
        (**self).apply(x)
    }
    fn constrain(&self, x: &ProductVector) -> ProductVector {
        (**self).constrain(x)
    }
    fn average(&self, x: &ProductVector) -> ProductVector {
        (**self).average(x)
    }
    fn shadow(&self, x: &ProductVector) -> FiniteVector {
        (**self).shadow(x)
    }
}

/// Operator assembled from closures. The averaging map is the identity.
pub struct FnOperator<A, C> {
    step: A,
    constraint: C,
}

impl<A, C> FnOperator<A, C>
where
    A: Fn(&ProductVector) -> ProductVector,
    C: Fn(&ProductVector) -> ProductVector,
{
    pub fn new(step: A, constraint: C) -> Self {
        Self { step, constraint }
    }
}

impl<A, C> FixedPointOperator for FnOperator<A, C>
where
    A: Fn(&ProductVector) -> ProductVector,
    C: Fn(&ProductVector) -> ProductVector,
{
    fn apply(&self, x: &ProductVector) -> ProductVector {
        (self.step)(x)
    }
    fn constrain(&self, x: &ProductVector) -> ProductVector {
        (self.constraint)(x)
    }
    fn average(&self, x: &ProductVector) -> ProductVector {
        x.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopKind {
    /// `‖Q_V P_W(x_n) − P_W(x_n)‖ < ε`
    DrShadowGap,
    /// `‖Q_V(x_n) − x_n‖ < ε`
    MapResidual,
    /// Runs to the cutoff; the recorded residual is the step length `‖x_n − x_{n−1}‖`.
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingCriterion {
    pub kind: StopKind,
    pub epsilon: f64,
    pub cutoff: usize,
}

impl StoppingCriterion {
    pub const DEFAULT_CUTOFF: usize = 50_000;

    pub fn new(kind: StopKind, epsilon: f64, cutoff: usize) -> Self {
        assert!(epsilon > 0.0, "tolerance must be positive");
        assert!(cutoff > 0, "cutoff must be positive");
        Self { kind, epsilon, cutoff }
    }

    pub fn dr(epsilon: f64) -> Self {
        Self::new(StopKind::DrShadowGap, epsilon, Self::DEFAULT_CUTOFF)
    }

    pub fn map(epsilon: f64) -> Self {
        Self::new(StopKind::MapResidual, epsilon, Self::DEFAULT_CUTOFF)
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        assert!(cutoff > 0, "cutoff must be positive");
        self.cutoff = cutoff;
        self
    }
}

/// Monitored stopping quantity at `x`. `previous` is only used by
/// [`StopKind::MaxIterations`].
pub fn residual<T: FixedPointOperator + ?Sized>(
    op: &T,
    kind: StopKind,
    x: &ProductVector,
    previous: &ProductVector,
) -> f64 {
    match kind {
        StopKind::DrShadowGap => {
            let p = op.average(x);
            op.constrain(&p).distance(&p)
        }
        StopKind::MapResidual => op.constrain(x).distance(x),
        StopKind::MaxIterations => x.distance(previous),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Cutoff,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IterateOptions {
    /// Keep every iterate in the trace.
    pub store_iterates: bool,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    /// Stored iterates `x_1, x_2, ...` when requested.
    pub iterates: Option<Vec<ProductVector>>,
    /// Residual after each applied step; `residuals[n-1]` belongs to `x_n`.
    pub residuals: Vec<f64>,
    pub terminated: Termination,
    pub iterations: usize,
    /// Filled in by callers that time the run; zero otherwise.
    pub wall_time_s: f64,
    pub last: ProductVector,
}

impl IterationTrace {
    pub fn converged(&self) -> bool {
        self.terminated == Termination::Converged
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }

    pub fn linear_rate(&self) -> Result<f64> {
        estimate_linear_rate(&self.residuals)
    }
}

/// Runs `x_{n+1} = T(x_n)` from `x0` until the stopping rule fires or the
/// cutoff is reached. The residual is evaluated on each new iterate.
pub fn iterate<T: FixedPointOperator + ?Sized>(
    op: &T,
    x0: &ProductVector,
    stop: &StoppingCriterion,
    options: IterateOptions,
) -> Result<IterationTrace> {
    let mut x = x0.clone();
    let mut residuals = Vec::new();
    let mut iterates = options.store_iterates.then(Vec::new);

    for step in 1..=stop.cutoff {
        let next = op.apply(&x);
        if !next.is_finite() {
            return Err(Error::Diverged {
                step,
                last_finite: alloc::boxed::Box::new(x),
            });
        }
        let r = residual(op, stop.kind, &next, &x);
        if !r.is_finite() {
            return Err(Error::Diverged {
                step,
                last_finite: alloc::boxed::Box::new(next),
            });
        }
        residuals.push(r);
        if let Some(store) = iterates.as_mut() {
            store.push(next.clone());
        }
        x = next;
        if stop.kind != StopKind::MaxIterations && r < stop.epsilon {
            return Ok(IterationTrace {
                iterates,
                residuals,
                terminated: Termination::Converged,
                iterations: step,
                wall_time_s: 0.0,
                last: x,
            });
        }
    }

    Ok(IterationTrace {
        iterates,
        residuals,
        terminated: Termination::Cutoff,
        iterations: stop.cutoff,
        wall_time_s: 0.0,
        last: x,
    })
}

const MIN_RATE_SAMPLES: usize = 10;
const MAX_RATE_TAIL: usize = 100;

/// Least-squares estimate of the geometric decay factor of `residuals`,
/// fitted on the last half of the sequence (at most 100 entries).
/// Returns 1 when no decrease is detected.
pub fn estimate_linear_rate(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < MIN_RATE_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_RATE_SAMPLES,
            got: residuals.len(),
        });
    }
    if residuals.iter().any(|&r| r.is_nan() || r <= 0.0 || !r.is_finite()) {
        return Err(Error::NonPositiveResidual);
    }
    let tail_len = (residuals.len() / 2).min(MAX_RATE_TAIL);
    let tail = &residuals[residuals.len() - tail_len..];

    let n = tail.len() as f64;
    let mean_t = (n - 1.0) / 2.0;
    let logs: Vec<f64> = tail.iter().map(|&r| libm::log(r)).collect();
    let mean_y = logs.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in logs.iter().enumerate() {
        let dt = i as f64 - mean_t;
        sxy += dt * (y - mean_y);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Ok(1.0);
    }
    Ok(libm::exp(slope).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn single(v: &[f64]) -> ProductVector {
        ProductVector::new(vec![FiniteVector::from_slice(v)]).unwrap()
    }

    #[test]
    fn identity_converges_immediately() {
        let op = FnOperator::new(|x: &ProductVector| x.clone(), |x: &ProductVector| x.clone());
        let stop = StoppingCriterion::map(1e-9);
        let trace = iterate(&op, &single(&[3.0, -1.0]), &stop, IterateOptions::default()).unwrap();
        assert!(trace.converged());
        assert!(trace.iterations <= 1);
        assert_eq!(trace.residuals.len(), trace.iterations);
    }

    #[test]
    fn cutoff_is_respected() {
        // halve towards the origin but monitor against a far-away constraint
        let op = FnOperator::new(
            |x: &ProductVector| x.map_blocks(|_, b| b.scale(0.5)),
            |x: &ProductVector| x.map_blocks(|_, b| b.add(&FiniteVector::from_slice(&[1.0]))),
        );
        let stop = StoppingCriterion::map(1e-9).with_cutoff(25);
        let trace = iterate(&op, &single(&[1.0]), &stop, IterateOptions::default()).unwrap();
        assert_eq!(trace.terminated, Termination::Cutoff);
        assert_eq!(trace.iterations, 25);
        assert_eq!(trace.residuals.len(), 25);
    }

    #[test]
    fn divergence_reports_last_finite_iterate() {
        let op = FnOperator::new(
            |x: &ProductVector| x.map_blocks(|_, b| b.scale(1e100)),
            |x: &ProductVector| x.clone(),
        );
        let stop = StoppingCriterion::new(StopKind::MaxIterations, 1.0, 10);
        let err = iterate(&op, &single(&[1.0]), &stop, IterateOptions::default()).unwrap_err();
        match err {
            Error::Diverged { step, last_finite } => {
                // the step length overflows once the iterate reaches 1e200
                assert_eq!(step, 2);
                assert!(last_finite.is_finite());
                assert_eq!(last_finite.blocks()[0][0], 1e200);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn stored_iterates_match_iteration_count() {
        let op = FnOperator::new(
            |x: &ProductVector| x.map_blocks(|_, b| b.scale(0.5)),
            |x: &ProductVector| x.map_blocks(|_, b| b.scale(0.0)),
        );
        let stop = StoppingCriterion::map(1e-3);
        let opts = IterateOptions { store_iterates: true };
        let trace = iterate(&op, &single(&[1.0]), &stop, opts).unwrap();
        assert_eq!(trace.iterates.as_ref().unwrap().len(), trace.iterations);
        assert!(trace.final_residual().unwrap() < 1e-3);
    }

    #[test]
    fn rate_of_exact_geometric_sequence() {
        let r: Vec<f64> = (0..60).map(|n| libm::pow(0.5, n as f64)).collect();
        assert!((estimate_linear_rate(&r).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rate_of_constant_sequence_is_one() {
        assert_eq!(estimate_linear_rate(&[0.3; 40]).unwrap(), 1.0);
    }

    #[test]
    fn rate_needs_ten_samples() {
        assert_eq!(
            estimate_linear_rate(&[1.0; 9]),
            Err(Error::InsufficientData { needed: 10, got: 9 })
        );
        assert_eq!(
            estimate_linear_rate(&[1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
            Err(Error::NonPositiveResidual)
        );
    }
}
