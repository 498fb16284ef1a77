//! One run of a projection algorithm on a wavelet problem.

use std::time::Instant;

use crfeas_core::wavelet::{
    extract_filters, random_consistent_ensemble, ConstraintResiduals, Ensemble, FilterPair, WaveletProblem,
};
use crfeas_core::{iterate, Algorithm, FixedPointOperator, IterateOptions, StoppingCriterion};

use crate::Result;

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub converged: bool,
    pub iterations: usize,
    /// Last value of the monitored stopping quantity.
    pub stopping_residual: f64,
    pub wall_time_s: f64,
    /// Block mean of the final iterate.
    pub solution: Ensemble,
    pub residuals: ConstraintResiduals,
    pub filters: FilterPair,
}

/// Runs `algorithm` from the random ensemble generated by `seed`.
pub fn solve(
    problem: &WaveletProblem,
    algorithm: Algorithm,
    epsilon: f64,
    max_iters: usize,
    seed: u64,
) -> Result<SolveOutcome> {
    let op = algorithm.build(problem.feasibility_problem());
    let x0 = random_consistent_ensemble(problem.m(), seed)?.to_vector();
    let stop = StoppingCriterion::new(op.stop_kind(), epsilon, max_iters);
    let start = Instant::now();
    let trace = iterate(&op, &op.start(&x0), &stop, IterateOptions::default())?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let solution = Ensemble::from_vector(&op.shadow(&trace.last), problem.m())?;
    Ok(SolveOutcome {
        converged: trace.converged(),
        iterations: trace.iterations,
        stopping_residual: trace.final_residual().unwrap_or(f64::NAN),
        wall_time_s,
        residuals: problem.residuals(&solution),
        filters: extract_filters(&solution),
        solution,
    })
}
