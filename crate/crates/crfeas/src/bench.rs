//! Random-restart experiments: every algorithm starts trial `t` from the same
//! seeded point, and pairs of algorithms are compared on the trials both
//! solve.

use std::fs;
use std::path::Path;
use std::time::Instant;

use crfeas_core::wavelet::{random_consistent_ensemble, WaveletProblem};
use crfeas_core::{
    iterate, Algorithm, Error as CoreError, FeasibilityProblem, FiniteVector, FixedPointOperator, IterateOptions,
    SplitOperator, StoppingCriterion,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::formats::write_comment_header;
use crate::{HarnessError, Result};

/// A problem the harness can restart from seeded points.
pub trait TrialProblem: Sync {
    fn feasibility_problem(&self) -> FeasibilityProblem;
    fn initial_point(&self, seed: u64) -> crfeas_core::Result<FiniteVector>;
    /// Short description used in the `problem_parameters` column.
    fn parameters(&self) -> String;
}

impl TrialProblem for WaveletProblem {
    fn feasibility_problem(&self) -> FeasibilityProblem {
        WaveletProblem::feasibility_problem(self)
    }

    fn initial_point(&self, seed: u64) -> crfeas_core::Result<FiniteVector> {
        Ok(random_consistent_ensemble(self.m(), seed)?.to_vector())
    }

    fn parameters(&self) -> String {
        format!("{} M={} D={}", self.variant(), self.m(), self.d())
    }
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `t`: `splitmix64(master ⊕ splitmix64(t))`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    splitmix64(master ^ splitmix64(trial as u64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub cutoff: usize,
    pub seed: u64,
    pub timing_repeats: usize,
    /// Worker threads; `0` uses rayon's default.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            epsilons: vec![1e-6, 1e-9],
            trials: 50,
            cutoff: StoppingCriterion::DEFAULT_CUTOFF,
            seed: 0,
            timing_repeats: 1,
            workers: 0,
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    problem: String,
    algorithms: Vec<&'static str>,
    epsilons: &'a [f64],
    trials: usize,
    cutoff: usize,
    seed: u64,
    timing_repeats: usize,
    workers: usize,
    seed_rule: &'static str,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Invalid(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.cutoff == 0 {
            return bad("cutoff must be at least 1");
        }
        if self.timing_repeats == 0 {
            return bad("timing repeats must be at least 1");
        }
        if self.algorithms.is_empty() || self.epsilons.is_empty() {
            return bad("at least one algorithm and one tolerance are required");
        }
        if self.epsilons.iter().any(|e| e.is_nan() || *e <= 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }

    /// Fully resolved configuration as a JSON value.
    pub fn echo(&self, problem: &dyn TrialProblem) -> serde_json::Value {
        serde_json::to_value(ConfigEcho {
            problem: problem.parameters(),
            algorithms: self.algorithms.iter().map(|a| a.name()).collect(),
            epsilons: &self.epsilons,
            trials: self.trials,
            cutoff: self.cutoff,
            seed: self.seed,
            timing_repeats: self.timing_repeats,
            workers: self.workers,
            seed_rule: "splitmix64(seed ^ splitmix64(trial))",
        })
        .expect("plain data")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    /// Final value of the monitored stopping quantity.
    pub stopping_residual: f64,
    /// Distance from the final shadow to each constraint set.
    pub final_residuals: Vec<f64>,
}

fn run_one(
    op: &SplitOperator,
    sets: &FeasibilityProblem,
    x0: &FiniteVector,
    trial: usize,
    algorithm: Algorithm,
    epsilon: f64,
    cfg: &ExperimentConfig,
) -> Result<TrialRecord> {
    let stop = StoppingCriterion::new(op.stop_kind(), epsilon, cfg.cutoff);
    let start = op.start(x0);
    let mut total = 0.0;
    let mut first = None;
    for _ in 0..cfg.timing_repeats {
        let clock = Instant::now();
        let outcome = iterate(op, &start, &stop, IterateOptions::default());
        total += clock.elapsed().as_secs_f64();
        first.get_or_insert(outcome);
    }
    let wall_time_s = total / cfg.timing_repeats as f64;
    match first.expect("at least one repeat") {
        Ok(trace) => {
            let shadow = op.shadow(&trace.last);
            Ok(TrialRecord {
                trial,
                algorithm,
                epsilon,
                converged: trace.converged(),
                iterations: trace.iterations,
                wall_time_s,
                stopping_residual: trace.final_residual().unwrap_or(f64::NAN),
                final_residuals: sets.sets().iter().map(|s| s.distance(&shadow)).collect(),
            })
        }
        Err(CoreError::Diverged { step, .. }) => Ok(TrialRecord {
            trial,
            algorithm,
            epsilon,
            converged: false,
            iterations: step,
            wall_time_s,
            stopping_residual: f64::NAN,
            final_residuals: vec![f64::NAN; sets.set_count()],
        }),
        Err(e) => Err(e.into()),
    }
}

/// Runs every `(trial, algorithm, tolerance)` combination. Records come back
/// ordered by trial, then algorithm, then tolerance, as listed in `cfg`.
pub fn run_experiment(problem: &dyn TrialProblem, cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let feasibility = problem.feasibility_problem();
    let operators: Vec<SplitOperator> = cfg.algorithms.iter().map(|a| a.build(feasibility.clone())).collect();
    let starts: Vec<FiniteVector> = (0..cfg.trials)
        .map(|t| problem.initial_point(trial_seed(cfg.seed, t)))
        .collect::<crfeas_core::Result<_>>()?;

    let jobs: Vec<(usize, usize, f64)> = (0..cfg.trials)
        .flat_map(|t| (0..cfg.algorithms.len()).flat_map(move |a| cfg.epsilons.iter().map(move |&e| (t, a, e))))
        .collect();
    let work = || {
        jobs.par_iter()
            .map(|&(t, a, e)| run_one(&operators[a], &feasibility, &starts[t], t, cfg.algorithms[a], e, cfg))
            .collect::<Result<Vec<_>>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Invalid(format!("thread pool: {e}")))?;
    pool.install(work)
}

/// One row of a results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmStats {
    pub algorithm: &'static str,
    pub cases_solved: usize,
    pub solved_alone: usize,
    pub solved_by_both: usize,
    pub wins: usize,
    /// Over trials solved by both; `None` when there are none.
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub running_time: Option<f64>,
}

/// Paired comparison of a product-space algorithm and its constraint-reduced
/// counterpart at one tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub epsilon: f64,
    pub product: AlgorithmStats,
    pub reduced: AlgorithmStats,
}

impl PairStats {
    pub fn available(&self) -> bool {
        self.product.solved_by_both > 0
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    })
}

/// Statistics of `product` against `reduced` on records with tolerance
/// `epsilon`. Wins are strictly fewer iterations; ties count for neither.
pub fn aggregate<'r>(
    records: &'r [TrialRecord],
    product: Algorithm,
    reduced: Algorithm,
    epsilon: f64,
) -> Result<PairStats> {
    let pick = |alg: Algorithm| {
        let mut v: Vec<&TrialRecord> = records
            .iter()
            .filter(|r| r.algorithm == alg && r.epsilon == epsilon)
            .collect();
        v.sort_by_key(|r| r.trial);
        v
    };
    let (p, r) = (pick(product), pick(reduced));
    let trials = |v: &[&TrialRecord]| v.iter().map(|x| x.trial).collect::<Vec<_>>();
    if p.is_empty() || trials(&p) != trials(&r) {
        return Err(HarnessError::Invalid(format!(
            "{product} and {reduced} need records on identical trials at tolerance {epsilon:e}"
        )));
    }

    let both: Vec<(&TrialRecord, &TrialRecord)> = p
        .iter()
        .zip(&r)
        .filter(|(a, b)| a.converged && b.converged)
        .map(|(a, b)| (*a, *b))
        .collect();
    let stats = |alg: Algorithm, mine: &[&TrialRecord], reduced_side: bool| {
        let side = |pair: &(&'r TrialRecord, &'r TrialRecord)| if reduced_side { (pair.1, pair.0) } else { *pair };
        let solved = mine.iter().filter(|x| x.converged).count();
        let iters: Vec<f64> = both.iter().map(|pair| side(pair).0.iterations as f64).collect();
        let times: Vec<f64> = both.iter().map(|pair| side(pair).0.wall_time_s).collect();
        AlgorithmStats {
            algorithm: alg.name(),
            cases_solved: solved,
            solved_alone: solved - both.len(),
            solved_by_both: both.len(),
            wins: both
                .iter()
                .filter(|pair| {
                    let (me, other) = side(pair);
                    me.iterations < other.iterations
                })
                .count(),
            mean: mean(&iters),
            median: median(&iters),
            running_time: mean(&times),
        }
    };
    Ok(PairStats {
        epsilon,
        product: stats(product, &p, false),
        reduced: stats(reduced, &r, true),
    })
}

/// All `(product, reduced)` pairs whose members both appear in `algorithms`.
pub fn comparable_pairs(algorithms: &[Algorithm]) -> Vec<(Algorithm, Algorithm)> {
    [
        (Algorithm::ProductDr, Algorithm::CrDr),
        (Algorithm::ProductMap, Algorithm::CrMap),
    ]
    .into_iter()
    .filter(|(a, b)| algorithms.contains(a) && algorithms.contains(b))
    .collect()
}

/// Aggregates every comparable pair at every tolerance of `cfg`.
pub fn aggregate_all(records: &[TrialRecord], cfg: &ExperimentConfig) -> Result<Vec<PairStats>> {
    let mut out = Vec::new();
    for &eps in &cfg.epsilons {
        for (p, r) in comparable_pairs(&cfg.algorithms) {
            out.push(aggregate(records, p, r, eps)?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    algorithm: &'static str,
    epsilon: f64,
    converged: bool,
    iterations: usize,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct StatsRow<'a> {
    problem_parameters: &'a str,
    epsilon: f64,
    algorithm: &'static str,
    cases_solved: usize,
    solved_alone: usize,
    solved_by_both: usize,
    wins: usize,
    mean: Option<f64>,
    median: Option<f64>,
    running_time: Option<f64>,
}

fn create(path: &Path, header: &serde_json::Value) -> Result<csv::Writer<fs::File>> {
    let mut file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_comment_header(&mut file, header).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_trials_csv(path: &Path, records: &[TrialRecord], header: &serde_json::Value) -> Result<()> {
    let mut w = create(path, header)?;
    for r in records {
        w.serialize(TrialRow {
            trial: r.trial,
            algorithm: r.algorithm.name(),
            epsilon: r.epsilon,
            converged: r.converged,
            iterations: r.iterations,
            wall_time_s: r.wall_time_s,
        })?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_stats_csv(path: &Path, parameters: &str, stats: &[PairStats], header: &serde_json::Value) -> Result<()> {
    let mut w = create(path, header)?;
    for s in stats {
        for row in [&s.product, &s.reduced] {
            w.serialize(StatsRow {
                problem_parameters: parameters,
                epsilon: s.epsilon,
                algorithm: row.algorithm,
                cases_solved: row.cases_solved,
                solved_alone: row.solved_alone,
                solved_by_both: row.solved_by_both,
                wins: row.wins,
                mean: row.mean,
                median: row.median,
                running_time: row.running_time,
            })?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(trial: usize, algorithm: Algorithm, converged: bool, iterations: usize) -> TrialRecord {
        TrialRecord {
            trial,
            algorithm,
            epsilon: 1e-6,
            converged,
            iterations,
            wall_time_s: iterations as f64 * 1e-3,
            stopping_residual: 0.0,
            final_residuals: vec![],
        }
    }

    #[test]
    fn reduced_faster_everywhere() {
        let mut rs = vec![];
        for t in 0..5 {
            rs.push(rec(t, Algorithm::ProductDr, true, 100 + t));
            rs.push(rec(t, Algorithm::CrDr, true, 50 + t));
        }
        let s = aggregate(&rs, Algorithm::ProductDr, Algorithm::CrDr, 1e-6).unwrap();
        assert_eq!((s.reduced.wins, s.product.wins), (5, 0));
        assert_eq!(s.reduced.solved_by_both, 5);
    }

    #[test]
    fn ties_count_for_neither() {
        let rs: Vec<_> = (0..4)
            .flat_map(|t| {
                [
                    rec(t, Algorithm::ProductMap, true, 7),
                    rec(t, Algorithm::CrMap, true, 7),
                ]
            })
            .collect();
        let s = aggregate(&rs, Algorithm::ProductMap, Algorithm::CrMap, 1e-6).unwrap();
        assert_eq!((s.product.wins, s.reduced.wins), (0, 0));
    }

    #[test]
    fn hand_computed_statistics() {
        let rs = vec![
            rec(0, Algorithm::ProductDr, true, 10),
            rec(0, Algorithm::CrDr, true, 4),
            rec(1, Algorithm::ProductDr, true, 20),
            rec(1, Algorithm::CrDr, false, 50_000),
            rec(2, Algorithm::ProductDr, true, 30),
            rec(2, Algorithm::CrDr, true, 40),
            rec(3, Algorithm::ProductDr, false, 50_000),
            rec(3, Algorithm::CrDr, true, 8),
            rec(4, Algorithm::ProductDr, true, 6),
            rec(4, Algorithm::CrDr, true, 6),
        ];
        let s = aggregate(&rs, Algorithm::ProductDr, Algorithm::CrDr, 1e-6).unwrap();
        // solved by both: trials 0, 2, 4
        assert_eq!(s.product.cases_solved, 4);
        assert_eq!(s.reduced.cases_solved, 4);
        assert_eq!((s.product.solved_alone, s.reduced.solved_alone), (1, 1));
        assert_eq!(s.product.solved_by_both, 3);
        assert_eq!((s.product.wins, s.reduced.wins), (1, 1));
        assert_eq!(s.product.mean, Some(46.0 / 3.0));
        assert_eq!(s.reduced.mean, Some(50.0 / 3.0));
        assert_eq!(s.product.median, Some(10.0));
        assert_eq!(s.reduced.median, Some(6.0));
        assert!((s.product.running_time.unwrap() - 0.046 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_shared_set_is_unavailable() {
        let rs = vec![rec(0, Algorithm::ProductDr, true, 3), rec(0, Algorithm::CrDr, false, 9)];
        let s = aggregate(&rs, Algorithm::ProductDr, Algorithm::CrDr, 1e-6).unwrap();
        assert!(!s.available());
        assert_eq!(s.reduced.mean, None);
    }

    #[test]
    fn mismatched_trials_rejected() {
        let rs = vec![rec(0, Algorithm::ProductDr, true, 3), rec(1, Algorithm::CrDr, true, 9)];
        assert!(aggregate(&rs, Algorithm::ProductDr, Algorithm::CrDr, 1e-6).is_err());
    }

    #[test]
    fn seeds_differ_per_trial() {
        let s: Vec<u64> = (0..100).map(|t| trial_seed(7, t)).collect();
        let mut d = s.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 100);
        assert_eq!(trial_seed(7, 3), s[3]);
    }
}
