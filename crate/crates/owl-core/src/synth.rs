//! Synthetic experiment generators, recovery metrics, and sweep execution.
//!
//! Everything here is deterministic given the seeds: each trial derives its
//! own stream from `(seed, sweep value, trial index)` through a splitmix
//! chain, so trials are independent and reproducible regardless of execution
//! order or thread count.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{OwlError, Result};
use crate::matrix::DenseMatrix;
use crate::reduction::select_features;
use crate::solver::{solve_continuation, SolveReport, SolverConfig, Termination};
use crate::svd::numerical_rank;

/// Floor for the discrepancy level on noiseless runs.
pub const NOISELESS_DELTA: f64 = 1e-8;
/// Pruning threshold for the support-recovery criterion.
pub const SUPPORT_PRUNE_REL: f64 = 1e-6;

/// Parameters of one synthetic recovery problem family.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    /// Dictionary columns.
    pub n: usize,
    /// Measurements (dictionary rows).
    pub m: usize,
    /// Signal columns.
    pub k: usize,
    /// Row sparsity of the signal.
    pub s: usize,
    /// Signal rank, at most `min(s, k)`.
    pub r: usize,
    /// Target expected Frobenius norm of the additive noise.
    pub noise_norm: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.m >= 1
            && self.r >= 1
            && self.r <= self.s
            && self.s <= self.n
            && self.r <= self.k
            && self.noise_norm >= 0.0
            && self.trials >= 1;
        if ok {
            Ok(())
        } else {
            Err(OwlError::InvalidInput(format!(
                "synthetic spec out of range: {self:?}"
            )))
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-trial seed derivation.
pub fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(base ^ splitmix64(a.wrapping_add(splitmix64(b))))
}

/// Gaussian dictionary with i.i.d. entries of mean zero and variance
/// `1/sqrt(M)`; bit-identical for equal seeds.
pub fn gen_dictionary(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = (m as f64).powf(-0.25);
    let mut a = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = std * rng.sample::<f64, _>(StandardNormal);
        }
    }
    a
}

/// Row-sparse rank-`r` signal: the support is drawn uniformly without
/// replacement, and on the support `X_S = B C` with Gaussian factors `B`
/// (s x r) and `C` (r x K), resampled until the numerical rank is exactly
/// `r` and every supported row is nonzero.
pub fn gen_signal(spec: &SynthSpec, seed: u64) -> Result<(DenseMatrix, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..100 {
        let support = sample_without_replacement(spec.n, spec.s, &mut rng);
        let b = DenseMatrix::from_fn(spec.s, spec.r, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        });
        let c = DenseMatrix::from_fn(spec.r, spec.k, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        });
        let block = b * c;
        let mut x = DenseMatrix::zeros(spec.n, spec.k);
        for (slot, &row) in support.iter().enumerate() {
            x.set_row(row, &block.row(slot));
        }
        let sparsity_ok = support.iter().all(|&row| x.row(row).norm() > 0.0);
        if sparsity_ok && numerical_rank(&x, 1e-10)? == spec.r {
            return Ok((x, support));
        }
    }
    Err(OwlError::DegenerateInput(
        "failed to draw a signal of the requested rank in 100 attempts".into(),
    ))
}

fn sample_without_replacement(n: usize, s: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    // Partial Fisher-Yates over 0..n.
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..s {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut support = pool[..s].to_vec();
    support.sort_unstable();
    support
}

/// Adds i.i.d. Gaussian noise with per-entry standard deviation
/// `noise_norm / sqrt(M K)`, so the expected Frobenius norm of the
/// perturbation is `noise_norm`.
pub fn add_noise(y: &DenseMatrix, noise_norm: f64, seed: u64) -> DenseMatrix {
    if noise_norm == 0.0 {
        return y.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = noise_norm / ((y.nrows() * y.ncols()) as f64).sqrt();
    let mut out = y.clone();
    for i in 0..y.nrows() {
        for j in 0..y.ncols() {
            out[(i, j)] += std * rng.sample::<f64, _>(StandardNormal);
        }
    }
    out
}

/// Support recovery test: the pruned feature set of `z` must equal the true
/// support exactly (scale-invariant, since the ranking uses relative norms).
pub fn support_success(z: &DenseMatrix, true_support: &[usize], prune_rel: f64) -> bool {
    let mut got = select_features(z, prune_rel).indices;
    got.sort_unstable();
    let mut want = true_support.to_vec();
    want.sort_unstable();
    got == want
}

/// Which problem parameter a sweep varies.
#[derive(Debug, Clone)]
pub enum SweepKind {
    /// Signal rank values (each at most `s`).
    Rank(Vec<usize>),
    /// Measurement counts.
    Measurements(Vec<usize>),
}

impl SweepKind {
    pub fn values(&self) -> &[usize] {
        match self {
            SweepKind::Rank(v) | SweepKind::Measurements(v) => v,
        }
    }
}

/// Parameters of the outer drivers shared by every trial of a sweep.
#[derive(Debug, Clone)]
pub struct ContinuationParams {
    pub tau1: f64,
    pub tau2: f64,
    pub gamma_factor: f64,
    pub gamma_steps: usize,
}

impl Default for ContinuationParams {
    fn default() -> Self {
        Self {
            tau1: 0.9,
            tau2: 1.1,
            gamma_factor: 0.1,
            gamma_steps: 4,
        }
    }
}

/// Aggregated row of a sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub sweep_value: usize,
    pub recovery_rate: f64,
    pub mean_rmse: f64,
    pub mean_iters: f64,
    pub mean_time: f64,
}

/// Per-trial log entry.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub sweep_value: usize,
    pub trial: usize,
    pub success: bool,
    pub rmse: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub trials: Vec<TrialRecord>,
}

/// Runs one trial of the recovery experiment and scores it.
pub fn run_trial(
    spec: &SynthSpec,
    tmpl: &SolverConfig,
    cont: &ContinuationParams,
    trial_seed: u64,
) -> Result<(TrialRecord, SolveReport)> {
    let a = gen_dictionary(spec.m, spec.n, mix_seed(trial_seed, 1, 0));
    let (x, support) = gen_signal(spec, mix_seed(trial_seed, 2, 0))?;
    let clean = &a * &x;
    let y = add_noise(&clean, spec.noise_norm, mix_seed(trial_seed, 3, 0));
    let delta = if spec.noise_norm > 0.0 {
        spec.noise_norm
    } else {
        NOISELESS_DELTA
    };
    let mut cfg = SolverConfig::for_problem(1.0, &a, &y);
    copy_tunables(&mut cfg, tmpl);
    let start = Instant::now();
    let rpt = solve_continuation(
        &a,
        &y,
        delta,
        &cfg,
        cont.tau1,
        cont.tau2,
        cont.gamma_factor,
        cont.gamma_steps,
    )?;
    let wall_time = start.elapsed().as_secs_f64();
    let success = support_success(&rpt.z_final, &support, SUPPORT_PRUNE_REL);
    let rmse = (&rpt.z_final - &x).norm() / ((spec.n * spec.k) as f64).sqrt();
    Ok((
        TrialRecord {
            sweep_value: 0,
            trial: 0,
            success,
            rmse,
            iterations: rpt.iterations,
            wall_time,
            termination: rpt.termination,
        },
        rpt,
    ))
}

fn copy_tunables(cfg: &mut SolverConfig, tmpl: &SolverConfig) {
    cfg.kappa = tmpl.kappa;
    cfg.beta = tmpl.beta;
    cfg.r_tol = tmpl.r_tol;
    cfg.max_iter = tmpl.max_iter;
    cfg.max_backtracks = tmpl.max_backtracks;
    cfg.cond_cap = tmpl.cond_cap;
    cfg.zero_row_tol = tmpl.zero_row_tol;
    cfg.rank_tol = tmpl.rank_tol;
    cfg.alpha_factor = tmpl.alpha_factor;
    cfg.reduce_rank_tol = tmpl.reduce_rank_tol;
}

/// Runs `trials` independent trials per sweep value and aggregates recovery
/// rate, mean signal RMSE, mean iteration count, and mean wall time. Trials
/// execute in parallel; ordering and seeds are independent of scheduling.
/// Solver failures count as non-success and never abort the sweep.
pub fn run_sweep(
    spec: &SynthSpec,
    sweep: &SweepKind,
    tmpl: &SolverConfig,
    cont: &ContinuationParams,
) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for &value in sweep.values() {
        let mut trial_spec = spec.clone();
        match sweep {
            SweepKind::Rank(_) => trial_spec.r = value.min(spec.s).min(spec.k).max(1),
            SweepKind::Measurements(_) => trial_spec.m = value.max(1),
        }
        trial_spec.validate()?;
        let mut records: Vec<TrialRecord> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let trial_seed = mix_seed(spec.seed, value as u64, t as u64);
                let mut rec = match run_trial(&trial_spec, tmpl, cont, trial_seed) {
                    Ok((rec, _)) => rec,
                    Err(_) => TrialRecord {
                        sweep_value: value,
                        trial: t,
                        success: false,
                        rmse: f64::INFINITY,
                        iterations: 0,
                        wall_time: 0.0,
                        termination: Termination::AlphaAdaptationFailure,
                    },
                };
                rec.sweep_value = value;
                rec.trial = t;
                rec
            })
            .collect();
        records.sort_by_key(|r| r.trial);
        let nt = records.len() as f64;
        rows.push(SweepRow {
            sweep_value: value,
            recovery_rate: records.iter().filter(|r| r.success).count() as f64 / nt,
            mean_rmse: records.iter().map(|r| r.rmse).sum::<f64>() / nt,
            mean_iters: records.iter().map(|r| r.iterations as f64).sum::<f64>() / nt,
            mean_time: records.iter().map(|r| r.wall_time).sum::<f64>() / nt,
        });
        trials.extend(records);
    }
    Ok(SweepResult { rows, trials })
}
