//! Variable-metric proximal gradient method with Armijo line search, plus the
//! two outer drivers: discrepancy-based selection of the regularization
//! weight `alpha`, and continuation in the relaxation parameter `gamma`.
//!
//! One inner iteration, at the current iterate `Z_k`:
//!
//! 1. `W_k = (gamma I + (1-gamma) Z_k^T Z_k)^{-1}`
//! 2. `Lambda_k = -sum over supported rows of (1-gamma)/||z_n||_W (W z_n)(W z_n)^T`
//! 3. `G_k = (Z_k Lambda_k + (1/alpha) A^T (A Z_k - Y)) W_k^{-1}`
//! 4. line search over `sigma`, accepting the first candidate whose weight
//!    stays invertible and that achieves a `kappa` fraction of the predicted
//!    decrease; `Z_{k+1} = Prox_{W_k, sigma}(Z_k - sigma G_k)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{OwlError, Result};
use crate::matrix::{max_row_norm, op_norm, trace_inner, validate_finite, DenseMatrix};
use crate::reduction::{expand_solution, reduce_data_rank};
use crate::regularizer::{
    build_lambda, build_weight_capped, check_shapes, psi_gamma, GammaWeight, DEFAULT_COND_CAP,
    ZERO_ROW_TOL,
};
use crate::svd::{numerical_rank, DEFAULT_RANK_TOL};
use crate::weights::{lwp_norm, prox_w, LwpOrder};

/// Hard bounds for the adaptive regularization weight.
const ALPHA_MIN: f64 = 1e-12;
const ALPHA_MAX: f64 = 1e12;
/// Cap on discrepancy probes per call.
const MAX_PROBES: usize = 200;
/// Treat the predicted decrease as numerically stationary below this scale.
const STATIONARY_PRED_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relaxation parameter in [0, 1]; 1 is the convex group-norm problem.
    pub gamma: f64,
    /// Regularization weight of the data fit (larger means sparser).
    pub alpha: f64,
    /// Armijo fraction in (0, 1).
    pub kappa: f64,
    /// Backtracking factor in (0, 1).
    pub beta: f64,
    /// Initial step-size cap.
    pub sigma_max: f64,
    /// Relative stopping tolerance for the scaled predicted decrease.
    pub r_tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Invertibility guard for `M = Z^T Z` at `gamma = 0`.
    pub cond_cap: f64,
    /// Relative row-norm threshold for zero-row classification.
    pub zero_row_tol: f64,
    /// Relative tolerance for numerical rank.
    pub rank_tol: f64,
    /// Geometric factor of the discrepancy alpha update.
    pub alpha_factor: f64,
    /// Relative singular-value gap used to read the iterate's rank when the
    /// continuation decides whether to reduce `K` before the `gamma = 0` stage.
    pub reduce_rank_tol: f64,
}

impl SolverConfig {
    /// Defaults with explicit `gamma`, `alpha`, and step cap.
    pub fn new(gamma: f64, alpha: f64, sigma_max: f64) -> Self {
        Self {
            gamma,
            alpha,
            kappa: 0.1,
            beta: 0.5,
            sigma_max,
            r_tol: 1e-6,
            max_iter: 5000,
            max_backtracks: 60,
            cond_cap: DEFAULT_COND_CAP,
            zero_row_tol: ZERO_ROW_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            alpha_factor: 2.0,
            reduce_rank_tol: 1e-4,
        }
    }

    /// Problem-scaled defaults: `alpha_0 = max_n ||(A^T Y)_n||_2` (the group
    /// threshold at which `Z = 0` is stationary for `gamma = 1`) and
    /// `sigma_max = alpha / ||A||_op^2` (the reciprocal of the convex-case
    /// Lipschitz constant of the smooth part).
    pub fn for_problem(gamma: f64, a: &DenseMatrix, y: &DenseMatrix) -> Self {
        let alpha = max_row_norm(&a.tr_mul(y)).max(f64::MIN_POSITIVE);
        let opn = op_norm(a).max(f64::MIN_POSITIVE);
        Self::new(gamma, alpha, alpha / (opn * opn))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.gamma)
            && self.alpha > 0.0
            && (0.0..1.0).contains(&self.kappa)
            && self.kappa > 0.0
            && (0.0..1.0).contains(&self.beta)
            && self.beta > 0.0
            && self.sigma_max > 0.0
            && self.r_tol > 0.0
            && self.max_iter > 0
            && self.max_backtracks > 0
            && self.cond_cap > 0.0
            && self.zero_row_tol >= 0.0
            && self.rank_tol >= 0.0
            && self.alpha_factor > 1.0;
        if ok {
            Ok(())
        } else {
            Err(OwlError::InvalidInput(format!(
                "solver config out of range: {self:?}"
            )))
        }
    }

    // Step cap for a probe at the given alpha. The cap never shrinks below
    // the configured base: at small alpha the fit term's Lipschitz constant
    // grows like 1/alpha, but the line search discovers that on its own,
    // while a cap proportional to alpha would freeze the regularizer flow
    // along the solution manifold.
    fn with_alpha(&self, alpha: f64, op_norm_sq: f64) -> Self {
        let mut cfg = self.clone();
        cfg.alpha = alpha;
        cfg.sigma_max = self
            .sigma_max
            .max(alpha / op_norm_sq.max(f64::MIN_POSITIVE));
        cfg
    }
}

/// Why a solve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Scaled predicted decrease fell below `r_tol * J`.
    ToleranceMet,
    MaxIter,
    /// Data misfit entered the discrepancy band.
    DiscrepancyMet,
    /// Upper discrepancy bound holds, `alpha` was previously increased, and
    /// the iterate stopped changing (`gamma = 0` only).
    GuardTerminated,
    /// `Z^T Z` not invertible within the condition cap at `gamma = 0`.
    RankDeficiency,
    /// Backtracking exhausted without an acceptable step.
    LineSearchFailure,
    /// `alpha` left its admissible range or the probe budget ran out.
    AlphaAdaptationFailure,
}

impl Termination {
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            Termination::RankDeficiency
                | Termination::LineSearchFailure
                | Termination::AlphaAdaptationFailure
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ToleranceMet => "tolerance_met",
            Termination::MaxIter => "max_iter",
            Termination::DiscrepancyMet => "discrepancy_met",
            Termination::GuardTerminated => "guard_terminated",
            Termination::RankDeficiency => "rank_deficiency",
            Termination::LineSearchFailure => "line_search_failure",
            Termination::AlphaAdaptationFailure => "alpha_adaptation_failure",
        }
    }
}

/// A run of accepted steps at one fixed `(alpha, gamma)` pair.
#[derive(Debug, Clone)]
pub struct Segment {
    /// Offset into the per-step traces.
    pub start: usize,
    pub len: usize,
    pub alpha: f64,
    pub gamma: f64,
    /// Objective at the segment's starting iterate.
    pub j_init: f64,
}

/// Terminal iterate plus per-step and per-stage trajectories.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub z_final: DenseMatrix,
    /// Total accepted steps across all segments.
    pub iterations: usize,
    /// Objective after each accepted step.
    pub j_trace: Vec<f64>,
    /// Predicted decrease of each accepted step (nonpositive).
    pub pred_trace: Vec<f64>,
    /// Step size of each accepted step.
    pub sigma_trace: Vec<f64>,
    /// `||A Z - Y||_Fro` at the final iterate, on the original data.
    pub fit_final: f64,
    /// One entry per inner solve (discrepancy probe).
    pub alpha_trace: Vec<f64>,
    /// Distinct continuation stages, in order.
    pub gamma_trace: Vec<f64>,
    pub segments: Vec<Segment>,
    pub termination: Termination,
}

impl SolveReport {
    fn empty(z: DenseMatrix, fit: f64, termination: Termination) -> Self {
        Self {
            z_final: z,
            iterations: 0,
            j_trace: Vec::new(),
            pred_trace: Vec::new(),
            sigma_trace: Vec::new(),
            fit_final: fit,
            alpha_trace: Vec::new(),
            gamma_trace: Vec::new(),
            segments: Vec::new(),
            termination,
        }
    }

    /// Appends `other`'s traces (used by the outer drivers).
    fn absorb(&mut self, other: SolveReport) {
        let offset = self.j_trace.len();
        self.z_final = other.z_final;
        self.iterations += other.iterations;
        self.j_trace.extend(other.j_trace);
        self.pred_trace.extend(other.pred_trace);
        self.sigma_trace.extend(other.sigma_trace);
        self.fit_final = other.fit_final;
        self.alpha_trace.extend(other.alpha_trace);
        for mut seg in other.segments {
            seg.start += offset;
            self.segments.push(seg);
        }
        self.termination = other.termination;
    }
}

/// Iterate `Z_k` with its cached weight, multiplier, objective pieces, and
/// the last accepted step size.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub z: DenseMatrix,
    pub weight: GammaWeight,
    pub lambda: DenseMatrix,
    pub sigma_prev: f64,
    /// `Psi_gamma(Z)`.
    pub psi: f64,
    /// `||A Z - Y||_Fro`.
    pub fit: f64,
    /// `J = psi + fit^2 / (2 alpha)`.
    pub j: f64,
    pub iter: usize,
}

impl SolverState {
    pub fn init(
        a: &DenseMatrix,
        y: &DenseMatrix,
        z0: DenseMatrix,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        check_shapes(&z0, a, y)?;
        validate_finite("Z0", &z0)?;
        let weight = build_weight_capped(&z0, cfg.gamma, cfg.cond_cap)?;
        let lambda = build_lambda(&z0, &weight);
        let psi = psi_gamma(&z0, cfg.gamma, cfg.rank_tol)?;
        let fit = (a * &z0 - y).norm();
        let j = psi + fit * fit / (2.0 * cfg.alpha);
        Ok(Self {
            z: z0,
            weight,
            lambda,
            sigma_prev: cfg.sigma_max,
            psi,
            fit,
            j,
            iter: 0,
        })
    }
}

/// `pred_sigma(Z_k) = ||Z+||_{W,1} - ||Z_k||_{W,1} + <G, Z+ - Z_k>_W`,
/// the model decrease associated with a candidate step. Nonpositive for any
/// step produced by the W-prox.
pub fn predicted_decrease(state: &SolverState, g: &DenseMatrix, zplus: &DenseMatrix) -> f64 {
    let w = state.weight.weight();
    let l1_new = lwp_norm(zplus, w, LwpOrder::One).expect("shape checked");
    let l1_old = lwp_norm(&state.z, w, LwpOrder::One).expect("shape checked");
    let diff = zplus - &state.z;
    let gw = g * w.w();
    l1_new - l1_old + trace_inner(&gw, &diff)
}

/// One Armijo-accepted step. Tries `sigma = beta^j min(sigma_max,
/// sigma_prev/beta)` and accepts the first candidate whose new weight matrix
/// is invertible within the condition cap and whose objective achieves a
/// `kappa` fraction of the predicted decrease. Returns the advanced state,
/// the accepted step size, and the predicted decrease at that step size.
pub fn armijo_step(
    state: &SolverState,
    a: &DenseMatrix,
    y: &DenseMatrix,
    cfg: &SolverConfig,
) -> Result<(SolverState, f64, f64)> {
    let resid = a * &state.z - y;
    let grad = &state.z * &state.lambda + a.tr_mul(&resid) / cfg.alpha;
    let g = &grad * state.weight.m();

    let stat_tol = STATIONARY_PRED_TOL * (1.0 + state.j.abs());
    let mut sigma = cfg.sigma_max.min(state.sigma_prev / cfg.beta);
    for _ in 0..cfg.max_backtracks {
        let step = &state.z - &g * sigma;
        let zc = prox_w(&step, state.weight.weight(), sigma)?;
        let pred = predicted_decrease(state, &g, &zc);

        if pred >= -stat_tol {
            // Numerically stationary at this step size: keep the iterate so
            // the objective trace stays exactly monotone, and let the caller's
            // stopping rule fire on the vanishing predicted decrease.
            let mut next = state.clone();
            next.sigma_prev = sigma;
            next.iter += 1;
            return Ok((next, sigma, pred));
        }

        match build_weight_capped(&zc, cfg.gamma, cfg.cond_cap) {
            Err(OwlError::RankDeficient { .. }) => {
                sigma *= cfg.beta;
                continue;
            }
            Err(e) => return Err(e),
            Ok(weight_c) => {
                let psi_c = psi_gamma(&zc, cfg.gamma, cfg.rank_tol)?;
                let fit_c = (a * &zc - y).norm();
                let j_c = psi_c + fit_c * fit_c / (2.0 * cfg.alpha);
                if j_c - state.j <= cfg.kappa * pred {
                    let lambda_c = build_lambda(&zc, &weight_c);
                    let next = SolverState {
                        z: zc,
                        weight: weight_c,
                        lambda: lambda_c,
                        sigma_prev: sigma,
                        psi: psi_c,
                        fit: fit_c,
                        j: j_c,
                        iter: state.iter + 1,
                    };
                    return Ok((next, sigma, pred));
                }
            }
        }
        sigma *= cfg.beta;
    }
    Err(OwlError::LineSearchFailure {
        backtracks: cfg.max_backtracks,
    })
}

/// Runs the inner iteration at fixed `(alpha, gamma)` until the scaled
/// predicted decrease satisfies `-pred/sigma <= r_tol * J(Z_k)` or the
/// iteration budget runs out. Math failures are reported through the
/// termination reason, never as panics.
pub fn solve_fixed(
    a: &DenseMatrix,
    y: &DenseMatrix,
    z0: &DenseMatrix,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    validate_finite("A", a)?;
    validate_finite("Y", y)?;
    let mut state = match SolverState::init(a, y, z0.clone(), cfg) {
        Ok(s) => s,
        Err(OwlError::RankDeficient { .. }) => {
            let fit = (a * z0 - y).norm();
            let mut rpt = SolveReport::empty(z0.clone(), fit, Termination::RankDeficiency);
            rpt.alpha_trace.push(cfg.alpha);
            rpt.segments.push(Segment {
                start: 0,
                len: 0,
                alpha: cfg.alpha,
                gamma: cfg.gamma,
                j_init: f64::INFINITY,
            });
            return Ok(rpt);
        }
        Err(e) => return Err(e),
    };

    let j_init = state.j;
    let mut j_trace = Vec::new();
    let mut pred_trace = Vec::new();
    let mut sigma_trace = Vec::new();
    let termination = loop {
        if state.iter >= cfg.max_iter {
            break Termination::MaxIter;
        }
        match armijo_step(&state, a, y, cfg) {
            Ok((next, sigma, pred)) => {
                let stop = -pred / sigma <= cfg.r_tol * state.j;
                state = next;
                j_trace.push(state.j);
                pred_trace.push(pred);
                sigma_trace.push(sigma);
                if stop {
                    break Termination::ToleranceMet;
                }
            }
            Err(OwlError::LineSearchFailure { .. }) => break Termination::LineSearchFailure,
            Err(OwlError::RankDeficient { .. }) => break Termination::RankDeficiency,
            Err(e) => return Err(e),
        }
    };

    let iterations = j_trace.len();
    Ok(SolveReport {
        z_final: state.z,
        iterations,
        j_trace,
        pred_trace,
        sigma_trace,
        fit_final: state.fit,
        alpha_trace: vec![cfg.alpha],
        gamma_trace: Vec::new(),
        segments: vec![Segment {
            start: 0,
            len: iterations,
            alpha: cfg.alpha,
            gamma: cfg.gamma,
            j_init,
        }],
        termination,
    })
}

/// Iterate change threshold for the `gamma = 0` discrepancy guard.
fn iterate_unchanged(z_new: &DenseMatrix, z_old: &DenseMatrix) -> bool {
    (z_new - z_old).norm() <= 1e-10 * (1.0 + z_old.norm())
}

/// Morozov discrepancy driver from an explicit starting iterate: repeatedly
/// solves at the current `alpha`, tests `tau1 delta <= ||A Z - Y|| <= tau2
/// delta`, and moves `alpha` geometrically (halving when the fit is too
/// large, doubling when too small), switching to geometric bisection once the
/// band is bracketed. Each solve warm-starts from the previous iterate and
/// rescales the step cap with `alpha`.
pub fn solve_discrepancy_from(
    a: &DenseMatrix,
    y: &DenseMatrix,
    delta: f64,
    cfg: &SolverConfig,
    tau1: f64,
    tau2: f64,
    z0: &DenseMatrix,
) -> Result<SolveReport> {
    if !(delta > 0.0) {
        return Err(OwlError::InvalidInput(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(0.0 < tau1 && tau1 <= 1.0 && 1.0 < tau2) {
        return Err(OwlError::InvalidInput(format!(
            "require 0 < tau1 <= 1 < tau2, got tau1={tau1}, tau2={tau2}"
        )));
    }
    let opn2 = {
        let o = op_norm(a);
        o * o
    };
    let mut alpha = cfg.alpha;
    let mut z = z0.clone();
    let mut combined = SolveReport::empty(z.clone(), (a * &z - y).norm(), Termination::MaxIter);
    let mut alpha_increased = false;
    let mut z_prev: Option<DenseMatrix> = None;
    // Bracket: fit is nondecreasing in alpha.
    let mut alpha_lo: Option<f64> = None; // fit below the band
    let mut alpha_hi: Option<f64> = None; // fit above the band

    for _probe in 0..MAX_PROBES {
        let stage_cfg = cfg.with_alpha(alpha, opn2);
        let rpt = solve_fixed(a, y, &z, &stage_cfg)?;
        let failed = rpt.termination.is_failure();
        z = rpt.z_final.clone();
        let fit = rpt.fit_final;
        combined.absorb(rpt);
        if failed {
            return Ok(combined);
        }

        if tau1 * delta <= fit && fit <= tau2 * delta {
            combined.termination = Termination::DiscrepancyMet;
            return Ok(combined);
        }
        if cfg.gamma == 0.0
            && fit <= tau2 * delta
            && alpha_increased
            && z_prev.as_ref().is_some_and(|prev| iterate_unchanged(&z, prev))
        {
            combined.termination = Termination::GuardTerminated;
            return Ok(combined);
        }
        z_prev = Some(z.clone());

        if fit > tau2 * delta {
            alpha_hi = Some(alpha);
        } else {
            alpha_lo = Some(alpha);
        }
        let next = match (alpha_lo, alpha_hi) {
            (Some(lo), Some(hi)) => (lo * hi).sqrt(),
            (None, Some(_)) => alpha / cfg.alpha_factor,
            (Some(_), None) => alpha * cfg.alpha_factor,
            (None, None) => unreachable!(),
        };
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&next) || next == alpha {
            combined.termination = Termination::AlphaAdaptationFailure;
            return Ok(combined);
        }
        if next > alpha {
            alpha_increased = true;
        }
        alpha = next;
    }
    combined.termination = Termination::AlphaAdaptationFailure;
    Ok(combined)
}

/// [`solve_discrepancy_from`] starting from the zero iterate (the standard
/// entry point for `gamma > 0`).
pub fn solve_discrepancy(
    a: &DenseMatrix,
    y: &DenseMatrix,
    delta: f64,
    cfg: &SolverConfig,
    tau1: f64,
    tau2: f64,
) -> Result<SolveReport> {
    let z0 = DenseMatrix::zeros(a.ncols(), y.ncols());
    solve_discrepancy_from(a, y, delta, cfg, tau1, tau2, &z0)
}

/// Continuation in `gamma`: stage 0 solves the convex problem (`gamma = 1`)
/// with discrepancy adaptation from `Z = 0`; stage `l` sets `gamma_l =
/// gamma_factor^l` and re-runs the discrepancy driver warm-started from the
/// previous stage. A final stage runs `gamma = 0`, first reducing the column
/// count to the iterate's numerical rank when the iterate is not full column
/// rank. Traces are concatenated across stages.
pub fn solve_continuation(
    a: &DenseMatrix,
    y: &DenseMatrix,
    delta: f64,
    cfg: &SolverConfig,
    tau1: f64,
    tau2: f64,
    gamma_factor: f64,
    gamma_steps: usize,
) -> Result<SolveReport> {
    if !(0.0 < gamma_factor && gamma_factor < 1.0) {
        return Err(OwlError::InvalidInput(format!(
            "gamma_factor must lie in (0, 1), got {gamma_factor}"
        )));
    }
    if gamma_steps == 0 {
        return Err(OwlError::InvalidInput("gamma_steps must be >= 1".into()));
    }
    let k = y.ncols();
    let mut combined =
        SolveReport::empty(DenseMatrix::zeros(a.ncols(), k), y.norm(), Termination::MaxIter);
    let mut z = DenseMatrix::zeros(a.ncols(), k);

    // gamma > 0 stages. Each stage re-runs the full discrepancy descent from
    // the configured starting alpha with the iterate warm-started: the
    // regularizer can only restructure the support while alpha is moderate
    // (step sizes scale with alpha near the data manifold), so inheriting the
    // terminal alpha of the previous stage would freeze the iterate.
    for l in 0..=gamma_steps {
        let gamma_l = if l == 0 {
            1.0
        } else {
            gamma_factor.powi(l as i32)
        };
        let mut stage_cfg = cfg.clone();
        stage_cfg.gamma = gamma_l;
        let rpt = solve_discrepancy_from(a, y, delta, &stage_cfg, tau1, tau2, &z)?;
        combined.gamma_trace.push(gamma_l);
        z = rpt.z_final.clone();
        let failed = rpt.termination.is_failure();
        combined.absorb(rpt);
        if failed {
            return Ok(combined);
        }
    }

    // Final gamma = 0 stage, on reduced data when the iterate lost rank.
    let rank = numerical_rank(&z, cfg.reduce_rank_tol)?;
    combined.gamma_trace.push(0.0);
    if rank == 0 {
        // Nothing left to renormalize; the data is explained by Z = 0.
        return Ok(combined);
    }
    let mut stage_cfg = cfg.clone();
    stage_cfg.gamma = 0.0;
    if rank == k {
        let rpt = solve_discrepancy_from(a, y, delta, &stage_cfg, tau1, tau2, &z)?;
        combined.absorb(rpt);
    } else {
        let reduced = reduce_data_rank(y, rank)?;
        let mut z_red = &z * reduced.q.transpose();
        ensure_full_column_rank(&mut z_red, cfg.rank_tol);
        let rpt =
            solve_discrepancy_from(a, &reduced.yprime, delta, &stage_cfg, tau1, tau2, &z_red)?;
        let z_exp = expand_solution(&rpt.z_final, &reduced.q)?;
        let fit = (a * &z_exp - y).norm();
        combined.absorb(rpt);
        combined.z_final = z_exp;
        combined.fit_final = fit;
    }
    Ok(combined)
}

/// Initialization mode for the fixed-`gamma` entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Zero matrix; the natural start for the convex stage.
    Zero,
    /// `A^T Y`, perturbed to full column rank when necessary (the `gamma = 0`
    /// iteration requires a full-rank starting point).
    LsqFullRank,
}

/// Builds a starting iterate. The perturbation draws i.i.d. entries of
/// magnitude `1e-6 ||A^T Y||_Fro / sqrt(NK)` and is re-drawn until the result
/// has full column rank.
pub fn init_z0<R: Rng>(
    a: &DenseMatrix,
    y: &DenseMatrix,
    mode: InitMode,
    rank_tol: f64,
    rng: &mut R,
) -> DenseMatrix {
    let (n, k) = (a.ncols(), y.ncols());
    match mode {
        InitMode::Zero => DenseMatrix::zeros(n, k),
        InitMode::LsqFullRank => {
            let base = a.tr_mul(y);
            if numerical_rank(&base, rank_tol).unwrap_or(0) == k {
                return base;
            }
            let mut scale = 1e-6 * base.norm() / ((n * k) as f64).sqrt();
            if scale == 0.0 {
                scale = 1e-6;
            }
            let mut z = base.clone();
            for _ in 0..100 {
                z = &base
                    + DenseMatrix::from_fn(n, k, |_, _| {
                        scale * rng.sample::<f64, _>(rand_distr::StandardNormal)
                    });
                if numerical_rank(&z, rank_tol).unwrap_or(0) == k {
                    break;
                }
            }
            z
        }
    }
}

fn ensure_full_column_rank(z: &mut DenseMatrix, rank_tol: f64) {
    let k = z.ncols();
    if numerical_rank(z, rank_tol).unwrap_or(0) == k {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_ff_5e7);
    let mut scale = 1e-6 * z.norm() / ((z.nrows() * k) as f64).sqrt();
    if scale == 0.0 {
        scale = 1e-6;
    }
    let base = z.clone();
    for _ in 0..100 {
        *z = &base
            + DenseMatrix::from_fn(z.nrows(), k, |_, _| {
                scale * rng.sample::<f64, _>(rand_distr::StandardNormal)
            });
        if numerical_rank(z, rank_tol).unwrap_or(0) == k {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn randn(n: usize, k: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(n, k, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        })
    }

    #[test]
    fn predicted_decrease_hand_computed() {
        // gamma = 1, Z = 0, A = I (1x1), Y = (3, 4), alpha = 1, sigma = 1.
        let a = DenseMatrix::identity(1, 1);
        let y = DenseMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        let cfg = SolverConfig::new(1.0, 1.0, 1.0);
        let state = SolverState::init(&a, &y, DenseMatrix::zeros(1, 2), &cfg).unwrap();
        let g = -y.clone();
        let step = &state.z - &g * 1.0;
        let zc = prox_w(&step, state.weight.weight(), 1.0).unwrap();
        assert_relative_eq!(zc[(0, 0)], 2.4, epsilon = 1e-12);
        assert_relative_eq!(zc[(0, 1)], 3.2, epsilon = 1e-12);
        // ||Z+||_{2,1} - 0 + <G, Z+> = 4 + (-3 * 2.4 - 4 * 3.2) = 4 - 20.
        let pred = predicted_decrease(&state, &g, &zc);
        assert_relative_eq!(pred, -16.0, epsilon = 1e-12);

        // Cross-check against pred = m(Z+) - m(Z) - (1/2 sigma) ||Z+ - Z||^2.
        let m = |z: &DenseMatrix| {
            z.row_iter().map(|r| r.norm()).sum::<f64>()
                + trace_inner(&g, &(z - &state.z))
                + (z - &state.z).norm_squared() / 2.0
        };
        let alt = m(&zc) - m(&state.z) - 0.5 * (zc.clone() - &state.z).norm_squared();
        assert_relative_eq!(pred, alt, epsilon = 1e-12);
    }

    #[test]
    fn predicted_decrease_prox_inequality() {
        // (1 / 2 sigma) ||Z+ - Z||^2_{W,2} <= -pred for prox-generated steps.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let a = randn(6, 10, &mut rng);
            let y = randn(6, 3, &mut rng);
            let cfg = SolverConfig::for_problem(0.5, &a, &y);
            let z0 = randn(10, 3, &mut rng);
            let state = SolverState::init(&a, &y, z0, &cfg).unwrap();
            let resid = &a * &state.z - &y;
            let grad = &state.z * &state.lambda + a.tr_mul(&resid) / cfg.alpha;
            let g = &grad * state.weight.m();
            let sigma = cfg.sigma_max;
            let zc = prox_w(&(&state.z - &g * sigma), state.weight.weight(), sigma).unwrap();
            let pred = predicted_decrease(&state, &g, &zc);
            assert!(pred <= 1e-12);
            let diff = &zc - &state.z;
            let wnorm2 = (&diff * state.weight.w() * diff.transpose()).trace();
            assert!(wnorm2 / (2.0 * sigma) <= -pred + 1e-10);
        }
    }

    #[test]
    fn armijo_reaches_group_soft_threshold_in_one_step() {
        // gamma = 1, A = I: the prox of the gradient step from zero is the
        // exact minimizer.
        let a = DenseMatrix::identity(1, 1);
        let y = DenseMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        let cfg = SolverConfig::new(1.0, 1.0, 1.0);
        let state = SolverState::init(&a, &y, DenseMatrix::zeros(1, 2), &cfg).unwrap();
        let (next, sigma, pred) = armijo_step(&state, &a, &y, &cfg).unwrap();
        assert_relative_eq!(sigma, 1.0, epsilon = 1e-12);
        assert!(pred < 0.0);
        assert_relative_eq!(next.z[(0, 0)], 2.4, epsilon = 1e-10);
        assert_relative_eq!(next.z[(0, 1)], 3.2, epsilon = 1e-10);
    }

    #[test]
    fn armijo_accepts_stationary_point() {
        // Z = 0 is stationary for alpha >= max row norm of A^T Y at gamma=1.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = randn(4, 6, &mut rng);
        let y = randn(4, 2, &mut rng);
        let alpha = 2.0 * max_row_norm(&a.tr_mul(&y));
        let cfg = SolverConfig::new(1.0, alpha, 1.0);
        let state = SolverState::init(&a, &y, DenseMatrix::zeros(6, 2), &cfg).unwrap();
        let (next, _sigma, pred) = armijo_step(&state, &a, &y, &cfg).unwrap();
        assert!(pred.abs() <= 1e-12);
        assert_eq!(next.z, state.z);
    }

    #[test]
    fn solve_fixed_zero_data_terminates_immediately() {
        let a = DenseMatrix::identity(3, 3);
        let y = DenseMatrix::zeros(3, 2);
        let cfg = SolverConfig::new(1.0, 1.0, 1.0);
        let rpt = solve_fixed(&a, &y, &DenseMatrix::zeros(3, 2), &cfg).unwrap();
        assert_eq!(rpt.termination, Termination::ToleranceMet);
        assert!(rpt.iterations <= 1);
        assert_eq!(rpt.z_final, DenseMatrix::zeros(3, 2));
    }

    #[test]
    fn solve_fixed_monotone_descent() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let a = randn(20, 40, &mut rng);
        let x = {
            let mut x = DenseMatrix::zeros(40, 4);
            let block = randn(5, 4, &mut rng);
            for (i, row) in [3usize, 11, 19, 27, 33].iter().enumerate() {
                x.set_row(*row, &block.row(i));
            }
            x
        };
        let y = &a * &x;
        let mut cfg = SolverConfig::for_problem(0.5, &a, &y);
        cfg.alpha *= 0.05;
        cfg.sigma_max *= 0.05;
        cfg.max_iter = 50;
        let z0 = randn(40, 4, &mut rng) * 0.1;
        let rpt = solve_fixed(&a, &y, &z0, &cfg).unwrap();
        assert!(rpt.iterations > 0);
        let mut prev = rpt.segments[0].j_init;
        for &j in &rpt.j_trace {
            assert!(j <= prev + 1e-12 * (1.0 + prev.abs()));
            prev = j;
        }
        for &p in &rpt.pred_trace {
            assert!(p <= 1e-10);
        }
        for &s in &rpt.sigma_trace {
            assert!(s <= cfg.sigma_max * (1.0 + 1e-12) && s > 0.0);
        }
    }

    #[test]
    fn solve_fixed_rank_deficient_start_reports() {
        let a = DenseMatrix::identity(3, 3);
        let y = DenseMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        let z0 = y.clone(); // rank 1 < K = 2
        let cfg = SolverConfig::new(0.0, 1.0, 1.0);
        let rpt = solve_fixed(&a, &y, &z0, &cfg).unwrap();
        assert_eq!(rpt.termination, Termination::RankDeficiency);
        assert_eq!(rpt.iterations, 0);
    }

    #[test]
    fn init_z0_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DenseMatrix::identity(3, 3);
        let y_full = DenseMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(
            init_z0(&a, &y_full, InitMode::Zero, 1e-10, &mut rng),
            DenseMatrix::zeros(3, 2)
        );
        // Full-rank A^T Y comes back exactly.
        let z = init_z0(&a, &y_full, InitMode::LsqFullRank, 1e-10, &mut rng);
        assert_eq!(z, y_full);
        // Rank-deficient A^T Y gets perturbed to full column rank.
        let y_def = DenseMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        let z = init_z0(&a, &y_def, InitMode::LsqFullRank, 1e-10, &mut rng);
        assert_eq!(numerical_rank(&z, 1e-10).unwrap(), 2);
        assert!((&z - &y_def).norm() <= 1e-4 * y_def.norm());
    }
}
