//! Joint sparse recovery for the multiple-measurement-vector problem with the
//! orthogonally weighted `l_{2,1}` regularizer and its `gamma`-relaxation.
//!
//! The crate provides the dense linear-algebra kernel (compact SVD,
//! singular-value calculus, weighted norms, the W-metric prox), the
//! regularizer family `Psi_gamma` with its variable metric and first-order
//! conditions, the variable-metric proximal gradient solver with Armijo line
//! search, discrepancy-based selection of the regularization weight,
//! continuation in `gamma`, SVD-based problem reduction, a feature-selection
//! pipeline, and a deterministic synthetic benchmark harness.

pub mod error;
pub mod matrix;
pub mod reduction;
pub mod regularizer;
pub mod solver;
pub mod spark;
pub mod svd;
pub mod synth;
pub mod weights;

pub use error::{OwlError, Result};
pub use matrix::{
    max_row_norm, op_norm, read_matrix_csv, row_norms, trace_inner, validate_finite,
    write_matrix_csv, DenseMatrix,
};
pub use reduction::{
    expand_solution, reduce_data, reduce_data_rank, reduce_dictionary, refit_least_squares,
    select_features, FeatureRanking, ReducedData,
};
pub use regularizer::{
    build_lambda, build_weight, build_weight_capped, model_psi, objective, owl21, psi_gamma,
    smooth_gradient, stationarity, w_gamma, GammaWeight, ModelAnchor, StationarityReport,
    DEFAULT_COND_CAP, ZERO_ROW_TOL,
};
pub use solver::{
    armijo_step, init_z0, predicted_decrease, solve_continuation, solve_discrepancy,
    solve_discrepancy_from, solve_fixed, InitMode, Segment, SolveReport, SolverConfig,
    SolverState, Termination,
};
pub use spark::spark;
pub use svd::{compact_svd, numerical_rank, pinv_sqrt, sv_apply, CompactSvd, DEFAULT_RANK_TOL};
pub use synth::{
    add_noise, gen_dictionary, gen_signal, mix_seed, run_sweep, run_trial, support_success,
    ContinuationParams, SweepKind, SweepResult, SweepRow, SynthSpec, TrialRecord,
    NOISELESS_DELTA, SUPPORT_PRUNE_REL,
};
pub use weights::{lwp_norm, prox_w, weighted_row_norm, LwpOrder, WeightMatrix};
