//! The relaxed regularizer family `Psi_gamma`, the variable metric `W`, the
//! multiplier `Lambda`, the objective `J_gamma`, the convex model function,
//! and first-order stationarity residuals.
//!
//! `Psi_gamma(Z) = || Z (gamma I + (1-gamma) Z^T Z)^{dagger/2} ||_{2,1}`
//! interpolates the group norm `l_{2,1}` at `gamma = 1` and the orthogonally
//! weighted `l_{2,1}` at `gamma = 0`, which is the `l_{2,1}` norm of an
//! orthonormal basis of the column space of `Z`.

use nalgebra::DVector;

use crate::error::{OwlError, Result};
use crate::matrix::{trace_inner, validate_finite, DenseMatrix};
use crate::svd::compact_svd;
use crate::weights::{lwp_norm, quad_form_row, LwpOrder, WeightMatrix};

/// Relative Euclidean row-norm threshold below which a row counts as zero in
/// the multiplier and stationarity computations.
pub const ZERO_ROW_TOL: f64 = 1e-12;

/// Condition cap for inverting `M = Z^T Z` at `gamma = 0`.
pub const DEFAULT_COND_CAP: f64 = 1e12;

/// Scalar weight applied through the singular values: `w_gamma(s) =
/// s / sqrt(gamma + (1-gamma) s^2)` for `gamma > 0`, and the step function
/// (0 at 0, 1 for s > 0) in the limit `gamma = 0`.
pub fn w_gamma(sigma: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        if sigma > 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        sigma / (gamma + (1.0 - gamma) * sigma * sigma).sqrt()
    }
}

/// The pair `M = gamma I + (1-gamma) Z^T Z` and `W = M^{-1}` at a
/// linearization point, with a condition estimate of `M`.
#[derive(Debug, Clone)]
pub struct GammaWeight {
    gamma: f64,
    weight: WeightMatrix,
    cond: f64,
}

impl GammaWeight {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weight(&self) -> &WeightMatrix {
        &self.weight
    }

    pub fn w(&self) -> &DenseMatrix {
        self.weight.w()
    }

    /// `M = W^{-1}`.
    pub fn m(&self) -> &DenseMatrix {
        self.weight.minv()
    }

    pub fn cond(&self) -> f64 {
        self.cond
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(OwlError::InvalidInput(format!(
            "gamma must lie in [0, 1], got {gamma}"
        )));
    }
    Ok(())
}

fn inf_norm(m: &DenseMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Builds `W_k = (gamma I + (1-gamma) Z^T Z)^{-1}` with a condition estimate
/// (`kappa_inf(M) = ||M||_inf ||M^{-1}||_inf`). At `gamma = 0` the inverse
/// only exists for full column rank `Z`; the cap on the condition number
/// decides when to give up.
pub fn build_weight_capped(z: &DenseMatrix, gamma: f64, cond_cap: f64) -> Result<GammaWeight> {
    validate_finite("build_weight input", z)?;
    check_gamma(gamma)?;
    let k = z.ncols();
    let mut m = z.tr_mul(z) * (1.0 - gamma);
    for i in 0..k {
        m[(i, i)] += gamma;
    }
    m = (&m + m.transpose()) * 0.5;

    let m_inf = inf_norm(&m);
    let weight = WeightMatrix::from_spd(m).map_err(|_| OwlError::RankDeficient {
        cond: f64::INFINITY,
    })?;
    let cond = m_inf * inf_norm(weight.w());
    if gamma == 0.0 && !(cond <= cond_cap) {
        return Err(OwlError::RankDeficient { cond });
    }
    Ok(GammaWeight {
        gamma,
        weight,
        cond,
    })
}

/// [`build_weight_capped`] with the default condition cap.
pub fn build_weight(z: &DenseMatrix, gamma: f64) -> Result<GammaWeight> {
    build_weight_capped(z, gamma, DEFAULT_COND_CAP)
}

/// Rows whose Euclidean norm exceeds `rel_tol` times the largest row norm.
pub(crate) fn row_support(z: &DenseMatrix, rel_tol: f64) -> Vec<bool> {
    let norms: Vec<f64> = z.row_iter().map(|r| r.norm()).collect();
    let max = norms.iter().fold(0.0_f64, |m, &v| m.max(v));
    norms.iter().map(|&v| v > rel_tol * max).collect()
}

/// Multiplier update `Lambda = -sum over supported rows of
/// (1-gamma) / ||z_n||_W * (W z_n)(W z_n)^T`. Zero rows are skipped, matching
/// the zero-by-convention limit of each term.
pub fn build_lambda(z: &DenseMatrix, gw: &GammaWeight) -> DenseMatrix {
    let k = z.ncols();
    let mut lambda = DenseMatrix::zeros(k, k);
    let factor = 1.0 - gw.gamma();
    if factor == 0.0 {
        return lambda;
    }
    let support = row_support(z, ZERO_ROW_TOL);
    for (n, &live) in support.iter().enumerate() {
        if !live {
            continue;
        }
        let norm_w = quad_form_row(z, n, gw.w()).max(0.0).sqrt();
        if norm_w == 0.0 {
            continue;
        }
        let wz = gw.w() * z.row(n).transpose();
        let scale = factor / norm_w;
        for j in 0..k {
            for i in 0..k {
                lambda[(i, j)] -= scale * wz[i] * wz[j];
            }
        }
    }
    lambda
}

/// `Psi_gamma(Z)`, evaluated through the compact SVD as `||U w_gamma(Sigma)||_{2,1}`.
/// At `gamma = 0` the step function together with `rank_tol` realizes the
/// orthogonally weighted norm of the rank-truncated matrix; `Psi_gamma(0) = 0`.
pub fn psi_gamma(z: &DenseMatrix, gamma: f64, rank_tol: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let svd = compact_svd(z, rank_tol)?;
    if svd.rank() == 0 {
        return Ok(0.0);
    }
    let wg: Vec<f64> = svd.sigma.iter().map(|&s| w_gamma(s, gamma)).collect();
    let mut total = 0.0;
    for n in 0..svd.u.nrows() {
        let mut sq = 0.0;
        for (i, &w) in wg.iter().enumerate() {
            let v = svd.u[(n, i)] * w;
            sq += v * v;
        }
        total += sq.sqrt();
    }
    Ok(total)
}

/// The orthogonally weighted `l_{2,1}` functional, `Psi_0`.
pub fn owl21(z: &DenseMatrix, rank_tol: f64) -> Result<f64> {
    psi_gamma(z, 0.0, rank_tol)
}

/// `J_gamma(Z) = Psi_gamma(Z) + (1 / 2 alpha) ||A Z - Y||_Fro^2`.
pub fn objective(
    z: &DenseMatrix,
    a: &DenseMatrix,
    y: &DenseMatrix,
    alpha: f64,
    gamma: f64,
    rank_tol: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(OwlError::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    check_shapes(z, a, y)?;
    let fit = (a * z - y).norm();
    Ok(psi_gamma(z, gamma, rank_tol)? + fit * fit / (2.0 * alpha))
}

pub(crate) fn check_shapes(z: &DenseMatrix, a: &DenseMatrix, y: &DenseMatrix) -> Result<()> {
    if a.ncols() != z.nrows() || a.nrows() != y.nrows() || z.ncols() != y.ncols() {
        return Err(OwlError::DimensionMismatch {
            context: "A Z = Y shapes",
            expected: format!("A MxN, Z NxK, Y MxK with M={}, N={}", a.nrows(), a.ncols()),
            got: format!(
                "Z {}x{}, Y {}x{}",
                z.nrows(),
                z.ncols(),
                y.nrows(),
                y.ncols()
            ),
        });
    }
    Ok(())
}

/// Anchor data for the convex model of `Psi_gamma`: the linearization point,
/// its weight, and the multiplier.
#[derive(Debug, Clone)]
pub struct ModelAnchor {
    pub zhat: DenseMatrix,
    pub weight: GammaWeight,
    pub lambda: DenseMatrix,
}

impl ModelAnchor {
    pub fn new(zhat: DenseMatrix, gamma: f64) -> Result<Self> {
        let weight = build_weight(&zhat, gamma)?;
        let lambda = build_lambda(&zhat, &weight);
        Ok(Self {
            zhat,
            weight,
            lambda,
        })
    }
}

/// Convex model of `Psi_gamma` at the anchor:
/// `m(Z) = ||Z||_{What,1} + <Zhat Lambdahat, Z - Zhat>`.
pub fn model_psi(z: &DenseMatrix, anchor: &ModelAnchor) -> Result<f64> {
    if z.shape() != anchor.zhat.shape() {
        return Err(OwlError::DimensionMismatch {
            context: "model_psi",
            expected: format!("{:?}", anchor.zhat.shape()),
            got: format!("{:?}", z.shape()),
        });
    }
    let l1 = lwp_norm(z, anchor.weight.weight(), LwpOrder::One)?;
    let zl = &anchor.zhat * &anchor.lambda;
    let diff = z - &anchor.zhat;
    Ok(l1 + trace_inner(&zl, &diff))
}

/// W-gradient of the smooth Lagrange part:
/// `G = (Z Lambda + (1/alpha) A^T (A Z - Y)) W^{-1}`, using the cached `M`.
pub fn smooth_gradient(
    z: &DenseMatrix,
    gw: &GammaWeight,
    lambda: &DenseMatrix,
    a: &DenseMatrix,
    y: &DenseMatrix,
    alpha: f64,
) -> DenseMatrix {
    let resid = a * z - y;
    let grad = z * lambda + a.tr_mul(&resid) / alpha;
    grad * gw.m()
}

/// First-order residuals at `Z`: for supported rows the norm of the
/// stationarity equation, for zero rows the slack of the threshold test.
/// Both are measured row-wise in the `||.||_{W^{-1}}` norm.
#[derive(Debug, Clone)]
pub struct StationarityReport {
    /// Max over supported rows of the stationarity-equation residual.
    pub nonzero_residual: f64,
    /// Max over zero rows of `max{0, ||(A^T(AZ-Y))_n||_{W^{-1}} - alpha}`.
    pub zero_slack: f64,
    /// Indices of the rows treated as nonzero.
    pub support: Vec<usize>,
}

/// Evaluates both first-order conditions. Rows with Euclidean norm at or
/// below `zero_row_tol` times the largest row norm are treated as zero rows.
pub fn stationarity(
    z: &DenseMatrix,
    a: &DenseMatrix,
    y: &DenseMatrix,
    alpha: f64,
    gamma: f64,
    zero_row_tol: f64,
) -> Result<StationarityReport> {
    if !(alpha > 0.0) {
        return Err(OwlError::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    check_shapes(z, a, y)?;
    let gw = build_weight(z, gamma)?;
    let lambda = build_lambda(z, &gw);
    let resid = a * z - y;
    let grad_fit = a.tr_mul(&resid);
    let support_mask = row_support(z, zero_row_tol);

    let minv = gw.m();
    let minv_norm = |v: &DVector<f64>| -> f64 {
        (v.transpose() * minv * v)[(0, 0)].max(0.0).sqrt()
    };

    let mut nonzero_residual = 0.0_f64;
    let mut zero_slack = 0.0_f64;
    let mut support = Vec::new();
    for n in 0..z.nrows() {
        if support_mask[n] {
            support.push(n);
            let norm_w = quad_form_row(z, n, gw.w()).max(0.0).sqrt();
            let zn = z.row(n);
            let mut t = (zn * gw.w()) / norm_w + zn * &lambda;
            t += grad_fit.row(n) / alpha;
            nonzero_residual = nonzero_residual.max(minv_norm(&t.transpose()));
        } else {
            let g: DVector<f64> = grad_fit.row(n).transpose();
            zero_slack = zero_slack.max((minv_norm(&g) - alpha).max(0.0));
        }
    }
    Ok(StationarityReport {
        nonzero_residual,
        zero_slack,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::LwpOrder;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn randn(n: usize, k: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(n, k, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        })
    }

    #[test]
    fn psi_zero_at_gamma_zero_golden_values() {
        // l1/l2 of a single column.
        let z = DenseMatrix::from_row_slice(3, 1, &[0.0, 1.0, 1.0]);
        assert_relative_eq!(
            owl21(&z, 1e-10).unwrap(),
            2.0_f64.sqrt(),
            epsilon = 1e-12
        );

        let z = DenseMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_relative_eq!(owl21(&z, 1e-10).unwrap(), 2.0, epsilon = 1e-12);

        let c = 0.5;
        let z = DenseMatrix::from_row_slice(3, 2, &[1.0, 1.0, -c, -c, -c, -c]);
        let expect = (1.0 + 2.0 * c) / (1.0 + 2.0 * c * c).sqrt();
        assert_relative_eq!(owl21(&z, 1e-10).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn psi_at_gamma_one_is_group_norm() {
        let z = DenseMatrix::from_row_slice(2, 2, &[3.0, 4.0, 0.0, 0.0]);
        assert_relative_eq!(psi_gamma(&z, 1.0, 1e-10).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn owl21_of_one_sparse_vector_is_one() {
        let z = DenseMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        assert_relative_eq!(owl21(&z, 1e-10).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            owl21(&DenseMatrix::zeros(4, 2), 1e-10).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn owl21_counts_rows_of_full_rank_sparse_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (n, k, s) = (12, 6, 4);
        let mut x = DenseMatrix::zeros(n, k);
        let b = randn(s, s, &mut rng);
        let c = randn(s, k, &mut rng);
        let block = b * c;
        for (i, row) in [1usize, 4, 7, 9].iter().enumerate() {
            x.set_row(*row, &block.row(i));
        }
        assert_relative_eq!(owl21(&x, 1e-10).unwrap(), s as f64, epsilon = 1e-9);
    }

    #[test]
    fn build_weight_cases() {
        let gw = build_weight(&DenseMatrix::identity(2, 2), 0.0).unwrap();
        assert_relative_eq!(gw.w(), &DenseMatrix::identity(2, 2), epsilon = 1e-12);

        let gw = build_weight(&DenseMatrix::zeros(4, 2), 0.5).unwrap();
        assert_relative_eq!(
            gw.w(),
            &(DenseMatrix::identity(2, 2) * 2.0),
            epsilon = 1e-12
        );

        let z = DenseMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            build_weight(&z, 0.0),
            Err(OwlError::RankDeficient { .. })
        ));
    }

    #[test]
    fn weight_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = randn(6, 3, &mut rng);
        let gw = build_weight(&z, 0.3).unwrap();
        let prod = gw.w() * gw.m();
        assert_relative_eq!(prod, DenseMatrix::identity(3, 3), epsilon = 1e-8);
    }

    #[test]
    fn lambda_identity_case() {
        let gw = build_weight(&DenseMatrix::identity(2, 2), 0.0).unwrap();
        let lambda = build_lambda(&DenseMatrix::identity(2, 2), &gw);
        assert_relative_eq!(lambda, -DenseMatrix::identity(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn lambda_vanishes_at_gamma_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = randn(4, 3, &mut rng);
        let gw = build_weight(&z, 1.0).unwrap();
        assert_eq!(build_lambda(&z, &gw), DenseMatrix::zeros(3, 3));
    }

    // Remark trace identity: -tr(W^{-1/2} Lambda W^{-1/2}) = -tr(Lambda M)
    // equals (1-gamma) ||Z||_{W,1}, both sides computed independently.
    #[test]
    fn lambda_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gamma = 0.3;
        let z = randn(5, 3, &mut rng);
        let gw = build_weight(&z, gamma).unwrap();
        let lambda = build_lambda(&z, &gw);
        let lhs = -(&lambda * gw.m()).trace();
        let rhs = (1.0 - gamma) * lwp_norm(&z, gw.weight(), LwpOrder::One).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
    }

    #[test]
    fn lambda_is_symmetric_negative_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let z = randn(6, 4, &mut rng);
        let gw = build_weight(&z, 0.2).unwrap();
        let lambda = build_lambda(&z, &gw);
        assert_relative_eq!(lambda.clone(), lambda.transpose(), epsilon = 1e-10);
        let eig = lambda.symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l <= 1e-10));
    }

    #[test]
    fn objective_pieces() {
        let a = DenseMatrix::identity(2, 2);
        let y = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let z = DenseMatrix::zeros(2, 2);
        let alpha = 0.5;
        let j = objective(&z, &a, &y, alpha, 0.7, 1e-10).unwrap();
        assert_relative_eq!(j, y.norm_squared() / (2.0 * alpha), epsilon = 1e-12);
        assert!(objective(&z, &a, &y, 0.0, 0.7, 1e-10).is_err());
    }

    #[test]
    fn objective_is_psi_plus_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = randn(4, 6, &mut rng);
        let z = randn(6, 3, &mut rng);
        let y = randn(4, 3, &mut rng);
        let (alpha, gamma) = (0.8, 0.4);
        let j = objective(&z, &a, &y, alpha, gamma, 1e-10).unwrap();
        let fit = (&a * &z - &y).norm();
        let psi = psi_gamma(&z, gamma, 1e-10).unwrap();
        assert_relative_eq!(j, psi + fit * fit / (2.0 * alpha), epsilon = 1e-12);
    }

    #[test]
    fn model_matches_psi_at_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let zhat = randn(5, 3, &mut rng);
        let gamma = 0.35;
        let anchor = ModelAnchor::new(zhat.clone(), gamma).unwrap();
        let m = model_psi(&zhat, &anchor).unwrap();
        let psi = psi_gamma(&zhat, gamma, 1e-10).unwrap();
        assert_relative_eq!(m, psi, max_relative = 1e-10);
    }

    #[test]
    fn model_at_gamma_one_is_group_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let zhat = randn(4, 2, &mut rng);
        let anchor = ModelAnchor::new(zhat, 1.0).unwrap();
        let z = randn(4, 2, &mut rng);
        let w_id = WeightMatrix::identity(2);
        assert_relative_eq!(
            model_psi(&z, &anchor).unwrap(),
            lwp_norm(&z, &w_id, LwpOrder::One).unwrap(),
            epsilon = 1e-12
        );
    }

    // Second-order remainder of the model expansion: halving h scales the
    // mismatch by about four.
    #[test]
    fn model_remainder_is_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let gamma = 0.5;
        let zhat = randn(6, 3, &mut rng);
        let delta = {
            let d = randn(6, 3, &mut rng);
            let norm = d.norm();
            d / norm
        };
        let anchor = ModelAnchor::new(zhat.clone(), gamma).unwrap();
        let remainder = |h: f64| {
            let z = &zhat + &delta * h;
            (psi_gamma(&z, gamma, 1e-12).unwrap() - model_psi(&z, &anchor).unwrap()).abs()
        };
        let hs = [1e-2, 1e-3, 1e-4, 1e-5];
        let rs: Vec<f64> = hs.iter().map(|&h| remainder(h)).collect();
        let slope = ((rs[0] / rs[rs.len() - 1]).ln())
            / ((hs[0] / hs[hs.len() - 1]) as f64).ln();
        assert!(slope >= 1.9, "remainder slope {slope} below quadratic");
    }

    // Central differences of the smooth Lagrange part with W and Lambda
    // frozen at the linearization point.
    #[test]
    fn smooth_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (n, m, k) = (5, 4, 3);
        let a = randn(m, n, &mut rng);
        let y = randn(m, k, &mut rng);
        let z = randn(n, k, &mut rng);
        let alpha = 0.7;
        let gamma = 0.4;
        let gw = build_weight(&z, gamma).unwrap();
        let lambda = build_lambda(&z, &gw);
        let g = smooth_gradient(&z, &gw, &lambda, &a, &y, alpha);

        // M(Z) = sum_n ||z_n||_W (linearized, W fixed) ... the smooth part is
        // the Lagrange remainder; its Euclidean gradient is Z Lambda +
        // (1/alpha) A^T (A Z - Y), so <grad, D> must match the central
        // difference of F(Z) = tr(Z Lambda Z^T)/2 + fit(Z) along D.
        let f = |zz: &DenseMatrix| {
            let fitm = &a * zz - &y;
            0.5 * trace_inner(&(zz * &lambda), zz) + fitm.norm_squared() / (2.0 * alpha)
        };
        let d = randn(n, k, &mut rng);
        let h = 1e-6;
        let fd = (f(&(&z + &d * h)) - f(&(&z - &d * h))) / (2.0 * h);
        // G is the W-gradient: <G, D>_W = <G W, D> must equal the directional
        // derivative.
        let gw_mat = &g * gw.w();
        let inner = trace_inner(&gw_mat, &d);
        assert_relative_eq!(inner, fd, max_relative = 1e-6);
    }

    #[test]
    fn smooth_gradient_at_zero_gamma_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = randn(3, 4, &mut rng);
        let y = randn(3, 2, &mut rng);
        let z = DenseMatrix::zeros(4, 2);
        let alpha = 2.0;
        let gw = build_weight(&z, 1.0).unwrap();
        let lambda = build_lambda(&z, &gw);
        let g = smooth_gradient(&z, &gw, &lambda, &a, &y, alpha);
        let expect = a.tr_mul(&y) * (-1.0 / alpha);
        assert_relative_eq!(g, expect, epsilon = 1e-12);
    }

    #[test]
    fn stationarity_zero_iterate_gamma_one_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = randn(4, 6, &mut rng);
        let y = randn(4, 3, &mut rng);
        let z = DenseMatrix::zeros(6, 3);
        let aty = a.tr_mul(&y);
        let max_row = crate::matrix::max_row_norm(&aty);

        let rpt = stationarity(&z, &a, &y, max_row * 1.001, 1.0, ZERO_ROW_TOL).unwrap();
        assert!(rpt.support.is_empty());
        assert_eq!(rpt.zero_slack, 0.0);
        assert_eq!(rpt.nonzero_residual, 0.0);

        let rpt = stationarity(&z, &a, &y, max_row * 0.5, 1.0, ZERO_ROW_TOL).unwrap();
        assert!(rpt.zero_slack > 0.0);
        assert_relative_eq!(rpt.zero_slack, max_row * 0.5, max_relative = 1e-10);
    }

    // At Z = 0 with gamma in (0,1), W^{-1} = gamma I, so the zero-row test
    // reduces to sqrt(gamma) * ||(A^T Y)_n||_2 <= alpha.
    #[test]
    fn stationarity_zero_iterate_fractional_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let a = randn(4, 5, &mut rng);
        let y = randn(4, 3, &mut rng);
        let z = DenseMatrix::zeros(5, 3);
        let gamma: f64 = 0.25;
        let aty = a.tr_mul(&y);
        let max_row = crate::matrix::max_row_norm(&aty);
        let alpha = 0.5 * gamma.sqrt() * max_row;
        let rpt = stationarity(&z, &a, &y, alpha, gamma, ZERO_ROW_TOL).unwrap();
        let expect = gamma.sqrt() * max_row - alpha;
        assert_relative_eq!(rpt.zero_slack, expect, max_relative = 1e-10);
    }
}
