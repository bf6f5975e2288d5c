//! The two built-in problem instances: matrix completion over an observed
//! entry set and robust PCA of a dense matrix. Both expose the pieces the
//! solver needs: the smooth loss, its Lipschitz constant (1 in both
//! cases), and the gradient-step matrix Z = X - (1/tau) grad f(X) as an
//! implicit product provider so nothing m x n is ever formed on the
//! completion path.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LowRankFactors, ProductOperator, SparseCoo, SplrMatrix};
use crate::regularizers::{penalty_sum, RegularizerSpec};
use crate::solver::ProximalProblem;

/// Matrix completion: minimize 1/2 ||observed part of (X - O)||_F^2 plus a
/// spectral penalty on X.
#[derive(Clone, Debug)]
pub struct CompletionProblem {
    observed: SparseCoo,
}

impl CompletionProblem {
    pub fn new(observed: SparseCoo) -> Result<Self> {
        if observed.nnz() == 0 {
            return Err(Error::invalid("completion needs at least one observed entry".to_string()));
        }
        Ok(CompletionProblem { observed })
    }

    pub fn observed(&self) -> &SparseCoo {
        &self.observed
    }

    pub fn m(&self) -> usize {
        self.observed.shape().0
    }

    pub fn n(&self) -> usize {
        self.observed.shape().1
    }

    /// X evaluated at every observed position, in pattern order; O(nnz k).
    fn predicted_on_pattern(&self, x: &LowRankFactors) -> Vec<f64> {
        if x.is_zero() {
            return vec![0.0; self.observed.nnz()];
        }
        let us = x.u_scaled();
        self.observed
            .iter()
            .map(|(i, j, _)| us.row(i).dot(&x.v.row(j)))
            .collect()
    }

    /// 1/2 sum over observed entries of (X_ij - O_ij)^2.
    pub fn loss_of(&self, x: &LowRankFactors) -> Result<f64> {
        if x.shape() != self.observed.shape() {
            return Err(Error::dim(format!(
                "iterate is {:?}, problem is {:?}",
                x.shape(),
                self.observed.shape()
            )));
        }
        let pred = self.predicted_on_pattern(x);
        Ok(0.5
            * pred
                .iter()
                .zip(self.observed.values())
                .map(|(p, o)| (p - o) * (p - o))
                .sum::<f64>())
    }
}

/// Full objective: loss plus `lambda_t` times the spectral penalty of X's
/// singular values.
pub fn mc_objective(
    x: &LowRankFactors,
    prob: &CompletionProblem,
    reg: &RegularizerSpec,
    lambda_t: f64,
) -> Result<f64> {
    Ok(prob.loss_of(x)? + lambda_t * penalty_sum(reg, &x.d, 1.0)?)
}

/// The gradient-step matrix Z = X - (1/tau) * (observed residual of X),
/// kept in sparse-plus-low-rank form. The sparse part has exactly the
/// observation pattern (values may be zero where X matches O).
pub fn mc_iterate_splr(
    x: &LowRankFactors,
    prob: &CompletionProblem,
    tau: f64,
) -> Result<SplrMatrix> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
    }
    if x.shape() != prob.observed.shape() {
        return Err(Error::dim(format!(
            "iterate is {:?}, problem is {:?}",
            x.shape(),
            prob.observed.shape()
        )));
    }
    let pred = prob.predicted_on_pattern(x);
    let residual_vals: Vec<f64> = pred
        .iter()
        .zip(prob.observed.values())
        .map(|(p, o)| p - o)
        .collect();
    let residual = prob.observed.pattern_with_values(residual_vals);
    SplrMatrix::new(1.0, x.clone(), -1.0 / tau, residual)
}

impl ProximalProblem for CompletionProblem {
    fn shape(&self) -> (usize, usize) {
        self.observed.shape()
    }

    fn rho(&self) -> f64 {
        1.0
    }

    fn loss(&self, x: &LowRankFactors) -> Result<f64> {
        self.loss_of(x)
    }

    fn iterate_map(&self, x: &LowRankFactors, tau: f64) -> Result<Box<dyn ProductOperator>> {
        Ok(Box::new(mc_iterate_splr(x, self, tau)?))
    }

    fn iterate_dense(&self, x: &LowRankFactors, tau: f64) -> Result<DenseMatrix> {
        Ok(mc_iterate_splr(x, self, tau)?.to_dense())
    }
}

/// Robust PCA: split a dense O into low-rank X and sparse Y by minimizing
/// 1/2 ||X + Y - O||_F^2 + lambda r(X) + beta ||Y||_1.
#[derive(Clone, Debug)]
pub struct RpcaProblem {
    pub o: DenseMatrix,
    pub lambda: f64,
    pub beta: f64,
}

impl RpcaProblem {
    pub fn new(o: DenseMatrix, lambda: f64, beta: f64) -> Result<Self> {
        if o.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite".to_string()));
        }
        if !(lambda > 0.0) || !(beta > 0.0) {
            return Err(Error::invalid(format!(
                "weights must be positive, got lambda={lambda} beta={beta}"
            )));
        }
        Ok(RpcaProblem { o, lambda, beta })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.o.nrows(), self.o.ncols())
    }
}

/// Objectives used by the alternating solver's per-block decrease checks:
/// the full objective F, the X-block objective f + lambda_t r(X), and the
/// Y-block objective f + beta ||Y||_1, where f = 1/2 ||X + Y - O||_F^2.
pub fn rpca_block_objectives(
    x: &LowRankFactors,
    y: &DenseMatrix,
    prob: &RpcaProblem,
    reg: &RegularizerSpec,
    lambda_t: f64,
) -> Result<(f64, f64, f64)> {
    if x.shape() != prob.shape() || (y.nrows(), y.ncols()) != prob.shape() {
        return Err(Error::dim(format!(
            "blocks are {:?} and {:?}, problem is {:?}",
            x.shape(),
            (y.nrows(), y.ncols()),
            prob.shape()
        )));
    }
    let x_dense = x.to_dense();
    let f = 0.5
        * prob
            .o
            .iter()
            .zip(x_dense.iter())
            .zip(y.iter())
            .map(|((&o, &xv), &yv)| {
                let r = xv + yv - o;
                r * r
            })
            .sum::<f64>();
    let r_x = lambda_t * penalty_sum(reg, &x.d, 1.0)?;
    let l1_y = prob.beta * y.iter().map(|v| v.abs()).sum::<f64>();
    Ok((f + r_x + l1_y, f + r_x, f + l1_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_norm, qr_orthonormalize, standard_gaussian, thin_svd};
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::time::Instant;

    fn random_lowrank(m: usize, n: usize, k: usize, rng: &mut ChaCha8Rng) -> LowRankFactors {
        let u = qr_orthonormalize(&standard_gaussian(m, k, rng)).q;
        let v = qr_orthonormalize(&standard_gaussian(n, k, rng)).q;
        let mut d: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..3.0)).collect();
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        LowRankFactors::new(u, d, v).unwrap()
    }

    fn random_problem(m: usize, n: usize, nnz: usize, rng: &mut ChaCha8Rng) -> CompletionProblem {
        let mut triplets = Vec::new();
        for idx in rand::seq::index::sample(rng, m * n, nnz) {
            triplets.push((idx / n, idx % n, rng.random_range(-2.0..2.0)));
        }
        CompletionProblem::new(SparseCoo::from_triplets(m, n, triplets).unwrap()).unwrap()
    }

    #[test]
    fn zero_iterate_loss_is_half_squared_observations() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let prob = random_problem(8, 7, 12, &mut rng);
        let want: f64 =
            0.5 * prob.observed().values().iter().map(|v| v * v).sum::<f64>();
        let x = LowRankFactors::zero(8, 7);
        assert!((prob.loss_of(&x).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn exact_fit_leaves_only_the_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let x = random_lowrank(9, 6, 3, &mut rng);
        let dense = x.to_dense();
        let mut triplets = Vec::new();
        for idx in rand::seq::index::sample(&mut rng, 9 * 6, 20) {
            let (i, j) = (idx / 6, idx % 6);
            triplets.push((i, j, dense[(i, j)]));
        }
        let prob =
            CompletionProblem::new(SparseCoo::from_triplets(9, 6, triplets).unwrap()).unwrap();
        let reg = RegularizerSpec::nuclear();
        let lambda_t = 0.3;
        let want = lambda_t * x.d.iter().sum::<f64>();
        assert!((mc_objective(&x, &prob, &reg, lambda_t).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn objective_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        for _ in 0..20 {
            let prob = random_problem(10, 8, 25, &mut rng);
            let x = random_lowrank(10, 8, 3, &mut rng);
            let reg = RegularizerSpec::lsp(1.0).unwrap();
            let lambda_t = 0.7;

            let dense_x = x.to_dense();
            let mut loss = 0.0;
            for (i, j, o) in prob.observed().iter() {
                let r = dense_x[(i, j)] - o;
                loss += 0.5 * r * r;
            }
            let spectrum = thin_svd(&dense_x.t().to_owned()).unwrap().d;
            let want = loss + lambda_t * penalty_sum(&reg, &spectrum, 1.0).unwrap();
            let got = mc_objective(&x, &prob, &reg, lambda_t).unwrap();
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn gradient_map_is_one_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        for _ in 0..50 {
            let prob = random_problem(12, 9, 30, &mut rng);
            let x1 = standard_gaussian(12, 9, &mut rng);
            let x2 = standard_gaussian(12, 9, &mut rng);
            let mut grad_diff_sq = 0.0;
            for (i, j, _) in prob.observed().iter() {
                let d = x1[(i, j)] - x2[(i, j)];
                grad_diff_sq += d * d;
            }
            assert!(grad_diff_sq.sqrt() <= frob_norm(&(&x1 - &x2)) + 1e-12);
        }
    }

    #[test]
    fn iterate_map_from_zero_is_scaled_observations() {
        let mut rng = ChaCha8Rng::seed_from_u64(94);
        let prob = random_problem(7, 7, 10, &mut rng);
        let tau = 1.5;
        let z = mc_iterate_splr(&LowRankFactors::zero(7, 7), &prob, tau).unwrap();
        let mut want = prob.observed().to_dense();
        want.mapv_inplace(|v| v / tau);
        assert!(frob_norm(&(z.to_dense() - want)) < 1e-12);
    }

    #[test]
    fn iterate_map_matches_dense_formula_and_keeps_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(95);
        for _ in 0..20 {
            let prob = random_problem(11, 8, 24, &mut rng);
            let x = random_lowrank(11, 8, 2, &mut rng);
            let tau = 1.5;
            let z = mc_iterate_splr(&x, &prob, tau).unwrap();

            let dense_x = x.to_dense();
            let mut want = dense_x.clone();
            for (i, j, o) in prob.observed().iter() {
                want[(i, j)] -= (dense_x[(i, j)] - o) / tau;
            }
            assert!(frob_norm(&(z.to_dense() - &want)) <= 1e-12 * frob_norm(&want).max(1.0));

            assert_eq!(z.sparse.nnz(), prob.observed().nnz());
            let zc: Vec<_> = z.sparse.iter().map(|(i, j, _)| (i, j)).collect();
            let oc: Vec<_> = prob.observed().iter().map(|(i, j, _)| (i, j)).collect();
            assert_eq!(zc, oc);
        }
    }

    #[test]
    fn rpca_objectives_cover_trivial_and_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(96);
        let o = standard_gaussian(6, 5, &mut rng);
        let prob = RpcaProblem::new(o.clone(), 0.5, 0.2).unwrap();
        let reg = RegularizerSpec::nuclear();

        let (f_all, _, _) = rpca_block_objectives(
            &LowRankFactors::zero(6, 5),
            &Array2::zeros((6, 5)),
            &prob,
            &reg,
            0.5,
        )
        .unwrap();
        assert!((f_all - 0.5 * frob_norm(&o).powi(2)).abs() < 1e-12);

        // X + Y = O exactly: only the penalty terms remain.
        let x = random_lowrank(6, 5, 2, &mut rng);
        let y = &o - &x.to_dense();
        let (f_all, f_x, f_y) = rpca_block_objectives(&x, &y, &prob, &reg, 0.5).unwrap();
        let r_x = 0.5 * x.d.iter().sum::<f64>();
        let l1 = 0.2 * y.iter().map(|v| v.abs()).sum::<f64>();
        assert!((f_all - (r_x + l1)).abs() < 1e-10);
        assert!((f_x - r_x).abs() < 1e-10);
        assert!((f_y - l1).abs() < 1e-10);

        for _ in 0..10 {
            let x = random_lowrank(6, 5, 2, &mut rng);
            let y = standard_gaussian(6, 5, &mut rng);
            let (f_all, f_x, f_y) = rpca_block_objectives(&x, &y, &prob, &reg, 0.5).unwrap();
            let f = 0.5 * frob_norm(&(&x.to_dense() + &y - &o)).powi(2);
            let r_x = 0.5 * x.d.iter().sum::<f64>();
            let l1 = 0.2 * y.iter().map(|v| v.abs()).sum::<f64>();
            assert!((f_all - (f + r_x + l1)).abs() <= 1e-10 * f_all.max(1.0));
            assert!((f_x - (f + r_x)).abs() <= 1e-10 * f_x.max(1.0));
            assert!((f_y - (f + l1)).abs() <= 1e-10 * f_y.max(1.0));
        }
    }

    #[test]
    fn construction_checks() {
        assert!(CompletionProblem::new(
            SparseCoo::from_triplets(3, 3, vec![(0, 0, 1.0)])
                .unwrap()
                .pattern_with_values(vec![1.0])
        )
        .is_ok());
        let o = Array2::zeros((3, 3));
        assert!(RpcaProblem::new(o.clone(), 0.0, 1.0).is_err());
        assert!(RpcaProblem::new(o.clone(), 1.0, -1.0).is_err());
        let mut bad = o;
        bad[(0, 0)] = f64::INFINITY;
        assert!(RpcaProblem::new(bad, 1.0, 1.0).is_err());
    }

    /// Per-iteration work on the completion path is dominated by terms
    /// linear in the number of observed entries; doubling that count must
    /// not much more than double the time of an iterate-map + objective +
    /// subspace round.
    #[test]
    fn per_iteration_cost_scales_linearly_in_observations() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let (m, n, k) = (600, 600, 5);
        let x = random_lowrank(m, n, k, &mut rng);
        let r0 = standard_gaussian(n, k, &mut rng);

        let mut time_one = |nnz: usize| -> f64 {
            let prob = random_problem(m, n, nnz, &mut rng);
            let round = |rng: &mut ChaCha8Rng| {
                let _ = rng;
                let z = mc_iterate_splr(&x, &prob, 1.5).unwrap();
                let q = crate::linalg::power_method(&z, &r0, 3).unwrap();
                let _ = z.mul_left(&q.q).unwrap();
                let _ = prob.loss_of(&x).unwrap();
            };
            round(&mut rng);
            let mut samples = Vec::new();
            for _ in 0..5 {
                let start = Instant::now();
                round(&mut rng);
                samples.push(start.elapsed().as_secs_f64());
            }
            samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
            samples[2]
        };

        let t_small = time_one(40_000);
        let t_big = time_one(80_000);
        assert!(
            t_big <= 2.5 * t_small.max(1e-4),
            "doubling observations scaled time {t_small:.4}s -> {t_big:.4}s"
        );
    }
}
