//! Proximal-gradient outer loop with three accelerations: continuation on
//! the regularization weight, a warm-started power method that tracks only
//! a thin subspace, and the reduced thresholding step on the projected
//! matrix. Every candidate iterate must pass the sufficient-decrease test
//! F(new) <= F(old) - c1 * ||new - old||_F^2 with c1 = (tau - rho) / 4;
//! rejected candidates restart the subspace iteration from the right
//! singular vectors of the projected matrix. The same machinery drives the
//! two-block alternating solver for robust PCA, where the sparse block is
//! an exact entrywise soft threshold.

use crate::error::{Error, Result};
use crate::gsvt::gsvt_reduced;
use crate::linalg::{
    basis_deflate, frob_norm, frob_norm_diff_lowrank, power_method, qr_orthonormalize,
    standard_gaussian, DenseMatrix, LowRankFactors, ProductOperator, SparseCoo,
};
use crate::problems::{rpca_block_objectives, RpcaProblem};
use crate::regularizers::{penalty_sum, threshold_gamma, RegKind, RegularizerSpec};
use ndarray::{concatenate, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// What a problem must provide to be solved: the smooth loss f, its
/// gradient folded into the step matrix Z = X - (1/tau) grad f(X), and the
/// Lipschitz constant of the gradient.
pub trait ProximalProblem {
    fn shape(&self) -> (usize, usize);
    /// Lipschitz constant of grad f; both built-in problems have 1.
    fn rho(&self) -> f64;
    fn loss(&self, x: &LowRankFactors) -> Result<f64>;
    fn iterate_map(&self, x: &LowRankFactors, tau: f64) -> Result<Box<dyn ProductOperator>>;
    /// Densified Z, used only by the full-SVD reference loop.
    fn iterate_dense(&self, x: &LowRankFactors, tau: f64) -> Result<DenseMatrix>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Step parameter; must exceed the problem's rho.
    pub tau: f64,
    /// Final regularization weight.
    pub lambda: f64,
    /// Starting weight of the continuation schedule.
    pub lambda0: f64,
    /// Continuation decay in (0, 1).
    pub nu: f64,
    /// Power-method rounds per proximal step.
    pub t_pm: usize,
    /// Restart attempts per outer iteration before the basis is widened.
    pub p_max: usize,
    pub max_iters: usize,
    /// Relative objective-change stopping threshold.
    pub tol: f64,
    pub seed: u64,
    /// Width of the initial random right basis.
    pub rank_init: usize,
    /// L1 weight for the sparse block; robust PCA only.
    pub beta: Option<f64>,
}

impl SolverConfig {
    /// Defaults shared by the CLI and tests; only the final weight is
    /// problem-specific.
    pub fn for_lambda(lambda: f64) -> Self {
        SolverConfig {
            tau: 1.5,
            lambda,
            lambda0: 50.0 * lambda,
            nu: 0.7,
            t_pm: 3,
            p_max: 10,
            max_iters: 500,
            tol: 1e-6,
            seed: 0,
            rank_init: 5,
            beta: None,
        }
    }

    pub fn validate(&self, rho: f64) -> Result<()> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::invalid(format!("rho must be in (0, 1], got {rho}")));
        }
        if !(self.tau > rho) {
            return Err(Error::invalid(format!(
                "tau must exceed rho: tau={} rho={rho}",
                self.tau
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::invalid(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.lambda0 >= self.lambda) {
            return Err(Error::invalid(format!(
                "lambda0 must be >= lambda: {} < {}",
                self.lambda0, self.lambda
            )));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::invalid(format!("nu must be in (0, 1), got {}", self.nu)));
        }
        if self.t_pm == 0 || self.p_max == 0 || self.max_iters == 0 || self.rank_init == 0 {
            return Err(Error::invalid(
                "t_pm, p_max, max_iters, rank_init must all be >= 1".to_string(),
            ));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid(format!("tol must be >= 0, got {}", self.tol)));
        }
        if let Some(b) = self.beta {
            if !(b > 0.0) {
                return Err(Error::invalid(format!("beta must be > 0, got {b}")));
            }
        }
        Ok(())
    }

    pub fn c1(&self, rho: f64) -> f64 {
        (self.tau - rho) / 4.0
    }
}

/// One step of the continuation schedule: the weight decays geometrically
/// toward its final value, (prev - lambda) * nu + lambda.
pub fn continuation(lambda_prev: f64, lambda: f64, nu: f64) -> f64 {
    (lambda_prev - lambda) * nu + lambda
}

/// Acceptance test for a candidate iterate: the objective must drop by at
/// least c1 times the squared step length (equality counts).
pub fn sufficient_decrease(f_new: f64, f_old: f64, delta_sq: f64, c1: f64) -> Result<bool> {
    if !f_new.is_finite() || !f_old.is_finite() || !delta_sq.is_finite() || !c1.is_finite() {
        return Err(Error::domain(format!(
            "non-finite decrease test inputs: f_new={f_new} f_old={f_old} delta_sq={delta_sq} c1={c1}"
        )));
    }
    if !(c1 > 0.0) || !(delta_sq >= 0.0) {
        return Err(Error::invalid(format!(
            "need c1 > 0 and delta_sq >= 0, got c1={c1} delta_sq={delta_sq}"
        )));
    }
    Ok(f_new <= f_old - c1 * delta_sq)
}

/// Entrywise sign(z) * (|z| - kappa)_+ stored sparsely.
pub fn soft_threshold_matrix(z: &DenseMatrix, kappa: f64) -> Result<SparseCoo> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::invalid(format!("kappa must be finite and > 0, got {kappa}")));
    }
    let mut triplets = Vec::new();
    for ((i, j), &v) in z.indexed_iter() {
        if v.abs() > kappa {
            triplets.push((i, j, v.signum() * (v.abs() - kappa)));
        }
    }
    SparseCoo::from_triplets(z.nrows(), z.ncols(), triplets)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub objective: f64,
    pub rank: usize,
    pub k_hat: usize,
    pub restarts: usize,
    pub delta_sq: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    /// Sum of squared step lengths over the run; finite and at most
    /// (F_first - F_final) / c1.
    pub sum_delta_sq: f64,
    /// Smallest squared step length.
    pub rate_bound_lhs: f64,
    /// (F_first - F_final) / (c1 * iterations); the smallest step must not
    /// exceed this.
    pub rate_bound_rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub solver: SolverConfig,
    pub reg: RegularizerSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ReportConfig,
    pub per_iteration: Vec<IterationRecord>,
    pub bounds: BoundsSummary,
    #[serde(rename = "final")]
    pub final_metrics: serde_json::Map<String, serde_json::Value>,
}

impl RunReport {
    /// Equality over everything except wall-clock fields; two runs with
    /// the same config and seed must agree on all of this.
    pub fn matches_ignoring_time(&self, other: &RunReport) -> bool {
        if self.config != other.config
            || self.bounds != other.bounds
            || self.per_iteration.len() != other.per_iteration.len()
        {
            return false;
        }
        for (a, b) in self.per_iteration.iter().zip(&other.per_iteration) {
            if a.t != b.t
                || a.objective.to_bits() != b.objective.to_bits()
                || a.rank != b.rank
                || a.k_hat != b.k_hat
                || a.restarts != b.restarts
                || a.delta_sq.to_bits() != b.delta_sq.to_bits()
            {
                return false;
            }
        }
        let keys: std::collections::BTreeSet<_> = self
            .final_metrics
            .keys()
            .chain(other.final_metrics.keys())
            .filter(|k| !k.contains("elapsed"))
            .collect();
        keys.iter().all(|&k| self.final_metrics.get(k) == other.final_metrics.get(k))
    }
}

const DEFLATE_TOL: f64 = 1e-10;
const LAMBDA_SETTLED_REL: f64 = 1e-3;

fn bound_slack(rhs: f64) -> f64 {
    1e-9 * (1.0 + rhs.abs())
}

/// Warm-start block for the subspace iteration: current right basis, plus
/// whatever part of the previous basis it does not already cover, floored
/// at `width` columns with fresh Gaussian directions and capped at the
/// small dimension.
fn build_start_basis(
    v_cur: &DenseMatrix,
    v_prev: &DenseMatrix,
    width: usize,
    min_dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DenseMatrix> {
    let deflated = basis_deflate(v_prev, v_cur, DEFLATE_TOL)?;
    let mut basis = qr_orthonormalize(&concatenate![Axis(1), v_cur.view(), deflated.view()]).q;
    let want = width.min(min_dim);
    if basis.ncols() < want {
        let extra = standard_gaussian(v_cur.nrows(), want - basis.ncols(), rng);
        basis = qr_orthonormalize(&concatenate![Axis(1), basis.view(), extra.view()]).q;
    }
    if basis.ncols() > min_dim {
        basis = basis.slice(ndarray::s![.., ..min_dim]).to_owned();
    }
    Ok(basis)
}

struct StepOutcome {
    factors: LowRankFactors,
    k_hat: usize,
    restarts: usize,
    delta_sq: f64,
    loss_new: f64,
    rsum_new: f64,
}

/// One accepted proximal step: run the power method from `start_basis`,
/// threshold in the projected space, and keep the candidate only if the
/// objective (at the current continuation weight) drops sufficiently.
/// Rejections restart from the projected right singular vectors; after
/// `p_max` failures the basis is widened once with fresh random columns
/// and the attempts repeat.
///
/// When every attempt fails the step degrades to a no-move: keeping the
/// current iterate satisfies the decrease inequality with equality, which
/// is what the exact prox does at a fixed point. This happens routinely
/// while the iterate is parked at the fixed point of a still-decaying
/// continuation weight, where candidates differ from the iterate only by
/// subspace wobble and the true decrease is below f64 resolution. The
/// restart count in the iteration record reports it.
#[allow(clippy::too_many_arguments)]
fn proximal_accept_step(
    z: &dyn ProductOperator,
    x_old: &LowRankFactors,
    loss_old: f64,
    rsum_old: f64,
    lambda_t: f64,
    eval_loss: &dyn Fn(&LowRankFactors) -> Result<f64>,
    reg: &RegularizerSpec,
    mu: f64,
    config: &SolverConfig,
    c1: f64,
    start_basis: DenseMatrix,
    rng: &mut ChaCha8Rng,
) -> Result<StepOutcome> {
    let (_, n) = z.shape();
    let min_dim = z.shape().0.min(n);
    let gamma = match reg.kind {
        RegKind::Tnn => None,
        _ => Some(threshold_gamma(reg, mu, None)?),
    };
    let f_old = loss_old + lambda_t * rsum_old;

    let mut basis = start_basis;
    let mut restarts = 0;
    let mut widened = false;
    loop {
        for _ in 0..config.p_max {
            let q = power_method(z, &basis, config.t_pm)?;
            let red = gsvt_reduced(z, &q, reg, mu, gamma)?;
            let delta = frob_norm_diff_lowrank(&red.factors, x_old)?;
            let delta_sq = delta * delta;
            let loss_new = eval_loss(&red.factors)?;
            let rsum_new = penalty_sum(reg, &red.factors.d, 1.0)?;
            let f_new = loss_new + lambda_t * rsum_new;
            if sufficient_decrease(f_new, f_old, delta_sq, c1)? {
                return Ok(StepOutcome {
                    factors: red.factors,
                    k_hat: red.k_hat,
                    restarts,
                    delta_sq,
                    loss_new,
                    rsum_new,
                });
            }
            // When the demanded decrease is below objective roundoff the
            // test can no longer certify anything; park on the current
            // iterate instead of chasing noise-sized candidates.
            if c1 * delta_sq <= bound_slack(f_old) {
                return Ok(StepOutcome {
                    factors: x_old.clone(),
                    k_hat: x_old.rank(),
                    restarts,
                    delta_sq: 0.0,
                    loss_new: loss_old,
                    rsum_new: rsum_old,
                });
            }
            restarts += 1;
            if red.v_a.ncols() > 0 {
                basis = red.v_a;
            }
        }
        if widened {
            return Ok(StepOutcome {
                factors: x_old.clone(),
                k_hat: x_old.rank(),
                restarts,
                delta_sq: 0.0,
                loss_new: loss_old,
                rsum_new: rsum_old,
            });
        }
        widened = true;
        let extra = standard_gaussian(n, config.rank_init.min(min_dim), rng);
        let mut wide = qr_orthonormalize(&concatenate![Axis(1), basis.view(), extra.view()]).q;
        if wide.ncols() > min_dim {
            wide = wide.slice(ndarray::s![.., ..min_dim]).to_owned();
        }
        basis = wide;
    }
}

struct RunAccumulator {
    records: Vec<IterationRecord>,
    f_first: f64,
    c1: f64,
}

impl RunAccumulator {
    fn new(f_first: f64, c1: f64) -> Self {
        RunAccumulator { records: Vec::new(), f_first, c1 }
    }

    fn push(&mut self, rec: IterationRecord) -> Result<()> {
        if let Some(prev) = self.records.last() {
            let budget = prev.objective - self.c1 * rec.delta_sq + bound_slack(prev.objective);
            if rec.objective > budget {
                return Err(Error::Contract(format!(
                    "objective rose past the decrease budget at t={}: {} > {}",
                    rec.t, rec.objective, budget
                )));
            }
        }
        self.records.push(rec);
        Ok(())
    }

    /// Telescoped decrease bounds for the finished run; both are hard
    /// guarantees of the acceptance rule, so a violation is a bug.
    fn bounds(&self) -> Result<BoundsSummary> {
        let t = self.records.len();
        let f_final = self.records.last().map(|r| r.objective).unwrap_or(self.f_first);
        let sum_delta_sq: f64 = self.records.iter().map(|r| r.delta_sq).sum();
        let min_delta_sq = self
            .records
            .iter()
            .map(|r| r.delta_sq)
            .fold(f64::INFINITY, f64::min);
        let sum_rhs = (self.f_first - f_final) / self.c1;
        let rate_rhs = sum_rhs / t.max(1) as f64;
        if sum_delta_sq > sum_rhs + bound_slack(sum_rhs) {
            return Err(Error::Contract(format!(
                "step-length sum {sum_delta_sq} exceeds decrease budget {sum_rhs}"
            )));
        }
        if min_delta_sq > rate_rhs + bound_slack(rate_rhs) {
            return Err(Error::Contract(format!(
                "smallest step {min_delta_sq} exceeds rate bound {rate_rhs}"
            )));
        }
        Ok(BoundsSummary {
            sum_delta_sq,
            rate_bound_lhs: min_delta_sq,
            rate_bound_rhs: rate_rhs,
        })
    }
}

fn finish_report(
    config: &SolverConfig,
    reg: &RegularizerSpec,
    acc: RunAccumulator,
    converged: bool,
    lambda_t: f64,
    rank: usize,
    total_start: Instant,
) -> Result<RunReport> {
    let bounds = acc.bounds()?;
    let mut final_metrics = serde_json::Map::new();
    let f_final = acc.records.last().map(|r| r.objective).unwrap_or(acc.f_first);
    final_metrics.insert("objective".into(), f_final.into());
    final_metrics.insert("rank".into(), rank.into());
    final_metrics.insert("iterations".into(), acc.records.len().into());
    final_metrics.insert("converged".into(), converged.into());
    final_metrics.insert("lambda_final".into(), lambda_t.into());
    final_metrics.insert(
        "elapsed_ms".into(),
        (total_start.elapsed().as_secs_f64() * 1e3).into(),
    );
    Ok(RunReport {
        config: ReportConfig { solver: config.clone(), reg: *reg },
        per_iteration: acc.records,
        bounds,
        final_metrics,
    })
}

/// Stop once the relative objective change is below tol, but only after
/// the continuation weight has essentially reached its final value;
/// earlier plateaus (for example X stuck at zero under a huge weight) do
/// not mean convergence.
fn should_stop(f_prev: f64, f_now: f64, lambda_t: f64, config: &SolverConfig) -> bool {
    let rel = (f_prev - f_now).abs() / f_prev.abs().max(1.0);
    rel <= config.tol && (lambda_t - config.lambda) <= LAMBDA_SETTLED_REL * config.lambda
}

/// Low-rank proximal-gradient solve of loss(X) + lambda * penalty(X).
///
/// Starts from X = 0 and a random right basis, runs the
/// continuation/power-method/reduced-threshold loop, and returns the final
/// factors with a full per-iteration report. The report's bounds block
/// certifies the telescoped decrease inequalities; the solve fails rather
/// than return an iterate that violates them.
pub fn fancl_solve(
    problem: &dyn ProximalProblem,
    reg: &RegularizerSpec,
    config: &SolverConfig,
) -> Result<(LowRankFactors, RunReport)> {
    let rho = problem.rho();
    config.validate(rho)?;
    let (m, n) = problem.shape();
    let min_dim = m.min(n);
    let c1 = config.c1(rho);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = config.rank_init.min(min_dim);

    let mut v_cur = standard_gaussian(n, width, &mut rng);
    let mut v_prev = standard_gaussian(n, width, &mut rng);
    let mut x = LowRankFactors::zero(m, n);
    let mut loss = problem.loss(&x)?;
    let mut rsum = 0.0;
    let mut lambda_t = config.lambda0;

    let total_start = Instant::now();
    let mut acc = RunAccumulator::new(loss, c1);
    let mut f_prev = loss;
    let mut converged = false;

    for t in 1..=config.max_iters {
        let iter_start = Instant::now();
        lambda_t = continuation(lambda_t, config.lambda, config.nu);
        let mu = lambda_t / config.tau;
        let z = problem.iterate_map(&x, config.tau)?;
        let basis = build_start_basis(&v_cur, &v_prev, config.rank_init, min_dim, &mut rng)?;

        let out = proximal_accept_step(
            z.as_ref(),
            &x,
            loss,
            rsum,
            lambda_t,
            &|cand| problem.loss(cand),
            reg,
            mu,
            config,
            c1,
            basis,
            &mut rng,
        )?;

        v_prev = std::mem::replace(&mut v_cur, out.factors.v.clone());
        x = out.factors;
        loss = out.loss_new;
        rsum = out.rsum_new;
        let f_now = loss + lambda_t * rsum;
        acc.push(IterationRecord {
            t,
            objective: f_now,
            rank: x.rank(),
            k_hat: out.k_hat,
            restarts: out.restarts,
            delta_sq: out.delta_sq,
            elapsed_ms: iter_start.elapsed().as_secs_f64() * 1e3,
        })?;

        if should_stop(f_prev, f_now, lambda_t, config) {
            converged = true;
            break;
        }
        f_prev = f_now;
    }

    let report = finish_report(config, reg, acc, converged, lambda_t, x.rank(), total_start)?;
    Ok((x, report))
}

/// Reference loop with no subspace machinery: every iteration densifies Z
/// and thresholds its full SVD. Same continuation, acceptance rule, and
/// report; exists to quantify what the reduced path saves.
pub fn full_svd_reference_solve(
    problem: &dyn ProximalProblem,
    reg: &RegularizerSpec,
    config: &SolverConfig,
) -> Result<(LowRankFactors, RunReport)> {
    let rho = problem.rho();
    config.validate(rho)?;
    let (m, n) = problem.shape();
    let c1 = config.c1(rho);

    let mut x = LowRankFactors::zero(m, n);
    let mut loss = problem.loss(&x)?;
    let mut rsum = 0.0;
    let mut lambda_t = config.lambda0;

    let total_start = Instant::now();
    let mut acc = RunAccumulator::new(loss, c1);
    let mut f_prev = loss;
    let mut converged = false;

    for t in 1..=config.max_iters {
        let iter_start = Instant::now();
        lambda_t = continuation(lambda_t, config.lambda, config.nu);
        let mu = lambda_t / config.tau;
        let z = problem.iterate_dense(&x, config.tau)?;
        let cand = crate::gsvt::gsvt_full(&z, reg, mu)?;
        let delta = frob_norm_diff_lowrank(&cand, &x)?;
        let mut delta_sq = delta * delta;
        let loss_new = problem.loss(&cand)?;
        let rsum_new = penalty_sum(reg, &cand.d, 1.0)?;
        let f_new = loss_new + lambda_t * rsum_new;
        let f_old = loss + lambda_t * rsum;
        // Same no-move degrade as the reduced path for steps parked at a
        // fixed point, where the certified decrease is below f64 noise.
        let f_now = if sufficient_decrease(f_new, f_old, delta_sq, c1)? {
            x = cand;
            loss = loss_new;
            rsum = rsum_new;
            f_new
        } else {
            delta_sq = 0.0;
            f_old
        };
        acc.push(IterationRecord {
            t,
            objective: f_now,
            rank: x.rank(),
            k_hat: x.rank(),
            restarts: 0,
            delta_sq,
            elapsed_ms: iter_start.elapsed().as_secs_f64() * 1e3,
        })?;
        if should_stop(f_prev, f_now, lambda_t, config) {
            converged = true;
            break;
        }
        f_prev = f_now;
    }

    let report = finish_report(config, reg, acc, converged, lambda_t, x.rank(), total_start)?;
    Ok((x, report))
}

/// Two-block alternating solve of
/// 1/2 ||X + Y - O||_F^2 + lambda r(X) + beta ||Y||_1.
///
/// The X block takes the same accepted proximal step as [`fancl_solve`];
/// the Y block is the exact entrywise soft threshold, whose block
/// objective decrease is verified rather than assumed. `config.beta` must
/// be set and both weights must agree with the ones stored in the problem.
pub fn fancl_rpca_solve(
    prob: &RpcaProblem,
    reg: &RegularizerSpec,
    config: &SolverConfig,
) -> Result<(LowRankFactors, SparseCoo, RunReport)> {
    let rho = 1.0;
    config.validate(rho)?;
    let beta = config
        .beta
        .ok_or_else(|| Error::invalid("robust PCA needs config.beta".to_string()))?;
    if prob.lambda != config.lambda || prob.beta != beta {
        return Err(Error::invalid(format!(
            "problem weights (lambda={}, beta={}) disagree with config (lambda={}, beta={beta})",
            prob.lambda, prob.beta, config.lambda
        )));
    }
    let (m, n) = prob.shape();
    let min_dim = m.min(n);
    let c1 = config.c1(rho);
    let kappa = beta / config.tau;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = config.rank_init.min(min_dim);

    let mut v_cur = standard_gaussian(n, width, &mut rng);
    let mut v_prev = standard_gaussian(n, width, &mut rng);
    let mut x = LowRankFactors::zero(m, n);
    // The sparse block starts from its own prox at X = 0 instead of zero,
    // so gross outliers are mostly absorbed before the first low-rank
    // step. Concave spectral penalties would otherwise admit
    // outlier-aligned directions at the start and their flat tails could
    // never shed them.
    let mut y: DenseMatrix =
        prob.o.mapv(|v| { let z = v / config.tau; z.signum() * (z.abs() - kappa).max(0.0) });
    let mut o_minus_y = &prob.o - &y;

    let loss_of = |cand: &LowRankFactors, target: &DenseMatrix| -> f64 {
        let diff = cand.to_dense() - target;
        0.5 * diff.iter().map(|v| v * v).sum::<f64>()
    };

    let mut loss = loss_of(&x, &o_minus_y);
    let mut rsum = 0.0;
    let f_first = loss + beta * y.iter().map(|v| v.abs()).sum::<f64>();
    let total_start = Instant::now();
    let mut acc = RunAccumulator::new(f_first, c1);
    let mut f_prev = f_first;
    let mut converged = false;
    let mut lambda_t = config.lambda0;

    for t in 1..=config.max_iters {
        let iter_start = Instant::now();
        lambda_t = continuation(lambda_t, config.lambda, config.nu);
        let mu = lambda_t / config.tau;

        // X block: Z = (1 - 1/tau) X + (1/tau)(O - Y), dense.
        let mut z = x.to_dense();
        z.mapv_inplace(|v| v * (1.0 - 1.0 / config.tau));
        z.scaled_add(1.0 / config.tau, &o_minus_y);
        let basis = build_start_basis(&v_cur, &v_prev, config.rank_init, min_dim, &mut rng)?;
        let target = o_minus_y.clone();
        let out = proximal_accept_step(
            &z,
            &x,
            loss,
            rsum,
            lambda_t,
            &|cand| Ok(loss_of(cand, &target)),
            reg,
            mu,
            config,
            c1,
            basis,
            &mut rng,
        )?;
        v_prev = std::mem::replace(&mut v_cur, out.factors.v.clone());
        x = out.factors;

        // Y block: exact prox of beta ||.||_1 at Z_Y = (1 - 1/tau) Y + (1/tau)(O - X).
        let x_dense = x.to_dense();
        let mut z_y = y.clone();
        z_y.mapv_inplace(|v| v * (1.0 - 1.0 / config.tau));
        z_y.scaled_add(1.0 / config.tau, &(&prob.o - &x_dense));
        let y_new = z_y.mapv(|v| v.signum() * (v.abs() - kappa).max(0.0));
        let delta_y_sq = frob_norm(&(&y_new - &y)).powi(2);

        let (_, _, f_y_old) = rpca_block_objectives(&x, &y, prob, reg, lambda_t)?;
        let (f_all, _, f_y_new) = rpca_block_objectives(&x, &y_new, prob, reg, lambda_t)?;
        if !f_y_new.is_finite() || !f_y_old.is_finite() {
            return Err(Error::domain(format!(
                "sparse-block objective is not finite at t={t}"
            )));
        }
        // The prox step is exact, so the decrease holds mathematically; the
        // slack only absorbs roundoff in the two objective evaluations.
        let y_budget = f_y_old - c1 * delta_y_sq + bound_slack(f_y_old);
        if f_y_new > y_budget {
            return Err(Error::Contract(format!(
                "sparse-block prox failed its decrease guarantee at t={t}: {f_y_new} > {y_budget}"
            )));
        }
        y = y_new;
        o_minus_y = &prob.o - &y;
        let l1_y = y.iter().map(|v| v.abs()).sum::<f64>();
        loss = loss_of(&x, &o_minus_y);
        rsum = penalty_sum(reg, &x.d, 1.0)?;
        debug_assert!((loss + lambda_t * rsum + beta * l1_y - f_all).abs() <= 1e-6 * f_all.abs().max(1.0));

        let f_now = loss + lambda_t * rsum + beta * l1_y;
        acc.push(IterationRecord {
            t,
            objective: f_now,
            rank: x.rank(),
            k_hat: out.k_hat,
            restarts: out.restarts,
            delta_sq: out.delta_sq + delta_y_sq,
            elapsed_ms: iter_start.elapsed().as_secs_f64() * 1e3,
        })?;

        if should_stop(f_prev, f_now, lambda_t, config) {
            converged = true;
            break;
        }
        f_prev = f_now;
    }

    let mut triplets = Vec::new();
    for ((i, j), &v) in y.indexed_iter() {
        if v != 0.0 {
            triplets.push((i, j, v));
        }
    }
    let y_sparse = SparseCoo::from_triplets(m, n, triplets)?;
    let mut report = finish_report(config, reg, acc, converged, lambda_t, x.rank(), total_start)?;
    report
        .final_metrics
        .insert("sparse_nnz".into(), y_sparse.nnz().into());
    Ok((x, y_sparse, report))
}
