//! Regularization-weight selection on a validation split.
//!
//! The grid is anchored at a power-iteration estimate of the largest
//! singular value of the training matrix: weights sigma/4, sigma/8, ...,
//! sigma/512 are tried in decreasing order and scored by validation RMSE.
//! Ties go to the larger weight. Grid solves run under a capped iteration
//! budget; callers re-solve at the winner with the full budget.
//!
//! The descent stops early once the curve has clearly passed its minimum:
//! after an improvement over the heaviest weight, two consecutive points
//! scoring strictly worse than the best end the search, as does a point
//! whose recovered rank blows past the useful range. Below the optimum
//! the rank grows toward full and each solve gets drastically more
//! expensive while only ever scoring worse.

use crate::bench::metrics::rmse_test;
use crate::error::{Error, Result};
use crate::linalg::{frob_norm, standard_gaussian, DenseMatrix, SparseCoo};
use crate::problems::CompletionProblem;
use crate::regularizers::{RegKind, RegularizerSpec};
use crate::solver::{fancl_solve, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest singular value of a sparse matrix by alternating power
/// iteration. Deterministic: the start vector comes from a fixed seed.
pub fn estimate_top_singular_value(s: &SparseCoo) -> Result<f64> {
    let (_, n) = s.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7357_0001);
    let mut v = standard_gaussian(n, 1, &mut rng);
    let scale = frob_norm(&v);
    v.mapv_inplace(|x| x / scale);
    let mut sigma = 0.0;
    for _ in 0..60 {
        let mut u = s.mul_dense_right(&v)?;
        let norm_u = frob_norm(&u);
        if norm_u == 0.0 {
            return Ok(0.0);
        }
        u.mapv_inplace(|x| x / norm_u);
        let mut w = s.mul_dense_left(&u)?;
        let sig = frob_norm(&w);
        if sig == 0.0 {
            return Ok(0.0);
        }
        w.mapv_inplace(|x| x / sig);
        v = w;
        if (sig - sigma).abs() <= 1e-8 * sig {
            return Ok(sig);
        }
        sigma = sig;
    }
    Ok(sigma)
}

/// Build a penalty spec for the given weight, filling in the
/// weight-dependent default shape parameter unless one is supplied.
/// SCAD and MCP have no sensible default and require an explicit theta.
pub fn spec_for(kind: RegKind, lambda: f64, theta: Option<f64>) -> Result<RegularizerSpec> {
    match kind {
        RegKind::Nuclear => Ok(RegularizerSpec::nuclear()),
        RegKind::CappedL1 => RegularizerSpec::capped_l1(theta.unwrap_or(2.0 * lambda)),
        RegKind::Lsp => RegularizerSpec::lsp(theta.unwrap_or(lambda.sqrt())),
        RegKind::Tnn => {
            let t = theta.unwrap_or(3.0);
            if !t.is_finite() || t < 1.0 || t.fract() != 0.0 {
                return Err(Error::invalid(format!("tnn needs an integer theta >= 1, got {t}")));
            }
            RegularizerSpec::tnn(t as usize)
        }
        RegKind::Scad => {
            RegularizerSpec::scad(theta.ok_or_else(|| {
                Error::invalid("scad has no default theta; pass one explicitly".to_string())
            })?)
        }
        RegKind::Mcp => {
            RegularizerSpec::mcp(theta.ok_or_else(|| {
                Error::invalid("mcp has no default theta; pass one explicitly".to_string())
            })?)
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub lambda: f64,
    pub spec: RegularizerSpec,
    pub validation_rmse: f64,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct TuningOutcome {
    pub lambda: f64,
    pub spec: RegularizerSpec,
    pub validation_rmse: f64,
    pub grid: Vec<GridPoint>,
}

/// Pick the regularization weight for a completion problem by validation
/// RMSE over the geometric grid described in the module docs.
pub fn tune_lambda_completion(
    train: &CompletionProblem,
    valid: &CompletionProblem,
    kind: RegKind,
    theta: Option<f64>,
    base: &SolverConfig,
) -> Result<TuningOutcome> {
    if (train.m(), train.n()) != (valid.m(), valid.n()) {
        return Err(Error::dim(format!(
            "train {}x{} vs validation {}x{}",
            train.m(),
            train.n(),
            valid.m(),
            valid.n()
        )));
    }
    let sigma_top = estimate_top_singular_value(train.observed())?;
    if !(sigma_top > 0.0) {
        return Err(Error::domain("training matrix has no signal to scale the grid".to_string()));
    }
    let lambda0_mult = base.lambda0 / base.lambda;

    let mut grid: Vec<GridPoint> = Vec::new();
    let mut best: Option<usize> = None;
    let mut worse_streak = 0usize;
    for j in 2..=9u32 {
        let lambda = sigma_top / f64::from(1u32 << j);
        let spec = spec_for(kind, lambda, theta)?;
        // Ranking solves get a faster continuation schedule than the final
        // solve: with a gentle decay the weight would not settle inside the
        // capped iteration budget and every grid point would come back
        // underfit.
        // Every grid point owns its RNG stream, keyed by the base seed and
        // the point's index, so points can run in any order or in parallel
        // without changing their results.
        let cfg = SolverConfig {
            lambda,
            lambda0: (lambda0_mult * lambda).min(10.0 * lambda),
            nu: base.nu.min(0.9),
            max_iters: base.max_iters.min(150),
            tol: base.tol.max(1e-4),
            seed: base.seed.wrapping_add(u64::from(j).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..base.clone()
        };
        let (x, _) = fancl_solve(train, &spec, &cfg)?;
        let rmse = rmse_test(&x, valid.observed())?;
        let rank = x.rank();
        grid.push(GridPoint { lambda, spec, validation_rmse: rmse, rank });
        match best {
            Some(b) if rmse < grid[b].validation_rmse => {
                best = Some(grid.len() - 1);
                worse_streak = 0;
            }
            Some(b) => {
                if rmse > grid[b].validation_rmse && b > 0 {
                    worse_streak += 1;
                    if worse_streak >= 2 {
                        break;
                    }
                } else {
                    worse_streak = 0;
                }
            }
            None => best = Some(0),
        }
        if rank > (train.m().min(train.n()) / 10).max(10) {
            break;
        }
    }
    let b = best.expect("grid is never empty");
    Ok(TuningOutcome {
        lambda: grid[b].lambda,
        spec: grid[b].spec,
        validation_rmse: grid[b].validation_rmse,
        grid,
    })
}

/// Default low-rank and sparse weights for robust PCA, scaled to the
/// largest observed magnitude.
///
/// The two weights have to funnel the alternating solve into the
/// split basin: too small a low-rank weight lets outlier-aligned
/// directions into the spectrum before the sparse block absorbs them,
/// while too small a sparse weight lets the sparse block swallow the
/// signal. The residual the soft threshold leaves on each absorbed
/// outlier is exactly the sparse weight, so that weight also has to stay
/// below the spectral entry threshold once the continuation settles. The
/// log-sum penalty has a much lower settled entry threshold than the
/// others and needs a heavier low-rank weight with a lighter sparse one.
pub fn rpca_default_weights(o: &DenseMatrix, kind: RegKind) -> (f64, f64) {
    let inf_norm = o.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let (lambda_scale, beta_scale) = match kind {
        RegKind::Lsp => (2.0, 0.01),
        _ => (0.5, 0.05),
    };
    (lambda_scale * inf_norm, beta_scale * inf_norm)
}
