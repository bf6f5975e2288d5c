//! Evaluation metrics for completion and robust PCA runs.
//!
//! The completion error is measured off the sampled set: predictions are
//! compared against the noise-free product `U V` on the complement of the
//! observation pattern, normalized by the energy of the truth there. The
//! robust PCA error compares `X + Y` against `U V + spikes` over the whole
//! matrix.

use crate::bench::synthetic::{SynthCompletionTruth, SynthRpcaTruth};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LowRankFactors, SparseCoo};

/// Normalized root error of `x` against the clean low-rank truth on the
/// entries NOT in `omega`.
pub fn nmse_completion(
    x: &LowRankFactors,
    truth: &SynthCompletionTruth,
    omega: &SparseCoo,
) -> Result<f64> {
    let (m, n) = x.shape();
    if omega.shape() != (m, n) || truth.u.nrows() != m || truth.v.ncols() != n {
        return Err(Error::dim(format!(
            "estimate {m}x{n}, mask {:?}, truth {}x{}",
            omega.shape(),
            truth.u.nrows(),
            truth.v.ncols()
        )));
    }
    if omega.nnz() >= m * n {
        return Err(Error::invalid("observation pattern leaves no held-out entries".to_string()));
    }

    let mut num = 0.0;
    let mut den = 0.0;
    let mut it = omega.iter().peekable();
    for i in 0..m {
        for j in 0..n {
            if let Some(&(oi, oj, _)) = it.peek() {
                if (oi, oj) == (i, j) {
                    it.next();
                    continue;
                }
            }
            let clean = truth.clean_entry(i, j);
            let diff = x.entry(i, j) - clean;
            num += diff * diff;
            den += clean * clean;
        }
    }
    if den == 0.0 {
        return Err(Error::domain("truth vanishes on every held-out entry".to_string()));
    }
    Ok(num.sqrt() / den.sqrt())
}

/// Normalized error of the recovered pair `(x, y)` against the planted
/// low-rank-plus-sparse decomposition, over all entries.
pub fn nmse_rpca(x: &LowRankFactors, y: &SparseCoo, truth: &SynthRpcaTruth) -> Result<f64> {
    let (m, n) = x.shape();
    if y.shape() != (m, n)
        || truth.u.nrows() != m
        || truth.v.ncols() != n
        || truth.corruption.shape() != (m, n)
    {
        return Err(Error::dim(format!(
            "estimate {m}x{n}, sparse {:?}, truth {}x{}",
            y.shape(),
            truth.u.nrows(),
            truth.v.ncols()
        )));
    }
    let mut target = truth.low_rank();
    for (i, j, s) in truth.corruption.iter() {
        target[(i, j)] += s;
    }
    let den = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(Error::domain("planted decomposition is identically zero".to_string()));
    }
    let mut diff = x.to_dense();
    for (i, j, v) in y.iter() {
        diff[(i, j)] += v;
    }
    diff -= &target;
    Ok(diff.iter().map(|v| v * v).sum::<f64>().sqrt() / den)
}

/// Fraction of cells where the estimated and planted sparse supports agree
/// (either both hold an entry or both are empty). Stored zeros do not count
/// as support.
pub fn support_accuracy(estimate: &SparseCoo, planted: &SparseCoo) -> Result<f64> {
    if estimate.shape() != planted.shape() {
        return Err(Error::dim(format!(
            "support shapes {:?} vs {:?}",
            estimate.shape(),
            planted.shape()
        )));
    }
    let coords = |s: &SparseCoo| -> Vec<(usize, usize)> {
        s.iter().filter(|&(_, _, v)| v != 0.0).map(|(i, j, _)| (i, j)).collect()
    };
    let a = coords(estimate);
    let b = coords(planted);
    let mut both = 0usize;
    let (mut ia, mut ib) = (0usize, 0usize);
    while ia < a.len() && ib < b.len() {
        match a[ia].cmp(&b[ib]) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                both += 1;
                ia += 1;
                ib += 1;
            }
        }
    }
    let (m, n) = estimate.shape();
    let cells = m * n;
    let agree = cells - a.len() - b.len() + 2 * both;
    Ok(agree as f64 / cells as f64)
}

/// Rank of the recovered matrix (number of retained singular values).
pub fn rank_of(x: &LowRankFactors) -> usize {
    x.rank()
}

/// Root mean square error of `x` on a held-out set of observed entries.
pub fn rmse_test(x: &LowRankFactors, test: &SparseCoo) -> Result<f64> {
    if test.shape() != x.shape() {
        return Err(Error::dim(format!("test set {:?} vs estimate {:?}", test.shape(), x.shape())));
    }
    if test.nnz() == 0 {
        return Err(Error::invalid("test set is empty".to_string()));
    }
    let sum_sq: f64 = test
        .iter()
        .map(|(i, j, v)| {
            let d = x.entry(i, j) - v;
            d * d
        })
        .sum();
    Ok((sum_sq / test.nnz() as f64).sqrt())
}

/// Same error as [`rmse_test`] but for an estimate held as a dense
/// matrix, as when it was read back from a file.
pub fn rmse_dense(estimate: &DenseMatrix, test: &SparseCoo) -> Result<f64> {
    if test.shape() != estimate.dim() {
        return Err(Error::dim(format!("test set {:?} vs estimate {:?}", test.shape(), estimate.dim())));
    }
    if test.nnz() == 0 {
        return Err(Error::invalid("test set is empty".to_string()));
    }
    let sum_sq: f64 = test
        .iter()
        .map(|(i, j, v)| {
            let d = estimate[[i, j]] - v;
            d * d
        })
        .sum();
    Ok((sum_sq / test.nnz() as f64).sqrt())
}

/// ||estimate - reference||_F / ||reference||_F over every entry.
pub fn nmse_dense(estimate: &DenseMatrix, reference: &DenseMatrix) -> Result<f64> {
    if estimate.dim() != reference.dim() {
        return Err(Error::dim(format!("shapes {:?} vs {:?}", estimate.dim(), reference.dim())));
    }
    let num: f64 =
        estimate.iter().zip(reference.iter()).map(|(&a, &b)| (a - b) * (a - b)).sum();
    let den: f64 = reference.iter().map(|&b| b * b).sum();
    if den == 0.0 {
        return Err(Error::invalid("reference matrix is identically zero".to_string()));
    }
    Ok((num / den).sqrt())
}

/// Peak signal-to-noise ratio in dB between a reconstruction and a
/// reference image, both with entries on a 0..1 scale. Identical inputs
/// give +infinity.
pub fn psnr(reconstruction: &DenseMatrix, reference: &DenseMatrix) -> Result<f64> {
    if reconstruction.dim() != reference.dim() {
        return Err(Error::dim(format!(
            "image shapes {:?} vs {:?}",
            reconstruction.dim(),
            reference.dim()
        )));
    }
    let cells = reference.len();
    if cells == 0 {
        return Err(Error::invalid("empty image".to_string()));
    }
    let mse: f64 = reconstruction
        .iter()
        .zip(reference.iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / cells as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * mse.log10())
}
