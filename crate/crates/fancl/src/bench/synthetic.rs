//! Synthetic problem generators for the two benchmark families.
//!
//! Completion instances observe `O = U V + G` on a uniformly sampled index
//! set whose size grows as `2 m k ln(m)`; the sampled entries are split
//! half/half into a training and a validation problem. Robust PCA instances
//! are fully observed: a rank-`0.01 m` product plus dense Gaussian noise,
//! with spikes of magnitude five times the largest clean entry added to 1%
//! of the entries.

use crate::error::{Error, Result};
use crate::linalg::{standard_gaussian, DenseMatrix, SparseCoo};
use crate::problems::CompletionProblem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Ground truth behind a generated completion instance.
pub struct SynthCompletionTruth {
    /// Left factor, m x k.
    pub u: DenseMatrix,
    /// Right factor, k x m.
    pub v: DenseMatrix,
    /// Every sampled entry with its noisy observed value (training and
    /// validation combined).
    pub observed: SparseCoo,
}

impl SynthCompletionTruth {
    /// Noise-free entry `(U V)_{ij}`.
    pub fn clean_entry(&self, i: usize, j: usize) -> f64 {
        let k = self.u.ncols();
        (0..k).map(|l| self.u[(i, l)] * self.v[(l, j)]).sum()
    }
}

/// Ground truth behind a generated robust PCA instance.
pub struct SynthRpcaTruth {
    /// Left factor, m x k.
    pub u: DenseMatrix,
    /// Right factor, k x m.
    pub v: DenseMatrix,
    /// The planted sparse spikes.
    pub corruption: SparseCoo,
}

impl SynthRpcaTruth {
    /// Dense `U V`.
    pub fn low_rank(&self) -> DenseMatrix {
        self.u.dot(&self.v)
    }
}

/// Number of entries observed for an m x m completion instance of rank k.
pub fn completion_sample_size(m: usize, k: usize) -> usize {
    (2.0 * m as f64 * k as f64 * (m as f64).ln()).round() as usize
}

/// Generate an m x m rank-k completion instance.
///
/// Returns the training problem, the validation problem, and the ground
/// truth. The observation count is `round(2 m k ln m)`; generation fails if
/// that exceeds the m^2 available entries.
pub fn gen_synth_completion(
    m: usize,
    k: usize,
    noise_std: f64,
    seed: u64,
) -> Result<(CompletionProblem, CompletionProblem, SynthCompletionTruth)> {
    if m == 0 || k == 0 || k > m {
        return Err(Error::invalid(format!("need m >= k >= 1, got m={m}, k={k}")));
    }
    if !noise_std.is_finite() || noise_std < 0.0 {
        return Err(Error::invalid(format!("noise std must be finite and >= 0, got {noise_std}")));
    }
    let nnz = completion_sample_size(m, k);
    if nnz > m * m {
        return Err(Error::invalid(format!(
            "sampling rule asks for {nnz} of {} entries; matrix too small",
            m * m
        )));
    }
    if nnz < 2 {
        return Err(Error::invalid(format!(
            "sampling rule yields {nnz} entries, not enough to split"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = standard_gaussian(m, k, &mut rng);
    let v = standard_gaussian(k, m, &mut rng);

    let picked = rand::seq::index::sample(&mut rng, m * m, nnz);
    let mut triplets = Vec::with_capacity(nnz);
    for flat in picked {
        let (i, j) = (flat / m, flat % m);
        let clean: f64 = (0..k).map(|l| u[(i, l)] * v[(l, j)]).sum();
        let g: f64 = StandardNormal.sample(&mut rng);
        triplets.push((i, j, clean + noise_std * g));
    }

    let train_count = nnz.div_ceil(2);
    let train = CompletionProblem::new(SparseCoo::from_triplets(
        m,
        m,
        triplets[..train_count].to_vec(),
    )?)?;
    let valid = CompletionProblem::new(SparseCoo::from_triplets(
        m,
        m,
        triplets[train_count..].to_vec(),
    )?)?;
    let observed = SparseCoo::from_triplets(m, m, triplets)?;
    Ok((train, valid, SynthCompletionTruth { u, v, observed }))
}

/// Generate an m x m robust PCA instance: observation matrix plus truth.
///
/// The clean rank is `max(1, round(0.01 m))` and `round(0.01 m^2)` entries
/// are corrupted by spikes of magnitude `5 max|UV|` with random sign.
/// Gaussian noise with the given std is added everywhere.
pub fn gen_synth_rpca(
    m: usize,
    noise_std: f64,
    seed: u64,
) -> Result<(DenseMatrix, SynthRpcaTruth)> {
    if m < 2 {
        return Err(Error::invalid(format!("need m >= 2, got {m}")));
    }
    if !noise_std.is_finite() || noise_std < 0.0 {
        return Err(Error::invalid(format!("noise std must be finite and >= 0, got {noise_std}")));
    }
    let k = ((0.01 * m as f64).round() as usize).max(1);
    let spikes = (0.01 * (m * m) as f64).round() as usize;
    if spikes == 0 {
        return Err(Error::invalid(format!("corruption rule yields no spikes for m={m}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = standard_gaussian(m, k, &mut rng);
    let v = standard_gaussian(k, m, &mut rng);
    let clean = u.dot(&v);
    let magnitude = 5.0 * clean.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    if magnitude == 0.0 {
        return Err(Error::domain("low-rank component is identically zero".to_string()));
    }

    let picked = rand::seq::index::sample(&mut rng, m * m, spikes);
    let mut spike_triplets = Vec::with_capacity(spikes);
    for flat in picked {
        let (i, j) = (flat / m, flat % m);
        let sign = if rand::Rng::random_bool(&mut rng, 0.5) { 1.0 } else { -1.0 };
        spike_triplets.push((i, j, sign * magnitude));
    }
    let corruption = SparseCoo::from_triplets(m, m, spike_triplets)?;

    let mut o = clean;
    for val in o.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *val += noise_std * g;
    }
    for (i, j, s) in corruption.iter() {
        o[(i, j)] += s;
    }

    Ok((o, SynthRpcaTruth { u, v, corruption }))
}
