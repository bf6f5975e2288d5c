//! Singular value thresholding with a general scalar penalty: apply
//! [`crate::regularizers::scalar_prox`] to each singular value and rebuild
//! the matrix. Two paths exist. [`gsvt_full`] decomposes the whole matrix
//! and is the slow reference. [`gsvt_reduced`] only decomposes the small
//! projected matrix Q^T Z for an orthonormal basis Q; when Q's span
//! contains the leading left singular vectors that survive thresholding,
//! the result equals the full operator exactly.

use crate::error::{Error, Result};
use crate::linalg::{thin_svd, DenseMatrix, LowRankFactors, OrthoBasis, ProductOperator};
use crate::regularizers::{scalar_prox, threshold_gamma, RegKind, RegularizerSpec};
use ndarray::s;

fn prox_spectrum(reg: &RegularizerSpec, sigmas: &[f64], mu: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(sigmas.len());
    for (idx, &s) in sigmas.iter().enumerate() {
        let flag = (reg.kind == RegKind::Tnn).then(|| (idx + 1) as f64 > reg.theta);
        out.push(scalar_prox(reg, s, mu, flag)?);
    }
    Ok(out)
}

/// Keep the leading columns whose thresholded singular value is nonzero.
/// The prox is monotone in sigma, so zeros form a suffix.
fn truncate_factors(
    u: &DenseMatrix,
    y: &[f64],
    v: &DenseMatrix,
) -> Result<LowRankFactors> {
    let keep = y.iter().take_while(|&&s| s > 0.0).count();
    debug_assert!(y[keep..].iter().all(|&s| s == 0.0));
    LowRankFactors::new(
        u.slice(s![.., ..keep]).to_owned(),
        y[..keep].to_vec(),
        v.slice(s![.., ..keep]).to_owned(),
    )
}

/// Proximal step on every singular value of a dense matrix via its full
/// SVD. Reference path; cost O(m n min(m,n)).
pub fn gsvt_full(z: &DenseMatrix, reg: &RegularizerSpec, mu: f64) -> Result<LowRankFactors> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mu must be finite and > 0, got {mu}")));
    }
    let (m, n) = (z.nrows(), z.ncols());
    let f = if m <= n {
        thin_svd(z)?
    } else {
        let ft = thin_svd(&z.t().to_owned())?;
        LowRankFactors { u: ft.v, d: ft.d, v: ft.u }
    };
    let y = prox_spectrum(reg, &f.d, mu)?;
    truncate_factors(&f.u, &y, &f.v)
}

/// Result of the projected proximal step.
pub struct ReducedProx {
    /// Thresholded matrix, already lifted back through Q.
    pub factors: LowRankFactors,
    /// All right singular vectors of Q^T Z, kept for restarting the
    /// subspace iteration when an iterate is rejected.
    pub v_a: DenseMatrix,
    /// How many projected singular values exceeded the zeroing threshold.
    pub k_hat: usize,
}

/// Proximal step on the projection Q^T Z.
///
/// `gamma` is the zeroing threshold from
/// [`crate::regularizers::threshold_gamma`], computed by the caller once
/// per proximal weight. It must be `None` exactly when `reg` is TNN: that
/// threshold needs the (theta+1)-th singular value, which only exists here
/// once Q^T Z has been decomposed, so it is derived internally.
///
/// Only the `k_hat` values above the threshold are pushed through the
/// scalar prox; the rest are guaranteed zero. Zero prox outputs among the
/// leading `k_hat` (possible for TNN, whose screen is conservative) are
/// dropped as well.
pub fn gsvt_reduced(
    z: &dyn ProductOperator,
    q: &OrthoBasis,
    reg: &RegularizerSpec,
    mu: f64,
    gamma: Option<f64>,
) -> Result<ReducedProx> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mu must be finite and > 0, got {mu}")));
    }
    match (reg.kind, gamma) {
        (RegKind::Tnn, Some(_)) => {
            return Err(Error::invalid(
                "tnn derives its threshold from the projected spectrum; pass gamma = None"
                    .to_string(),
            ));
        }
        (RegKind::Tnn, None) => {}
        (_, Some(g)) if !(g > 0.0) => {
            return Err(Error::invalid(format!("gamma must be > 0, got {g}")));
        }
        (_, Some(_)) => {}
        (_, None) => {
            return Err(Error::invalid("gamma is required for non-tnn regularizers".to_string()));
        }
    }
    let (m, zn) = z.shape();
    if q.nrows() != m {
        return Err(Error::dim(format!(
            "basis has {} rows but operator has {m}",
            q.nrows()
        )));
    }

    // Q^T Z, formed as (Z^T Q)^T so sparse-plus-low-rank operators never
    // materialize anything m x n.
    let zt_q = z.mul_left(&q.q)?;
    let a = thin_svd(&zt_q.reversed_axes())?;

    let gamma = match gamma {
        Some(g) => g,
        None => {
            let t = reg.tnn_count();
            let next = if a.d.len() > t { a.d[t] } else { 0.0 };
            threshold_gamma(reg, mu, Some(next))?
        }
    };

    let k_hat = a.d.iter().take_while(|&&s| s > gamma).count();
    if k_hat == 0 {
        return Ok(ReducedProx { factors: LowRankFactors::zero(m, zn), v_a: a.v, k_hat });
    }

    let y = prox_spectrum(reg, &a.d[..k_hat], mu)?;
    let u_lift = q.q.dot(&a.u.slice(s![.., ..k_hat]).to_owned());
    let v_lead = a.v.slice(s![.., ..k_hat]).to_owned();
    let factors = truncate_factors(&u_lift, &y, &v_lead)?;
    Ok(ReducedProx { factors, v_a: a.v, k_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_norm, qr_orthonormalize, standard_gaussian};
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nuclear() -> RegularizerSpec {
        RegularizerSpec::nuclear()
    }

    #[test]
    fn full_soft_thresholds_a_diagonal() {
        let z = array![[3.0, 0.0], [0.0, 0.5]];
        let f = gsvt_full(&z, &nuclear(), 1.0).unwrap();
        assert_eq!(f.d, vec![2.0]);
        assert!(frob_norm(&(f.to_dense() - array![[2.0, 0.0], [0.0, 0.0]])) < 1e-12);
    }

    #[test]
    fn full_of_zero_is_rank_zero() {
        let f = gsvt_full(&Array2::zeros((4, 6)), &nuclear(), 1.0).unwrap();
        assert_eq!(f.rank(), 0);
    }

    #[test]
    fn full_applies_scalar_prox_to_each_singular_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let reg = RegularizerSpec::capped_l1(2.0).unwrap();
        for _ in 0..10 {
            let z = standard_gaussian(10, 8, &mut rng);
            let input = thin_svd(&z.t().to_owned()).unwrap();
            let out = gsvt_full(&z, &reg, 1.0).unwrap();
            let expected: Vec<f64> = input
                .d
                .iter()
                .map(|&s| scalar_prox(&reg, s, 1.0, None).unwrap())
                .filter(|&y| y > 0.0)
                .collect();
            assert_eq!(out.rank(), expected.len());
            for (got, want) in out.d.iter().zip(&expected) {
                assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn full_is_transpose_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let z = standard_gaussian(9, 5, &mut rng);
        let a = gsvt_full(&z, &nuclear(), 0.8).unwrap().to_dense();
        let b = gsvt_full(&z.t().to_owned(), &nuclear(), 0.8).unwrap().to_dense();
        assert!(frob_norm(&(&a - &b.t().to_owned())) <= 1e-10 * frob_norm(&a).max(1.0));
    }

    #[test]
    fn reduced_with_identity_basis_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let z = standard_gaussian(6, 9, &mut rng);
        let mu = 0.7;
        let gamma = threshold_gamma(&nuclear(), mu, None).unwrap();
        let full = gsvt_full(&z, &nuclear(), mu).unwrap();
        let red = gsvt_reduced(
            &z,
            &OrthoBasis { q: Array2::eye(6) },
            &nuclear(),
            mu,
            Some(gamma),
        )
        .unwrap();
        assert!(
            frob_norm(&(full.to_dense() - red.factors.to_dense())) <= 1e-10 * frob_norm(&z)
        );
        assert_eq!(red.factors.rank(), full.rank());
    }

    #[test]
    fn reduced_exact_when_basis_spans_surviving_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let (m, n, r) = (20, 15, 6);
        let a = standard_gaussian(m, r, &mut rng);
        let b = standard_gaussian(r, n, &mut rng);
        let z = a.dot(&b);
        let zf = thin_svd(&z.t().to_owned()).unwrap();
        // mu between sigma_5 and sigma_4 so exactly 4 values survive.
        let mu = 0.5 * (zf.d[3] + zf.d[4]);
        let q = OrthoBasis { q: zf.v.slice(s![.., ..6]).to_owned() };
        let red = gsvt_reduced(&z, &q, &nuclear(), mu, Some(mu)).unwrap();
        let full = gsvt_full(&z, &nuclear(), mu).unwrap();
        assert_eq!(red.k_hat, 4);
        assert_eq!(red.factors.rank(), 4);
        assert!(frob_norm(&(red.factors.to_dense() - full.to_dense())) <= 1e-8 * frob_norm(&z));
    }

    #[test]
    fn reduced_span_exactness_over_many_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        let regs = [
            RegularizerSpec::nuclear(),
            RegularizerSpec::capped_l1(2.0).unwrap(),
            RegularizerSpec::lsp(1.0).unwrap(),
            RegularizerSpec::scad(3.0).unwrap(),
            RegularizerSpec::mcp(2.0).unwrap(),
        ];
        for trial in 0..50 {
            let reg = &regs[trial % regs.len()];
            let (m, n, r) = (14, 11, 5);
            let a = standard_gaussian(m, r, &mut rng);
            let b = standard_gaussian(r, n, &mut rng);
            let z = a.dot(&b);
            let zf = thin_svd(&z.t().to_owned()).unwrap();
            let q = OrthoBasis { q: zf.v.slice(s![.., ..r]).to_owned() };
            let mu = rng.random_range(0.1..2.0);
            let gamma = threshold_gamma(reg, mu, None).unwrap();
            let red = gsvt_reduced(&z, &q, reg, mu, Some(gamma)).unwrap();
            let full = gsvt_full(&z, reg, mu).unwrap();
            assert!(
                frob_norm(&(red.factors.to_dense() - full.to_dense())) <= 1e-8 * frob_norm(&z),
                "{} mu={mu}",
                reg.kind
            );
        }
    }

    #[test]
    fn reduced_threshold_above_spectrum_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        let z = standard_gaussian(7, 6, &mut rng);
        let q = qr_orthonormalize(&standard_gaussian(7, 3, &mut rng));
        let red = gsvt_reduced(&z, &q, &nuclear(), 1.0, Some(1e6)).unwrap();
        assert_eq!(red.k_hat, 0);
        assert!(red.factors.is_zero());
        assert_eq!(red.v_a.nrows(), 6);
    }

    #[test]
    fn output_spectrum_is_shrunk_and_rank_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(86);
        for _ in 0..20 {
            let z = standard_gaussian(12, 10, &mut rng);
            let q = qr_orthonormalize(&standard_gaussian(12, 5, &mut rng));
            let mu = rng.random_range(0.2..3.0);
            let reg = RegularizerSpec::mcp(2.0).unwrap();
            let gamma = threshold_gamma(&reg, mu, None).unwrap();
            let red = gsvt_reduced(&z, &q, &reg, mu, Some(gamma)).unwrap();
            let proj = thin_svd(&z.t().dot(&q.q).reversed_axes().to_owned()).unwrap();
            assert!(red.factors.rank() <= red.k_hat);
            assert!(red.k_hat <= q.ncols());
            for (y, s) in red.factors.d.iter().zip(&proj.d) {
                assert!(y <= s, "output value {y} above input {s}");
            }
        }
    }

    #[test]
    fn tnn_reduced_derives_its_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(87);
        let reg = RegularizerSpec::tnn(2).unwrap();
        let z = standard_gaussian(8, 8, &mut rng);
        let q = OrthoBasis { q: Array2::eye(8) };
        let red = gsvt_reduced(&z, &q, &reg, 0.5, None).unwrap();
        let full = gsvt_full(&z, &reg, 0.5).unwrap();
        assert!(frob_norm(&(red.factors.to_dense() - full.to_dense())) <= 1e-8 * frob_norm(&z));
        // Leading two singular values pass through untouched.
        let zf = thin_svd(&z).unwrap();
        assert!((red.factors.d[0] - zf.d[0]).abs() <= 1e-8);
        assert!((red.factors.d[1] - zf.d[1]).abs() <= 1e-8);
    }

    #[test]
    fn argument_checks() {
        let z = Array2::<f64>::eye(4);
        let q = OrthoBasis { q: Array2::eye(4) };
        let reg = nuclear();
        assert!(gsvt_full(&z, &reg, 0.0).is_err());
        assert!(gsvt_reduced(&z, &q, &reg, 1.0, Some(0.0)).is_err());
        assert!(gsvt_reduced(&z, &q, &reg, 1.0, None).is_err());
        let tnn = RegularizerSpec::tnn(1).unwrap();
        assert!(gsvt_reduced(&z, &q, &tnn, 1.0, Some(1.0)).is_err());
        let q3 = OrthoBasis { q: Array2::eye(3) };
        assert!(gsvt_reduced(&z, &q3, &reg, 1.0, Some(1.0)).is_err());
    }
}
