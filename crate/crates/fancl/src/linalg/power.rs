use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::factors::OrthoBasis;
use crate::linalg::qr::qr_orthonormalize;
use crate::linalg::ProductOperator;

/// Power iteration for an orthonormal approximation of the leading left
/// subspace of `z`, warm-started from the n x k matrix `r`.
///
/// Computes Y = Z R, then `t_pm` rounds of Q = orthonormalize(Y),
/// Y = Z (Z^T Q), returning the final Q. The last Y would be discarded, so
/// it is never formed. Output columns can be fewer than k when Y becomes
/// rank deficient.
pub fn power_method(z: &dyn ProductOperator, r: &DenseMatrix, t_pm: usize) -> Result<OrthoBasis> {
    let (m, n) = z.shape();
    let k = r.ncols();
    if r.nrows() != n {
        return Err(Error::dim(format!(
            "start block is {}x{k} but operator has {n} columns",
            r.nrows()
        )));
    }
    if k == 0 {
        return Err(Error::invalid("start block must have at least one column".to_string()));
    }
    if k > m.min(n) {
        return Err(Error::invalid(format!(
            "start block has {k} columns, more than min(m, n) = {}",
            m.min(n)
        )));
    }
    if t_pm == 0 {
        return Err(Error::invalid("t_pm must be >= 1".to_string()));
    }

    let mut y = z.mul_right(r)?;
    let mut q = qr_orthonormalize(&y);
    for _ in 1..t_pm {
        y = z.mul_right(&z.mul_left(&q.q)?)?;
        q = qr_orthonormalize(&y);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{frob_norm, standard_gaussian};
    use crate::linalg::factors::LowRankFactors;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_dominant_direction() {
        let z = Array2::from_diag(&ndarray::arr1(&[3.0, 2.0, 1.0]));
        let r = array![[1.0], [1.0], [1.0]];
        let q = power_method(&z, &r, 30).unwrap().q;
        assert_eq!(q.ncols(), 1);
        assert!((q[(0, 0)].abs() - 1.0).abs() < 1e-8);
        assert!(q[(1, 0)].abs() < 1e-8);
        assert!(q[(2, 0)].abs() < 1e-8);
    }

    #[test]
    fn orthogonal_operator_full_block_spans_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let m = 6;
        let z = crate::linalg::qr::qr_orthonormalize(&standard_gaussian(m, m, &mut rng)).q;
        let r = standard_gaussian(m, m, &mut rng);
        let q = power_method(&z, &r, 3).unwrap().q;
        assert_eq!(q.ncols(), m);
        let proj = q.dot(&q.t());
        assert!(frob_norm(&(proj - Array2::<f64>::eye(m))) <= 1e-8);
    }

    #[test]
    fn rank_one_recovers_left_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let (m, n) = (12, 9);
        let u = qr_orthonormalize(&standard_gaussian(m, 1, &mut rng)).q;
        let v = qr_orthonormalize(&standard_gaussian(n, 1, &mut rng)).q;
        let z = LowRankFactors::new(u.clone(), vec![2.5], v).unwrap().to_dense();
        let r = standard_gaussian(n, 2, &mut rng);
        let q = power_method(&z, &r, 3).unwrap().q;
        let dot = q.column(0).dot(&u.column(0)).abs();
        assert!((dot - 1.0).abs() < 1e-8, "alignment {dot}");
    }

    #[test]
    fn argument_checks() {
        let z: DenseMatrix = Array2::eye(3);
        assert!(power_method(&z, &standard_gaussian(3, 4, &mut ChaCha8Rng::seed_from_u64(1)), 3).is_err());
        assert!(power_method(&z, &Array2::zeros((3, 0)), 3).is_err());
        assert!(power_method(&z, &Array2::ones((2, 1)), 3).is_err());
        assert!(power_method(&z, &Array2::ones((3, 1)), 0).is_err());
    }

    #[test]
    fn output_is_always_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..20 {
            let z = standard_gaussian(10, 8, &mut rng);
            let r = standard_gaussian(8, 4, &mut rng);
            let q = power_method(&z, &r, 2).unwrap().q;
            let gram = q.t().dot(&q);
            assert!(frob_norm(&(gram - Array2::<f64>::eye(q.ncols()))) < 1e-10);
        }
    }

    #[test]
    fn captures_full_subspace_with_enough_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for _ in 0..5 {
            let a = standard_gaussian(20, 5, &mut rng);
            let b = standard_gaussian(5, 15, &mut rng);
            let z = a.dot(&b);
            let r = standard_gaussian(15, 5, &mut rng);
            let q = power_method(&z, &r, 50).unwrap().q;
            let resid = &z - &q.dot(&q.t().dot(&z));
            assert!(frob_norm(&resid) <= 1e-6 * frob_norm(&z));
        }
    }
}
