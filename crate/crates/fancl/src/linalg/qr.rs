use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::factors::OrthoBasis;
use ndarray::{Array1, Array2};

/// Orthonormal basis for the column space of `m` via modified Gram-Schmidt
/// with a second orthogonalization pass.
///
/// A column is dropped when its residual after orthogonalization against
/// the columns already kept has norm <= 1e-10 * (original norm + 1); the
/// output can therefore be narrower than the input, down to zero columns
/// for a zero matrix.
pub fn qr_orthonormalize(m: &DenseMatrix) -> OrthoBasis {
    let rows = m.nrows();
    let mut kept: Vec<Array1<f64>> = Vec::with_capacity(m.ncols());
    for col in m.columns() {
        let mut v = col.to_owned();
        let orig = v.dot(&v).sqrt();
        for _ in 0..2 {
            for q in &kept {
                let c = q.dot(&v);
                v.scaled_add(-c, q);
            }
        }
        let r = v.dot(&v).sqrt();
        if r > 1e-10 * (orig + 1.0) {
            v.mapv_inplace(|x| x / r);
            kept.push(v);
        }
    }
    let mut q = Array2::zeros((rows, kept.len()));
    for (j, col) in kept.iter().enumerate() {
        q.column_mut(j).assign(col);
    }
    OrthoBasis { q }
}

/// Component of `v_prev` outside span(`v_cur`):
/// `V_prev - V_cur (V_cur^T V_prev)` with columns of norm <= `tol` removed.
/// Surviving columns are not renormalized; callers orthonormalize the
/// concatenated basis afterwards.
pub fn basis_deflate(
    v_prev: &DenseMatrix,
    v_cur: &DenseMatrix,
    tol: f64,
) -> Result<DenseMatrix> {
    if v_prev.nrows() != v_cur.nrows() {
        return Err(Error::dim(format!(
            "row counts disagree: {} vs {}",
            v_prev.nrows(),
            v_cur.nrows()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0, got {tol}")));
    }
    let deflated = v_prev - &v_cur.dot(&v_cur.t().dot(v_prev));
    let keep: Vec<usize> = deflated
        .columns()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| c.dot(c).sqrt() > tol)
        .map(|(j, _)| j)
        .collect();
    let mut out = Array2::zeros((v_prev.nrows(), keep.len()));
    for (dst, &src) in keep.iter().enumerate() {
        out.column_mut(dst).assign(&deflated.column(src));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{frob_norm, standard_gaussian};
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_fixed() {
        let q = qr_orthonormalize(&Array2::<f64>::eye(3));
        assert_eq!(q.q, Array2::<f64>::eye(3));
    }

    #[test]
    fn dependent_columns_are_dropped() {
        let v = array![[0.6], [0.8]];
        let m = ndarray::concatenate![ndarray::Axis(1), v, 2.0 * &v];
        let q = qr_orthonormalize(&m);
        assert_eq!(q.ncols(), 1);
        let dot = q.q.column(0).dot(&v.column(0)).abs();
        assert!((dot - 1.0).abs() < 1e-12);

        assert_eq!(qr_orthonormalize(&Array2::zeros((4, 2))).ncols(), 0);
    }

    #[test]
    fn random_input_gives_orthonormal_spanning_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let m = standard_gaussian(5, 3, &mut rng);
            let q = qr_orthonormalize(&m).q;
            assert_eq!(q.ncols(), 3);
            let gram = q.t().dot(&q);
            assert!(frob_norm(&(gram - Array2::<f64>::eye(3))) < 1e-12);
            let resid = &m - &q.dot(&q.t().dot(&m));
            assert!(frob_norm(&resid) <= 1e-10);
        }
    }

    #[test]
    fn deflate_identical_basis_to_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = qr_orthonormalize(&standard_gaussian(7, 3, &mut rng)).q;
        let out = basis_deflate(&v, &v, 1e-10).unwrap();
        assert_eq!(out.ncols(), 0);
    }

    #[test]
    fn deflate_orthogonal_basis_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let full = qr_orthonormalize(&standard_gaussian(8, 5, &mut rng)).q;
        let a = full.slice(ndarray::s![.., ..2]).to_owned();
        let b = full.slice(ndarray::s![.., 2..]).to_owned();
        let out = basis_deflate(&a, &b, 1e-10).unwrap();
        assert!(frob_norm(&(&out - &a)) < 1e-12);
    }

    #[test]
    fn deflation_result_is_orthogonal_to_current_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tol = 1e-10;
        for _ in 0..25 {
            let v_cur = qr_orthonormalize(&standard_gaussian(9, 3, &mut rng)).q;
            let v_prev = standard_gaussian(9, 4, &mut rng);
            let out = basis_deflate(&v_prev, &v_cur, tol).unwrap();
            if out.ncols() > 0 {
                assert!(frob_norm(&v_cur.t().dot(&out)) <= 10.0 * tol);
            }
        }
        assert!(basis_deflate(&standard_gaussian(3, 1, &mut rng), &standard_gaussian(4, 1, &mut rng), tol).is_err());
    }
}
