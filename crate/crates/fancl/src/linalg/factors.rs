use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use ndarray::Array2;

/// Compact SVD-form representation `U diag(d) V^T` of an m x n matrix.
///
/// `u` is m x k and `v` is n x k, both with orthonormal columns; `d` holds
/// k positive values sorted nonincreasing. `k = 0` encodes the zero matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankFactors {
    pub u: DenseMatrix,
    pub d: Vec<f64>,
    pub v: DenseMatrix,
}

impl LowRankFactors {
    pub fn new(u: DenseMatrix, d: Vec<f64>, v: DenseMatrix) -> Result<Self> {
        if u.ncols() != d.len() || v.ncols() != d.len() {
            return Err(Error::dim(format!(
                "factor widths disagree: U has {}, d has {}, V has {}",
                u.ncols(),
                d.len(),
                v.ncols()
            )));
        }
        for w in d.windows(2) {
            if w[1] > w[0] {
                return Err(Error::invalid(format!(
                    "singular values must be nonincreasing, got {} before {}",
                    w[0], w[1]
                )));
            }
        }
        if d.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::invalid("singular values must be finite and positive".to_string()));
        }
        Ok(LowRankFactors { u, d, v })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        LowRankFactors { u: Array2::zeros((m, 0)), d: Vec::new(), v: Array2::zeros((n, 0)) }
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.u.nrows(), self.v.nrows())
    }

    pub fn is_zero(&self) -> bool {
        self.d.is_empty()
    }

    /// U diag(d), m x k.
    pub fn u_scaled(&self) -> DenseMatrix {
        let mut out = self.u.clone();
        for (mut col, &s) in out.columns_mut().into_iter().zip(&self.d) {
            col.mapv_inplace(|x| x * s);
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        if self.is_zero() {
            let (m, n) = self.shape();
            return Array2::zeros((m, n));
        }
        self.u_scaled().dot(&self.v.t())
    }

    /// Frobenius norm; equals the 2-norm of d because the factors are
    /// orthonormal.
    pub fn frob_norm(&self) -> f64 {
        self.d.iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    /// (U diag(d) V^T) * A without materializing the matrix.
    pub fn mul_dense_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        let (m, n) = self.shape();
        if a.nrows() != n {
            return Err(Error::dim(format!(
                "lowrank {m}x{n} times dense {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if self.is_zero() {
            return Ok(Array2::zeros((m, a.ncols())));
        }
        let mut vt_a = self.v.t().dot(a);
        for (mut row, &s) in vt_a.rows_mut().into_iter().zip(&self.d) {
            row.mapv_inplace(|x| x * s);
        }
        Ok(self.u.dot(&vt_a))
    }

    /// (U diag(d) V^T)^T * B = V diag(d) U^T B.
    pub fn mul_dense_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let (m, n) = self.shape();
        if b.nrows() != m {
            return Err(Error::dim(format!(
                "lowrank^T {n}x{m} times dense {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if self.is_zero() {
            return Ok(Array2::zeros((n, b.ncols())));
        }
        let mut ut_b = self.u.t().dot(b);
        for (mut row, &s) in ut_b.rows_mut().into_iter().zip(&self.d) {
            row.mapv_inplace(|x| x * s);
        }
        Ok(self.v.dot(&ut_b))
    }

    /// Entry (i, j) in O(k).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let mut acc = 0.0;
        for (r, &s) in self.d.iter().enumerate() {
            acc += self.u[(i, r)] * s * self.v[(j, r)];
        }
        acc
    }
}

/// Matrix with orthonormal columns (a subspace basis).
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis {
    pub q: DenseMatrix,
}

impl OrthoBasis {
    pub fn nrows(&self) -> usize {
        self.q.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.q.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{frob_norm, standard_gaussian};
    use crate::linalg::qr::qr_orthonormalize;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_factors(m: usize, n: usize, k: usize, seed: u64) -> LowRankFactors {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = qr_orthonormalize(&standard_gaussian(m, k, &mut rng)).q;
        let v = qr_orthonormalize(&standard_gaussian(n, k, &mut rng)).q;
        let mut d: Vec<f64> = (0..k).map(|i| (k - i) as f64).collect();
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        LowRankFactors::new(u, d, v).unwrap()
    }

    #[test]
    fn construction_checks() {
        let f = random_factors(6, 5, 3, 1);
        assert_eq!(f.rank(), 3);
        assert!(LowRankFactors::new(f.u.clone(), vec![1.0, 2.0, 3.0], f.v.clone()).is_err());
        assert!(LowRankFactors::new(f.u.clone(), vec![1.0, 0.0, 0.0], f.v.clone()).is_err());
        assert!(LowRankFactors::new(f.u.clone(), vec![1.0, 0.5], f.v.clone()).is_err());
    }

    #[test]
    fn zero_rank_is_the_zero_matrix() {
        let z = LowRankFactors::zero(4, 3);
        assert_eq!(z.shape(), (4, 3));
        assert_eq!(z.to_dense(), Array2::<f64>::zeros((4, 3)));
        assert_eq!(z.frob_norm(), 0.0);
        let a = Array2::<f64>::ones((3, 2));
        assert_eq!(z.mul_dense_right(&a).unwrap(), Array2::<f64>::zeros((4, 2)));
    }

    #[test]
    fn products_and_entries_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_factors(8, 6, 3, 7);
        let dense = f.to_dense();
        let a = standard_gaussian(6, 4, &mut rng);
        let b = standard_gaussian(8, 4, &mut rng);
        assert!(frob_norm(&(f.mul_dense_right(&a).unwrap() - dense.dot(&a))) < 1e-12);
        assert!(frob_norm(&(f.mul_dense_left(&b).unwrap() - dense.t().dot(&b))) < 1e-12);
        for i in 0..8 {
            for j in 0..6 {
                assert!((f.entry(i, j) - dense[(i, j)]).abs() < 1e-12);
            }
        }
        assert!((f.frob_norm() - frob_norm(&dense)).abs() < 1e-10);
    }
}
