//! Matrix kernels shared by the solver: dense and sparse storage, compact
//! low-rank factors, Gram-Schmidt orthonormalization, thin SVD, power
//! iteration for subspace approximation, implicit sparse-plus-low-rank
//! products, and a projected Frobenius distance between factored matrices.

pub mod dense;
pub mod factors;
pub mod power;
pub mod qr;
pub mod sparse;
pub mod splr;
pub mod svd;

pub use dense::{frob_norm, standard_gaussian, DenseMatrix};
pub use factors::{LowRankFactors, OrthoBasis};
pub use power::power_method;
pub use qr::{basis_deflate, qr_orthonormalize};
pub use sparse::{
    parse_bare_triplets, parse_matrix_market, write_bare_triplets, write_matrix_market, SparseCoo,
};
pub use splr::{frob_norm_diff_lowrank, SplrMatrix};
pub use svd::thin_svd;

use crate::error::Result;

/// A matrix exposed only through products `Z * A` and `Z^T * B`; what the
/// power method and the reduced thresholding operator need from their
/// input, letting them run on dense, sparse-plus-low-rank, or factored
/// representations alike.
pub trait ProductOperator {
    fn shape(&self) -> (usize, usize);
    /// Z * A, where A has shape (n, k).
    fn mul_right(&self, a: &DenseMatrix) -> Result<DenseMatrix>;
    /// Z^T * B, where B has shape (m, k).
    fn mul_left(&self, b: &DenseMatrix) -> Result<DenseMatrix>;
}

impl ProductOperator for DenseMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    fn mul_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.nrows() != self.ncols() {
            return Err(crate::error::Error::dim(format!(
                "dense {}x{} times {}x{}",
                self.nrows(),
                self.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(self.dot(a))
    }

    fn mul_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.nrows() != self.nrows() {
            return Err(crate::error::Error::dim(format!(
                "dense^T {}x{} times {}x{}",
                self.ncols(),
                self.nrows(),
                b.nrows(),
                b.ncols()
            )));
        }
        Ok(self.t().dot(b))
    }
}

impl ProductOperator for SparseCoo {
    fn shape(&self) -> (usize, usize) {
        SparseCoo::shape(self)
    }

    fn mul_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        self.mul_dense_right(a)
    }

    fn mul_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        self.mul_dense_left(b)
    }
}

impl ProductOperator for LowRankFactors {
    fn shape(&self) -> (usize, usize) {
        LowRankFactors::shape(self)
    }

    fn mul_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        self.mul_dense_right(a)
    }

    fn mul_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        self.mul_dense_left(b)
    }
}
