use crate::error::{Error, Result};
use crate::linalg::dense::{frob_norm, DenseMatrix};
use crate::linalg::factors::LowRankFactors;
use crate::linalg::qr::qr_orthonormalize;
use crate::linalg::sparse::SparseCoo;
use crate::linalg::ProductOperator;
use ndarray::{concatenate, Axis};

/// Implicit representation of `Z = a * (U diag(d) V^T) + b * S`.
///
/// The completion solver's prox input has this shape; keeping it implicit
/// lets every product cost O((m+n) k rank + nnz k) instead of O(m n k).
#[derive(Clone, Debug)]
pub struct SplrMatrix {
    pub a: f64,
    pub lowrank: LowRankFactors,
    pub b: f64,
    pub sparse: SparseCoo,
}

impl SplrMatrix {
    pub fn new(a: f64, lowrank: LowRankFactors, b: f64, sparse: SparseCoo) -> Result<Self> {
        if lowrank.shape() != sparse.shape() {
            return Err(Error::dim(format!(
                "low-rank part is {:?}, sparse part is {:?}",
                lowrank.shape(),
                sparse.shape()
            )));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("coefficients must be finite, got a={a} b={b}")));
        }
        Ok(SplrMatrix { a, lowrank, b, sparse })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = self.lowrank.to_dense();
        out.mapv_inplace(|x| x * self.a);
        for (i, j, v) in self.sparse.iter() {
            out[(i, j)] += self.b * v;
        }
        out
    }
}

impl ProductOperator for SplrMatrix {
    fn shape(&self) -> (usize, usize) {
        self.sparse.shape()
    }

    fn mul_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = self.lowrank.mul_dense_right(a)?;
        out.mapv_inplace(|x| x * self.a);
        let sp = self.sparse.mul_dense_right(a)?;
        out.scaled_add(self.b, &sp);
        Ok(out)
    }

    fn mul_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = self.lowrank.mul_dense_left(b)?;
        out.mapv_inplace(|x| x * self.a);
        let sp = self.sparse.mul_dense_left(b)?;
        out.scaled_add(self.b, &sp);
        Ok(out)
    }
}

/// `||A - B||_F` for two factored matrices without forming either densely.
///
/// Projects both onto the joint column basis P = orth([U_A, U_B]) and row
/// basis Q = orth([V_A, V_B]); the difference lives entirely inside those
/// spans, so the norm of the small projected matrix is exact up to
/// orthonormalization error.
pub fn frob_norm_diff_lowrank(a: &LowRankFactors, b: &LowRankFactors) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dim(format!(
            "shapes disagree: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if a.is_zero() && b.is_zero() {
        return Ok(0.0);
    }
    let p = qr_orthonormalize(&concatenate![Axis(1), a.u.view(), b.u.view()]).q;
    let q = qr_orthonormalize(&concatenate![Axis(1), a.v.view(), b.v.view()]).q;

    // P^T (U diag(d) V^T) Q assembled from the small pieces.
    let project = |f: &LowRankFactors| -> DenseMatrix {
        let pu = p.t().dot(&f.u);
        let mut pu_scaled = pu;
        for (mut col, &s) in pu_scaled.columns_mut().into_iter().zip(&f.d) {
            col.mapv_inplace(|x| x * s);
        }
        pu_scaled.dot(&f.v.t().dot(&q))
    };
    let small = if a.is_zero() {
        -project(b)
    } else if b.is_zero() {
        project(a)
    } else {
        project(a) - project(b)
    };
    Ok(frob_norm(&small))
}
