//! Sparse coordinate matrices and their two on-disk formats: MatrixMarket
//! coordinate ("%%MatrixMarket matrix coordinate real general", 1-based)
//! and a bare "i j value" triplet format where dimensions are inferred from
//! the largest index seen. '%' starts a comment line in both.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use ndarray::Array2;
use std::io::{BufRead, Write};

/// Sparse m x n matrix with entries sorted by (row, col).
///
/// Built through [`SparseCoo::from_triplets`] the entries are unique,
/// finite, and nonzero. The solver also stores residuals whose support is a
/// fixed observation pattern; those may legitimately contain exact zeros
/// and are built with [`SparseCoo::pattern_with_values`], which keeps the
/// pattern but skips the nonzero check.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseCoo {
    m: usize,
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseCoo {
    pub fn from_triplets(
        m: usize,
        n: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid(format!("matrix dimensions must be >= 1, got {m}x{n}")));
        }
        for &(i, j, v) in &triplets {
            if i >= m || j >= n {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) out of range for {m}x{n} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("entry ({i}, {j}) has non-finite value {v}")));
            }
            if v == 0.0 {
                return Err(Error::invalid(format!("entry ({i}, {j}) is explicitly zero")));
            }
        }
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in triplets.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::invalid(format!(
                    "duplicate coordinate ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut rows = Vec::with_capacity(triplets.len());
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            rows.push(i);
            cols.push(j);
            vals.push(v);
        }
        Ok(SparseCoo { m, n, rows, cols, vals })
    }

    /// Same support as `self`, new values. `vals` is positionally aligned
    /// with [`SparseCoo::values`] and may contain zeros.
    pub fn pattern_with_values(&self, vals: Vec<f64>) -> SparseCoo {
        assert_eq!(vals.len(), self.nnz(), "value vector does not match pattern");
        SparseCoo {
            m: self.m,
            n: self.n,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            vals,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&i, &j), &v)| (i, j, v))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = Array2::zeros((self.m, self.n));
        for (i, j, v) in self.iter() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn frob_norm(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.vals {
            *v *= factor;
        }
    }

    /// S * A for dense A (n x k), costing O(nnz * k).
    pub fn mul_dense_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.nrows() != self.n {
            return Err(Error::dim(format!(
                "sparse {}x{} times dense {}x{}",
                self.m,
                self.n,
                a.nrows(),
                a.ncols()
            )));
        }
        let mut out = Array2::zeros((self.m, a.ncols()));
        for (i, j, v) in self.iter() {
            out.row_mut(i).scaled_add(v, &a.row(j));
        }
        Ok(out)
    }

    /// S^T * B for dense B (m x k).
    pub fn mul_dense_left(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.nrows() != self.m {
            return Err(Error::dim(format!(
                "sparse^T {}x{} times dense {}x{}",
                self.n,
                self.m,
                b.nrows(),
                b.ncols()
            )));
        }
        let mut out = Array2::zeros((self.n, b.ncols()));
        for (i, j, v) in self.iter() {
            out.row_mut(j).scaled_add(v, &b.row(i));
        }
        Ok(out)
    }
}

fn parse_token<T: std::str::FromStr>(tok: &str, line_no: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("invalid {what}: {tok:?}"),
    })
}

fn parse_entry_line(line: &str, line_no: usize) -> Result<(usize, usize, f64)> {
    let mut it = line.split_whitespace();
    let i: usize = parse_token(it.next().unwrap_or(""), line_no, "row index")?;
    let j: usize = parse_token(it.next().unwrap_or(""), line_no, "column index")?;
    let v: f64 = parse_token(it.next().unwrap_or(""), line_no, "value")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: line_no,
            msg: "expected exactly three fields: i j value".to_string(),
        });
    }
    if i == 0 || j == 0 {
        return Err(Error::Parse {
            line: line_no,
            msg: "indices are 1-based; found 0".to_string(),
        });
    }
    Ok((i - 1, j - 1, v))
}

/// Read MatrixMarket coordinate format. Only "matrix coordinate real
/// general" is supported.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<SparseCoo> {
    let mut lines = reader.lines().enumerate();

    let (line_no, header) = match lines.next() {
        Some((idx, line)) => (idx + 1, line?),
        None => {
            return Err(Error::Parse { line: 1, msg: "empty file".to_string() });
        }
    };
    let banner: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    let expected = ["%%matrixmarket", "matrix", "coordinate", "real", "general"];
    if banner.len() != expected.len() || banner.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Parse {
            line: line_no,
            msg: format!(
                "unsupported MatrixMarket header {header:?}; need \"%%MatrixMarket matrix coordinate real general\""
            ),
        });
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        match size {
            None => {
                let mut it = trimmed.split_whitespace();
                let m: usize = parse_token(it.next().unwrap_or(""), line_no, "row count")?;
                let n: usize = parse_token(it.next().unwrap_or(""), line_no, "column count")?;
                let nnz: usize = parse_token(it.next().unwrap_or(""), line_no, "entry count")?;
                if it.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "size line must be: m n nnz".to_string(),
                    });
                }
                size = Some((m, n, nnz));
            }
            Some(_) => triplets.push(parse_entry_line(trimmed, line_no)?),
        }
    }

    let (m, n, nnz) = size.ok_or(Error::Parse { line: 2, msg: "missing size line".to_string() })?;
    if triplets.len() != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {nnz} entries, file has {}", triplets.len()),
        });
    }
    SparseCoo::from_triplets(m, n, triplets)
}

/// Read bare "i j value" triplets (1-based). Dimensions are the largest
/// row/column index seen, so the file must contain at least one entry.
pub fn parse_bare_triplets<R: BufRead>(reader: R) -> Result<SparseCoo> {
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut m = 0;
    let mut n = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let (i, j, v) = parse_entry_line(trimmed, idx + 1)?;
        m = m.max(i + 1);
        n = n.max(j + 1);
        triplets.push((i, j, v));
    }
    if triplets.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no entries in triplet file".to_string() });
    }
    SparseCoo::from_triplets(m, n, triplets)
}

pub fn write_matrix_market<W: Write>(mut w: W, s: &SparseCoo) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    let (m, n) = s.shape();
    writeln!(w, "{m} {n} {}", s.nnz())?;
    for (i, j, v) in s.iter() {
        writeln!(w, "{} {} {v}", i + 1, j + 1)?;
    }
    Ok(())
}

pub fn write_bare_triplets<W: Write>(mut w: W, s: &SparseCoo) -> Result<()> {
    for (i, j, v) in s.iter() {
        writeln!(w, "{} {} {v}", i + 1, j + 1)?;
    }
    Ok(())
}
