//! File I/O for benchmark data: sparse triplet files in two formats, dense
//! CSV matrices for image-style inputs, and deterministic splitting of an
//! observation set into train/validation/test parts.

use crate::error::{Error, Result};
use crate::linalg::{
    parse_bare_triplets, parse_matrix_market, write_bare_triplets, write_matrix_market,
    DenseMatrix, SparseCoo,
};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

/// On-disk format of a sparse triplet file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripletFormat {
    /// "%%MatrixMarket matrix coordinate real general" with a size line.
    MatrixMarket,
    /// Bare "i j value" lines, 1-based, dimensions inferred.
    Bare,
}

impl FromStr for TripletFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mm" => Ok(TripletFormat::MatrixMarket),
            "bare" => Ok(TripletFormat::Bare),
            other => Err(Error::invalid(format!("unknown triplet format {other:?}; use mm|bare"))),
        }
    }
}

impl std::fmt::Display for TripletFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TripletFormat::MatrixMarket => "mm",
            TripletFormat::Bare => "bare",
        })
    }
}

pub fn load_triplets(path: impl AsRef<Path>, format: TripletFormat) -> Result<SparseCoo> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    match format {
        TripletFormat::MatrixMarket => parse_matrix_market(reader),
        TripletFormat::Bare => parse_bare_triplets(reader),
    }
}

pub fn save_triplets(path: impl AsRef<Path>, s: &SparseCoo, format: TripletFormat) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path.as_ref())?);
    match format {
        TripletFormat::MatrixMarket => write_matrix_market(&mut writer, s)?,
        TripletFormat::Bare => write_bare_triplets(&mut writer, s)?,
    }
    writer.flush()?;
    Ok(())
}

/// Parse a dense matrix from comma-separated rows. Every row must have the
/// same number of fields and every field must be a finite number; blank
/// lines are skipped.
pub fn parse_dense_csv<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut width: Option<usize> = None;
    let mut data: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut count = 0usize;
        for tok in trimmed.split(',') {
            let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid number: {:?}", tok.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-finite value {v}"),
                });
            }
            data.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("row has {count} fields, expected {w}"),
                });
            }
            Some(_) => {}
        }
        rows += 1;
    }
    let width = width.ok_or(Error::Parse { line: 0, msg: "no rows in CSV".to_string() })?;
    Array2::from_shape_vec((rows, width), data)
        .map_err(|e| Error::invalid(format!("CSV shape error: {e}")))
}

pub fn write_dense_csv<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    for row in a.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn load_dense_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_dense_csv(BufReader::new(File::open(path.as_ref())?))
}

pub fn save_dense_csv(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path.as_ref())?);
    write_dense_csv(&mut writer, a)?;
    writer.flush()?;
    Ok(())
}

/// Split the entries of a sparse matrix into disjoint parts, one per
/// fraction. The fractions must be nonnegative and sum to 1; part
/// boundaries come from rounding the cumulative fractions, so the sizes
/// are exact whenever `fraction * nnz` is an integer. The same seed always
/// produces the same split.
pub fn split_observations(
    s: &SparseCoo,
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<SparseCoo>> {
    if fractions.is_empty() {
        return Err(Error::invalid("need at least one fraction".to_string()));
    }
    for &f in fractions {
        if !f.is_finite() || f < 0.0 {
            return Err(Error::invalid(format!("fractions must be finite and >= 0, got {f}")));
        }
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("fractions must sum to 1, got {total}")));
    }

    let entries: Vec<(usize, usize, f64)> = s.iter().collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let (m, n) = s.shape();
    let nnz = entries.len();
    let mut parts = Vec::with_capacity(fractions.len());
    let mut cum = 0.0;
    let mut start = 0usize;
    for (idx, &f) in fractions.iter().enumerate() {
        cum += f;
        let end = if idx + 1 == fractions.len() {
            nnz
        } else {
            ((cum * nnz as f64).round() as usize).clamp(start, nnz)
        };
        let triplets: Vec<_> = order[start..end].iter().map(|&p| entries[p]).collect();
        parts.push(SparseCoo::from_triplets(m, n, triplets)?);
        start = end;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn sample() -> SparseCoo {
        SparseCoo::from_triplets(
            5,
            6,
            vec![(0, 1, 1.5), (1, 0, -2.0), (2, 3, 0.25), (4, 5, 10.0)],
        )
        .unwrap()
    }

    #[test]
    fn format_names_round_trip() {
        assert_eq!("mm".parse::<TripletFormat>().unwrap(), TripletFormat::MatrixMarket);
        assert_eq!("bare".parse::<TripletFormat>().unwrap(), TripletFormat::Bare);
        assert!("csv".parse::<TripletFormat>().is_err());
        assert_eq!(TripletFormat::MatrixMarket.to_string(), "mm");
        assert_eq!(TripletFormat::Bare.to_string(), "bare");
    }

    #[test]
    fn triplet_files_round_trip_in_both_formats() {
        let dir = std::env::temp_dir().join(format!("fancl-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let s = sample();
        for format in [TripletFormat::MatrixMarket, TripletFormat::Bare] {
            let path = dir.join(format!("sample.{format}"));
            save_triplets(&path, &s, format).unwrap();
            let back = load_triplets(&path, format).unwrap();
            assert_eq!(back, s, "{format}");
        }
        assert!(load_triplets(dir.join("missing.mm"), TripletFormat::MatrixMarket).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn dense_csv_parses_and_rejects() {
        let a = parse_dense_csv("1, 2.5, -3\n4,5,6\n\n".as_bytes()).unwrap();
        assert_eq!(a.dim(), (2, 3));
        assert_eq!(a[(0, 1)], 2.5);
        assert_eq!(a[(1, 2)], 6.0);

        assert!(parse_dense_csv("1,2\n3\n".as_bytes()).is_err(), "ragged rows");
        assert!(parse_dense_csv("1,x\n".as_bytes()).is_err(), "bad token");
        assert!(parse_dense_csv("1,inf\n".as_bytes()).is_err(), "non-finite");
        assert!(parse_dense_csv("".as_bytes()).is_err(), "empty");
    }

    #[test]
    fn dense_csv_round_trips_exactly() {
        let a = Array2::from_shape_vec((2, 2), vec![0.1, -2.0, 1e-17, 3.5e8]).unwrap();
        let mut buf = Vec::new();
        write_dense_csv(&mut buf, &a).unwrap();
        let back = parse_dense_csv(buf.as_slice()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn split_partitions_without_loss() {
        let s = sample();
        let parts = split_observations(&s, &[0.5, 0.25, 0.25], 13).unwrap();
        assert_eq!(parts.iter().map(SparseCoo::nnz).collect::<Vec<_>>(), vec![2, 1, 1]);
        for p in &parts {
            assert_eq!(p.shape(), s.shape());
        }
        let union: BTreeSet<_> =
            parts.iter().flat_map(|p| p.iter().map(|(i, j, _)| (i, j)).collect::<Vec<_>>()).collect();
        assert_eq!(union.len(), s.nnz(), "parts must be disjoint and cover everything");

        let again = split_observations(&s, &[0.5, 0.25, 0.25], 13).unwrap();
        assert_eq!(parts, again);
        let other = split_observations(&s, &[0.5, 0.25, 0.25], 14).unwrap();
        assert_ne!(parts, other, "different seed should shuffle differently");
    }

    #[test]
    fn split_validates_fractions() {
        let s = sample();
        assert!(split_observations(&s, &[], 0).is_err());
        assert!(split_observations(&s, &[0.5, 0.4], 0).is_err());
        assert!(split_observations(&s, &[1.5, -0.5], 0).is_err());
        let whole = split_observations(&s, &[1.0], 0).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0], s);
    }
}
