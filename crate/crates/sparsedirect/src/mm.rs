//! Matrix Market coordinate I/O (real, general), 1-based indices on disk.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::{ReprKind, SparseMat};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn read_mm_from<R: Read>(reader: R) -> Result<SparseMat<f64>> {
    let mut lines = BufReader::new(reader).lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::BadMatrixMarket("empty file".into())),
        }
    };
    let mut fields = header.split_whitespace();
    if fields.next() != Some("%%MatrixMarket") {
        return Err(Error::BadMatrixMarket("missing %%MatrixMarket banner".into()));
    }
    let rest: Vec<&str> = fields.collect();
    if rest != ["matrix", "coordinate", "real", "general"] {
        return Err(Error::BadMatrixMarket(format!(
            "unsupported header qualifiers {rest:?}; only 'matrix coordinate real general'"
        )));
    }
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size_line = Some(line);
        break;
    }
    let size_line = size_line.ok_or_else(|| Error::BadMatrixMarket("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::BadMatrixMarket(format!("bad size token '{t}'"))))
        .collect::<Result<_>>()?;
    let [m, n, nnz] = dims[..] else {
        return Err(Error::BadMatrixMarket("size line must be 'm n nnz'".into()));
    };
    let mut trips = Vec::with_capacity(nnz);
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let [si, sj, sv] = toks[..] else {
            return Err(Error::BadMatrixMarket(format!("bad entry line '{t}'")));
        };
        let i: usize =
            si.parse().map_err(|_| Error::BadMatrixMarket(format!("bad row index '{si}'")))?;
        let j: usize =
            sj.parse().map_err(|_| Error::BadMatrixMarket(format!("bad col index '{sj}'")))?;
        let v: f64 =
            sv.parse().map_err(|_| Error::BadMatrixMarket(format!("bad value '{sv}'")))?;
        if i < 1 || i > m {
            return Err(Error::BadMatrixMarket(format!("row index {i} outside 1..={m}")));
        }
        if j < 1 || j > n {
            return Err(Error::BadMatrixMarket(format!("col index {j} outside 1..={n}")));
        }
        trips.push((i, j, v));
    }
    if trips.len() != nnz {
        return Err(Error::BadMatrixMarket(format!(
            "declared {nnz} entries, found {}",
            trips.len()
        )));
    }
    let mut keys: Vec<(usize, usize)> = trips.iter().map(|&(i, j, _)| (i, j)).collect();
    keys.sort_unstable();
    for w in keys.windows(2) {
        if w[0] == w[1] {
            return Err(Error::BadMatrixMarket(format!(
                "duplicate entry at ({}, {})",
                w[0].0, w[0].1
            )));
        }
    }
    SparseMat::from_triplets(m, n, &trips, ReprKind::StaticRows)
}

pub fn read_mm(path: impl AsRef<Path>) -> Result<SparseMat<f64>> {
    read_mm_from(std::fs::File::open(path)?)
}

pub fn write_mm_to<W: Write>(mut w: W, a: &SparseMat<f64>) -> Result<()> {
    let trips = a.to_triplets();
    writeln!(w, "{HEADER}")?;
    writeln!(w, "% written by sparsedirect")?;
    writeln!(w, "{} {} {}", a.rows(), a.cols(), trips.len())?;
    for (i, j, v) in trips {
        writeln!(w, "{i} {j} {v:.17e}")?;
    }
    Ok(())
}

pub fn write_mm(path: impl AsRef<Path>, a: &SparseMat<f64>) -> Result<()> {
    write_mm_to(std::fs::File::create(path)?, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_round_trip() {
        let a = SparseMat::from_triplets(1, 1, &[(1, 1, -2.5)], ReprKind::Network).unwrap();
        let mut buf = Vec::new();
        write_mm_to(&mut buf, &a).unwrap();
        let b = read_mm_from(&buf[..]).unwrap();
        assert_eq!(a.to_triplets(), b.to_triplets());
    }

    #[test]
    fn duplicate_entry_is_an_error() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n";
        let err = read_mm_from(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::BadMatrixMarket(m) if m.contains("duplicate")));
    }

    #[test]
    fn out_of_bounds_index_is_an_error() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(read_mm_from(text.as_bytes()).is_err());
    }

    #[test]
    fn malformed_header_is_an_error() {
        let text = "%%MatrixMarket matrix array real general\n2 2 0\n";
        assert!(read_mm_from(text.as_bytes()).is_err());
    }
}
