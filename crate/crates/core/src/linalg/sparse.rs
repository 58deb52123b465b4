//! Compressed sparse row storage for symmetric and rectangular real matrices.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{contract, Error, Result};

/// Symmetric sparse matrix in CSR form with both triangles stored explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_offsets: vec![0; n + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from undirected entries `(i, j, w)`; each entry is mirrored.
    ///
    /// Diagonal entries `(i, i, w)` are stored once. Repeated pairs are an error.
    pub fn from_undirected(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, w) in entries {
            if i >= n || j >= n {
                return Err(contract(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            if rows[i].insert(j, w).is_some() {
                return Err(contract(format!("duplicate entry ({i}, {j})")));
            }
            if i != j {
                rows[j].insert(i, w);
            }
        }
        Ok(Self::from_rows(rows))
    }

    /// Builds a matrix from explicit triplets that must already contain both halves.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, w) in triplets {
            if i >= n || j >= n {
                return Err(contract(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            if rows[i].insert(j, w).is_some() {
                return Err(contract(format!("duplicate entry ({i}, {j})")));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (&j, &w) in row {
                match rows[j].get(&i) {
                    Some(&w2) if w2 == w => {}
                    _ => return Err(contract(format!("entry ({i}, {j}) has no symmetric partner"))),
                }
            }
        }
        Ok(Self::from_rows(rows))
    }

    pub(crate) fn from_rows(rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let n = rows.len();
        let nnz = rows.iter().map(BTreeMap::len).sum();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_offsets.push(0);
        for row in rows {
            for (j, w) in row {
                col_indices.push(j);
                values.push(w);
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Mutable row maps, used by graph injectors to add edges.
    pub(crate) fn to_rows(&self) -> Vec<BTreeMap<usize, f64>> {
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().copied().zip(vals.iter().copied()).collect()
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    /// Number of undirected off-diagonal edges.
    pub fn edge_count(&self) -> usize {
        self.upper_entries().filter(|&(i, j, _)| i != j).count()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.row(i).0.binary_search(&j).is_ok()
    }

    /// Entries with `i <= j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .filter(move |(&j, _)| j >= i)
                .map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Number of stored neighbours per row.
    pub fn degrees(&self) -> Vec<usize> {
        self.row_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Row sums of values.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn is_unweighted(&self) -> bool {
        self.values.iter().all(|&w| w == 1.0)
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
    }

    pub fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                out.values[k] = f(i, self.col_indices[k], self.values[k]);
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_values(|_, _, w| s * w)
    }

    /// Keeps only entries for which `keep(i, j)` holds; `keep` must be symmetric.
    pub fn filter(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let mut row_offsets = Vec::with_capacity(self.n + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                if keep(i, j) {
                    col_indices.push(j);
                    values.push(w);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            n: self.n,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                out[i * self.n + j] = w;
            }
        }
        out
    }

    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{i} {j} {v:?}")?;
            }
        }
        Ok(())
    }

    pub fn read_coordinate(path: &Path) -> Result<Self> {
        let (rows, cols, triplets) = read_coordinate_triplets(path)?;
        if rows != cols {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("symmetric matrix must be square, got {rows}x{cols}"),
            });
        }
        Self::from_triplets(rows, triplets)
    }
}

/// Rectangular sparse matrix in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut map: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); rows];
        for (i, j, w) in triplets {
            if i >= rows || j >= cols {
                return Err(contract(format!("entry ({i}, {j}) outside {rows}x{cols}")));
            }
            if map[i].insert(j, w).is_some() {
                return Err(contract(format!("duplicate entry ({i}, {j})")));
            }
        }
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for row in map {
            for (j, w) in row {
                col_indices.push(j);
                values.push(w);
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Transposed copy (CSR of the transpose).
    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, w) in self.triplets() {
            let slot = next[j];
            col_indices[slot] = i;
            values[slot] = w;
            next[j] += 1;
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:?}")?;
        }
        Ok(())
    }

    pub fn read_coordinate(path: &Path) -> Result<Self> {
        let (rows, cols, triplets) = read_coordinate_triplets(path)?;
        Self::from_triplets(rows, cols, triplets)
    }
}

type Triplets = Vec<(usize, usize, f64)>;

fn read_coordinate_triplets(path: &Path) -> Result<(usize, usize, Triplets)> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in file.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(lineno, format!("expected 3 fields, found {}", fields.len())));
        }
        match header {
            None => {
                let parse = |s: &str| s.parse::<usize>().map_err(|e| parse_err(lineno, format!("bad header field {s:?}: {e}")));
                header = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some(_) => {
                let i = fields[0].parse::<usize>().map_err(|e| parse_err(lineno, format!("bad row index: {e}")))?;
                let j = fields[1].parse::<usize>().map_err(|e| parse_err(lineno, format!("bad column index: {e}")))?;
                let v = fields[2].parse::<f64>().map_err(|e| parse_err(lineno, format!("bad value: {e}")))?;
                triplets.push((i, j, v));
            }
        }
    }
    let (rows, cols, nnz) = header.ok_or_else(|| parse_err(0, "missing header".into()))?;
    if nnz != triplets.len() {
        return Err(parse_err(0, format!("header declares {nnz} entries, found {}", triplets.len())));
    }
    Ok((rows, cols, triplets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SparseSymMatrix {
        SparseSymMatrix::from_undirected(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn csr_invariants_hold() {
        let a = path3();
        assert_eq!(a.row_offsets(), &[0, 1, 3, 4]);
        assert_eq!(a.col_indices(), &[1, 0, 2, 1]);
        assert_eq!(a.degrees(), vec![1, 2, 1]);
        assert_eq!(a.edge_count(), 2);
    }

    #[test]
    fn duplicate_entry_rejected() {
        assert!(SparseSymMatrix::from_undirected(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
    }

    #[test]
    fn asymmetric_triplets_rejected() {
        assert!(SparseSymMatrix::from_triplets(2, [(0, 1, 1.0)]).is_err());
        assert!(SparseSymMatrix::from_triplets(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(SparseSymMatrix::from_triplets(2, [(0, 1, 1.0), (1, 0, 1.0)]).is_ok());
    }

    #[test]
    fn coordinate_round_trip() {
        let a = SparseSymMatrix::from_undirected(4, [(0, 1, 0.5), (2, 3, -1.25), (1, 1, 2.0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        a.write_coordinate(std::fs::File::create(&path).unwrap()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("4 4 5\n"));
        assert_eq!(SparseSymMatrix::read_coordinate(&path).unwrap(), a);
    }

    #[test]
    fn coordinate_parse_error_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "2 2 2\n0 1 1.0\n1 x 1.0\n").unwrap();
        match SparseSymMatrix::read_coordinate(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transpose_matches_entries() {
        let a = SparseMatrix::from_triplets(2, 3, [(0, 2, 1.0), (1, 0, 2.0), (1, 2, 3.0)]).unwrap();
        let t = a.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 1), Some(3.0));
        assert_eq!(t.get(0, 1), Some(2.0));
        assert_eq!(t.get(2, 0), Some(1.0));
        assert_eq!(t.get(1, 0), None);
    }
}
