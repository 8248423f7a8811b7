//! The four sparse storage schemes: static by rows, static by columns,
//! linked list (row anchors) and the doubly-linked network. All conversions
//! are total and preserve the (row, col, value) triplet set.

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::perm::{Permutation, Side};
use crate::scalar::Scalar;

/// Tag naming one of the four storage schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprKind {
    StaticRows,
    StaticCols,
    Linked,
    Network,
}

pub const ALL_REPRS: [ReprKind; 4] =
    [ReprKind::StaticRows, ReprKind::StaticCols, ReprKind::Linked, ReprKind::Network];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Row,
    Column,
}

/// Packed static representation: values with paired minor indices, plus the
/// cumulative segment-end array per major index (the paper's `aif`/`ajf`).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStatic<T> {
    pub orientation: Orientation,
    m: usize,
    n: usize,
    values: Vec<T>,
    minor: Vec<usize>,
    seg_end: Vec<usize>,
}

impl<T: Scalar> SparseStatic<T> {
    /// Builds from triplets sorted in the major order of `orientation`.
    fn from_sorted(m: usize, n: usize, orientation: Orientation, trips: &[(usize, usize, T)]) -> Self {
        let major_count = match orientation {
            Orientation::Row => m,
            Orientation::Column => n,
        };
        let mut values = Vec::with_capacity(trips.len());
        let mut minor = Vec::with_capacity(trips.len());
        let mut seg_end = vec![0usize; major_count];
        for &(i, j, v) in trips {
            let (maj, min) = match orientation {
                Orientation::Row => (i, j),
                Orientation::Column => (j, i),
            };
            values.push(v);
            minor.push(min);
            seg_end[maj - 1] = values.len();
        }
        // empty segments inherit the previous end
        let mut last = 0;
        for e in seg_end.iter_mut() {
            if *e == 0 {
                *e = last;
            } else {
                last = *e;
            }
        }
        SparseStatic { orientation, m, n, values, minor, seg_end }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn minor_indices(&self) -> &[usize] {
        &self.minor
    }

    /// Cumulative (1-based, inclusive) end position of each major segment.
    pub fn segment_ends(&self) -> &[usize] {
        &self.seg_end
    }

    fn segment(&self, major: usize) -> (usize, usize) {
        let end = self.seg_end[major - 1];
        let start = if major == 1 { 0 } else { self.seg_end[major - 2] };
        (start, end)
    }

    fn to_triplets(&self) -> Vec<(usize, usize, T)> {
        let major_count = self.seg_end.len();
        let mut out = Vec::with_capacity(self.values.len());
        for maj in 1..=major_count {
            let (s, e) = self.segment(maj);
            for k in s..e {
                let (i, j) = match self.orientation {
                    Orientation::Row => (maj, self.minor[k]),
                    Orientation::Column => (self.minor[k], maj),
                };
                out.push((i, j, self.values[k]));
            }
        }
        out
    }
}

/// Singly linked list representation with one anchor per row; cells are
/// (minor index, value, next) kept sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkedRows<T> {
    m: usize,
    n: usize,
    cells: Vec<(usize, T, Option<usize>)>,
    anchors: Vec<Option<usize>>,
}

impl<T: Scalar> LinkedRows<T> {
    fn from_sorted(m: usize, n: usize, trips: &[(usize, usize, T)]) -> Self {
        let mut cells = Vec::with_capacity(trips.len());
        let mut anchors: Vec<Option<usize>> = vec![None; m];
        let mut last_in_row: Vec<Option<usize>> = vec![None; m];
        for &(i, j, v) in trips {
            let idx = cells.len();
            cells.push((j, v, None));
            match last_in_row[i - 1] {
                None => anchors[i - 1] = Some(idx),
                Some(prev) => cells[prev].2 = Some(idx),
            }
            last_in_row[i - 1] = Some(idx);
        }
        LinkedRows { m, n, cells, anchors }
    }

    pub fn row_entries(&self, i: usize) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        let mut cur = self.anchors[i - 1];
        while let Some(k) = cur {
            let (j, v, next) = self.cells[k];
            out.push((j, v));
            cur = next;
        }
        out
    }

    fn to_triplets(&self) -> Vec<(usize, usize, T)> {
        (1..=self.m)
            .flat_map(|i| self.row_entries(i).into_iter().map(move |(j, v)| (i, j, v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct NetCell<T> {
    row: usize,
    col: usize,
    value: T,
    next_in_row: Option<usize>,
    next_in_col: Option<usize>,
}

/// Doubly threaded network: every cell sits on exactly one row chain and one
/// column chain, both sorted by minor index. Supports in-place row surgery.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseNetwork<T> {
    m: usize,
    n: usize,
    cells: Vec<NetCell<T>>,
    row_anchor: Vec<Option<usize>>,
    col_anchor: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl<T: Scalar> SparseNetwork<T> {
    fn new(m: usize, n: usize) -> Self {
        SparseNetwork {
            m,
            n,
            cells: Vec::new(),
            row_anchor: vec![None; m],
            col_anchor: vec![None; n],
            free: Vec::new(),
        }
    }

    fn from_sorted(m: usize, n: usize, trips: &[(usize, usize, T)]) -> Self {
        let mut net = Self::new(m, n);
        for &(i, j, v) in trips {
            net.insert(i, j, v);
        }
        net
    }

    fn alloc(&mut self, cell: NetCell<T>) -> usize {
        if let Some(k) = self.free.pop() {
            self.cells[k] = cell;
            k
        } else {
            self.cells.push(cell);
            self.cells.len() - 1
        }
    }

    /// Inserts or overwrites entry (i, j).
    pub fn insert(&mut self, i: usize, j: usize, v: T) {
        // row chain
        let mut prev: Option<usize> = None;
        let mut cur = self.row_anchor[i - 1];
        while let Some(k) = cur {
            if self.cells[k].col >= j {
                break;
            }
            prev = cur;
            cur = self.cells[k].next_in_row;
        }
        if let Some(k) = cur {
            if self.cells[k].col == j {
                self.cells[k].value = v;
                return;
            }
        }
        let idx = self.alloc(NetCell { row: i, col: j, value: v, next_in_row: cur, next_in_col: None });
        match prev {
            None => self.row_anchor[i - 1] = Some(idx),
            Some(p) => self.cells[p].next_in_row = Some(idx),
        }
        // column chain
        let mut prev: Option<usize> = None;
        let mut cur = self.col_anchor[j - 1];
        while let Some(k) = cur {
            if self.cells[k].row >= i {
                break;
            }
            prev = cur;
            cur = self.cells[k].next_in_col;
        }
        self.cells[idx].next_in_col = cur;
        match prev {
            None => self.col_anchor[j - 1] = Some(idx),
            Some(p) => self.cells[p].next_in_col = Some(idx),
        }
    }

    /// Unlinks entry (i, j) if present.
    pub fn remove(&mut self, i: usize, j: usize) {
        let mut prev: Option<usize> = None;
        let mut cur = self.row_anchor[i - 1];
        while let Some(k) = cur {
            if self.cells[k].col == j {
                match prev {
                    None => self.row_anchor[i - 1] = self.cells[k].next_in_row,
                    Some(p) => self.cells[p].next_in_row = self.cells[k].next_in_row,
                }
                self.unlink_from_col(k, i, j);
                self.free.push(k);
                return;
            }
            if self.cells[k].col > j {
                return;
            }
            prev = cur;
            cur = self.cells[k].next_in_row;
        }
    }

    fn unlink_from_col(&mut self, k: usize, i: usize, j: usize) {
        let mut prev: Option<usize> = None;
        let mut cur = self.col_anchor[j - 1];
        while let Some(c) = cur {
            if c == k {
                match prev {
                    None => self.col_anchor[j - 1] = self.cells[c].next_in_col,
                    Some(p) => self.cells[p].next_in_col = self.cells[c].next_in_col,
                }
                return;
            }
            if self.cells[c].row > i {
                return;
            }
            prev = cur;
            cur = self.cells[c].next_in_col;
        }
    }

    pub fn row_entries(&self, i: usize) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        let mut cur = self.row_anchor[i - 1];
        while let Some(k) = cur {
            out.push((self.cells[k].col, self.cells[k].value));
            cur = self.cells[k].next_in_row;
        }
        out
    }

    pub fn col_entries(&self, j: usize) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        let mut cur = self.col_anchor[j - 1];
        while let Some(k) = cur {
            out.push((self.cells[k].row, self.cells[k].value));
            cur = self.cells[k].next_in_col;
        }
        out
    }

    fn to_triplets(&self) -> Vec<(usize, usize, T)> {
        (1..=self.m)
            .flat_map(|i| self.row_entries(i).into_iter().map(move |(j, v)| (i, j, v)))
            .collect()
    }

    /// Replaces rows i and i+1 in place by the Givens combination
    /// `(c·A_i + s·A_{i+1},  c·A_{i+1} - s·A_i)`, relinking column chains.
    /// Exact zeros produced by cancellation are dropped.
    pub fn combine_rows(&mut self, i: usize, c: T, s: T) -> Result<()> {
        if i < 1 || i + 1 > self.m {
            return Err(Error::IndexOutOfRange { index: i, bound: self.m.saturating_sub(1) });
        }
        let top = self.row_entries(i);
        let bot = self.row_entries(i + 1);
        // merge on the column index
        let mut merged: Vec<(usize, T, T)> = Vec::with_capacity(top.len() + bot.len());
        let (mut a, mut b) = (0, 0);
        while a < top.len() || b < bot.len() {
            match (top.get(a), bot.get(b)) {
                (Some(&(ja, va)), Some(&(jb, vb))) => {
                    if ja == jb {
                        merged.push((ja, va, vb));
                        a += 1;
                        b += 1;
                    } else if ja < jb {
                        merged.push((ja, va, T::zero()));
                        a += 1;
                    } else {
                        merged.push((jb, T::zero(), vb));
                        b += 1;
                    }
                }
                (Some(&(ja, va)), None) => {
                    merged.push((ja, va, T::zero()));
                    a += 1;
                }
                (None, Some(&(jb, vb))) => {
                    merged.push((jb, T::zero(), vb));
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        for &(j, _, _) in &merged {
            self.remove(i, j);
            self.remove(i + 1, j);
        }
        for &(j, vt, vb) in &merged {
            let new_top = c * vt + s * vb;
            let new_bot = c * vb - s * vt;
            if !new_top.is_zero() {
                self.insert(i, j, new_top);
            }
            if !new_bot.is_zero() {
                self.insert(i + 1, j, new_bot);
            }
        }
        Ok(())
    }
}

/// A sparse matrix in one of the four §1.3 representations.
#[derive(Debug, Clone, PartialEq)]
pub enum SparseMat<T> {
    StaticRows(SparseStatic<T>),
    StaticCols(SparseStatic<T>),
    Linked(LinkedRows<T>),
    Network(SparseNetwork<T>),
}

impl<T: Scalar> SparseMat<T> {
    /// Builds from (row, col, value) triplets, 1-based. Duplicates rejected.
    pub fn from_triplets(
        m: usize,
        n: usize,
        trips: &[(usize, usize, T)],
        kind: ReprKind,
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, T)> = Vec::with_capacity(trips.len());
        for &(i, j, v) in trips {
            if i < 1 || i > m {
                return Err(Error::IndexOutOfRange { index: i, bound: m });
            }
            if j < 1 || j > n {
                return Err(Error::IndexOutOfRange { index: j, bound: n });
            }
            if !v.is_zero() {
                sorted.push((i, j, v));
            }
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::Invalid(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(Self::from_sorted_triplets(m, n, &sorted, kind))
    }

    fn from_sorted_triplets(
        m: usize,
        n: usize,
        sorted_by_row: &[(usize, usize, T)],
        kind: ReprKind,
    ) -> Self {
        match kind {
            ReprKind::StaticRows => SparseMat::StaticRows(SparseStatic::from_sorted(
                m,
                n,
                Orientation::Row,
                sorted_by_row,
            )),
            ReprKind::StaticCols => {
                let mut by_col = sorted_by_row.to_vec();
                by_col.sort_by_key(|&(i, j, _)| (j, i));
                SparseMat::StaticCols(SparseStatic::from_sorted(m, n, Orientation::Column, &by_col))
            }
            ReprKind::Linked => SparseMat::Linked(LinkedRows::from_sorted(m, n, sorted_by_row)),
            ReprKind::Network => SparseMat::Network(SparseNetwork::from_sorted(m, n, sorted_by_row)),
        }
    }

    pub fn from_dense(a: &DenseMat<T>, kind: ReprKind) -> Self {
        let trips: Vec<_> = a.iter_nonzero().collect();
        Self::from_sorted_triplets(a.rows(), a.cols(), &trips, kind)
    }

    pub fn kind(&self) -> ReprKind {
        match self {
            SparseMat::StaticRows(_) => ReprKind::StaticRows,
            SparseMat::StaticCols(_) => ReprKind::StaticCols,
            SparseMat::Linked(_) => ReprKind::Linked,
            SparseMat::Network(_) => ReprKind::Network,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            SparseMat::StaticRows(s) | SparseMat::StaticCols(s) => s.m,
            SparseMat::Linked(l) => l.m,
            SparseMat::Network(w) => w.m,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            SparseMat::StaticRows(s) | SparseMat::StaticCols(s) => s.n,
            SparseMat::Linked(l) => l.n,
            SparseMat::Network(w) => w.n,
        }
    }

    /// Triplets sorted by (row, col).
    pub fn to_triplets(&self) -> Vec<(usize, usize, T)> {
        let mut t = match self {
            SparseMat::StaticRows(s) | SparseMat::StaticCols(s) => s.to_triplets(),
            SparseMat::Linked(l) => l.to_triplets(),
            SparseMat::Network(w) => w.to_triplets(),
        };
        t.sort_by_key(|&(i, j, _)| (i, j));
        t
    }

    pub fn enn(&self) -> usize {
        self.to_triplets().len()
    }

    /// Lossless conversion to another representation.
    pub fn convert(&self, target: ReprKind) -> SparseMat<T> {
        let trips = self.to_triplets();
        Self::from_sorted_triplets(self.rows(), self.cols(), &trips, target)
    }

    pub fn to_dense(&self) -> DenseMat<T> {
        let mut a = DenseMat::zeros(self.rows(), self.cols());
        for (i, j, v) in self.to_triplets() {
            a.set(i, j, v);
        }
        a
    }

    pub fn pattern(&self) -> crate::pattern::BoolPattern {
        let mut b = crate::pattern::BoolPattern::new(self.rows(), self.cols());
        for (i, j, _) in self.to_triplets() {
            b.set(i, j, true);
        }
        b
    }

    /// Row (left) or column (right) permutation; representation preserved.
    pub fn permute(&self, p: &Permutation, side: Side) -> Result<SparseMat<T>> {
        let dim = match side {
            Side::Left => self.rows(),
            Side::Right => self.cols(),
        };
        if p.n() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.n() });
        }
        let inv = p.inverse();
        let mut trips = self.to_triplets();
        for t in trips.iter_mut() {
            match side {
                Side::Left => t.0 = inv.image(t.0),
                Side::Right => t.1 = inv.image(t.1),
            }
        }
        trips.sort_by_key(|&(i, j, _)| (i, j));
        Ok(Self::from_sorted_triplets(self.rows(), self.cols(), &trips, self.kind()))
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch { expected: self.cols(), found: x.len() });
        }
        let mut y = vec![T::zero(); self.rows()];
        for (i, j, v) in self.to_triplets() {
            y[i - 1] = y[i - 1] + v * x[j - 1];
        }
        Ok(y)
    }
}
