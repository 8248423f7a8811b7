use crate::dense::DenseMat;
use crate::perm::{Permutation, Side};
use crate::scalar::Scalar;

/// Boolean occupancy pattern B(A): `get(i,j)` is true iff the source matrix
/// has a nonzero at (i,j). Indices 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolPattern {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl BoolPattern {
    pub fn new(m: usize, n: usize) -> Self {
        BoolPattern { m, n, bits: vec![false; m * n] }
    }

    pub fn from_dense<T: Scalar>(a: &DenseMat<T>) -> Self {
        let mut b = Self::new(a.rows(), a.cols());
        for (i, j, _) in a.iter_nonzero() {
            b.set(i, j, true);
        }
        b
    }

    /// Builds from 1-based (row, col) positions.
    pub fn from_entries(m: usize, n: usize, entries: &[(usize, usize)]) -> Self {
        let mut b = Self::new(m, n);
        for &(i, j) in entries {
            b.set(i, j, true);
        }
        b
    }

    /// Builds from 0/1 rows, mostly for transcribing printed patterns.
    pub fn from_rows01(rows: &[&[u8]]) -> Self {
        let m = rows.len();
        let n = rows[0].len();
        let mut b = Self::new(m, n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    b.set(i + 1, j + 1, true);
                }
            }
        }
        b
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[(i - 1) * self.n + (j - 1)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[(i - 1) * self.n + (j - 1)] = v;
    }

    pub fn enn(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn row_count(&self, i: usize) -> usize {
        (1..=self.n).filter(|&j| self.get(i, j)).count()
    }

    pub fn col_count(&self, j: usize) -> usize {
        (1..=self.m).filter(|&i| self.get(i, j)).count()
    }

    pub fn complement(&self) -> Self {
        BoolPattern { m: self.m, n: self.n, bits: self.bits.iter().map(|&b| !b).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.n, self.m);
        for i in 1..=self.m {
            for j in 1..=self.n {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.m == self.n && (1..=self.m).all(|i| (1..=self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Boolean matrix product.
    pub fn bool_mul(&self, other: &BoolPattern) -> BoolPattern {
        assert_eq!(self.n, other.m);
        let mut out = BoolPattern::new(self.m, other.n);
        for i in 1..=self.m {
            for k in 1..=self.n {
                if self.get(i, k) {
                    for j in 1..=other.n {
                        if other.get(k, j) {
                            out.set(i, j, true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn permuted(&self, p: &Permutation, side: Side) -> BoolPattern {
        let mut out = BoolPattern::new(self.m, self.n);
        for i in 1..=self.m {
            for j in 1..=self.n {
                let v = match side {
                    Side::Left => self.get(p.image(i), j),
                    Side::Right => self.get(i, p.image(j)),
                };
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.m)
            .flat_map(move |i| (1..=self.n).filter_map(move |j| self.get(i, j).then_some((i, j))))
    }

    /// Fills a dense matrix with distinct generic values on the pattern, so
    /// that symbolic predictions can be compared against numeric elimination
    /// without accidental cancellation.
    pub fn to_generic_dense(&self) -> DenseMat<f64> {
        let mut a = DenseMat::zeros(self.m, self.n);
        let mut k = 0u64;
        for i in 1..=self.m {
            for j in 1..=self.n {
                if self.get(i, j) {
                    k += 1;
                    // distinct transcendental-ish values, no exact cancellation
                    a.set(i, j, 1.0 + (k as f64) * std::f64::consts::SQRT_2 + (k as f64).sqrt());
                }
            }
        }
        a
    }
}
