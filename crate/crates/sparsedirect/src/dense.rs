use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense matrix in row-major order. Indices are 1-based at the API surface,
/// matching the `A_i^j` convention used throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat<T> {
    m: usize,
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMat<T> {
    pub fn zeros(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "matrix dimensions must be at least 1x1");
        DenseMat { m, n, data: vec![T::zero(); m * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 1..=n {
            a.set(i, i, T::one());
        }
        a
    }

    /// Builds from rows given in logical order; all rows must have length `n`.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let m = rows.len();
        assert!(m >= 1);
        let n = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        DenseMat { m, n, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.m && j >= 1 && j <= self.n);
        (i - 1) * self.n + (j - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[(i - 1) * self.n..i * self.n]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (1..=self.m).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[T]) {
        assert_eq!(v.len(), self.m);
        for i in 1..=self.m {
            self.set(i, j, v[i - 1]);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.m);
        for i in 1..=self.m {
            for j in 1..=self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok((1..=self.m)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    pub fn matmul(&self, b: &DenseMat<T>) -> Result<DenseMat<T>> {
        if self.n != b.m {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.m });
        }
        let mut c = Self::zeros(self.m, b.n);
        for i in 1..=self.m {
            for k in 1..=self.n {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 1..=b.n {
                    let v = c.get(i, j) + aik * b.get(k, j);
                    c.set(i, j, v);
                }
            }
        }
        Ok(c)
    }

    pub fn add(&self, b: &DenseMat<T>) -> Result<DenseMat<T>> {
        if self.m != b.m || self.n != b.n {
            return Err(Error::DimensionMismatch { expected: self.m * self.n, found: b.m * b.n });
        }
        let mut c = self.clone();
        for (x, y) in c.data.iter_mut().zip(&b.data) {
            *x = *x + *y;
        }
        Ok(c)
    }

    pub fn scale_by(&self, s: T) -> DenseMat<T> {
        let mut c = self.clone();
        for x in c.data.iter_mut() {
            *x = *x * s;
        }
        c
    }

    /// Number of nonzero entries (enn).
    pub fn enn(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (1..=self.m).flat_map(move |i| {
            (1..=self.n).filter_map(move |j| {
                let v = self.get(i, j);
                (!v.is_zero()).then_some((i, j, v))
            })
        })
    }

    /// Largest absolute entry, as the scalar type.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}
