use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Permutation of {1..n}, stored as the permuted-index (image) vector `p`:
/// a left application maps row i of the result to row `p(i)` of the input,
/// a right application maps column j to column `p(j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    p: Vec<usize>,
}

/// Which side a permutation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { p: (1..=n).collect() }
    }

    /// Builds from a 1-based image vector; rejects non-bijections.
    pub fn from_image(p: Vec<usize>) -> Result<Self> {
        let n = p.len();
        let mut seen = vec![false; n + 1];
        for &v in &p {
            if v < 1 || v > n {
                return Err(Error::IndexOutOfRange { index: v, bound: n });
            }
            if seen[v] {
                return Err(Error::Invalid(format!("duplicate index {v} in permutation")));
            }
            seen[v] = true;
        }
        Ok(Permutation { p })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    /// 1-based image: position `i` of the permuted object takes element
    /// `image(i)` of the original.
    pub fn image(&self, i: usize) -> usize {
        self.p[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.p
    }

    pub fn inverse(&self) -> Permutation {
        let mut q = vec![0; self.p.len()];
        for (i, &v) in self.p.iter().enumerate() {
            q[v - 1] = i + 1;
        }
        Permutation { p: q }
    }

    /// Composition matching repeated application: permuting by `inner` and
    /// then by `outer` equals permuting once by `outer.compose(inner)`.
    pub fn compose(&self, inner: &Permutation) -> Permutation {
        assert_eq!(self.n(), inner.n());
        Permutation { p: (1..=self.n()).map(|i| self.image(inner.image(i))).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.p.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Applies to a vector: `y_i = x_{p(i)}`.
    pub fn permute_vec<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n());
        self.p.iter().map(|&v| x[v - 1]).collect()
    }

    /// Expresses the permutation as the stage-by-stage transposition record
    /// used by pivoting: at stage j, the row currently at position `t(j)`
    /// (with `t(j) >= j`) is swapped into position j.
    pub fn to_transposition_seq(&self) -> Vec<usize> {
        let n = self.n();
        let mut order: Vec<usize> = (1..=n).collect();
        let mut pos = vec![0usize; n + 1];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k + 1;
        }
        let mut t = Vec::with_capacity(n);
        for j in 1..=n {
            let target = self.p[j - 1];
            let at = pos[target];
            t.push(at);
            order.swap(j - 1, at - 1);
            pos[order[j - 1]] = j;
            pos[order[at - 1]] = at;
        }
        t
    }

    pub fn from_transposition_seq(t: &[usize]) -> Result<Self> {
        let n = t.len();
        let mut order: Vec<usize> = (1..=n).collect();
        for (j, &at) in t.iter().enumerate() {
            if at < j + 1 || at > n {
                return Err(Error::IndexOutOfRange { index: at, bound: n });
            }
            order.swap(j, at - 1);
        }
        Permutation::from_image(order)
    }
}

/// Applies a row or column permutation to a dense matrix:
/// left gives `Ã_i^j = A_{p(i)}^j`, right gives `Ã_i^j = A_i^{p(j)}`.
pub fn permute_dense<T: Scalar>(
    a: &DenseMat<T>,
    p: &Permutation,
    side: Side,
) -> Result<DenseMat<T>> {
    let dim = match side {
        Side::Left => a.rows(),
        Side::Right => a.cols(),
    };
    if p.n() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: p.n() });
    }
    let mut out = DenseMat::zeros(a.rows(), a.cols());
    for i in 1..=a.rows() {
        for j in 1..=a.cols() {
            let v = match side {
                Side::Left => a.get(p.image(i), j),
                Side::Right => a.get(i, p.image(j)),
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}
