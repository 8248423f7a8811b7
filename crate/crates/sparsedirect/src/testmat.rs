use crate::dense::DenseMat;
use crate::scalar::Scalar;

/// The experiment matrices: binomial, Hilbert and the (-2, -1) tridiagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Binomial,
    Hilbert,
    Tridiagonal,
}

impl TestKind {
    pub fn parse(s: &str) -> Option<TestKind> {
        match s.to_ascii_lowercase().as_str() {
            "binomial" | "b" => Some(TestKind::Binomial),
            "hilbert" | "h" => Some(TestKind::Hilbert),
            "tridiagonal" | "tridiag" | "t" => Some(TestKind::Tridiagonal),
        _ => None,
        }
    }
}

/// Generates the n-dimensional test system. The right-hand side is always
/// built as `A·1`, so `x = 1` is the exact solution; the printed companion
/// vectors (powers of two, the {1,n} indicator) are not consistent with
/// `x = 1` and are not used.
pub fn gen_test<T: Scalar>(kind: TestKind, n: usize) -> (DenseMat<T>, Vec<T>) {
    assert!(n >= 1);
    let a = match kind {
        TestKind::Binomial => binomial(n),
        TestKind::Hilbert => hilbert(n),
        TestKind::Tridiagonal => tridiagonal(n),
    };
    let rhs = a.matvec(&vec![T::one(); n]).expect("square system");
    (a, rhs)
}

/// `B_i^j = C(i, j-1)`, zero when `j - 1 > i`; includes the superdiagonal of
/// ones, matching the printed 3x3 display `[[1,1,0],[1,2,1],[1,3,3]]`.
pub fn binomial<T: Scalar>(n: usize) -> DenseMat<T> {
    let mut a = DenseMat::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            if j <= i + 1 {
                a.set(i, j, T::from_usize_lossy(binom(i, j - 1)));
            }
        }
    }
    a
}

/// `H_i^j = 1/(i + j - 1)`.
pub fn hilbert<T: Scalar>(n: usize) -> DenseMat<T> {
    let mut a = DenseMat::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            a.set(i, j, T::one() / T::from_usize_lossy(i + j - 1));
        }
    }
    a
}

/// Diagonal -2, off-diagonal -1 as printed in the definitions.
pub fn tridiagonal<T: Scalar>(n: usize) -> DenseMat<T> {
    let mut a = DenseMat::zeros(n, n);
    let two = T::one() + T::one();
    for i in 1..=n {
        a.set(i, i, -two);
        if i > 1 {
            a.set(i, i - 1, -T::one());
        }
        if i < n {
            a.set(i, i + 1, -T::one());
        }
    }
    a
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}
