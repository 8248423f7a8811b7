//! Induced norms with attaining witnesses, condition numbers, the
//! perturbation bound, and the Wilkinson backward-error bound for LU with
//! partial pivoting and extended accumulation.

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::lufact::{factor_gauss, LuOptions, Pivoting};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PNorm {
    One,
    Inf,
}

/// Induced norm value with a vector x achieving ‖Ax‖ = ‖A‖·‖x‖.
#[derive(Debug, Clone)]
pub struct NormReport<T> {
    pub value: T,
    pub witness: Vec<T>,
}

pub fn vec_norm<T: Real>(x: &[T], p: PNorm) -> T {
    match p {
        PNorm::One => x.iter().fold(T::zero(), |a, &v| a + v.abs()),
        PNorm::Inf => x.iter().fold(T::zero(), |a, &v| a.max(v.abs())),
    }
}

pub fn vec_norm2<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |a, &v| a + v * v).sqrt()
}

/// Induced matrix norm: max column abs-sum (p = 1, witness a unit vector)
/// or max row abs-sum (p = ∞, witness the sign pattern of the极 row).
pub fn norm<T: Real>(a: &DenseMat<T>, p: PNorm) -> NormReport<T> {
    match p {
        PNorm::One => {
            let (mut best, mut arg) = (T::zero(), 1usize);
            for j in 1..=a.cols() {
                let s = (1..=a.rows()).fold(T::zero(), |acc, i| acc + a.get(i, j).abs());
                if s > best {
                    best = s;
                    arg = j;
                }
            }
            let mut w = vec![T::zero(); a.cols()];
            w[arg - 1] = T::one();
            NormReport { value: best, witness: w }
        }
        PNorm::Inf => {
            let (mut best, mut arg) = (T::zero(), 1usize);
            for i in 1..=a.rows() {
                let s = (1..=a.cols()).fold(T::zero(), |acc, j| acc + a.get(i, j).abs());
                if s > best {
                    best = s;
                    arg = i;
                }
            }
            let w: Vec<T> = (1..=a.cols())
                .map(|j| {
                    let v = a.get(arg, j);
                    if v >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    }
                })
                .collect();
            NormReport { value: best, witness: w }
        }
    }
}

/// Explicit inverse by n solves against the identity columns.
pub fn inverse<T: Real>(a: &DenseMat<T>) -> Result<DenseMat<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    let f = factor_gauss(a, Pivoting::Partial, LuOptions::default())?;
    let mut inv = DenseMat::zeros(n, n);
    for j in 1..=n {
        let mut e = vec![T::zero(); n];
        e[j - 1] = T::one();
        inv.set_col(j, &f.solve(&e)?);
    }
    Ok(inv)
}

/// cond(A) = ‖A‖·‖A⁻¹‖ in the chosen induced norm.
pub fn cond<T: Real>(a: &DenseMat<T>, p: PNorm) -> Result<T> {
    let inv = inverse(a)?;
    Ok(norm(a, p).value * norm(&inv, p).value)
}

/// Relative-perturbation bound: with ‖δA‖·‖A⁻¹‖ < 1,
/// ‖δx‖/‖x‖ ≤ cond/(1 − cond·‖δA‖/‖A‖) · (‖δb‖/‖b‖ + ‖δA‖/‖A‖).
pub fn perturbation_bound<T: Real>(
    a: &DenseMat<T>,
    da_norm: T,
    db_norm: T,
    b_norm: T,
    p: PNorm,
) -> Result<T> {
    let a_norm = norm(a, p).value;
    let inv_norm = norm(&inverse(a)?, p).value;
    if da_norm * inv_norm >= T::one() {
        return Err(Error::Invalid("perturbation hypothesis ||dA||·||A^-1|| < 1 violated".into()));
    }
    let cond = a_norm * inv_norm;
    Ok(cond / (T::one() - cond * da_norm / a_norm) * (db_norm / b_norm + da_norm / a_norm))
}

/// Wilkinson backward-error bound ‖δA‖_∞ ≤ (2n + 1)·g·u for partial
/// pivoting with double-precision inner products; g is the growth factor
/// max |U_i^j|.
pub fn wilkinson_bound<T: Real>(n: usize, growth: T, unit_roundoff: T) -> T {
    (T::from_usize_lossy(2 * n + 1)) * growth * unit_roundoff
}

/// Matrix 2-norm estimate by power iteration on AᵗA (diagnostic only).
pub fn norm2_estimate<T: Real>(a: &DenseMat<T>, iters: usize, tol: T) -> T {
    let n = a.cols();
    let mut x = vec![T::one() / T::from_usize_lossy(n); n];
    let mut prev = T::zero();
    for _ in 0..iters {
        let ax = a.matvec(&x).expect("dimensions fixed");
        let atax = a.transpose().matvec(&ax).expect("dimensions fixed");
        let norm = vec_norm2(&atax);
        if norm.is_zero() {
            return T::zero();
        }
        for (xi, &v) in x.iter_mut().zip(&atax) {
            *xi = v / norm;
        }
        let lambda = norm;
        if (lambda - prev).abs() <= tol * lambda {
            prev = lambda;
            break;
        }
        prev = lambda;
    }
    prev.sqrt()
}
