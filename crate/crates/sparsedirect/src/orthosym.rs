//! Orthogonal and symmetric factorizations: Givens rotations, Householder
//! reflections, QR, Cholesky and LDLᵗ, least squares, projection onto a
//! column space, and the quadratic-programming normal system.

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::lufact::{factor_gauss, LuOptions, Pivoting};
use crate::scalar::Real;

/// Rotation parameters (c, s) with c² + s² = 1 such that applying the
/// rotation to (a, b)ᵗ zeroes the second component; (0, 0) maps to the
/// identity rotation by convention.
pub fn givens<T: Real>(a: T, b: T) -> (T, T) {
    if a.is_zero() && b.is_zero() {
        return (T::one(), T::zero());
    }
    let r = a.hypot(b);
    (a / r, b / r)
}

/// Applies the rotation to rows i and k of `a`:
/// row_i ← c·row_i + s·row_k, row_k ← c·row_k − s·row_i.
pub fn apply_rot<T: Real>(a: &mut DenseMat<T>, i: usize, k: usize, c: T, s: T) {
    for j in 1..=a.cols() {
        let (x, y) = (a.get(i, j), a.get(k, j));
        a.set(i, j, c * x + s * y);
        a.set(k, j, c * y - s * x);
    }
}

fn apply_rot_vec<T: Real>(v: &mut [T], i: usize, k: usize, c: T, s: T) {
    let (x, y) = (v[i - 1], v[k - 1]);
    v[i - 1] = c * x + s * y;
    v[k - 1] = c * y - s * x;
}

/// Unit Householder vector u with H = I − 2uuᵗ mapping x onto ∓‖x‖e₁; the
/// sign is chosen away from cancellation (v = x + sign(x₁)‖x‖e₁).
pub fn householder_vector<T: Real>(x: &[T]) -> Result<Vec<T>> {
    let norm = x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    if norm.is_zero() {
        return Err(Error::Invalid("householder vector of zero input".into()));
    }
    let sign = if x[0] >= T::zero() { T::one() } else { -T::one() };
    let mut v = x.to_vec();
    v[0] = v[0] + sign * norm;
    let vn = v.iter().fold(T::zero(), |acc, &t| acc + t * t).sqrt();
    for t in v.iter_mut() {
        *t = *t / vn;
    }
    Ok(v)
}

/// Applies H = I − 2uuᵗ to every column of `a` (u padded as given).
pub fn apply_reflect<T: Real>(a: &mut DenseMat<T>, u: &[T]) {
    assert_eq!(u.len(), a.rows());
    for j in 1..=a.cols() {
        let mut w = T::zero();
        for i in 1..=a.rows() {
            w = w + u[i - 1] * a.get(i, j);
        }
        let two_w = (T::one() + T::one()) * w;
        for i in 1..=a.rows() {
            let v = a.get(i, j) - two_w * u[i - 1];
            a.set(i, j, v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrMethod {
    Givens,
    Householder,
}

/// One recorded orthogonal transform of the QR sweep.
#[derive(Debug, Clone)]
enum Transform<T> {
    Rot { i: usize, k: usize, c: T, s: T },
    /// Reflection on rows offset.. with the stored unit vector.
    Reflect { offset: usize, u: Vec<T> },
}

/// QR factors: R is n×n upper triangular; Q is kept implicitly as the
/// transform sequence (discarded-after-use style) and materialized only on
/// demand. Zero diagonal entries of R are reported in `rank_deficient_at`.
#[derive(Debug, Clone)]
pub struct QRFactors<T> {
    m: usize,
    n: usize,
    pub r: DenseMat<T>,
    transforms: Vec<Transform<T>>,
    q: Option<DenseMat<T>>,
    pub rank_deficient_at: Vec<usize>,
}

impl<T: Real> QRFactors<T> {
    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Applies Qᵗ to a length-m vector.
    pub fn apply_qt(&self, v: &[T]) -> Vec<T> {
        let mut w = v.to_vec();
        for t in &self.transforms {
            match t {
                Transform::Rot { i, k, c, s } => apply_rot_vec(&mut w, *i, *k, *c, *s),
                Transform::Reflect { offset, u } => {
                    let mut dot = T::zero();
                    for (l, &ul) in u.iter().enumerate() {
                        dot = dot + ul * w[offset + l - 1];
                    }
                    let two = T::one() + T::one();
                    for (l, &ul) in u.iter().enumerate() {
                        w[offset + l - 1] = w[offset + l - 1] - two * dot * ul;
                    }
                }
            }
        }
        w
    }

    /// Applies Q to a length-m vector (transforms in reverse, inverted).
    pub fn apply_q(&self, v: &[T]) -> Vec<T> {
        let mut w = v.to_vec();
        for t in self.transforms.iter().rev() {
            match t {
                Transform::Rot { i, k, c, s } => apply_rot_vec(&mut w, *i, *k, *c, -*s),
                Transform::Reflect { offset, u } => {
                    // reflections are involutive
                    let mut dot = T::zero();
                    for (l, &ul) in u.iter().enumerate() {
                        dot = dot + ul * w[offset + l - 1];
                    }
                    let two = T::one() + T::one();
                    for (l, &ul) in u.iter().enumerate() {
                        w[offset + l - 1] = w[offset + l - 1] - two * dot * ul;
                    }
                }
            }
        }
        w
    }

    /// Materializes Q (m×m) column by column.
    pub fn q(&mut self) -> &DenseMat<T> {
        if self.q.is_none() {
            let m = self.m;
            let mut q = DenseMat::zeros(m, m);
            for j in 1..=m {
                let mut e = vec![T::zero(); m];
                e[j - 1] = T::one();
                let col = self.apply_q(&e);
                q.set_col(j, &col);
            }
            self.q = Some(q);
        }
        self.q.as_ref().unwrap()
    }
}

/// Orthogonal factorization A = Q [R; 0] for m ≥ n.
pub fn qr<T: Real>(a: &DenseMat<T>, method: QrMethod, want_q: bool) -> Result<QRFactors<T>> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::DimensionMismatch { expected: n, found: m });
    }
    let mut work = a.clone();
    let mut transforms = Vec::new();
    match method {
        QrMethod::Givens => {
            for j in 1..=n {
                for i in j + 1..=m {
                    let (x, y) = (work.get(j, j), work.get(i, j));
                    if y.is_zero() {
                        continue;
                    }
                    let (c, s) = givens(x, y);
                    apply_rot(&mut work, j, i, c, s);
                    work.set(i, j, T::zero());
                    transforms.push(Transform::Rot { i: j, k: i, c, s });
                }
            }
        }
        QrMethod::Householder => {
            for j in 1..=n.min(m - 1) {
                let x: Vec<T> = (j..=m).map(|i| work.get(i, j)).collect();
                if x.iter().skip(1).all(|v| v.is_zero()) {
                    continue;
                }
                let u = householder_vector(&x)?;
                // apply to the trailing block rows j..m, cols j..n
                for col in j..=n {
                    let mut dot = T::zero();
                    for (l, &ul) in u.iter().enumerate() {
                        dot = dot + ul * work.get(j + l, col);
                    }
                    let two = T::one() + T::one();
                    for (l, &ul) in u.iter().enumerate() {
                        let v = work.get(j + l, col) - two * dot * ul;
                        work.set(j + l, col, v);
                    }
                }
                for i in j + 1..=m {
                    work.set(i, j, T::zero());
                }
                transforms.push(Transform::Reflect { offset: j, u });
            }
        }
    }
    let mut r = DenseMat::zeros(n, n);
    for i in 1..=n {
        for j in i..=n {
            r.set(i, j, work.get(i, j));
        }
    }
    let eps = T::epsilon() * a.max_abs() * T::from_usize_lossy(m);
    let rank_deficient_at: Vec<usize> = (1..=n).filter(|&i| r.get(i, i).abs() <= eps).collect();
    let mut f = QRFactors { m, n, r, transforms, q: None, rank_deficient_at };
    if want_q {
        f.q();
    }
    Ok(f)
}

/// Lower-triangular Cholesky factor C with S = CCᵗ.
#[derive(Debug, Clone)]
pub struct CholFactors<T> {
    pub c: DenseMat<T>,
}

impl<T: Real> CholFactors<T> {
    /// Solves S x = b via the two triangular systems.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let y = crate::lufact::solve_lower(&self.c, b, crate::lufact::Access::ByRow, false)?;
        let ct = self.c.transpose();
        crate::lufact::solve_upper(&ct, &y, crate::lufact::Access::ByRow)
    }
}

/// Unit lower L and positive diagonal d with S = L·diag(d)·Lᵗ.
#[derive(Debug, Clone)]
pub struct LdlFactors<T> {
    pub l: DenseMat<T>,
    pub d: Vec<T>,
}

impl<T: Real> LdlFactors<T> {
    /// C = L·D^{1/2}.
    pub fn to_cholesky(&self) -> CholFactors<T> {
        let n = self.d.len();
        let mut c = self.l.clone();
        for j in 1..=n {
            let s = self.d[j - 1].sqrt();
            for i in j..=n {
                let v = c.get(i, j) * s;
                c.set(i, j, v);
            }
        }
        CholFactors { c }
    }
}

pub fn ldl<T: Real>(s: &DenseMat<T>) -> Result<LdlFactors<T>> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch { expected: s.rows(), found: s.cols() });
    }
    let n = s.rows();
    let mut l = DenseMat::identity(n);
    let mut d = vec![T::zero(); n];
    for j in 1..=n {
        let mut dj = s.get(j, j);
        for k in 1..j {
            dj = dj - l.get(j, k) * l.get(j, k) * d[k - 1];
        }
        if dj <= T::zero() {
            return Err(Error::NotPositiveDefinite { index: j });
        }
        d[j - 1] = dj;
        for i in j + 1..=n {
            let mut v = s.get(i, j);
            for k in 1..j {
                v = v - l.get(i, k) * l.get(j, k) * d[k - 1];
            }
            l.set(i, j, v / dj);
        }
    }
    Ok(LdlFactors { l, d })
}

pub fn cholesky<T: Real>(s: &DenseMat<T>) -> Result<CholFactors<T>> {
    Ok(ldl(s)?.to_cholesky())
}

/// Least-squares solution of the overdetermined system A x ≈ b.
#[derive(Debug, Clone)]
pub struct LsqSolution<T> {
    pub x: Vec<T>,
    /// Fitted vector y = A x* (the projection of b onto C(A)).
    pub y: Vec<T>,
    /// Residual z = b − y, orthogonal to C(A).
    pub z: Vec<T>,
}

pub fn least_squares<T: Real>(a: &DenseMat<T>, b: &[T]) -> Result<LsqSolution<T>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    let f = qr(a, QrMethod::Householder, false)?;
    if let Some(&i) = f.rank_deficient_at.first() {
        return Err(Error::Singular { stage: i });
    }
    let qtb = f.apply_qt(b);
    let x = crate::lufact::solve_upper(&f.r, &qtb[..n], crate::lufact::Access::ByRow)?;
    let y = a.matvec(&x)?;
    let z: Vec<T> = b.iter().zip(&y).map(|(&bi, &yi)| bi - yi).collect();
    Ok(LsqSolution { x, y, z })
}

/// Projection of b onto the column space of A (full column rank).
pub fn project<T: Real>(a: &DenseMat<T>, b: &[T]) -> Result<Vec<T>> {
    Ok(least_squares(a, b)?.y)
}

/// The materialized projector P = A (AᵗA)⁻¹ Aᵗ, for the spectral checks.
pub fn projector_matrix<T: Real>(a: &DenseMat<T>) -> Result<DenseMat<T>> {
    let m = a.rows();
    let mut p = DenseMat::zeros(m, m);
    for j in 1..=m {
        let mut e = vec![T::zero(); m];
        e[j - 1] = T::one();
        let col = project(a, &e)?;
        p.set_col(j, &col);
    }
    Ok(p)
}

/// Solves the equality-constrained quadratic program
/// min ½ yᵗWy + cᵗy s.t. Nᵗy = d through its symmetric normal system;
/// returns the minimizer and the Lagrange multipliers l with Wy + c = Nl.
pub fn solve_qp<T: Real>(
    w: &DenseMat<T>,
    c: &[T],
    n_mat: Option<&DenseMat<T>>,
    d: &[T],
) -> Result<(Vec<T>, Vec<T>)> {
    let n = w.rows();
    if !w.is_square() || c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.len() });
    }
    let k = n_mat.map_or(0, |m| m.cols());
    if d.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: d.len() });
    }
    // [ Nᵗ  0 ] [y]   [ d]
    // [ W  -N ] [l] = [-c]
    let dim = n + k;
    let mut sys = DenseMat::zeros(dim.max(1), dim.max(1));
    let mut rhs = vec![T::zero(); dim];
    if let Some(nm) = n_mat {
        for i in 1..=k {
            for j in 1..=n {
                sys.set(i, j, nm.get(j, i));
            }
            rhs[i - 1] = d[i - 1];
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            sys.set(k + i, j, w.get(i, j));
        }
        if let Some(nm) = n_mat {
            for j in 1..=k {
                sys.set(k + i, n + j, -nm.get(i, j));
            }
        }
        rhs[k + i - 1] = -c[i - 1];
    }
    let f = factor_gauss(&sys, Pivoting::Partial, LuOptions::default())?;
    let sol = f.solve(&rhs)?;
    Ok((sol[..n].to_vec(), sol[n..].to_vec()))
}

/// y = A⁻¹x computed as R⁻¹ R⁻ᵗ Aᵗ x, without the orthogonal factor.
pub fn apply_inverse_via_r<T: Real>(
    a: &DenseMat<T>,
    r: &DenseMat<T>,
    x: &[T],
) -> Result<Vec<T>> {
    let n = a.rows();
    if !a.is_square() || x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let atx = a.transpose().matvec(x)?;
    let rt = r.transpose();
    let t = crate::lufact::solve_lower(&rt, &atx, crate::lufact::Access::ByRow, false)?;
    crate::lufact::solve_upper(r, &t, crate::lufact::Access::ByRow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testmat::{binomial, gen_test, TestKind};

    fn norm2<T: Real>(v: &[T]) -> T {
        v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
    }

    fn rng(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) * 2.0 - 1.0
        }
    }

    fn random_mat(m: usize, n: usize, seed: u64) -> DenseMat<f64> {
        let mut r = rng(seed);
        let mut a = DenseMat::zeros(m, n);
        for i in 1..=m {
            for j in 1..=n {
                a.set(i, j, r());
            }
        }
        a
    }

    #[test]
    fn givens_parameters() {
        assert_eq!(givens(1.0f64, 0.0), (1.0, 0.0));
        let (c, s) = givens(0.0f64, 1.0);
        let rotated = (c * 0.0 + s * 1.0, c * 1.0 - s * 0.0);
        assert!((rotated.0.abs() - 1.0).abs() < 1e-15 && rotated.1.abs() < 1e-15);
        let (c, s) = givens(3.0f64, 4.0);
        assert!((c * c + s * s - 1.0).abs() < 1e-15);
        assert!((c * 3.0 + s * 4.0 - 5.0).abs() < 1e-14);
        assert!((c * 4.0 - s * 3.0).abs() < 1e-15);
        assert_eq!(givens(0.0f64, 0.0), (1.0, 0.0));
    }

    #[test]
    fn rotation_preserves_column_norms() {
        let mut a = random_mat(5, 4, 7);
        let before: Vec<f64> = (1..=4).map(|j| norm2(&a.col(j))).collect();
        let (c, s) = givens(2.0, -1.5);
        apply_rot(&mut a, 2, 4, c, s);
        for (j, b) in before.iter().enumerate() {
            assert!((norm2(&a.col(j + 1)) - b).abs() < 1e-13);
        }
    }

    #[test]
    fn householder_contracts() {
        // axis vector: |(Hx)₁| = ‖x‖, rest vanish
        let u = householder_vector(&[1.0f64, 0.0, 0.0]).unwrap();
        let mut x = DenseMat::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]);
        apply_reflect(&mut x, &u);
        assert!((x.get(1, 1).abs() - 1.0).abs() < 1e-14);
        assert!(x.get(2, 1).abs() < 1e-14 && x.get(3, 1).abs() < 1e-14);

        let u = householder_vector(&[3.0f64, 4.0]).unwrap();
        let mut x = DenseMat::from_rows(&[vec![3.0], vec![4.0]]);
        apply_reflect(&mut x, &u);
        assert!((x.get(1, 1).abs() - 5.0).abs() < 1e-14);
        assert!(x.get(2, 1).abs() < 1e-13);

        // involution H² = I on a random vector
        let mut r = rng(13);
        let xv: Vec<f64> = (0..6).map(|_| r()).collect();
        let u = householder_vector(&xv).unwrap();
        let mut m = DenseMat::zeros(6, 1);
        m.set_col(1, &xv);
        apply_reflect(&mut m, &u);
        apply_reflect(&mut m, &u);
        for i in 1..=6 {
            assert!((m.get(i, 1) - xv[i - 1]).abs() < 1e-13);
        }
        assert!(householder_vector(&[0.0f64, 0.0]).is_err());
    }

    #[test]
    fn qr_of_orthogonal_matrix_gives_signed_identity() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = DenseMat::from_rows(&[vec![s, s], vec![-s, s]]);
        for method in [QrMethod::Givens, QrMethod::Householder] {
            let f = qr(&a, method, false).unwrap();
            for i in 1..=2 {
                assert!((f.r.get(i, i).abs() - 1.0).abs() < 1e-14);
                for j in i + 1..=2 {
                    assert!(f.r.get(i, j).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn qr_gram_identity_on_binomial() {
        let b: DenseMat<f64> = binomial(3);
        let f = qr(&b, QrMethod::Givens, false).unwrap();
        let rtr = f.r.transpose().matmul(&f.r).unwrap();
        let btb = b.transpose().matmul(&b).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                assert!((rtr.get(i, j) - btb.get(i, j)).abs() < 1e-12);
            }
        }
        // R transposed agrees with the Cholesky factor of BᵗB up to signs
        let c = cholesky(&btb).unwrap().c;
        for i in 1..=3 {
            for j in 1..=3 {
                assert!((c.get(i, j).abs() - f.r.get(j, i).abs()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn qr_methods_agree_and_reconstruct() {
        let a = random_mat(5, 3, 99);
        let g = qr(&a, QrMethod::Givens, true).unwrap();
        let h = qr(&a, QrMethod::Householder, true).unwrap();
        for i in 1..=3 {
            for j in i..=3 {
                assert!((g.r.get(i, j).abs() - h.r.get(i, j).abs()).abs() < 1e-12);
            }
        }
        for mut f in [g, h] {
            let q = f.q().clone();
            // QᵗQ = I
            let qtq = q.transpose().matmul(&q).unwrap();
            for i in 1..=5 {
                for j in 1..=5 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq.get(i, j) - expect).abs() < 5.0 * f64::EPSILON * 5.0);
                }
            }
            // A = Q [R; 0]
            let mut r0 = DenseMat::zeros(5, 3);
            for i in 1..=3 {
                for j in i..=3 {
                    r0.set(i, j, f.r.get(i, j));
                }
            }
            let qr0 = q.matmul(&r0).unwrap();
            for i in 1..=5 {
                for j in 1..=3 {
                    assert!((qr0.get(i, j) - a.get(i, j)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cholesky_reconstruction_and_failure() {
        let i3: DenseMat<f64> = DenseMat::identity(3);
        let c = cholesky(&i3).unwrap().c;
        assert_eq!(c, i3);

        let b: DenseMat<f64> = binomial(3);
        let s = b.matmul(&b.transpose()).unwrap();
        let c = cholesky(&s).unwrap().c;
        let cct = c.matmul(&c.transpose()).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                assert!((cct.get(i, j) - s.get(i, j)).abs() < 1e-12);
            }
        }

        let indef = DenseMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(cholesky(&indef), Err(Error::NotPositiveDefinite { index: 2 })));
        assert!(matches!(ldl(&indef), Err(Error::NotPositiveDefinite { index: 2 })));
    }

    #[test]
    fn least_squares_contracts() {
        // b in the column space: zero residual
        let a = random_mat(6, 3, 3);
        let xs = vec![1.0, -2.0, 0.5];
        let b = a.matvec(&xs).unwrap();
        let sol = least_squares(&a, &b).unwrap();
        assert!(norm2(&sol.z) < 1e-12);
        for (xi, ei) in sol.x.iter().zip(&xs) {
            assert!((xi - ei).abs() < 1e-11);
        }

        // b orthogonal to the column space: x* = 0
        let e1 = DenseMat::from_rows(&[vec![1.0], vec![0.0]]);
        let sol = least_squares(&e1, &[0.0f64, 3.0]).unwrap();
        assert!(sol.x[0].abs() < 1e-14);

        // normal-equations oracle on a random instance
        let a = random_mat(6, 3, 17);
        let mut r = rng(23);
        let b: Vec<f64> = (0..6).map(|_| r()).collect();
        let sol = least_squares(&a, &b).unwrap();
        let ata = a.transpose().matmul(&a).unwrap();
        let atb = a.transpose().matvec(&b).unwrap();
        let f = factor_gauss(&ata, Pivoting::Partial, LuOptions::default()).unwrap();
        let xo = f.solve(&atb).unwrap();
        for (xi, oi) in sol.x.iter().zip(&xo) {
            assert!((xi - oi).abs() < 1e-10);
        }
        // orthogonality Aᵗ(b − y) = 0
        let atz = a.transpose().matvec(&sol.z).unwrap();
        assert!(norm2(&atz) < 1e-12);
        // Pythagoras against an arbitrary member of C(A)
        let u = a.matvec(&[0.3, 0.4, -0.1]).unwrap();
        let bu: Vec<f64> = b.iter().zip(&u).map(|(x, y)| x - y).collect();
        let yu: Vec<f64> = sol.y.iter().zip(&u).map(|(x, y)| x - y).collect();
        let lhs = norm2(&bu).powi(2);
        let rhs = norm2(&sol.z).powi(2) + norm2(&yu).powi(2);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn projector_contracts() {
        let a = DenseMat::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]);
        let y = project(&a, &[2.5f64, -1.0, 3.0]).unwrap();
        assert!((y[0] - 2.5).abs() < 1e-14 && y[1].abs() < 1e-14 && y[2].abs() < 1e-14);

        let a = random_mat(5, 2, 31);
        let inside = a.matvec(&[1.0, 2.0]).unwrap();
        let y = project(&a, &inside).unwrap();
        for (yi, bi) in y.iter().zip(&inside) {
            assert!((yi - bi).abs() < 1e-11);
        }

        let mut r = rng(37);
        let b: Vec<f64> = (0..5).map(|_| r()).collect();
        let y = project(&a, &b).unwrap();
        let zb: Vec<f64> = b.iter().zip(&y).map(|(x, v)| x - v).collect();
        assert!((norm2(&b).powi(2) - norm2(&y).powi(2) - norm2(&zb).powi(2)).abs() < 1e-10);

        // idempotence and trace of the materialized projector
        let p = projector_matrix(&a).unwrap();
        let pp = p.matmul(&p).unwrap();
        let mut trace = 0.0;
        for i in 1..=5 {
            trace += p.get(i, i);
            for j in 1..=5 {
                assert!((pp.get(i, j) - p.get(i, j)).abs() < 1e-11);
            }
        }
        assert!((trace - 2.0).abs() < 1e-11);
    }

    #[test]
    fn qp_normal_system() {
        // unconstrained: y = -W⁻¹ c
        let w = DenseMat::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let (y, l) = solve_qp(&w, &[2.0f64, -8.0], None, &[]).unwrap();
        assert!((y[0] + 1.0).abs() < 1e-14 && (y[1] - 2.0).abs() < 1e-14);
        assert!(l.is_empty());

        // W = I, c = 0: least-norm solution of Nᵗy = d
        let i3: DenseMat<f64> = DenseMat::identity(3);
        let n = DenseMat::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]);
        let (y, _) = solve_qp(&i3, &[0.0f64; 3], Some(&n), &[3.0]).unwrap();
        for yi in y.iter().copied() {
            assert!((yi - 1.0f64).abs() < 1e-12);
        }

        // random SPD W, single constraint: KKT residuals
        let m = random_mat(4, 4, 51);
        let w = m.transpose().matmul(&m).unwrap().add(&DenseMat::identity(4)).unwrap();
        let mut r = rng(53);
        let c: Vec<f64> = (0..4).map(|_| r()).collect();
        let n = DenseMat::from_rows(&[vec![1.0], vec![-1.0], vec![2.0], vec![0.5]]);
        let (y, l) = solve_qp(&w, &c, Some(&n), &[1.0]).unwrap();
        let nty = n.transpose().matvec(&y).unwrap();
        assert!((nty[0] - 1.0).abs() < 1e-10);
        let wy = w.matvec(&y).unwrap();
        let nl = n.matvec(&l).unwrap();
        for i in 0..4 {
            assert!((wy[i] + c[i] - nl[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_via_r_matches_lu() {
        let i4: DenseMat<f64> = DenseMat::identity(4);
        let f = qr(&i4, QrMethod::Householder, false).unwrap();
        let x = vec![1.0f64, 2.0, 3.0, 4.0];
        let y = apply_inverse_via_r(&i4, &f.r, &x).unwrap();
        for (&yi, &xi) in y.iter().zip(&x) {
            assert!((yi - xi).abs() < 1e-14);
        }

        let (b, rhs): (DenseMat<f64>, _) = gen_test(TestKind::Binomial, 3);
        let f = qr(&b, QrMethod::Householder, false).unwrap();
        let y = apply_inverse_via_r(&b, &f.r, &rhs).unwrap();
        for yi in y.iter().copied() {
            assert!((yi - 1.0f64).abs() < 1e-10);
        }

        let a = random_mat(6, 6, 61);
        let mut r = rng(67);
        let x: Vec<f64> = (0..6).map(|_| r()).collect();
        let f = qr(&a, QrMethod::Givens, false).unwrap();
        let via_r = apply_inverse_via_r(&a, &f.r, &x).unwrap();
        let lu = factor_gauss(&a, Pivoting::Partial, LuOptions::default()).unwrap();
        let via_lu = lu.solve(&x).unwrap();
        for (p, q) in via_r.iter().zip(&via_lu) {
            assert!((p - q).abs() < 1e-9);
        }
    }
}
