//! Dense LU factorization: Gauss elimination on the (optionally augmented)
//! system, Doolittle with extended accumulation, triangular solves in both
//! access orders, and instrumented operation counts.

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Real;

/// Pivot selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivoting {
    None,
    Partial,
    Total,
}

/// Triangular-solve access order (substitution walks rows, the
/// inverse-multiplication form walks columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    ByRow,
    ByCol,
}

/// Operation counts for one factorization. Multiply-subtract pairs follow
/// the augmented-tableau counting: each eliminated row is updated over
/// columns k..n plus the right-hand side column when one is carried, so a
/// dense n-system factored with its rhs costs exactly
/// `n(n²-1)/3 + n(n-1)/2` multiply-subtracts and `n(n-1)/2` divisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounts {
    pub divisions: u64,
    pub mult_subs: u64,
}

impl FlopCounts {
    /// The dense no-exploitable-zeros reference values.
    pub fn dense_reference(n: u64, with_rhs: bool) -> FlopCounts {
        let divisions = n * (n - 1) / 2;
        let mult_subs = n * (n * n - 1) / 3 + if with_rhs { n * (n - 1) / 2 } else { 0 };
        FlopCounts { divisions, mult_subs }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LuOptions<T> {
    /// A pivot is singular when its magnitude falls below
    /// `pivot_eps * max|A|`.
    pub pivot_eps: T,
}

impl<T: Real> Default for LuOptions<T> {
    fn default() -> Self {
        LuOptions { pivot_eps: T::DEFAULT_PIVOT_EPS }
    }
}

/// Packed factorization `M + U`: multipliers strictly below the diagonal,
/// the upper factor on and above it, rows in pivot order. `L = M + I` and
/// `P·A·Q = L·U` (Q only under total pivoting). Multipliers are permuted
/// along with their rows (the permuted-index convention); see
/// [`LUFactors::pivot_vector_form`] for the unpermuted record.
#[derive(Debug, Clone)]
pub struct LUFactors<T> {
    packed: DenseMat<T>,
    row_perm: Permutation,
    col_perm: Option<Permutation>,
    pub mode: Pivoting,
    pub flops: FlopCounts,
    /// max |U_i^j| over the final factor (the Wilkinson growth factor g).
    pub growth: T,
    /// max |ᵏA_i^j| over all intermediate tableaux (the Gauss-variant h).
    pub growth_intermediate: T,
    tol: T,
}

impl<T: Real> LUFactors<T> {
    pub fn n(&self) -> usize {
        self.packed.rows()
    }

    pub fn packed(&self) -> &DenseMat<T> {
        &self.packed
    }

    pub fn row_perm(&self) -> &Permutation {
        &self.row_perm
    }

    pub fn col_perm(&self) -> Option<&Permutation> {
        self.col_perm.as_ref()
    }

    /// Unit lower factor L = M + I.
    pub fn lower(&self) -> DenseMat<T> {
        let n = self.n();
        let mut l = DenseMat::identity(n);
        for i in 2..=n {
            for j in 1..i {
                l.set(i, j, self.packed.get(i, j));
            }
        }
        l
    }

    /// Upper factor U.
    pub fn upper(&self) -> DenseMat<T> {
        let n = self.n();
        let mut u = DenseMat::zeros(n, n);
        for i in 1..=n {
            for j in i..=n {
                u.set(i, j, self.packed.get(i, j));
            }
        }
        u
    }

    /// Applies the recorded permutation and eliminations to a fresh
    /// right-hand side (the forward pass), then back-substitutes.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut c = self.row_perm.permute_vec(b);
        for k in 1..n {
            for i in k + 1..=n {
                let m = self.packed.get(i, k);
                if !m.is_zero() {
                    c[i - 1] = c[i - 1] - m * c[k - 1];
                }
            }
        }
        let y = solve_upper_packed(&self.packed, &c, self.tol)?;
        Ok(match &self.col_perm {
            None => y,
            Some(q) => {
                let mut x = vec![T::zero(); n];
                for j in 1..=n {
                    x[q.image(j) - 1] = y[j - 1];
                }
                x
            }
        })
    }

    /// The alternative record of pivoting: the stage transposition vector
    /// `t` together with the multipliers kept in their original, unpermuted
    /// rows. Solving through this form reproduces [`solve`] exactly.
    pub fn pivot_vector_form(&self) -> PivotVectorForm<T> {
        let n = self.n();
        let mut unpermuted = DenseMat::zeros(n, n);
        for i in 1..=n {
            let orig = self.row_perm.image(i);
            for j in 1..=n {
                unpermuted.set(orig, j, self.packed.get(i, j));
            }
        }
        PivotVectorForm {
            t: self.row_perm.to_transposition_seq(),
            packed_unpermuted: unpermuted,
            row_perm: self.row_perm.clone(),
            col_perm: self.col_perm.clone(),
            tol: self.tol,
        }
    }
}

/// Obs.-2.4 style record: multipliers NOT permuted along pivoting; row `r`
/// of `packed_unpermuted` holds exactly the multipliers computed for the
/// original row `r` plus the U row produced at its pivot stage.
#[derive(Debug, Clone)]
pub struct PivotVectorForm<T> {
    pub t: Vec<usize>,
    pub packed_unpermuted: DenseMat<T>,
    row_perm: Permutation,
    col_perm: Option<Permutation>,
    tol: T,
}

impl<T: Real> PivotVectorForm<T> {
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.t.len();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        // work on b in original order, addressing rows through the pivot map
        let mut c = b.to_vec();
        let p = &self.row_perm;
        for k in 1..n {
            let pivot_row = p.image(k);
            for i in k + 1..=n {
                let row = p.image(i);
                let m = self.packed_unpermuted.get(row, k);
                if !m.is_zero() {
                    c[row - 1] = c[row - 1] - m * c[pivot_row - 1];
                }
            }
        }
        // gather into pivot order and back-substitute
        let cp: Vec<T> = (1..=n).map(|i| c[p.image(i) - 1]).collect();
        let mut u = DenseMat::zeros(n, n);
        for i in 1..=n {
            for j in i..=n {
                u.set(i, j, self.packed_unpermuted.get(p.image(i), j));
            }
        }
        let y = solve_upper_packed(&u, &cp, self.tol)?;
        Ok(match &self.col_perm {
            None => y,
            Some(q) => {
                let mut x = vec![T::zero(); n];
                for j in 1..=n {
                    x[q.image(j) - 1] = y[j - 1];
                }
                x
            }
        })
    }
}

fn solve_upper_packed<T: Real>(packed: &DenseMat<T>, c: &[T], tol: T) -> Result<Vec<T>> {
    let n = packed.rows();
    let mut x = c.to_vec();
    for i in (1..=n).rev() {
        let mut s = x[i - 1];
        for j in i + 1..=n {
            s = s - packed.get(i, j) * x[j - 1];
        }
        let d = packed.get(i, i);
        if d.abs() <= tol {
            return Err(Error::Singular { stage: i });
        }
        x[i - 1] = s / d;
    }
    Ok(x)
}

/// Gauss elimination. With `rhs` present the augmented tableau `[A b]` is
/// reduced and the transformed right-hand side is returned alongside.
pub fn factor_gauss_system<T: Real>(
    a: &DenseMat<T>,
    rhs: Option<&[T]>,
    pivoting: Pivoting,
    opts: LuOptions<T>,
) -> Result<(LUFactors<T>, Option<Vec<T>>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    let mut packed = a.clone();
    let mut b = rhs.map(|r| {
        assert_eq!(r.len(), n, "rhs length must match");
        r.to_vec()
    });
    let mut p: Vec<usize> = (1..=n).collect();
    let mut q: Vec<usize> = (1..=n).collect();
    let scale = a.max_abs();
    let tol = opts.pivot_eps * if scale.is_zero() { T::one() } else { scale };
    let mut flops = FlopCounts::default();
    let mut growth_inter = scale;

    for k in 1..=n {
        // pivot selection over the active block
        let (pi, pj) = match pivoting {
            Pivoting::None => (k, k),
            Pivoting::Partial => {
                let mut best = k;
                for i in k + 1..=n {
                    if packed.get(i, k).abs() > packed.get(best, k).abs() {
                        best = i;
                    }
                }
                (best, k)
            }
            Pivoting::Total => {
                let (mut bi, mut bj) = (k, k);
                for i in k..=n {
                    for j in k..=n {
                        if packed.get(i, j).abs() > packed.get(bi, bj).abs() {
                            (bi, bj) = (i, j);
                        }
                    }
                }
                (bi, bj)
            }
        };
        if packed.get(pi, pj).abs() <= tol {
            return Err(Error::Singular { stage: k });
        }
        if pi != k {
            for j in 1..=n {
                let (x, y) = (packed.get(k, j), packed.get(pi, j));
                packed.set(k, j, y);
                packed.set(pi, j, x);
            }
            p.swap(k - 1, pi - 1);
            if let Some(b) = b.as_mut() {
                b.swap(k - 1, pi - 1);
            }
        }
        if pj != k {
            for i in 1..=n {
                let (x, y) = (packed.get(i, k), packed.get(i, pj));
                packed.set(i, k, y);
                packed.set(i, pj, x);
            }
            q.swap(k - 1, pj - 1);
        }
        if k == n {
            break;
        }
        let pivot = packed.get(k, k);
        for i in k + 1..=n {
            let aik = packed.get(i, k);
            if aik.is_zero() {
                continue;
            }
            let m = aik / pivot;
            flops.divisions += 1;
            packed.set(i, k, m);
            // the eliminated position itself counts as one update
            flops.mult_subs += 1;
            for j in k + 1..=n {
                let v = packed.get(i, j) - m * packed.get(k, j);
                packed.set(i, j, v);
                flops.mult_subs += 1;
                if v.abs() > growth_inter {
                    growth_inter = v.abs();
                }
            }
            if let Some(b) = b.as_mut() {
                b[i - 1] = b[i - 1] - m * b[k - 1];
                flops.mult_subs += 1;
            }
        }
    }

    let mut growth = T::zero();
    for i in 1..=n {
        for j in i..=n {
            let v = packed.get(i, j).abs();
            if v > growth {
                growth = v;
            }
        }
    }
    let factors = LUFactors {
        packed,
        row_perm: Permutation::from_image(p).expect("pivot bookkeeping is a bijection"),
        col_perm: if pivoting == Pivoting::Total {
            Some(Permutation::from_image(q).expect("pivot bookkeeping is a bijection"))
        } else {
            None
        },
        mode: pivoting,
        flops,
        growth,
        growth_intermediate: growth_inter,
        tol,
    };
    Ok((factors, b))
}

pub fn factor_gauss<T: Real>(
    a: &DenseMat<T>,
    pivoting: Pivoting,
    opts: LuOptions<T>,
) -> Result<LUFactors<T>> {
    factor_gauss_system(a, None, pivoting, opts).map(|(f, _)| f)
}

/// One inner product accumulated with Neumaier compensation and rounded
/// once on return: `a0 - Σ m_l · u_l` in working-precision inputs.
fn compensated_residual<T: Real>(a0: T, terms: impl Iterator<Item = (T, T)>) -> T {
    let mut sum = a0;
    let mut comp = T::zero();
    for (m, u) in terms {
        let prod = -(m * u);
        let t = sum + prod;
        if sum.abs() >= prod.abs() {
            comp = comp + ((sum - t) + prod);
        } else {
            comp = comp + ((prod - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Doolittle compact factorization: each `M + U` entry is produced by one
/// long inner product in extended accumulation, rounded once. Pivot
/// candidates at stage k are the column values `v_i = A_i^k - Σ M_i^l U_l^k`.
pub fn factor_doolittle<T: Real>(
    a: &DenseMat<T>,
    pivoting: Pivoting,
    opts: LuOptions<T>,
) -> Result<LUFactors<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if pivoting == Pivoting::Total {
        return factor_doolittle_total(a, opts);
    }
    let n = a.rows();
    let mut d = a.clone();
    let mut p: Vec<usize> = (1..=n).collect();
    let scale = a.max_abs();
    let tol = opts.pivot_eps * if scale.is_zero() { T::one() } else { scale };
    let mut flops = FlopCounts::default();

    for k in 1..=n {
        // pivot candidates for column k
        let mut v = vec![T::zero(); n + 1];
        for i in k..=n {
            v[i] = compensated_residual(
                d.get(i, k),
                (1..k).map(|l| (d.get(i, l), d.get(l, k))),
            );
            flops.mult_subs += (k - 1) as u64;
        }
        let pivot_row = match pivoting {
            Pivoting::Partial => (k..=n).max_by(|&x, &y| {
                v[x].abs().partial_cmp(&v[y].abs()).expect("comparable pivot values")
            }),
            _ => Some(k),
        }
        .unwrap();
        if v[pivot_row].abs() <= tol {
            return Err(Error::Singular { stage: k });
        }
        if pivot_row != k {
            for j in 1..=n {
                let (x, y) = (d.get(k, j), d.get(pivot_row, j));
                d.set(k, j, y);
                d.set(pivot_row, j, x);
            }
            p.swap(k - 1, pivot_row - 1);
            v.swap(k, pivot_row);
        }
        d.set(k, k, v[k]);
        // multipliers below the diagonal
        for i in k + 1..=n {
            d.set(i, k, v[i] / v[k]);
            flops.divisions += 1;
        }
        // U row k to the right of the diagonal
        for j in k + 1..=n {
            let u = compensated_residual(
                d.get(k, j),
                (1..k).map(|l| (d.get(k, l), d.get(l, j))),
            );
            d.set(k, j, u);
            flops.mult_subs += (k - 1) as u64;
        }
    }

    let mut growth = T::zero();
    for i in 1..=n {
        for j in i..=n {
            let x = d.get(i, j).abs();
            if x > growth {
                growth = x;
            }
        }
    }
    Ok(LUFactors {
        packed: d,
        row_perm: Permutation::from_image(p).expect("pivot bookkeeping is a bijection"),
        col_perm: None,
        mode: pivoting,
        flops,
        growth,
        growth_intermediate: growth,
        tol,
    })
}

/// Total pivoting needs the whole active block at every stage, which defeats
/// the deferred-update scheme; delegate to Gauss and recompute the packed
/// entries with compensated inner products afterwards so the accumulation
/// contract still holds.
fn factor_doolittle_total<T: Real>(a: &DenseMat<T>, opts: LuOptions<T>) -> Result<LUFactors<T>> {
    let g = factor_gauss(a, Pivoting::Total, opts)?;
    let n = g.n();
    let q = g.col_perm().expect("total pivoting records a column permutation");
    let mut paq = DenseMat::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            paq.set(i, j, a.get(g.row_perm().image(i), q.image(j)));
        }
    }
    // re-run the compact scheme on the fixed pivot order
    let mut d = paq.clone();
    for k in 1..=n {
        let vkk = compensated_residual(d.get(k, k), (1..k).map(|l| (d.get(k, l), d.get(l, k))));
        d.set(k, k, vkk);
        for i in k + 1..=n {
            let v = compensated_residual(d.get(i, k), (1..k).map(|l| (d.get(i, l), d.get(l, k))));
            d.set(i, k, v / vkk);
        }
        for j in k + 1..=n {
            let u = compensated_residual(d.get(k, j), (1..k).map(|l| (d.get(k, l), d.get(l, j))));
            d.set(k, j, u);
        }
    }
    Ok(LUFactors { packed: d, ..g })
}

/// Solves `U x = b` for upper-triangular `U`, walking either rows
/// (substitution) or columns (inverse multiplication).
pub fn solve_upper<T: Real>(u: &DenseMat<T>, b: &[T], access: Access) -> Result<Vec<T>> {
    let n = u.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    for i in 1..=n {
        if u.get(i, i).is_zero() {
            return Err(Error::Singular { stage: i });
        }
    }
    let mut x = b.to_vec();
    match access {
        Access::ByRow => {
            x[n - 1] = x[n - 1] / u.get(n, n);
            for i in (1..n).rev() {
                let mut s = x[i - 1];
                for j in i + 1..=n {
                    s = s - u.get(i, j) * x[j - 1];
                }
                x[i - 1] = s / u.get(i, i);
            }
        }
        Access::ByCol => {
            for j in (2..=n).rev() {
                x[j - 1] = x[j - 1] / u.get(j, j);
                let xj = x[j - 1];
                for i in 1..j {
                    x[i - 1] = x[i - 1] - xj * u.get(i, j);
                }
            }
            x[0] = x[0] / u.get(1, 1);
        }
    }
    Ok(x)
}

/// Solves `L x = b` for lower-triangular `L` (`unit_diag` skips divisions).
pub fn solve_lower<T: Real>(
    l: &DenseMat<T>,
    b: &[T],
    access: Access,
    unit_diag: bool,
) -> Result<Vec<T>> {
    let n = l.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    if !unit_diag {
        for i in 1..=n {
            if l.get(i, i).is_zero() {
                return Err(Error::Singular { stage: i });
            }
        }
    }
    let mut x = b.to_vec();
    match access {
        Access::ByRow => {
            for i in 1..=n {
                let mut s = x[i - 1];
                for j in 1..i {
                    s = s - l.get(i, j) * x[j - 1];
                }
                x[i - 1] = if unit_diag { s } else { s / l.get(i, i) };
            }
        }
        Access::ByCol => {
            for j in 1..=n {
                if !unit_diag {
                    x[j - 1] = x[j - 1] / l.get(j, j);
                }
                let xj = x[j - 1];
                for i in j + 1..=n {
                    x[i - 1] = x[i - 1] - xj * l.get(i, j);
                }
            }
        }
    }
    Ok(x)
}

/// The factorization's recorded operation counts.
pub fn flops_report<T: Real>(f: &LUFactors<T>) -> FlopCounts {
    f.flops
}
