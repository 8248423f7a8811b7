//! Basis-change machinery: the general modification series, the rank-one
//! closed form, column-replacement inverse updates, the Bartels-Golub
//! Hessenberg update of an LU chain, and the Saunders update that confines
//! work to a dense kernel over the spike columns of a P4-structured basis.

use crate::blockform::p4;
use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::lufact::{factor_gauss, LUFactors, LuOptions, Pivoting};
use crate::pattern::BoolPattern;
use crate::stability::{norm, vec_norm, NormReport, PNorm};

/// Truncated general modification series
/// (A + αδA)⁻¹ ≈ V + Σ_{k=1}^{kmax} (−α)^k (VδA)^k V, valid while the
/// spectral radius proxy ‖αVδA‖ stays below one.
pub fn modification_series(
    v: &DenseMat<f64>,
    da: &DenseMat<f64>,
    alpha: f64,
    k_max: usize,
) -> Result<DenseMat<f64>> {
    let n = v.rows();
    if !v.is_square() || da.rows() != n || da.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: da.rows() });
    }
    let vda = v.matmul(da)?.scale_by(alpha);
    let NormReport { value: growth, .. } = norm(&vda, PNorm::Inf);
    if growth >= 1.0 {
        return Err(Error::SeriesDiverges { norm: growth });
    }
    let mut sum = v.clone();
    let mut term = v.clone(); // (−αVδA)^k V
    for _ in 1..=k_max {
        term = vda.matmul(&term)?.scale_by(-1.0);
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// Rank-one closed form: (A + α·u·wᵗ)⁻¹ = V + β·V u wᵗ V with
/// β = −(α⁻¹ + wᵗVu)⁻¹.
pub fn sherman_morrison(
    v: &DenseMat<f64>,
    u: &[f64],
    w: &[f64],
    alpha: f64,
) -> Result<DenseMat<f64>> {
    let n = v.rows();
    if u.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.len() });
    }
    let vu = v.matvec(u)?;
    let wtv: Vec<f64> = (1..=n)
        .map(|j| (1..=n).map(|i| w[i - 1] * v.get(i, j)).sum())
        .collect();
    let wtvu: f64 = w.iter().zip(&vu).map(|(a, b)| a * b).sum();
    let denom = alpha.recip() + wtvu;
    if denom.abs() < 1e-300 || !denom.is_finite() {
        return Err(Error::SingularUpdate);
    }
    let beta = -denom.recip();
    let mut out = v.clone();
    for i in 1..=n {
        for j in 1..=n {
            let val = out.get(i, j) + beta * vu[i - 1] * wtv[j - 1];
            out.set(i, j, val);
        }
    }
    Ok(out)
}

/// Column replacement as the rank-one special case w = Iⱼ:
/// Â = A + (a − Aʲ)·Iⱼᵗ, β = −(Vⱼ·a)⁻¹.
pub fn replace_column_inverse(
    v: &DenseMat<f64>,
    a_col: &[f64],
    j: usize,
    tol: f64,
) -> Result<DenseMat<f64>> {
    let n = v.rows();
    if a_col.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a_col.len() });
    }
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    // V_j · a decides nonsingularity of the new basis
    let vja: f64 = (1..=n).map(|k| v.get(j, k) * a_col[k - 1]).sum();
    if vja.abs() <= tol {
        return Err(Error::SingularUpdate);
    }
    let va = v.matvec(a_col)?;
    let beta = -vja.recip();
    let mut out = v.clone();
    for i in 1..=n {
        let coef = if i == j { va[i - 1] - 1.0 } else { va[i - 1] };
        for col in 1..=n {
            let val = out.get(i, col) + beta * coef * v.get(j, col);
            out.set(i, col, val);
        }
    }
    Ok(out)
}

/// One elementary transform of an update chain, addressed by stable row
/// identifiers so the record stays valid across later permutations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElimOp {
    pub target: usize,
    pub pivot: usize,
    pub mult: f64,
}

/// Bartels-Golub updatable LU: the leaving column is cycled to the back,
/// the resulting Hessenberg matrix is reduced by one multiplier per stage
/// with adjacent-row partial pivoting, and every transform is logged.
#[derive(Debug)]
pub struct BgBasis {
    n: usize,
    base: LUFactors<f64>,
    /// current upper factor, rows in "row id" order in `row_order`
    u: DenseMat<f64>,
    /// row id at each current position
    row_order: Vec<usize>,
    /// logged eliminations applied after the base transform
    log: Vec<ElimOp>,
    /// basis column slot at each current U column position
    slot_at: Vec<usize>,
    /// current basis columns, by slot
    cols: Vec<Vec<f64>>,
    pub update_count: usize,
    tol: f64,
}

impl BgBasis {
    pub fn new(a: &DenseMat<f64>) -> Result<Self> {
        let n = a.rows();
        let base = factor_gauss(a, Pivoting::Partial, LuOptions::default())?;
        let u = base.upper();
        Ok(BgBasis {
            n,
            u,
            base,
            row_order: (1..=n).collect(),
            log: Vec::new(),
            slot_at: (1..=n).collect(),
            cols: (1..=n).map(|j| a.col(j)).collect(),
            update_count: 0,
            tol: 1e-12 * a.max_abs().max(1.0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log(&self) -> &[ElimOp] {
        &self.log
    }

    /// Current basis matrix (columns in slot order).
    pub fn current_matrix(&self) -> DenseMat<f64> {
        let mut a = DenseMat::zeros(self.n, self.n);
        for (s, col) in self.cols.iter().enumerate() {
            a.set_col(s + 1, col);
        }
        a
    }

    /// The base forward transform plus the logged update chain, by row id.
    fn transform(&self, b: &[f64]) -> Vec<f64> {
        let mut c = self.base.row_perm().permute_vec(b);
        let packed = self.base.packed();
        for k in 1..self.n {
            for i in k + 1..=self.n {
                let m = packed.get(i, k);
                if m != 0.0 {
                    c[i - 1] -= m * c[k - 1];
                }
            }
        }
        for op in &self.log {
            c[op.target - 1] -= op.mult * c[op.pivot - 1];
        }
        c
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let c = self.transform(b);
        // back-substitute over current positions
        let mut y = vec![0.0f64; self.n];
        for pos in (1..=self.n).rev() {
            let rid = self.row_order[pos - 1];
            let mut s = c[rid - 1];
            for j in pos + 1..=self.n {
                s -= self.u.get(pos, j) * y[j - 1];
            }
            let d = self.u.get(pos, pos);
            if d.abs() <= self.tol {
                return Err(Error::Singular { stage: pos });
            }
            y[pos - 1] = s / d;
        }
        // positions back to slots
        let mut x = vec![0.0f64; self.n];
        for pos in 1..=self.n {
            x[self.slot_at[pos - 1] - 1] = y[pos - 1];
        }
        Ok(x)
    }

    /// Replaces the basis column in `slot` with `a_col`: cyclic column
    /// shift, then the Hessenberg sweep (at most one adjacent swap and one
    /// multiplier per stage).
    pub fn update(&mut self, a_col: &[f64], slot: usize) -> Result<()> {
        if a_col.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a_col.len() });
        }
        let pos = self
            .slot_at
            .iter()
            .position(|&s| s == slot)
            .ok_or(Error::IndexOutOfRange { index: slot, bound: self.n })?
            + 1;
        let ta_by_id = self.transform(a_col);
        // spike column in current position order
        let ta: Vec<f64> = self.row_order.iter().map(|&rid| ta_by_id[rid - 1]).collect();

        // shift columns left over [pos..n), append Ta
        for j in pos..self.n {
            for i in 1..=self.n {
                let v = self.u.get(i, j + 1);
                self.u.set(i, j, v);
            }
        }
        self.u.set_col(self.n, &ta);
        self.slot_at.remove(pos - 1);
        self.slot_at.push(slot);

        // Hessenberg sweep over stages pos..n-1
        for j in pos..self.n {
            let (d, sub) = (self.u.get(j, j), self.u.get(j + 1, j));
            if sub.abs() > d.abs() {
                // adjacent-row swap keeps every multiplier at magnitude <= 1
                for col in 1..=self.n {
                    let (x, y) = (self.u.get(j, col), self.u.get(j + 1, col));
                    self.u.set(j, col, y);
                    self.u.set(j + 1, col, x);
                }
                self.row_order.swap(j - 1, j);
            }
            let d = self.u.get(j, j);
            if d.abs() <= self.tol {
                return Err(Error::SingularUpdate);
            }
            let m = self.u.get(j + 1, j) / d;
            if m != 0.0 {
                self.log.push(ElimOp {
                    target: self.row_order[j],
                    pivot: self.row_order[j - 1],
                    mult: m,
                });
                for col in j..=self.n {
                    let v = self.u.get(j + 1, col) - m * self.u.get(j, col);
                    self.u.set(j + 1, col, v);
                }
            }
            self.u.set(j + 1, j, 0.0);
        }
        if self.u.get(self.n, self.n).abs() <= self.tol {
            return Err(Error::SingularUpdate);
        }
        self.cols[slot - 1] = a_col.to_vec();
        self.update_count += 1;
        Ok(())
    }

    /// Discards the chain and refactors the current column set.
    pub fn reinvert(&mut self) -> Result<()> {
        *self = Self::new(&self.current_matrix())?;
        Ok(())
    }
}

/// Saunders updatable basis: a P4-structured factorization with the spike
/// columns segregated last; updates touch only the dense kernel, whose
/// dimension grows exactly when an original triangular column leaves.
#[derive(Debug)]
pub struct SaundersBasis {
    n: usize,
    base: LUFactors<f64>,
    /// diagonal of the triangular (non-spike) part, by D-position
    d: Vec<f64>,
    /// rows of the E block: for each D-position, entries over kernel cols
    e: Vec<Vec<f64>>,
    /// dense kernel, upper triangular between updates
    kernel: DenseMat<f64>,
    /// row ids (base factorization positions) of D rows / kernel rows
    d_rows: Vec<usize>,
    kernel_rows: Vec<usize>,
    /// basis column slots of D columns / kernel columns
    d_slots: Vec<usize>,
    kernel_slots: Vec<usize>,
    log: Vec<ElimOp>,
    cols: Vec<Vec<f64>>,
    pub update_count: usize,
    /// occupancy of the spliced kernel before its re-triangularization;
    /// the fill of the last update stayed inside this block
    pub last_spliced_pattern: Vec<Vec<bool>>,
    /// row permutation applied before the base transform when the basis
    /// was structured by an internal P4 run
    row_source: Option<crate::perm::Permutation>,
    tol: f64,
}

impl SaundersBasis {
    /// Builds from the basis columns: P4 structures the pattern, Gauss
    /// without row pivoting factors it, and the spikes move to the back.
    pub fn new(a: &DenseMat<f64>) -> Result<Self> {
        let n = a.rows();
        let bt = p4(&BoolPattern::from_dense(a))?;
        // permuted matrix in the P4 arrangement
        let mut pa = DenseMat::zeros(n, n);
        for i in 1..=n {
            for j in 1..=n {
                pa.set(i, j, a.get(bt.row_perm.image(i), bt.col_perm.image(j)));
            }
        }
        let mut basis = Self::from_structured(&pa)?;
        // translate slots and columns back to the caller's coordinates
        basis.d_slots = basis.d_slots.iter().map(|&p| bt.col_perm.image(p)).collect();
        basis.kernel_slots = basis.kernel_slots.iter().map(|&p| bt.col_perm.image(p)).collect();
        basis.cols = (1..=n).map(|j| a.col(j)).collect();
        basis.row_source = Some(bt.row_perm);
        Ok(basis)
    }

    /// Builds from an ALREADY P4-structured matrix (spikes are the columns
    /// with entries above the diagonal); no row pivoting is performed.
    pub fn from_structured(a: &DenseMat<f64>) -> Result<Self> {
        let n = a.rows();
        let base = factor_gauss(a, Pivoting::None, LuOptions::default())?;
        let u = base.upper();
        // spikes: columns with stored U entries above the diagonal
        let spike_pos: Vec<usize> = (1..=n)
            .filter(|&j| (1..j).any(|i| u.get(i, j) != 0.0))
            .collect();
        let d_pos: Vec<usize> = (1..=n).filter(|p| !spike_pos.contains(p)).collect();
        let d: Vec<f64> = d_pos.iter().map(|&p| u.get(p, p)).collect();
        let e: Vec<Vec<f64>> = d_pos
            .iter()
            .map(|&p| spike_pos.iter().map(|&q| u.get(p, q)).collect())
            .collect();
        let c = spike_pos.len();
        let mut kernel = DenseMat::zeros(c.max(1), c.max(1));
        for (ki, &p) in spike_pos.iter().enumerate() {
            for (kj, &q) in spike_pos.iter().enumerate() {
                kernel.set(ki + 1, kj + 1, u.get(p, q));
            }
        }
        Ok(SaundersBasis {
            n,
            base,
            d,
            e,
            kernel,
            d_rows: d_pos.clone(),
            kernel_rows: spike_pos.clone(),
            d_slots: d_pos,
            kernel_slots: spike_pos,
            log: Vec::new(),
            cols: (1..=n).map(|j| a.col(j)).collect(),
            update_count: 0,
            last_spliced_pattern: Vec::new(),
            row_source: None,
            tol: 1e-12 * a.max_abs().max(1.0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_slots.len()
    }

    /// True while the slot still holds an original triangular column (its
    /// departure will grow the kernel by one).
    pub fn is_triangular_slot(&self, slot: usize) -> bool {
        self.d_slots.contains(&slot)
    }

    pub fn current_matrix(&self) -> DenseMat<f64> {
        let mut a = DenseMat::zeros(self.n, self.n);
        for (s, col) in self.cols.iter().enumerate() {
            a.set_col(s + 1, col);
        }
        a
    }

    /// Kernel occupancy pattern (true at stored positions), in the current
    /// kernel row/column arrangement.
    pub fn kernel_pattern(&self, tol: f64) -> Vec<Vec<bool>> {
        let c = self.kernel_dim();
        (1..=c)
            .map(|i| (1..=c).map(|j| self.kernel.get(i, j).abs() > tol).collect())
            .collect()
    }

    /// Base forward transform (rows are never pivoted in the base) plus the
    /// logged kernel eliminations, addressed by row id.
    fn transform(&self, b_permuted: &[f64]) -> Vec<f64> {
        let mut c = b_permuted.to_vec();
        let packed = self.base.packed();
        for k in 1..self.n {
            for i in k + 1..=self.n {
                let m = packed.get(i, k);
                if m != 0.0 {
                    c[i - 1] -= m * c[k - 1];
                }
            }
        }
        for op in &self.log {
            c[op.target - 1] -= op.mult * c[op.pivot - 1];
        }
        c
    }

    fn row_permute(&self, b: &[f64]) -> Vec<f64> {
        match &self.row_source {
            Some(p) => p.permute_vec(b),
            None => b.to_vec(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let c = self.transform(&self.row_permute(b));
        let cdim = self.kernel_dim();
        // kernel back-substitution
        let mut xk = vec![0.0f64; cdim];
        for i in (1..=cdim).rev() {
            let rid = self.kernel_rows[i - 1];
            let mut s = c[rid - 1];
            for j in i + 1..=cdim {
                s -= self.kernel.get(i, j) * xk[j - 1];
            }
            let dia = self.kernel.get(i, i);
            if dia.abs() <= self.tol {
                return Err(Error::Singular { stage: i });
            }
            xk[i - 1] = s / dia;
        }
        // diagonal part
        let mut x = vec![0.0f64; self.n];
        for (i, &rid) in self.d_rows.iter().enumerate() {
            let mut s = c[rid - 1];
            for (j, &ev) in self.e[i].iter().enumerate() {
                s -= ev * xk[j];
            }
            if self.d[i].abs() <= self.tol {
                return Err(Error::Singular { stage: i });
            }
            x[self.d_slots[i] - 1] = s / self.d[i];
        }
        for (j, &slot) in self.kernel_slots.iter().enumerate() {
            x[slot - 1] = xk[j];
        }
        Ok(x)
    }

    /// Replaces the basis column in `slot`. The kernel dimension grows by
    /// one exactly when the leaving column still sat in the triangular
    /// part; spikes and previously replaced columns keep it constant.
    pub fn update(&mut self, a_col: &[f64], slot: usize) -> Result<()> {
        if a_col.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a_col.len() });
        }
        let w_by_id = self.transform(&self.row_permute(a_col));
        if let Some(di) = self.d_slots.iter().position(|&s| s == slot) {
            // the leaving column was an original triangular column: its row
            // joins the kernel, which grows by one
            let row_id = self.d_rows.remove(di);
            self.d.remove(di);
            let e_row = self.e.remove(di);
            self.d_slots.remove(di);
            let c = self.kernel_dim();
            let mut grown = DenseMat::zeros(c + 1, c + 1);
            for i in 1..=c {
                for j in 1..=c {
                    grown.set(i, j, self.kernel.get(i, j));
                }
            }
            for (j, &v) in e_row.iter().enumerate() {
                grown.set(c + 1, j + 1, v);
            }
            for (i, &rid) in self.kernel_rows.iter().enumerate() {
                grown.set(i + 1, c + 1, w_by_id[rid - 1]);
            }
            grown.set(c + 1, c + 1, w_by_id[row_id - 1]);
            self.kernel = grown;
            self.kernel_rows.push(row_id);
            self.kernel_slots.push(slot);
            // the entering column's entries over the remaining D rows extend E
            for i in 0..self.d_rows.len() {
                let rid = self.d_rows[i];
                self.e[i].push(w_by_id[rid - 1]);
            }
        } else {
            // leaving from the kernel: dimension constant
            let ki = self
                .kernel_slots
                .iter()
                .position(|&s| s == slot)
                .ok_or(Error::IndexOutOfRange { index: slot, bound: self.n })?;
            let c = self.kernel_dim();
            // rows: ki-th moves to the back; cols: ki-th removed, w appended
            let mut row_map: Vec<usize> = (1..=c).filter(|&i| i != ki + 1).collect();
            row_map.push(ki + 1);
            let col_keep: Vec<usize> = (1..=c).filter(|&j| j != ki + 1).collect();
            let mut next = DenseMat::zeros(c.max(1), c.max(1));
            for (inew, &iold) in row_map.iter().enumerate() {
                for (jnew, &jold) in col_keep.iter().enumerate() {
                    next.set(inew + 1, jnew + 1, self.kernel.get(iold, jold));
                }
            }
            let new_rows: Vec<usize> =
                row_map.iter().map(|&iold| self.kernel_rows[iold - 1]).collect();
            for (i, &rid) in new_rows.iter().enumerate() {
                next.set(i + 1, c, w_by_id[rid - 1]);
            }
            self.kernel = next;
            self.kernel_rows = new_rows;
            self.kernel_slots.remove(ki);
            self.kernel_slots.push(slot);
            for i in 0..self.d_rows.len() {
                let rid = self.d_rows[i];
                self.e[i].remove(ki);
                self.e[i].push(w_by_id[rid - 1]);
            }
        }
        let c = self.kernel_dim();
        self.last_spliced_pattern = (1..=c)
            .map(|i| (1..=c).map(|j| self.kernel.get(i, j).abs() > self.tol).collect())
            .collect();
        self.retriangularize()?;
        self.cols[slot - 1] = a_col.to_vec();
        self.update_count += 1;
        Ok(())
    }

    /// Gaussian pass with partial pivoting restricted to kernel rows,
    /// logging the eliminations against stable row ids.
    fn retriangularize(&mut self) -> Result<()> {
        let c = self.kernel_dim();
        for j in 1..=c {
            // pivot search below and on the diagonal
            let mut best = j;
            for i in j + 1..=c {
                if self.kernel.get(i, j).abs() > self.kernel.get(best, j).abs() {
                    best = i;
                }
            }
            if best != j {
                for col in 1..=c {
                    let (x, y) = (self.kernel.get(j, col), self.kernel.get(best, col));
                    self.kernel.set(j, col, y);
                    self.kernel.set(best, col, x);
                }
                self.kernel_rows.swap(j - 1, best - 1);
            }
            let d = self.kernel.get(j, j);
            if d.abs() <= self.tol {
                return Err(Error::SingularUpdate);
            }
            for i in j + 1..=c {
                let m = self.kernel.get(i, j) / d;
                if m != 0.0 {
                    self.log.push(ElimOp {
                        target: self.kernel_rows[i - 1],
                        pivot: self.kernel_rows[j - 1],
                        mult: m,
                    });
                    for col in j..=c {
                        let v = self.kernel.get(i, col) - m * self.kernel.get(j, col);
                        self.kernel.set(i, col, v);
                    }
                    self.kernel.set(i, j, 0.0);
                }
            }
        }
        Ok(())
    }

    /// Re-runs P4 and the factorization on the current column set.
    pub fn reinvert(&mut self) -> Result<()> {
        *self = Self::new(&self.current_matrix())?;
        Ok(())
    }
}

/// Reinversion policy for the wrapper: refresh after a fixed number of
/// updates or when a probe residual degrades.
#[derive(Debug, Clone, Copy)]
pub struct ReinvertPolicy {
    pub max_updates: usize,
    pub residual_limit: f64,
}

impl Default for ReinvertPolicy {
    fn default() -> Self {
        ReinvertPolicy { max_updates: 50, residual_limit: 1e-6 }
    }
}

/// The three interchangeable update backends behind one replace/solve
/// surface.
pub enum UpdatableBasis {
    Explicit { v: DenseMat<f64>, cols: Vec<Vec<f64>>, count: usize, policy: ReinvertPolicy },
    BartelsGolub { basis: BgBasis, policy: ReinvertPolicy },
    Saunders { basis: SaundersBasis, policy: ReinvertPolicy },
}

impl UpdatableBasis {
    pub fn explicit(a: &DenseMat<f64>, policy: ReinvertPolicy) -> Result<Self> {
        Ok(UpdatableBasis::Explicit {
            v: crate::stability::inverse(a)?,
            cols: (1..=a.cols()).map(|j| a.col(j)).collect(),
            count: 0,
            policy,
        })
    }

    pub fn bartels_golub(a: &DenseMat<f64>, policy: ReinvertPolicy) -> Result<Self> {
        Ok(UpdatableBasis::BartelsGolub { basis: BgBasis::new(a)?, policy })
    }

    pub fn saunders(a: &DenseMat<f64>, policy: ReinvertPolicy) -> Result<Self> {
        Ok(UpdatableBasis::Saunders { basis: SaundersBasis::new(a)?, policy })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            UpdatableBasis::Explicit { v, .. } => v.matvec(b),
            UpdatableBasis::BartelsGolub { basis, .. } => basis.solve(b),
            UpdatableBasis::Saunders { basis, .. } => basis.solve(b),
        }
    }

    pub fn update_count(&self) -> usize {
        match self {
            UpdatableBasis::Explicit { count, .. } => *count,
            UpdatableBasis::BartelsGolub { basis, .. } => basis.update_count,
            UpdatableBasis::Saunders { basis, .. } => basis.update_count,
        }
    }

    pub fn current_matrix(&self) -> DenseMat<f64> {
        match self {
            UpdatableBasis::Explicit { cols, .. } => {
                let n = cols.len();
                let mut a = DenseMat::zeros(n, n);
                for (s, col) in cols.iter().enumerate() {
                    a.set_col(s + 1, col);
                }
                a
            }
            UpdatableBasis::BartelsGolub { basis, .. } => basis.current_matrix(),
            UpdatableBasis::Saunders { basis, .. } => basis.current_matrix(),
        }
    }

    pub fn reinvert(&mut self) -> Result<()> {
        match self {
            UpdatableBasis::Explicit { v, cols, count, .. } => {
                let n = cols.len();
                let mut a = DenseMat::zeros(n, n);
                for (s, col) in cols.iter().enumerate() {
                    a.set_col(s + 1, col);
                }
                *v = crate::stability::inverse(&a)?;
                *count = 0;
                Ok(())
            }
            UpdatableBasis::BartelsGolub { basis, .. } => basis.reinvert(),
            UpdatableBasis::Saunders { basis, .. } => basis.reinvert(),
        }
    }

    /// Replaces one column, applying the reinversion policy afterwards
    /// (fixed update budget, or a degraded probe residual).
    pub fn replace_column(&mut self, slot: usize, a_col: &[f64]) -> Result<()> {
        match self {
            UpdatableBasis::Explicit { v, cols, count, .. } => {
                *v = replace_column_inverse(v, a_col, slot, 1e-300)?;
                cols[slot - 1] = a_col.to_vec();
                *count += 1;
            }
            UpdatableBasis::BartelsGolub { basis, .. } => basis.update(a_col, slot)?,
            UpdatableBasis::Saunders { basis, .. } => {
                if basis.update(a_col, slot).is_err() {
                    // rejected kernel pivot: fall back to reinversion with
                    // the new column in place
                    let mut cols = basis.cols.clone();
                    cols[slot - 1] = a_col.to_vec();
                    let n = basis.n;
                    let mut a = DenseMat::zeros(n, n);
                    for (s, col) in cols.iter().enumerate() {
                        a.set_col(s + 1, col);
                    }
                    *basis = SaundersBasis::new(&a)?;
                }
            }
        }
        let policy = match self {
            UpdatableBasis::Explicit { policy, .. } => *policy,
            UpdatableBasis::BartelsGolub { policy, .. } => *policy,
            UpdatableBasis::Saunders { policy, .. } => *policy,
        };
        if self.update_count() >= policy.max_updates {
            self.reinvert()?;
        } else {
            // probe residual against the current columns
            let a = self.current_matrix();
            let ones = vec![1.0; a.rows()];
            let b = a.matvec(&ones)?;
            if let Ok(x) = self.solve(&b) {
                let ax = a.matvec(&x)?;
                let resid: Vec<f64> =
                    ax.iter().zip(&b).map(|(l, r)| l - r).collect();
                let scale = vec_norm(&b, PNorm::Inf).max(1.0);
                if vec_norm(&resid, PNorm::Inf) / scale > policy.residual_limit {
                    self.reinvert()?;
                }
            } else {
                self.reinvert()?;
            }
        }
        Ok(())
    }
}
