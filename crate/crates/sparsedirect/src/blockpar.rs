//! Block-angular machinery: the four block primitives, the blocked
//! Cholesky `bch()` with per-node cost accounting, and the blocked update
//! `bup()` cases I-V. Parallelism is a simulation: steps carry node
//! attribution, parallel groups cost their maximum, sequenced steps their
//! sum, and inter-node transfers are metered in scalars.

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column block-angular matrix: h diagonal blocks Bᵏ (m(k) × n(k)) and
/// coupling blocks Cᵏ (m(k) × l) sharing the trailing column block.
#[derive(Debug, Clone)]
pub struct BlockAngular {
    pub blocks: Vec<DenseMat<f64>>,
    pub couplings: Vec<DenseMat<f64>>,
}

impl BlockAngular {
    pub fn new(blocks: Vec<DenseMat<f64>>, couplings: Vec<DenseMat<f64>>) -> Result<Self> {
        if blocks.len() != couplings.len() || blocks.is_empty() {
            return Err(Error::Invalid("one coupling block per diagonal block".into()));
        }
        let l = couplings[0].cols();
        for (b, c) in blocks.iter().zip(&couplings) {
            if b.rows() != c.rows() || c.cols() != l {
                return Err(Error::Invalid("inconsistent block shapes".into()));
            }
        }
        Ok(BlockAngular { blocks, couplings })
    }

    pub fn h(&self) -> usize {
        self.blocks.len()
    }

    /// Residual (trailing) column count.
    pub fn l(&self) -> usize {
        self.couplings[0].cols()
    }

    pub fn m(&self, k: usize) -> usize {
        self.blocks[k - 1].rows()
    }

    pub fn n(&self, k: usize) -> usize {
        self.blocks[k - 1].cols()
    }

    /// Largest block dimension, the unit of the cost bounds.
    pub fn dbmax(&self) -> usize {
        let mut d = self.l();
        for k in 1..=self.h() {
            d = d.max(self.m(k)).max(self.n(k));
        }
        d
    }

    pub fn total_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.rows()).sum()
    }

    pub fn total_cols(&self) -> usize {
        self.blocks.iter().map(|b| b.cols()).sum::<usize>() + self.l()
    }

    /// Dense assembly with columns ordered block 1, ..., block h, residual.
    pub fn assemble(&self) -> DenseMat<f64> {
        let (m, n) = (self.total_rows(), self.total_cols());
        let mut a = DenseMat::zeros(m, n);
        let mut row0 = 0;
        let mut col0 = 0;
        for k in 0..self.h() {
            let b = &self.blocks[k];
            for i in 1..=b.rows() {
                for j in 1..=b.cols() {
                    a.set(row0 + i, col0 + j, b.get(i, j));
                }
            }
            let c = &self.couplings[k];
            let resid0 = n - self.l();
            for i in 1..=c.rows() {
                for j in 1..=c.cols() {
                    a.set(row0 + i, resid0 + j, c.get(i, j));
                }
            }
            row0 += b.rows();
            col0 += b.cols();
        }
        a
    }
}

/// The blocked upper factor: per-block triangular Vᵏ, coupling Wᵏ, and the
/// southeast triangle S, with `assemble()ᵗ · assemble() = AᵗA`.
#[derive(Debug, Clone)]
pub struct BlockedU {
    pub v: Vec<DenseMat<f64>>,
    pub w: Vec<DenseMat<f64>>,
    pub s: DenseMat<f64>,
}

impl BlockedU {
    pub fn l(&self) -> usize {
        self.s.rows()
    }

    pub fn total_cols(&self) -> usize {
        self.v.iter().map(|v| v.cols()).sum::<usize>() + self.l()
    }

    pub fn assemble(&self) -> DenseMat<f64> {
        let n = self.total_cols();
        let l = self.l();
        let mut u = DenseMat::zeros(n, n);
        let mut off = 0;
        for (v, w) in self.v.iter().zip(&self.w) {
            for i in 1..=v.rows() {
                for j in 1..=v.cols() {
                    u.set(off + i, off + j, v.get(i, j));
                }
                for j in 1..=w.cols() {
                    u.set(off + i, n - l + j, w.get(i, j));
                }
            }
            off += v.rows();
        }
        for i in 1..=l {
            for j in 1..=l {
                u.set(n - l + i, n - l + j, self.s.get(i, j));
            }
        }
        u
    }
}

/// One ledger entry. For a parallel group `ptime` is the maximum over the
/// participating nodes; transfers record both the serial volume and the
/// log(h) tree-reduction volume of the parallel-communication regime.
#[derive(Debug, Clone)]
pub struct LedgerStep {
    pub label: &'static str,
    pub ptime: u64,
    pub inc: u64,
    pub inc_parallel_comm: u64,
}

#[derive(Debug, Clone, Default)]
pub struct CostLedger {
    pub steps: Vec<LedgerStep>,
}

impl CostLedger {
    fn push(&mut self, label: &'static str, ptime: u64, inc: u64, inc_par: u64) {
        self.steps.push(LedgerStep { label, ptime, inc, inc_parallel_comm: inc_par });
    }

    pub fn ptime_total(&self) -> u64 {
        self.steps.iter().map(|s| s.ptime).sum()
    }

    pub fn inc_total(&self) -> u64 {
        self.steps.iter().map(|s| s.inc).sum()
    }

    pub fn inc_total_parallel_comm(&self) -> u64 {
        self.steps.iter().map(|s| s.inc_parallel_comm).sum()
    }

    pub fn step(&self, label: &str) -> Option<&LedgerStep> {
        self.steps.iter().find(|s| s.label == label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,ptime,inc,inc_parallel_comm\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{},{}\n", s.label, s.ptime, s.inc, s.inc_parallel_comm));
        }
        out.push_str(&format!(
            "total,{},{},{}\n",
            self.ptime_total(),
            self.inc_total(),
            self.inc_total_parallel_comm()
        ));
        out
    }
}

fn ceil_log2(h: usize) -> u64 {
    // ceil(log2 h) for h >= 1
    64 - u64::from((h.max(1) as u64 - 1).leading_zeros())
}

/// Partial Cholesky: eliminating the first n columns of [F G; Gᵗ 0] gives
/// [V W; 0 Z] with VᵗV = F, VᵗW = G and Z = −WᵗW. `flops` accumulates one
/// count per multiply-add, division or square root.
pub fn partial_cholesky<T: Real>(
    f: &DenseMat<T>,
    g: &DenseMat<T>,
    flops: &mut u64,
) -> Result<(DenseMat<T>, DenseMat<T>, DenseMat<T>)> {
    let n = f.rows();
    let l = g.cols();
    if !f.is_square() || g.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.rows() });
    }
    // upper Cholesky V with VᵗV = F; a pivot collapsing to roundoff level
    // counts as loss of positive definiteness
    let pd_tol = T::epsilon() * f.max_abs() * T::from_usize_lossy(n.max(1) * 8);
    let mut v = DenseMat::zeros(n.max(1), n.max(1));
    for j in 1..=n {
        let mut d = f.get(j, j);
        for k in 1..j {
            d = d - v.get(k, j) * v.get(k, j);
            *flops += 1;
        }
        if d <= pd_tol {
            return Err(Error::NotPositiveDefinite { index: j });
        }
        let vjj = d.sqrt();
        *flops += 1;
        v.set(j, j, vjj);
        for i in j + 1..=n {
            let mut s = f.get(j, i);
            for k in 1..j {
                s = s - v.get(k, j) * v.get(k, i);
                *flops += 1;
            }
            v.set(j, i, s / vjj);
            *flops += 1;
        }
    }
    // W = V⁻ᵗ G column by column
    let mut w = DenseMat::zeros(n.max(1), l.max(1));
    for c in 1..=l {
        for i in 1..=n {
            let mut s = g.get(i, c);
            for k in 1..i {
                s = s - v.get(k, i) * w.get(k, c);
                *flops += 1;
            }
            if n > 0 {
                w.set(i, c, s / v.get(i, i));
                *flops += 1;
            }
        }
    }
    // Z = -WᵗW
    let mut z = DenseMat::zeros(l.max(1), l.max(1));
    for i in 1..=l {
        for j in i..=l {
            let mut s = T::zero();
            for k in 1..=n {
                s = s + w.get(k, i) * w.get(k, j);
                *flops += 1;
            }
            z.set(i, j, -s);
            z.set(j, i, -s);
        }
    }
    Ok((v, w, z))
}

/// Partial inverse transform: solves [V W; 0 I]ᵗ [u1; u2] = [y1; y2], i.e.
/// u1 = V⁻ᵗ y1 and u2 = y2 − Wᵗ u1.
pub fn partial_inverse_transform<T: Real>(
    v: &DenseMat<T>,
    w: &DenseMat<T>,
    y1: &[T],
    y2: &[T],
    flops: &mut u64,
) -> Result<(Vec<T>, Vec<T>)> {
    let n = v.rows();
    if y1.len() != n || w.rows() != n || y2.len() != w.cols() {
        return Err(Error::DimensionMismatch { expected: n, found: y1.len() });
    }
    let mut u1 = vec![T::zero(); n];
    for i in 1..=n {
        let mut s = y1[i - 1];
        for k in 1..i {
            s = s - v.get(k, i) * u1[k - 1];
            *flops += 1;
        }
        let d = v.get(i, i);
        if d.is_zero() {
            return Err(Error::Singular { stage: i });
        }
        u1[i - 1] = s / d;
        *flops += 1;
    }
    let mut u2 = y2.to_vec();
    for (c, u2c) in u2.iter_mut().enumerate() {
        for k in 1..=n {
            *u2c = *u2c - w.get(k, c + 1) * u1[k - 1];
            *flops += 1;
        }
    }
    Ok((u1, u2))
}

fn givens_pair<T: Real>(a: T, b: T, flops: &mut u64) -> (T, T) {
    *flops += 5; // sqrt, two divisions, two squarings
    crate::orthosym::givens(a, b)
}

fn rotate_rows<T: Real>(
    v: &mut DenseMat<T>,
    w: Option<&mut DenseMat<T>>,
    i: usize,
    k: usize,
    c: T,
    s: T,
    from_col: usize,
    flops: &mut u64,
) {
    for j in from_col..=v.cols() {
        let (x, y) = (v.get(i, j), v.get(k, j));
        v.set(i, j, c * x + s * y);
        v.set(k, j, c * y - s * x);
        *flops += 4;
    }
    if let Some(w) = w {
        for j in 1..=w.cols() {
            let (x, y) = (w.get(i, j), w.get(k, j));
            w.set(i, j, c * x + s * y);
            w.set(k, j, c * y - s * x);
            *flops += 4;
        }
    }
}

/// Reduces an upper-Hessenberg V (subdiagonal starting at `from_col`) to
/// upper triangular with the ascending rotation sweep, carrying W along.
pub fn hessenberg_to_triangular<T: Real>(
    v: &mut DenseMat<T>,
    w: Option<&mut DenseMat<T>>,
    from_col: usize,
    flops: &mut u64,
) {
    let n = v.rows().min(v.cols());
    let mut w = w;
    for j in from_col..=n {
        if j + 1 > v.rows() {
            break;
        }
        let (a, b) = (v.get(j, j), v.get(j + 1, j));
        if b.is_zero() {
            continue;
        }
        let (c, s) = givens_pair(a, b, flops);
        rotate_rows(v, w.as_deref_mut(), j, j + 1, c, s, j, flops);
        v.set(j + 1, j, T::zero());
    }
}

/// Collapses the column u onto its first entry with the descending
/// rotation sweep, turning the upper-triangular V into Hessenberg form.
pub fn column_triangle_reduce<T: Real>(
    u: &mut [T],
    v: &mut DenseMat<T>,
    flops: &mut u64,
) {
    let n = u.len();
    for i in (1..n).rev() {
        let (a, b) = (u[i - 1], u[i]);
        if b.is_zero() {
            continue;
        }
        let (c, s) = givens_pair(a, b, flops);
        u[i - 1] = c * a + s * b;
        u[i] = T::zero();
        *flops += 4;
        // rows i, i+1 of V
        for j in 1..=v.cols() {
            let (x, y) = (v.get(i, j), v.get(i + 1, j));
            v.set(i, j, c * x + s * y);
            v.set(i + 1, j, c * y - s * x);
            *flops += 4;
        }
    }
}

/// Blocked Cholesky of AᵗA for a block-angular A, with the five-step cost
/// attribution. Parallel groups (steps 1 and 3) cost their largest node.
pub fn bch(a: &BlockAngular) -> Result<(BlockedU, CostLedger)> {
    let h = a.h();
    let l = a.l();
    let mut ledger = CostLedger::default();

    // step 1: per-node Gram pieces
    let mut btb = Vec::with_capacity(h);
    let mut btc = Vec::with_capacity(h);
    let mut ctc = Vec::with_capacity(h);
    let mut group_max = 0u64;
    for k in 1..=h {
        let mut flops = 0u64;
        let b = &a.blocks[k - 1];
        let c = &a.couplings[k - 1];
        btb.push(gram(b, b, &mut flops));
        btc.push(gram(b, c, &mut flops));
        ctc.push(gram(c, c, &mut flops));
        group_max = group_max.max(flops);
    }
    ledger.push("bch1_gram", group_max, 0, 0);

    // step 2: ship CᵏᵗCᵏ to node 0 and accumulate Z⁰
    let mut z0 = DenseMat::zeros(l.max(1), l.max(1));
    let mut acc_flops = 0u64;
    for zk in &ctc {
        for i in 1..=l {
            for j in 1..=l {
                let v = z0.get(i, j) + zk.get(i, j);
                z0.set(i, j, v);
                acc_flops += 1;
            }
        }
    }
    let vol = (h * l * l) as u64;
    ledger.push("bch2_accumulate_ctc", acc_flops, vol, ceil_log2(h).max(1) * (l * l) as u64);

    // step 3: per-node partial Cholesky
    let mut vs = Vec::with_capacity(h);
    let mut ws = Vec::with_capacity(h);
    let mut zs = Vec::with_capacity(h);
    let mut group_max = 0u64;
    for k in 1..=h {
        let mut flops = 0u64;
        let (v, w, z) = partial_cholesky(&btb[k - 1], &btc[k - 1], &mut flops)?;
        vs.push(v);
        ws.push(w);
        zs.push(z);
        group_max = group_max.max(flops);
    }
    ledger.push("bch3_partial_cholesky", group_max, 0, 0);

    // step 4: ship Zᵏ and accumulate the Schur complement
    let mut acc_flops = 0u64;
    let mut z = z0;
    for zk in &zs {
        for i in 1..=l {
            for j in 1..=l {
                let v = z.get(i, j) + zk.get(i, j);
                z.set(i, j, v);
                acc_flops += 1;
            }
        }
    }
    ledger.push("bch4_accumulate_z", acc_flops, vol, ceil_log2(h).max(1) * (l * l) as u64);

    // step 5: factor the southeast block
    let mut flops = 0u64;
    let s = upper_cholesky(&z, &mut flops)?;
    ledger.push("bch5_chol_southeast", flops, 0, 0);

    Ok((BlockedU { v: vs, w: ws, s }, ledger))
}

/// Upper Cholesky factor S with SᵗS = Z.
fn upper_cholesky(z: &DenseMat<f64>, flops: &mut u64) -> Result<DenseMat<f64>> {
    let n = z.rows();
    let pd_tol = f64::EPSILON * z.max_abs() * (n.max(1) * 8) as f64;
    let mut s = DenseMat::zeros(n.max(1), n.max(1));
    for j in 1..=n {
        let mut d = z.get(j, j);
        for k in 1..j {
            d -= s.get(k, j) * s.get(k, j);
            *flops += 1;
        }
        if d <= pd_tol {
            return Err(Error::NotPositiveDefinite { index: j });
        }
        let sjj = d.sqrt();
        *flops += 1;
        s.set(j, j, sjj);
        for i in j + 1..=n {
            let mut acc = z.get(j, i);
            for k in 1..j {
                acc -= s.get(k, j) * s.get(k, i);
                *flops += 1;
            }
            s.set(j, i, acc / sjj);
            *flops += 1;
        }
    }
    Ok(s)
}

fn gram<T: Real>(x: &DenseMat<T>, y: &DenseMat<T>, flops: &mut u64) -> DenseMat<T> {
    // XᵗY with X, Y sharing their row dimension
    let (m, p, q) = (x.rows(), x.cols(), y.cols());
    let mut out = DenseMat::zeros(p.max(1), q.max(1));
    for i in 1..=p {
        for j in 1..=q {
            let mut s = T::zero();
            for k in 1..=m {
                s = s + x.get(k, i) * y.get(k, j);
                *flops += 1;
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Wall-clock processing model of the five bch steps: the node-0
/// accumulation of step 2 overlaps the step-3 block factorizations (node 0
/// is otherwise idle), so exposed time is s1 + max(s2, s3) + s4 + s5 and
/// exposed communication is the step-4 volume.
pub fn bch_exposed(ledger: &CostLedger) -> (u64, u64) {
    let get = |l: &str| ledger.step(l).map_or(0, |s| s.ptime);
    let ptime = get("bch1_gram")
        + get("bch2_accumulate_ctc").max(get("bch3_partial_cholesky"))
        + get("bch4_accumulate_z")
        + get("bch5_chol_southeast");
    let inc = ledger.step("bch4_accumulate_z").map_or(0, |s| s.inc);
    (ptime, inc)
}

/// Theorem bound for bch: (4 + 1/3)·dbmax³ + h·dbmax² processing and
/// h·dbmax² communication.
pub fn bch_bounds(h: usize, dbmax: usize) -> (f64, f64) {
    let d = dbmax as f64;
    ((4.0 + 1.0 / 3.0) * d * d * d + h as f64 * d * d, h as f64 * d * d)
}

/// The entering column of a blocked update: either block-structured
/// (entries confined to one block's rows) or residual-structured.
#[derive(Debug, Clone)]
pub enum EnteringCol {
    Block { k: usize, values: Vec<f64> },
    Residual { per_block: Vec<Vec<f64>> },
}

/// Which of the five update cases applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BupCase {
    I,
    II,
    III,
    IV,
    V,
}

pub fn classify(h: usize, ink: usize, outk: usize) -> BupCase {
    let resid = h + 1;
    match (ink == resid, outk == resid) {
        (false, false) => {
            if ink == outk {
                BupCase::II
            } else {
                BupCase::I
            }
        }
        (false, true) => BupCase::III,
        (true, false) => BupCase::IV,
        (true, true) => BupCase::V,
    }
}

/// Teorema-style table bounds (leading terms) per case:
/// processing, communication.
pub fn bup_bounds(case: BupCase, h: usize, dbmax: usize) -> (f64, f64) {
    let d = dbmax as f64;
    match case {
        BupCase::I | BupCase::II => (12.0 * d * d, 3.0 * d),
        BupCase::III => (8.0 * d * d, 2.0 * d),
        BupCase::IV => (12.0 * d * d + h as f64 * d, h as f64 * d),
        BupCase::V => (6.0 * d * d + h as f64 * d, h as f64 * d),
    }
}

/// Blocked update of U and A: replaces column `outj` of block `outk`
/// (`outk = h+1` addresses the residual block) by the entering column,
/// re-triangularizing only the affected blocks. Returns the cost ledger.
pub fn bup(
    u: &mut BlockedU,
    a: &mut BlockAngular,
    entering: &EnteringCol,
    outk: usize,
    outj: usize,
) -> Result<CostLedger> {
    let h = a.h();
    let l = a.l();
    if a.total_rows() != a.total_cols() {
        // the Gram identity of the update needs a square basis: the
        // inserted factor column is Qᵗa, which carries all of a only when
        // the old columns span the row space
        return Err(Error::Invalid("bup needs a square (basis) block-angular matrix".into()));
    }
    let resid = h + 1;
    let ink = match entering {
        EnteringCol::Block { k, .. } => *k,
        EnteringCol::Residual { .. } => resid,
    };
    if outk < 1 || outk > resid {
        return Err(Error::IndexOutOfRange { index: outk, bound: resid });
    }
    let out_cols = if outk == resid { l } else { a.n(outk) };
    if outj < 1 || outj > out_cols {
        return Err(Error::IndexOutOfRange { index: outj, bound: out_cols });
    }
    let case = classify(h, ink, outk);
    let mut ledger = CostLedger::default();

    match case {
        BupCase::I | BupCase::II | BupCase::III => {
            let EnteringCol::Block { k, values } = entering else { unreachable!() };
            let k = *k;
            if values.len() != a.m(k) {
                return Err(Error::DimensionMismatch { expected: a.m(k), found: values.len() });
            }
            // step 1: y = Bᵏᵗa, x = Cᵏᵗa at node ink
            let mut flops = 0u64;
            let y1 = gram_vec(&a.blocks[k - 1], values, &mut flops);
            let y2 = gram_vec(&a.couplings[k - 1], values, &mut flops);
            ledger.push("bup1_gram", flops, 0, 0);

            // step 2: partial inverse transform; u1 joins Vᵏ as last column
            let mut flops = 0u64;
            let (u1, z) =
                partial_inverse_transform(&u.v[k - 1], &u.w[k - 1], &y1, &y2, &mut flops)?;
            append_col(&mut u.v[k - 1], &u1);
            ledger.push("bup2_pit", flops, 0, 0);

            // step 3: ship z to node 0
            ledger.push("bup3_send_z", 0, l as u64, l as u64);

            // step 4: u_{h+1} = S⁻ᵗ z
            let mut flops = 0u64;
            let uh = lower_solve_t(&u.s, &z, &mut flops)?;
            ledger.push("bup4_s_solve", flops, 0, 0);

            match case {
                BupCase::I | BupCase::II => {
                    // step 5a: drop the leaving column, re-triangularize
                    let mut flops = 0u64;
                    remove_col(&mut u.v[outk - 1], outj);
                    {
                        let (vv, ww) = two_blocks(&mut u.v, &mut u.w, outk);
                        hessenberg_to_triangular(vv, Some(ww), outj, &mut flops);
                    }
                    // step 5b: collapse u_{h+1} against S
                    let mut uh = uh;
                    column_triangle_reduce(&mut uh, &mut u.s, &mut flops);
                    ledger.push("bup5_reduce", flops, 0, 0);

                    if case == BupCase::I {
                        // step 6: row migrations between nodes
                        let alpha = uh[0];
                        let s_row1: Vec<f64> = (1..=l).map(|j| u.s.get(1, j)).collect();
                        // ink gains its new trailing row [0 … 0 α | S_1]
                        append_row_v(&mut u.v[ink - 1], alpha);
                        append_row(&mut u.w[ink - 1], &s_row1);
                        // outk's dangling last row moves into S
                        let nr = u.v[outk - 1].rows();
                        let w_last: Vec<f64> =
                            (1..=l).map(|j| u.w[outk - 1].get(nr, j)).collect();
                        shrink_rows(&mut u.v[outk - 1]);
                        shrink_w_rows(&mut u.w[outk - 1]);
                        drop_first_row_and_prepend(&mut u.s, &w_last);
                        ledger.push("bup6_migrate", 0, (2 * l + 1) as u64, (2 * l + 1) as u64);
                    } else {
                        // case II: 2-row mini reduction merges the dangling
                        // row of the SAME block with node 0's first row
                        let mut flops = 0u64;
                        let nr = u.v[k - 1].rows(); // rows n, cols n after surgery
                        let nc = u.v[k - 1].cols();
                        let vnn = u.v[k - 1].get(nr, nc);
                        let alpha = uh[0];
                        let (c, s) = givens_pair(vnn, alpha, &mut flops);
                        u.v[k - 1].set(nr, nc, c * vnn + s * alpha);
                        for j in 1..=l {
                            let (x, y) = (u.w[k - 1].get(nr, j), u.s.get(1, j));
                            u.w[k - 1].set(nr, j, c * x + s * y);
                            u.s.set(1, j, c * y - s * x);
                            flops += 4;
                        }
                        ledger.push("bup6_mini_reduce", flops, (2 * l + 1) as u64, (2 * l + 1) as u64);
                    }

                    // step 7: S back to triangular
                    let mut flops = 0u64;
                    hessenberg_to_triangular(&mut u.s, None, 1, &mut flops);
                    ledger.push("bup7_s_triangular", flops, 0, 0);
                }
                BupCase::III => {
                    // step 5: drop the residual column everywhere, collapse
                    // u_{h+1} in front of the reduced S
                    let mut flops = 0u64;
                    for wk in u.w.iter_mut() {
                        remove_col(wk, outj);
                    }
                    remove_col(&mut u.s, outj);
                    let mut uh = uh;
                    column_triangle_reduce_rect(&mut uh, &mut u.s, &mut flops);
                    ledger.push("bup5_reduce", flops, 0, 0);
                    let _ = &uh;

                    // step 6: node 0's first row [α | S_1] migrates to ink
                    let alpha = uh[0];
                    let s_row1: Vec<f64> = (1..=u.s.cols()).map(|j| u.s.get(1, j)).collect();
                    append_row_v(&mut u.v[ink - 1], alpha);
                    append_row(&mut u.w[ink - 1], &s_row1);
                    drop_first_row(&mut u.s);
                    ledger.push("bup6_migrate", 0, l as u64, l as u64);

                    // step 7
                    let mut flops = 0u64;
                    hessenberg_to_triangular(&mut u.s, None, 1, &mut flops);
                    ledger.push("bup7_s_triangular", flops, 0, 0);

                    // the matrix loses a residual column
                    for ck in a.couplings.iter_mut() {
                        remove_col(ck, outj);
                    }
                }
                BupCase::IV | BupCase::V => unreachable!("residual entering handled separately"),
            }

            // entering column joins block ink of A
            if case == BupCase::I || case == BupCase::II || case == BupCase::III {
                append_col(&mut a.blocks[k - 1], values);
            }
            if case == BupCase::I || case == BupCase::II {
                remove_col(&mut a.blocks[outk - 1], outj);
            }
        }
        BupCase::IV | BupCase::V => {
            let EnteringCol::Residual { per_block } = entering else { unreachable!() };
            if per_block.len() != h {
                return Err(Error::DimensionMismatch { expected: h, found: per_block.len() });
            }
            // steps 1-2 per node; u^k joins Wᵏ as last column
            let mut group1 = 0u64;
            let mut group2 = 0u64;
            let mut zsum = vec![0.0f64; l];
            for k in 1..=h {
                let ak = &per_block[k - 1];
                if ak.len() != a.m(k) {
                    return Err(Error::DimensionMismatch { expected: a.m(k), found: ak.len() });
                }
                let mut flops = 0u64;
                let y1 = gram_vec(&a.blocks[k - 1], ak, &mut flops);
                let x = gram_vec(&a.couplings[k - 1], ak, &mut flops);
                group1 = group1.max(flops);
                let mut flops = 0u64;
                let (u1, zk) =
                    partial_inverse_transform(&u.v[k - 1], &u.w[k - 1], &y1, &x, &mut flops)?;
                append_col(&mut u.w[k - 1], &u1);
                for (acc, v) in zsum.iter_mut().zip(&zk) {
                    *acc += v;
                }
                group2 = group2.max(flops);
            }
            ledger.push("bup1_gram", group1, 0, 0);
            ledger.push("bup2_pit", group2, 0, 0);
            // step 3: ship and accumulate the zᵏ at node 0
            ledger.push(
                "bup3_accumulate_z",
                (h * l) as u64,
                (h * l) as u64,
                ceil_log2(h).max(1) * l as u64,
            );
            // step 4: u_{h+1} = S⁻ᵗ z joins S as last column
            let mut flops = 0u64;
            let uh = lower_solve_t(&u.s, &zsum, &mut flops)?;
            append_col(&mut u.s, &uh);
            ledger.push("bup4_s_solve", flops, 0, 0);

            match case {
                BupCase::IV => {
                    // step 5: drop the leaving block column, re-triangularize
                    let mut flops = 0u64;
                    remove_col(&mut u.v[outk - 1], outj);
                    {
                        let (vv, ww) = two_blocks(&mut u.v, &mut u.w, outk);
                        hessenberg_to_triangular(vv, Some(ww), outj, &mut flops);
                    }
                    ledger.push("bup5_reduce", flops, 0, 0);
                    // step 6: outk's dangling row becomes S's first row
                    let nr = u.v[outk - 1].rows();
                    let w_last: Vec<f64> =
                        (1..=u.w[outk - 1].cols()).map(|j| u.w[outk - 1].get(nr, j)).collect();
                    shrink_rows(&mut u.v[outk - 1]);
                    shrink_w_rows(&mut u.w[outk - 1]);
                    prepend_row_grow(&mut u.s, &w_last);
                    let mut flops = 0u64;
                    hessenberg_to_triangular(&mut u.s, None, 1, &mut flops);
                    ledger.push("bup6_migrate_reduce", flops, (l + 1) as u64, (l + 1) as u64);

                    remove_col(&mut a.blocks[outk - 1], outj);
                    for (ck, ak) in a.couplings.iter_mut().zip(per_block) {
                        append_col(ck, ak);
                    }
                }
                BupCase::V => {
                    // step 5: drop the leaving residual column everywhere
                    for wk in u.w.iter_mut() {
                        remove_col(wk, outj);
                    }
                    remove_col(&mut u.s, outj);
                    ledger.push("bup5_drop", 0, 0, 0);
                    // step 6: S back to triangular
                    let mut flops = 0u64;
                    let from = outj.min(u.s.cols());
                    hessenberg_to_triangular(&mut u.s, None, from, &mut flops);
                    ledger.push("bup6_s_triangular", flops, 0, 0);

                    for (ck, ak) in a.couplings.iter_mut().zip(per_block) {
                        remove_col(ck, outj);
                        append_col(ck, ak);
                    }
                }
                BupCase::I | BupCase::II | BupCase::III => {
                    unreachable!("block entering handled separately")
                }
            }
        }
    }
    Ok(ledger)
}

fn gram_vec(x: &DenseMat<f64>, v: &[f64], flops: &mut u64) -> Vec<f64> {
    let mut out = vec![0.0; x.cols()];
    for (j, o) in out.iter_mut().enumerate() {
        for i in 1..=x.rows() {
            *o += x.get(i, j + 1) * v[i - 1];
            *flops += 1;
        }
    }
    out
}

/// Solves Sᵗ u = z for upper-triangular S (a lower-triangular solve).
fn lower_solve_t(s: &DenseMat<f64>, z: &[f64], flops: &mut u64) -> Result<Vec<f64>> {
    let l = z.len();
    let mut u = vec![0.0f64; l];
    for i in 1..=l {
        let mut acc = z[i - 1];
        for k in 1..i {
            acc -= s.get(k, i) * u[k - 1];
            *flops += 1;
        }
        let d = s.get(i, i);
        if d.abs() < 1e-300 {
            return Err(Error::SingularUpdate);
        }
        u[i - 1] = acc / d;
        *flops += 1;
    }
    Ok(u)
}

fn append_col(m: &mut DenseMat<f64>, col: &[f64]) {
    let (r, c) = (m.rows(), m.cols());
    debug_assert_eq!(col.len(), r);
    let mut out = DenseMat::zeros(r, c + 1);
    for i in 1..=r {
        for j in 1..=c {
            out.set(i, j, m.get(i, j));
        }
        out.set(i, c + 1, col[i - 1]);
    }
    *m = out;
}

fn remove_col(m: &mut DenseMat<f64>, col: usize) {
    let (r, c) = (m.rows(), m.cols());
    let mut out = DenseMat::zeros(r, (c - 1).max(1));
    for i in 1..=r {
        let mut jj = 0;
        for j in 1..=c {
            if j == col {
                continue;
            }
            jj += 1;
            out.set(i, jj, m.get(i, j));
        }
    }
    *m = out;
}

/// Appends a trailing row to V that is zero except the new diagonal.
fn append_row_v(v: &mut DenseMat<f64>, diag: f64) {
    let (r, c) = (v.rows(), v.cols());
    debug_assert_eq!(c, r + 1);
    let mut out = DenseMat::zeros(r + 1, c);
    for i in 1..=r {
        for j in 1..=c {
            out.set(i, j, v.get(i, j));
        }
    }
    out.set(r + 1, c, diag);
    *v = out;
}

fn append_row(w: &mut DenseMat<f64>, row: &[f64]) {
    let (r, c) = (w.rows(), w.cols());
    debug_assert_eq!(row.len(), c);
    let mut out = DenseMat::zeros(r + 1, c);
    for i in 1..=r {
        for j in 1..=c {
            out.set(i, j, w.get(i, j));
        }
    }
    for j in 1..=c {
        out.set(r + 1, j, row[j - 1]);
    }
    *w = out;
}

fn shrink_rows(v: &mut DenseMat<f64>) {
    // drop the (zero) trailing row of a reduced V
    let (r, c) = (v.rows(), v.cols());
    let mut out = DenseMat::zeros((r - 1).max(1), c.max(1));
    for i in 1..r {
        for j in 1..=c {
            out.set(i, j, v.get(i, j));
        }
    }
    *v = out;
}

fn shrink_w_rows(w: &mut DenseMat<f64>) {
    let (r, c) = (w.rows(), w.cols());
    let mut out = DenseMat::zeros((r - 1).max(1), c.max(1));
    for i in 1..r {
        for j in 1..=c {
            out.set(i, j, w.get(i, j));
        }
    }
    *w = out;
}

fn drop_first_row(s: &mut DenseMat<f64>) {
    let (r, c) = (s.rows(), s.cols());
    let mut out = DenseMat::zeros((r - 1).max(1), c.max(1));
    for i in 2..=r {
        for j in 1..=c {
            out.set(i - 1, j, s.get(i, j));
        }
    }
    *s = out;
}

fn drop_first_row_and_prepend(s: &mut DenseMat<f64>, row: &[f64]) {
    let (r, c) = (s.rows(), s.cols());
    debug_assert_eq!(row.len(), c);
    let mut out = DenseMat::zeros(r, c);
    for j in 1..=c {
        out.set(1, j, row[j - 1]);
    }
    for i in 2..=r {
        for j in 1..=c {
            out.set(i, j, s.get(i, j));
        }
    }
    *s = out;
}

fn prepend_row_grow(s: &mut DenseMat<f64>, row: &[f64]) {
    let (r, c) = (s.rows(), s.cols());
    debug_assert_eq!(row.len(), c);
    let mut out = DenseMat::zeros(r + 1, c);
    for j in 1..=c {
        out.set(1, j, row[j - 1]);
    }
    for i in 1..=r {
        for j in 1..=c {
            out.set(i + 1, j, s.get(i, j));
        }
    }
    *s = out;
}

/// Column collapse against a rectangular (l × (l-1)) S: the rotations give
/// [α, S'_1; 0, S'] with the remainder square.
fn column_triangle_reduce_rect(u: &mut Vec<f64>, s: &mut DenseMat<f64>, flops: &mut u64) {
    let n = u.len();
    for i in (1..n).rev() {
        let (a, b) = (u[i - 1], u[i]);
        if b == 0.0 {
            continue;
        }
        let (c, sn) = givens_pair(a, b, flops);
        u[i - 1] = c * a + sn * b;
        u[i] = 0.0;
        *flops += 4;
        for j in 1..=s.cols() {
            let (x, y) = (s.get(i, j), s.get(i + 1, j));
            s.set(i, j, c * x + sn * y);
            s.set(i + 1, j, c * y - sn * x);
            *flops += 4;
        }
    }
}

fn two_blocks<'a>(
    v: &'a mut [DenseMat<f64>],
    w: &'a mut [DenseMat<f64>],
    k: usize,
) -> (&'a mut DenseMat<f64>, &'a mut DenseMat<f64>) {
    (&mut v[k - 1], &mut w[k - 1])
}
