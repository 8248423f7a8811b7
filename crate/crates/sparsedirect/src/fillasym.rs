//! Local fill metrics and pivot pre-positioning for unsymmetric
//! elimination: the exact local-fill matrix `G = B(B̄)'B`, its Markowitz
//! approximation, threshold vetoes, and the P3 spike-ordering heuristic.

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::pattern::BoolPattern;
use crate::perm::Permutation;
use crate::scalar::Real;

/// Per-position fill counts over the active pattern; defined only at
/// stored (ENN) positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillMatrix {
    pattern: BoolPattern,
    counts: Vec<usize>,
}

impl FillMatrix {
    pub fn n(&self) -> usize {
        self.pattern.rows()
    }

    /// Count at an ENN position; `None` where the pattern is zero.
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.pattern
            .get(i, j)
            .then(|| self.counts[(i - 1) * self.pattern.cols() + (j - 1)])
    }

    /// The underlying product value, defined at every position (only ENN
    /// positions are meaningful pivot candidates).
    pub fn raw(&self, i: usize, j: usize) -> usize {
        self.counts[(i - 1) * self.pattern.cols() + (j - 1)]
    }

    /// All ENN positions attaining the minimum count, in (i, j) order.
    pub fn argmin(&self) -> Vec<(usize, usize)> {
        let mut best = usize::MAX;
        let mut out = Vec::new();
        for (i, j) in self.pattern.iter_entries() {
            let v = self.get(i, j).unwrap();
            if v < best {
                best = v;
                out.clear();
            }
            if v == best {
                out.push((i, j));
            }
        }
        out
    }
}

/// Exact local fill: choosing the stored position (i, j) as pivot fills
/// exactly `G_i^j` positions, with `G = B (B̄)' B` over the integers.
pub fn tewarson_g(b: &BoolPattern) -> FillMatrix {
    assert_eq!(b.rows(), b.cols(), "active pattern must be square");
    let n = b.rows();
    let bc = b.complement();
    // C_i^r = Σ_s B_i^s · B̄_r^s, then G_i^j = Σ_r C_i^r · B_r^j
    let mut c = vec![0usize; n * n];
    for i in 1..=n {
        for r in 1..=n {
            let mut acc = 0;
            for s in 1..=n {
                if b.get(i, s) && bc.get(r, s) {
                    acc += 1;
                }
            }
            c[(i - 1) * n + (r - 1)] = acc;
        }
    }
    let mut counts = vec![0usize; n * n];
    for i in 1..=n {
        for j in 1..=n {
            let mut acc = 0;
            for r in 1..=n {
                if b.get(r, j) {
                    acc += c[(i - 1) * n + (r - 1)];
                }
            }
            counts[(i - 1) * n + (j - 1)] = acc;
        }
    }
    FillMatrix { pattern: b.clone(), counts }
}

/// Markowitz count `(enn(row i) - 1)·(enn(col j) - 1)`: nonzero-multiplier
/// count times the nonzero entries of the pivot row excluding the pivot.
/// This is the quantity the `B·1·B` product of the source text abbreviates;
/// it over-counts the exact fill.
pub fn markowitz_f(b: &BoolPattern) -> FillMatrix {
    assert_eq!(b.rows(), b.cols(), "active pattern must be square");
    let n = b.rows();
    let rows: Vec<usize> = (1..=n).map(|i| b.row_count(i)).collect();
    let cols: Vec<usize> = (1..=n).map(|j| b.col_count(j)).collect();
    let mut counts = vec![0usize; n * n];
    for i in 1..=n {
        for j in 1..=n {
            counts[(i - 1) * n + (j - 1)] =
                rows[i - 1].saturating_sub(1) * cols[j - 1].saturating_sub(1);
        }
    }
    FillMatrix { pattern: b.clone(), counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillMetric {
    Tewarson,
    Markowitz,
}

/// Selects a pivot over the active block: among stored positions passing
/// the vetoes (|pivot| >= pivomin and all implied multipliers <= multmax),
/// minimize the fill metric, ties broken by smallest (i, then j).
pub fn choose_pivot<T: Real>(
    active: &DenseMat<T>,
    metric: FillMetric,
    multmax: T,
    pivomin: T,
) -> Result<(usize, usize)> {
    let n = active.rows();
    if n == 0 || !active.is_square() {
        return Err(Error::Invalid("active block must be square and nonempty".into()));
    }
    let b = BoolPattern::from_dense(active);
    let fill = match metric {
        FillMetric::Tewarson => tewarson_g(&b),
        FillMetric::Markowitz => markowitz_f(&b),
    };
    let col_max: Vec<T> = (1..=n)
        .map(|j| (1..=n).map(|i| active.get(i, j).abs()).fold(T::zero(), T::max))
        .collect();
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, j) in b.iter_entries() {
        let pivot = active.get(i, j).abs();
        if pivot < pivomin {
            continue;
        }
        // largest multiplier the pivot would produce
        if col_max[j - 1] > multmax * pivot {
            continue;
        }
        let score = fill.get(i, j).unwrap();
        if best.map_or(true, |(s, bi, bj)| (score, i, j) < (s, bi, bj)) {
            best = Some((score, i, j));
        }
    }
    match best {
        Some((_, i, j)) => Ok((i, j)),
        None => Err(Error::AllPivotsVetoed { stage: 0 }),
    }
}

/// Greedy metric-driven pivot ordering over a dense matrix: runs the full
/// elimination, selecting each stage's pivot by [`choose_pivot`] on the
/// current active block, and returns the accumulated row and column
/// permutations. Factoring the permuted matrix without further pivoting
/// reproduces the same pivot sequence.
pub fn metric_pivot_order<T: Real>(
    a: &DenseMat<T>,
    metric: FillMetric,
    multmax: T,
    pivomin: T,
) -> Result<(Permutation, Permutation)> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: a.cols() });
    }
    let mut work = a.clone();
    let mut p: Vec<usize> = (1..=n).collect();
    let mut q: Vec<usize> = (1..=n).collect();
    for stage in 1..=n {
        let size = n - stage + 1;
        let mut active = DenseMat::zeros(size, size);
        for i in 1..=size {
            for j in 1..=size {
                active.set(i, j, work.get(stage + i - 1, stage + j - 1));
            }
        }
        let (pi, pj) = choose_pivot(&active, metric, multmax, pivomin)
            .map_err(|_| Error::AllPivotsVetoed { stage })?;
        let (gi, gj) = (stage + pi - 1, stage + pj - 1);
        if gi != stage {
            for j in 1..=n {
                let (x, y) = (work.get(stage, j), work.get(gi, j));
                work.set(stage, j, y);
                work.set(gi, j, x);
            }
            p.swap(stage - 1, gi - 1);
        }
        if gj != stage {
            for i in 1..=n {
                let (x, y) = (work.get(i, stage), work.get(i, gj));
                work.set(i, stage, y);
                work.set(i, gj, x);
            }
            q.swap(stage - 1, gj - 1);
        }
        let pivot = work.get(stage, stage);
        for i in stage + 1..=n {
            let m = work.get(i, stage) / pivot;
            if m.is_zero() {
                continue;
            }
            for j in stage + 1..=n {
                let v = work.get(i, j) - m * work.get(stage, j);
                work.set(i, j, v);
            }
            work.set(i, stage, T::zero());
        }
    }
    Ok((Permutation::from_image(p)?, Permutation::from_image(q)?))
}

/// Performs one structural elimination step with pivot (i, j) under the
/// no-cancellation assumption; returns the next active pattern (pivot row
/// and column removed) and the number of filled positions.
pub fn one_step_fill(b: &BoolPattern, pi: usize, pj: usize) -> (BoolPattern, usize) {
    let n = b.rows();
    let mut next = BoolPattern::new(n - 1, n - 1);
    let mut fills = 0;
    let mut r_new = 0;
    for r in 1..=n {
        if r == pi {
            continue;
        }
        r_new += 1;
        let mut s_new = 0;
        for s in 1..=n {
            if s == pj {
                continue;
            }
            s_new += 1;
            let had = b.get(r, s);
            let updates = b.get(r, pj) && b.get(pi, s);
            if updates && !had {
                fills += 1;
            }
            next.set(r_new, s_new, had || updates);
        }
    }
    (next, fills)
}

/// Simulates the complete elimination of an already permuted pattern under
/// the no-cancellation assumption; returns the fill positions in permuted
/// coordinates.
pub fn simulate_fill(permuted: &BoolPattern) -> Vec<(usize, usize)> {
    let (m, n) = (permuted.rows(), permuted.cols());
    let mut work = permuted.clone();
    let mut fills = Vec::new();
    for k in 1..=m.min(n) {
        for i in k + 1..=m {
            if !work.get(i, k) {
                continue;
            }
            for j in k + 1..=n {
                if work.get(k, j) && !work.get(i, j) {
                    work.set(i, j, true);
                    fills.push((i, j));
                }
            }
        }
    }
    fills
}

/// One placed column of the P3 arrangement that carries stored entries
/// above its diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spike {
    /// Original column index.
    pub col: usize,
    /// Final (diagonal) position of the column.
    pub position: usize,
    /// Row position of its topmost stored entry (< position).
    pub top: usize,
    /// The diagonal slot itself holds no stored entry; it must be filled
    /// before use as a pivot.
    pub zero_pivot: bool,
    /// At least one empty slot lies below the top entry, so elimination can
    /// actually deposit fill in this column.
    pub fillable: bool,
}

/// Events recorded while P3 runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum P3Step {
    /// ρ = 1: the least-index weight-1 row placed with its unique column.
    Placed { rho: usize, row: usize, col: usize },
    /// ρ > 1: the max-Θ_ρ column exiled to the temporary stack.
    Exiled { rho: usize, col: usize, theta: usize },
    /// ρ = 0: the most recently exiled column recalled for the empty row.
    Recalled { row: usize, col: usize },
}

#[derive(Debug, Clone)]
pub struct P3Result {
    pub row_perm: Permutation,
    pub col_perm: Permutation,
    /// Columns with stored entries above the diagonal, in position order.
    pub spikes: Vec<Spike>,
    pub trace: Vec<P3Step>,
}

impl P3Result {
    /// Spikes that can actually receive fill.
    pub fn fillable_spikes(&self) -> Vec<&Spike> {
        self.spikes.iter().filter(|s| s.fillable).collect()
    }

    /// The input pattern in the returned arrangement.
    pub fn permuted(&self, b: &BoolPattern) -> BoolPattern {
        let mut out = BoolPattern::new(b.rows(), b.cols());
        for i in 1..=b.rows() {
            for j in 1..=b.cols() {
                out.set(i, j, b.get(self.row_perm.image(i), self.col_perm.image(j)));
            }
        }
        out
    }
}

/// Pivot pre-positioning: permutes rows and columns so the pattern becomes
/// lower triangular except for spike columns, inside which all fill is
/// confined below each spike's topmost entry.
///
/// The recursion works on the active submatrix (unplaced rows x columns
/// still in A). With minimum active row weight ρ:
/// - ρ = 1 places the least-index weight-1 row with its unique column;
/// - ρ > 1 exiles the column maximizing the ρ-height Θ_ρ (entries in rows
///   of weight <= ρ), ties broken by the cumulative heights Θ_{ρ+1}, ...
///   and finally by least column index;
/// - ρ = 0 recalls the most recently exiled column for the exhausted row.
///
/// Rectangular inputs (m <= n) are allowed; leftover columns follow the
/// placed ones in the returned column permutation.
pub fn p3_order(b: &BoolPattern) -> Result<P3Result> {
    let (m, n) = (b.rows(), b.cols());
    if m > n {
        return Err(Error::Invalid(format!("P3 needs m <= n, got {m}x{n}")));
    }
    for i in 1..=m {
        if b.row_count(i) == 0 {
            return Err(Error::EmptyLine { row: true, index: i });
        }
    }
    for j in 1..=n {
        if b.col_count(j) == 0 {
            return Err(Error::EmptyLine { row: false, index: j });
        }
    }

    let mut row_active = vec![true; m + 1];
    let mut col_active = vec![true; n + 1]; // in A (not placed, not in S)
    let mut placed_rows: Vec<usize> = Vec::with_capacity(m);
    let mut placed_cols: Vec<usize> = Vec::with_capacity(n);
    let mut stack: Vec<usize> = Vec::new(); // exiled columns; top = last exiled
    let mut trace = Vec::new();

    while placed_rows.len() < m {
        // active row weights
        let mut weights: Vec<(usize, usize)> = Vec::new(); // (row, weight)
        for i in 1..=m {
            if row_active[i] {
                let w = (1..=n).filter(|&j| col_active[j] && b.get(i, j)).count();
                weights.push((i, w));
            }
        }
        let &(h, rho) = weights
            .iter()
            .min_by_key(|&&(i, w)| (w, i))
            .expect("unplaced rows remain");

        if rho == 0 {
            let Some(t) = stack.pop() else {
                return Err(Error::StructurallySingular { violator: vec![h] });
            };
            trace.push(P3Step::Recalled { row: h, col: t });
            placed_rows.push(h);
            placed_cols.push(t);
            row_active[h] = false;
            continue;
        }
        if rho == 1 {
            let t = (1..=n).find(|&j| col_active[j] && b.get(h, j)).expect("weight-1 row");
            trace.push(P3Step::Placed { rho, row: h, col: t });
            placed_rows.push(h);
            placed_cols.push(t);
            row_active[h] = false;
            col_active[t] = false;
            continue;
        }

        // ρ > 1: cumulative heights Θ_k(j) = entries of column j in active
        // rows of weight <= k
        let theta = |j: usize, k: usize| -> usize {
            weights.iter().filter(|&&(i, w)| w <= k && b.get(i, j)).count()
        };
        let max_weight = weights.iter().map(|&(_, w)| w).max().unwrap();
        let mut cands: Vec<usize> = (1..=n).filter(|&j| col_active[j]).collect();
        let mut k = rho;
        let theta_rho_of = |j: usize| theta(j, rho);
        loop {
            let best = cands.iter().map(|&j| theta(j, k)).max().unwrap();
            cands.retain(|&j| theta(j, k) == best);
            if cands.len() == 1 || k >= max_weight {
                break;
            }
            k += 1;
        }
        let t = *cands.iter().min().unwrap();
        trace.push(P3Step::Exiled { rho, col: t, theta: theta_rho_of(t) });
        stack.push(t);
        col_active[t] = false;
    }

    // leftover columns (rectangular case), then any still-exiled columns
    for j in 1..=n {
        if col_active[j] {
            placed_cols.push(j);
        }
    }
    while let Some(t) = stack.pop() {
        placed_cols.push(t);
    }

    let row_perm = Permutation::from_image(placed_rows)?;
    let col_perm = Permutation::from_image(placed_cols)?;

    // spike extraction from the final arrangement
    let row_pos = row_perm.inverse();
    let mut spikes = Vec::new();
    for pos in 1..=n.min(m) {
        let col = col_perm.image(pos);
        let mut row_positions: Vec<usize> =
            (1..=m).filter(|&i| b.get(i, col)).map(|i| row_pos.image(i)).collect();
        row_positions.sort_unstable();
        let top = row_positions[0];
        if top >= pos {
            continue;
        }
        let zero_pivot = !row_positions.contains(&pos);
        let occupied: std::collections::HashSet<usize> = row_positions.into_iter().collect();
        let fillable = (top + 1..=m).any(|r| !occupied.contains(&r));
        spikes.push(Spike { col, position: pos, top, zero_pivot, fillable });
    }
    Ok(P3Result { row_perm, col_perm, spikes, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ⁰B of the local-fill worked example.
    pub fn example1_pattern() -> BoolPattern {
        BoolPattern::from_rows01(&[
            &[1, 1, 1, 0, 0],
            &[0, 1, 1, 0, 0],
            &[0, 1, 0, 1, 0],
            &[0, 0, 0, 1, 1],
            &[1, 1, 1, 0, 1],
        ])
    }

    /// First worked P3 example.
    pub fn p3_example1() -> BoolPattern {
        BoolPattern::from_rows01(&[
            &[1, 1, 1, 1, 0],
            &[1, 1, 0, 0, 0],
            &[0, 0, 1, 1, 0],
            &[0, 1, 0, 1, 1],
            &[0, 1, 0, 1, 1],
        ])
    }

    /// Second worked P3 example (the zero-pivot spike case).
    pub fn p3_example2() -> BoolPattern {
        BoolPattern::from_rows01(&[
            &[1, 1, 0, 0, 0, 0],
            &[0, 1, 1, 0, 0, 1],
            &[0, 1, 1, 0, 1, 0],
            &[1, 0, 1, 1, 1, 0],
            &[1, 1, 0, 0, 1, 1],
            &[0, 1, 1, 1, 0, 1],
        ])
    }

    #[test]
    fn tewarson_matches_printed_g() {
        let b = example1_pattern();
        let g = tewarson_g(&b);
        // the full printed product grid
        let expect: [[usize; 5]; 5] = [
            [0, 3, 1, 5, 3],
            [0, 1, 0, 3, 2],
            [2, 3, 3, 1, 2],
            [3, 6, 5, 1, 1],
            [1, 6, 3, 6, 3],
        ];
        for i in 1..=5 {
            for j in 1..=5 {
                assert_eq!(g.raw(i, j), expect[i - 1][j - 1], "({i},{j})");
            }
        }
        // pivot semantics only at stored positions
        assert_eq!(g.get(4, 2), None);
        assert_eq!(g.get(4, 4), Some(1));
        assert_eq!(g.argmin(), vec![(1, 1), (2, 3)]);
    }

    #[test]
    fn full_pattern_has_zero_fill_counts() {
        let mut b = BoolPattern::new(4, 4);
        for i in 1..=4 {
            for j in 1..=4 {
                b.set(i, j, true);
            }
        }
        let g = tewarson_g(&b);
        for (i, j) in b.iter_entries() {
            assert_eq!(g.get(i, j), Some(0));
        }
    }

    #[test]
    fn tewarson_equals_one_step_simulation() {
        // deterministic pseudo-random 6x6 patterns
        let mut state = 0x2545f4914f6cdd1du64;
        let mut bit = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % 10 < 4
        };
        for _ in 0..25 {
            let mut b = BoolPattern::new(6, 6);
            for i in 1..=6 {
                for j in 1..=6 {
                    b.set(i, j, bit());
                }
            }
            let g = tewarson_g(&b);
            for (i, j) in b.iter_entries() {
                let (_, fills) = one_step_fill(&b, i, j);
                assert_eq!(g.get(i, j), Some(fills), "pivot ({i},{j})");
            }
        }
    }

    #[test]
    fn markowitz_basics() {
        // singleton row and column meet at a free pivot
        let b = BoolPattern::from_rows01(&[&[1, 0], &[0, 1]]);
        let f = markowitz_f(&b);
        assert_eq!(f.get(1, 1), Some(0));

        let g = tewarson_g(&example1_pattern());
        let f = markowitz_f(&example1_pattern());
        for (i, j) in example1_pattern().iter_entries() {
            assert!(f.get(i, j).unwrap() >= g.get(i, j).unwrap());
        }

        let mut dense = BoolPattern::new(4, 4);
        for i in 1..=4 {
            for j in 1..=4 {
                dense.set(i, j, true);
            }
        }
        let f = markowitz_f(&dense);
        for (i, j) in dense.iter_entries() {
            assert_eq!(f.get(i, j), Some(9));
        }
    }

    #[test]
    fn choose_pivot_worked_example_and_vetoes() {
        let a = example1_pattern().to_generic_dense();
        let (i, j) = choose_pivot(&a, FillMetric::Tewarson, 1e12, 0.0).unwrap();
        assert_eq!((i, j), (1, 1));

        // one admissible entry
        let mut one = DenseMat::zeros(2, 2);
        one.set(1, 2, 3.0);
        one.set(2, 1, 1e-9);
        one.set(2, 2, 2e-9);
        let (i, j) = choose_pivot(&one, FillMetric::Markowitz, 1e12, 1e-6).unwrap();
        assert_eq!((i, j), (1, 2));

        // everything below pivomin
        let mut tiny = DenseMat::zeros(2, 2);
        tiny.set(1, 1, 1e-9);
        tiny.set(2, 2, 1e-9);
        assert!(matches!(
            choose_pivot(&tiny, FillMetric::Tewarson, 1e12, 1e-6),
            Err(Error::AllPivotsVetoed { .. })
        ));
    }

    #[test]
    fn example1_greedy_sequence_incurs_exactly_one_fill() {
        // follow the printed pivot choices: (1,1), then (1,2), (1,1), then free
        let mut b = example1_pattern();
        let mut total = 0usize;
        let picks = [(1, 1), (1, 2), (1, 1), (1, 1), (1, 1)];
        for (step, &(i, j)) in picks.iter().enumerate() {
            let g = tewarson_g(&b);
            if step < 3 {
                // printed argmin choice is the smallest (i, j) of the argmin set
                assert!(g.argmin().contains(&(i, j)), "step {step}");
            }
            let (next, fills) = one_step_fill(&b, i, j);
            total += fills;
            b = next;
        }
        assert_eq!(total, 1);
    }

    #[test]
    fn p3_first_example_matches_printed_trace() {
        let b = p3_example1();
        let r = p3_order(&b).unwrap();
        assert_eq!(r.row_perm.as_slice(), &[2, 1, 3, 4, 5]);
        assert_eq!(r.col_perm.as_slice(), &[1, 3, 4, 5, 2]);
        // exiles: col 2 then col 4; recalls in reverse
        let exiled: Vec<usize> = r
            .trace
            .iter()
            .filter_map(|s| match s {
                P3Step::Exiled { col, .. } => Some(*col),
                _ => None,
            })
            .collect();
        assert_eq!(exiled, vec![2, 4]);

        // structural spikes are columns 4 (top 2) and 2 (top 1); only
        // column 2 can receive fill
        assert_eq!(r.spikes.len(), 2);
        assert_eq!((r.spikes[0].col, r.spikes[0].position, r.spikes[0].top), (4, 3, 2));
        assert!(!r.spikes[0].fillable);
        assert_eq!((r.spikes[1].col, r.spikes[1].position, r.spikes[1].top), (2, 5, 1));
        assert!(r.spikes[1].fillable);
        let fillable = r.fillable_spikes();
        assert_eq!(fillable.len(), 1);
        assert_eq!(fillable[0].col, 2);

        // exactly one fill, at permuted position (3, 5): row 3, spike col 2
        let fills = simulate_fill(&r.permuted(&b));
        assert_eq!(fills, vec![(3, 5)]);
    }

    #[test]
    fn p3_second_example_matches_printed_trace() {
        let b = p3_example2();
        let r = p3_order(&b).unwrap();
        assert_eq!(r.row_perm.as_slice(), &[1, 2, 3, 5, 4, 6]);
        assert_eq!(r.col_perm.as_slice(), &[1, 6, 5, 3, 4, 2]);
        // the recalled spike at position 4 (column 3) has a structurally
        // zero pivot slot, filled before its use as pivot
        let zero_spikes: Vec<&Spike> = r.spikes.iter().filter(|s| s.zero_pivot).collect();
        assert_eq!(zero_spikes.len(), 1);
        assert_eq!(zero_spikes[0].col, 3);
        assert_eq!(zero_spikes[0].position, 4);
        // fills: the + at (5,6) and the ⊕ at the zero pivot slot (4,4)
        let mut fills = simulate_fill(&r.permuted(&b));
        fills.sort_unstable();
        assert_eq!(fills, vec![(4, 4), (5, 6)]);
    }

    #[test]
    fn p3_lower_triangular_input_has_no_spikes() {
        let b = BoolPattern::from_rows01(&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
        let r = p3_order(&b).unwrap();
        assert!(r.spikes.is_empty());
        assert!(simulate_fill(&r.permuted(&b)).is_empty());
    }

    #[test]
    fn p3_rejects_structural_singularity() {
        // rows 2 and 3 share the single column 2: after placing one the
        // other exhausts with nothing in the stack
        let b = BoolPattern::from_rows01(&[&[1, 1, 1], &[0, 1, 0], &[0, 1, 0]]);
        assert!(matches!(p3_order(&b), Err(Error::StructurallySingular { .. })));
    }

    #[test]
    fn p3_fill_confined_to_fillable_spikes_below_tops() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        let mut done = 0;
        while done < 120 {
            let n = 3 + (rng() % 10) as usize;
            let mut b = BoolPattern::new(n, n);
            for i in 1..=n {
                b.set(i, 1 + (rng() as usize % n), true);
                b.set(1 + (rng() as usize % n), i, true);
                b.set(i, i, rng() % 3 == 0);
            }
            if (1..=n).any(|i| b.row_count(i) == 0 || b.col_count(i) == 0) {
                continue;
            }
            let Ok(r) = p3_order(&b) else { continue };
            done += 1;
            let spike_pos: std::collections::HashMap<usize, usize> =
                r.spikes.iter().map(|s| (s.position, s.top)).collect();
            for (i, j) in simulate_fill(&r.permuted(&b)) {
                let top = spike_pos.get(&j).copied();
                assert!(top.is_some(), "fill ({i},{j}) outside spike columns");
                assert!(i > top.unwrap(), "fill ({i},{j}) above spike top");
            }
        }
    }
}
