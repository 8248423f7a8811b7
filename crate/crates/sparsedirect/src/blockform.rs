//! Macro-structure: proper permutations via matching, the P4
//! block-triangularization procedure (matching, coherent ordering,
//! inversion to block lower form, per-block P3), and block-angular
//! detection as hypergraph partitioning with its cost function.

use crate::error::{Error, Result};
use crate::fillasym::{p3_order, P3Result};
use crate::graphs::{tarjan_scc, DiGraph};
use crate::matching::{perfect_match, Bipartite, MatchOutcome, Policy};
use crate::pattern::BoolPattern;
use crate::perm::Permutation;

/// Row permutation placing a zero-free diagonal: row `p(j)` is matched to
/// column j. Structural singularity surfaces as the Hall violator.
pub fn proper_permutation(pattern: &BoolPattern) -> Result<Permutation> {
    if pattern.rows() != pattern.cols() {
        return Err(Error::DimensionMismatch { expected: pattern.rows(), found: pattern.cols() });
    }
    let b = Bipartite::from_pattern(pattern);
    match perfect_match(&b, Policy::default())? {
        MatchOutcome::Perfect(m) => {
            let image: Vec<usize> = m.y_to_x.iter().map(|x| x.expect("perfect matching")).collect();
            Permutation::from_image(image)
        }
        MatchOutcome::Violator(v) => Err(Error::StructurallySingular { violator: v.rows }),
    }
}

/// Block lower-triangular arrangement: strongly connected diagonal blocks,
/// zero blocks strictly above the block diagonal, P3 applied inside each
/// diagonal block.
#[derive(Debug, Clone)]
pub struct BlockTriangular {
    /// Total row permutation (image vector) of the final arrangement.
    pub row_perm: Permutation,
    /// Total column permutation of the final arrangement.
    pub col_perm: Permutation,
    /// Diagonal block sizes in emitted (lower) order.
    pub block_sizes: Vec<usize>,
    /// The proper permutation found in step 1.
    pub proper: Permutation,
    /// The coherent (upper block-triangular) ordering found in step 2.
    pub coherent_q: Vec<usize>,
    /// Per diagonal block, the P3 arrangement of step 3.
    pub per_block_p3: Vec<P3Result>,
}

impl BlockTriangular {
    pub fn permuted(&self, pattern: &BoolPattern) -> BoolPattern {
        let n = pattern.rows();
        let mut out = BoolPattern::new(n, n);
        for i in 1..=n {
            for j in 1..=n {
                out.set(i, j, pattern.get(self.row_perm.image(i), self.col_perm.image(j)));
            }
        }
        out
    }

    /// Offsets of each block's first position.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.block_sizes.len());
        let mut acc = 0;
        for &s in &self.block_sizes {
            off.push(acc);
            acc += s;
        }
        off
    }
}

/// The P4 procedure: proper permutation, coherent reordering of G(PA),
/// inversion to block lower-triangular form, and P3 inside each block.
pub fn p4(pattern: &BoolPattern) -> Result<BlockTriangular> {
    let n = pattern.rows();
    let proper = proper_permutation(pattern)?;
    let pa = pattern.permuted(&proper, crate::perm::Side::Left);
    let scc = tarjan_scc(&DiGraph::from_pattern(&pa));
    let coherent_q = scc.coherent_order.clone();

    // invert the coherent (upper) order: blocks now come source-last
    let mut low: Vec<usize> = coherent_q.clone();
    low.reverse();
    let mut sizes: Vec<usize> = scc.components.iter().map(|c| c.len()).collect();
    sizes.reverse();

    // per-block P3 over the block lower form
    let mut row_image = Vec::with_capacity(n);
    let mut col_image = Vec::with_capacity(n);
    let mut per_block_p3 = Vec::with_capacity(sizes.len());
    let mut offset = 0usize;
    for &size in &sizes {
        let verts = &low[offset..offset + size];
        let mut sub = BoolPattern::new(size, size);
        for (li, &vi) in verts.iter().enumerate() {
            for (lj, &vj) in verts.iter().enumerate() {
                sub.set(li + 1, lj + 1, pa.get(vi, vj));
            }
        }
        let p3 = p3_order(&sub)?;
        for k in 1..=size {
            row_image.push(verts[p3.row_perm.image(k) - 1]);
            col_image.push(verts[p3.col_perm.image(k) - 1]);
        }
        per_block_p3.push(p3);
        offset += size;
    }
    // compose with the proper permutation on the row side
    let row_total: Vec<usize> = row_image.iter().map(|&i| proper.image(i)).collect();
    Ok(BlockTriangular {
        row_perm: Permutation::from_image(row_total)?,
        col_perm: Permutation::from_image(col_image)?,
        block_sizes: sizes,
        proper,
        coherent_q,
        per_block_p3,
    })
}

/// Cost breakdown of a row coloring for block-angular detection:
/// `coupling` counts multicolored columns, `balance` is Σ (m/h − s(k))².
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCost {
    pub coupling: usize,
    pub balance: f64,
    pub total: f64,
}

/// f(p) = c(p) + α Σ_k (m/h − s(k))² for a total row coloring p: M → 1..=h.
pub fn partition_cost(
    pattern: &BoolPattern,
    coloring: &[usize],
    h: usize,
    alpha: f64,
) -> Result<PartitionCost> {
    let (m, n) = (pattern.rows(), pattern.cols());
    if coloring.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: coloring.len() });
    }
    if h < 1 || coloring.iter().any(|&c| c < 1 || c > h) {
        return Err(Error::Invalid("colors must lie in 1..=h".into()));
    }
    let mut coupling = 0usize;
    for j in 1..=n {
        let mut seen: Option<usize> = None;
        let mut multi = false;
        for i in 1..=m {
            if pattern.get(i, j) {
                match seen {
                    None => seen = Some(coloring[i - 1]),
                    Some(c) if c != coloring[i - 1] => {
                        multi = true;
                        break;
                    }
                    _ => {}
                }
            }
        }
        if multi {
            coupling += 1;
        }
    }
    let mut sizes = vec![0usize; h];
    for &c in coloring {
        sizes[c - 1] += 1;
    }
    let target = m as f64 / h as f64;
    let balance: f64 = sizes.iter().map(|&s| (target - s as f64).powi(2)).sum();
    Ok(PartitionCost { coupling, balance, total: coupling as f64 + alpha * balance })
}

/// Deterministic first-improvement local search over single-row recolorings;
/// `budget` caps the number of accepted moves. The result never costs more
/// than the initial coloring.
pub fn improve_partition(
    pattern: &BoolPattern,
    initial: &[usize],
    h: usize,
    alpha: f64,
    budget: usize,
) -> Result<Vec<usize>> {
    let mut coloring = initial.to_vec();
    let mut cost = partition_cost(pattern, &coloring, h, alpha)?.total;
    let mut moves = 0usize;
    'outer: loop {
        if moves >= budget {
            break;
        }
        for i in 0..coloring.len() {
            let original = coloring[i];
            for c in 1..=h {
                if c == original {
                    continue;
                }
                coloring[i] = c;
                let candidate = partition_cost(pattern, &coloring, h, alpha)?.total;
                if candidate < cost - 1e-12 {
                    cost = candidate;
                    moves += 1;
                    continue 'outer;
                }
            }
            coloring[i] = original;
        }
        break;
    }
    Ok(coloring)
}
