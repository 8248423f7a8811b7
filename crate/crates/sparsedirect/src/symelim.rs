//! Symmetric elimination analysis: elimination graphs, the elimination
//! tree, symbolic Cholesky, perfect orders and chordality via the reverse
//! maximum-degree ordering, breadth-first level structures and recursive
//! dissection orderings.

use crate::error::{Error, Result};
use crate::pattern::BoolPattern;
use crate::perm::Permutation;

/// Undirected graph on 1..=n with sorted adjacency lists (no loops).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UGraph {
    adj: Vec<Vec<usize>>,
}

impl UGraph {
    pub fn new(n: usize) -> Self {
        UGraph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Off-diagonal pattern of a symmetric matrix.
    pub fn from_pattern(b: &BoolPattern) -> Result<Self> {
        if !b.is_symmetric() {
            return Err(Error::AsymmetricPattern);
        }
        let mut g = Self::new(b.rows());
        for (i, j) in b.iter_entries() {
            if i != j {
                g.add_edge(i, j);
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a - 1];
            if let Err(pos) = list.binary_search(&b) {
                list.insert(pos, b);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v - 1]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v - 1].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u - 1].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 1..=self.n() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 1..=n {
            if seen[s - 1] {
                continue;
            }
            let mut comp = vec![s];
            seen[s - 1] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if !seen[v - 1] {
                        seen[v - 1] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// One vertex elimination: the vertex, its neighbors at elimination time,
/// and the fill edges its clique-completion added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimStep {
    pub vertex: usize,
    pub neighbors: Vec<usize>,
    pub fill_edges: Vec<(usize, usize)>,
}

/// Eliminates the vertices of `g` in order `q`, pairwise-connecting each
/// eliminated vertex's remaining neighbors; fill edges are tagged per step.
pub fn elimination_sequence(g: &UGraph, q: &[usize]) -> Result<Vec<ElimStep>> {
    let n = g.n();
    if q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.len() });
    }
    Permutation::from_image(q.to_vec())?;
    let mut work = g.clone();
    let mut alive = vec![true; n];
    let mut steps = Vec::with_capacity(n);
    for &v in q {
        let nbrs: Vec<usize> = work.neighbors(v).iter().copied().filter(|&w| alive[w - 1]).collect();
        let mut fill = Vec::new();
        for (a, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[a + 1..] {
                if !work.has_edge(x, y) {
                    work.add_edge(x, y);
                    fill.push((x.min(y), x.max(y)));
                }
            }
        }
        alive[v - 1] = false;
        steps.push(ElimStep { vertex: v, neighbors: nbrs, fill_edges: fill });
    }
    Ok(steps)
}

pub fn total_fill(steps: &[ElimStep]) -> usize {
    steps.iter().map(|s| s.fill_edges.len()).sum()
}

/// Column index sets of the Cholesky factor, in elimination positions:
/// `col(j)` is enn(L^j), sorted ascending and containing j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicFactor {
    cols: Vec<Vec<usize>>,
    stored_lower: usize,
}

impl SymbolicFactor {
    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j - 1]
    }

    /// Total stored entries of L.
    pub fn enn_l(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// Predicted fill: stored entries of L beyond the lower triangle of A.
    pub fn fill_count(&self) -> usize {
        self.enn_l() - self.stored_lower
    }
}

/// Parent function over factor columns; roots are self-parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationTree {
    pub parent: Vec<usize>,
}

impl EliminationTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent_of(&self, j: usize) -> usize {
        self.parent[j - 1]
    }

    pub fn is_root(&self, j: usize) -> bool {
        self.parent[j - 1] == j
    }

    pub fn children(&self, j: usize) -> Vec<usize> {
        (1..j).filter(|&k| self.parent[k - 1] == j).collect()
    }

    /// True when i is a (weak) ancestor of j.
    pub fn is_ancestor(&self, i: usize, j: usize) -> bool {
        let mut v = j;
        loop {
            if v == i {
                return true;
            }
            let p = self.parent[v - 1];
            if p == v {
                return false;
            }
            v = p;
        }
    }
}

/// Symbolic Cholesky of the symmetric `pattern` eliminated in order `q`,
/// through the children-union recursion
/// enn(L^j) = ∪_{k ∈ g(j)} enn(L^k) ∪ enn(A^j) − {1..j-1}.
/// Column sets are expressed in elimination positions (position p holds
/// original vertex q[p-1]).
pub fn symbolic_cholesky(pattern: &BoolPattern, q: &[usize]) -> Result<SymbolicFactor> {
    if !pattern.is_symmetric() {
        return Err(Error::AsymmetricPattern);
    }
    let n = pattern.rows();
    if q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.len() });
    }
    Permutation::from_image(q.to_vec())?;
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stored_lower = 0usize;
    for j in 1..=n {
        // stored entries of the permuted column at or below the diagonal;
        // the diagonal always participates as the pivot
        let mut set: Vec<usize> =
            (j..=n).filter(|&i| i == j || pattern.get(q[i - 1], q[j - 1])).collect();
        stored_lower += set.len();
        for &k in &children[j - 1] {
            for &i in &cols[k - 1] {
                if i > j && !set.contains(&i) {
                    set.push(i);
                }
            }
        }
        set.sort_unstable();
        if let Some(&p) = set.iter().find(|&&i| i > j) {
            children[p - 1].push(j);
        }
        cols.push(set);
    }
    Ok(SymbolicFactor { cols, stored_lower })
}

/// Elimination tree of the symmetric pattern under order `q`: the parent of
/// column j is the first below-diagonal stored row index of L's column j.
pub fn etree(pattern: &BoolPattern, q: &[usize]) -> Result<EliminationTree> {
    let sym = symbolic_cholesky(pattern, q)?;
    let n = sym.n();
    let parent = (1..=n)
        .map(|j| sym.col(j).iter().copied().find(|&i| i > j).unwrap_or(j))
        .collect();
    Ok(EliminationTree { parent })
}

/// Reverse maximum-degree ordering: numbers vertices n..1, each step taking
/// the unnumbered vertex adjacent to the most numbered ones (ties: least
/// index); returns the elimination order q. On chordal graphs the result is
/// a perfect elimination order.
pub fn orgm_order(g: &UGraph) -> Vec<usize> {
    let n = g.n();
    let mut numbered = vec![false; n];
    let mut score = vec![0usize; n];
    let mut rev = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (1..=n)
            .filter(|&v| !numbered[v - 1])
            .max_by(|&a, &b| score[a - 1].cmp(&score[b - 1]).then(b.cmp(&a)))
            .unwrap();
        numbered[v - 1] = true;
        rev.push(v);
        for &w in g.neighbors(v) {
            if !numbered[w - 1] {
                score[w - 1] += 1;
            }
        }
    }
    rev.reverse();
    rev
}

pub fn is_perfect_order(g: &UGraph, q: &[usize]) -> Result<bool> {
    Ok(total_fill(&elimination_sequence(g, q)?) == 0)
}

/// A graph is chordal iff some perfect elimination order exists; decided by
/// checking the reverse maximum-degree order.
pub fn is_chordal(g: &UGraph) -> bool {
    is_perfect_order(g, &orgm_order(g)).expect("orgm order is a bijection")
}

/// Breadth-first level structure from a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStructure {
    pub root: usize,
    pub levels: Vec<Vec<usize>>,
}

impl LevelStructure {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn width(&self) -> usize {
        self.levels.iter().map(|l| l.len()).max().unwrap_or(0)
    }
}

pub fn bfs_levels(g: &UGraph, root: usize) -> Result<LevelStructure> {
    if root < 1 || root > g.n() {
        return Err(Error::IndexOutOfRange { index: root, bound: g.n() });
    }
    let mut seen = vec![false; g.n()];
    seen[root - 1] = true;
    let mut levels = vec![vec![root]];
    loop {
        let last = levels.last().unwrap();
        let mut next = Vec::new();
        for &u in last {
            for &v in g.neighbors(u) {
                if !seen[v - 1] {
                    seen[v - 1] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        levels.push(next);
    }
    Ok(LevelStructure { root, levels })
}

/// Iterated endpoint search: re-roots at a deepest-level minimum-degree
/// vertex until the level depth stops increasing.
pub fn pseudo_peripheral(g: &UGraph, start: usize) -> Result<usize> {
    let mut root = start;
    let mut levels = bfs_levels(g, root)?;
    loop {
        let deepest = levels.levels.last().unwrap();
        let cand = *deepest
            .iter()
            .min_by_key(|&&v| (g.degree(v), v))
            .expect("levels are nonempty");
        let next = bfs_levels(g, cand)?;
        if next.depth() > levels.depth() {
            root = cand;
            levels = next;
        } else {
            return Ok(root);
        }
    }
}

/// Node of the separator tree produced by recursive dissection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatorTree {
    /// Small component ordered wholesale (reverse maximum-degree).
    Leaf { vertices: Vec<usize> },
    /// Separator vertices ordered after all child components.
    Split { separator: Vec<usize>, children: Vec<SeparatorTree> },
}

#[derive(Debug, Clone)]
pub struct Dissection {
    pub order: Vec<usize>,
    pub tree: Vec<SeparatorTree>,
}

/// Recursive dissection ordering: per connected component, find a
/// pseudo-peripheral level structure, take as separator the first level
/// whose shallower cumulative count reaches half the component, order the
/// separator last and recurse on the separated pieces. Components smaller
/// than `min_block` are ordered by the reverse maximum-degree rule.
pub fn dissection_order(g: &UGraph, min_block: usize) -> Dissection {
    let mut order = Vec::with_capacity(g.n());
    let mut tree = Vec::new();
    for comp in g.components() {
        let node = dissect_component(g, &comp, min_block, &mut order);
        tree.push(node);
    }
    Dissection { order, tree }
}

fn dissect_component(
    g: &UGraph,
    comp: &[usize],
    min_block: usize,
    order: &mut Vec<usize>,
) -> SeparatorTree {
    if comp.len() < min_block.max(2) {
        return orgm_leaf(g, comp, order);
    }
    // level structure inside the component
    let sub = induced(g, comp);
    let root_local = pseudo_peripheral(&sub.graph, 1).expect("component is nonempty");
    let levels = bfs_levels(&sub.graph, root_local).expect("root in range");
    if levels.depth() < 2 {
        return orgm_leaf(g, comp, order);
    }
    // smallest level index with cumulative shallower count >= half,
    // clamped away from the root and the deepest level
    let half = (comp.len() + 1) / 2;
    let mut cum = 0usize;
    let mut sep_idx = levels.levels.len() - 2;
    for (i, level) in levels.levels.iter().enumerate() {
        cum += level.len();
        if cum >= half {
            sep_idx = i.clamp(1, levels.levels.len() - 2);
            break;
        }
    }
    // refine to the level vertices actually carrying deep edges; any
    // shallow-to-deep path still crosses one of them
    let deeper: Vec<usize> = levels.levels[sep_idx + 1].clone();
    let separator: Vec<usize> = levels.levels[sep_idx]
        .iter()
        .copied()
        .filter(|&v| sub.graph.neighbors(v).iter().any(|w| deeper.contains(w)))
        .map(|v| sub.to_global[v - 1])
        .collect();
    if separator.is_empty() || separator.len() == comp.len() {
        return orgm_leaf(g, comp, order);
    }
    // remove the separator, recurse on the remaining components
    let rest: Vec<usize> = comp.iter().copied().filter(|v| !separator.contains(v)).collect();
    if rest.is_empty() {
        return orgm_leaf(g, comp, order);
    }
    let rest_sub = induced(g, &rest);
    let mut children = Vec::new();
    for piece in rest_sub.graph.components() {
        let piece_global: Vec<usize> = piece.iter().map(|&v| rest_sub.to_global[v - 1]).collect();
        children.push(dissect_component(g, &piece_global, min_block, order));
    }
    order.extend(separator.iter().copied());
    SeparatorTree::Split { separator, children }
}

fn orgm_leaf(g: &UGraph, comp: &[usize], order: &mut Vec<usize>) -> SeparatorTree {
    let sub = induced(g, comp);
    let local = orgm_order(&sub.graph);
    let vertices: Vec<usize> = local.iter().map(|&v| sub.to_global[v - 1]).collect();
    order.extend(vertices.iter().copied());
    SeparatorTree::Leaf { vertices }
}

struct Induced {
    graph: UGraph,
    to_global: Vec<usize>,
}

fn induced(g: &UGraph, vertices: &[usize]) -> Induced {
    let mut local = vec![0usize; g.n() + 1];
    for (k, &v) in vertices.iter().enumerate() {
        local[v] = k + 1;
    }
    let mut sub = UGraph::new(vertices.len());
    for &v in vertices {
        for &w in g.neighbors(v) {
            if local[w] != 0 && v < w {
                sub.add_edge(local[v], local[w]);
            }
        }
    }
    Induced { graph: sub, to_global: vertices.to_vec() }
}
