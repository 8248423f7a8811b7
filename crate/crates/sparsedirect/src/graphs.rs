//! Directed-graph kernel: canonical depth-first forests with visit/return
//! orders, the two-pass strongly-connected-components algorithm, transitive
//! closure and coherence checking of reorderings.

use crate::error::{Error, Result};
use crate::pattern::BoolPattern;

/// Directed graph on vertices 1..=n with sorted successor lists; loops
/// permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    succ: Vec<Vec<usize>>,
}

impl DiGraph {
    pub fn new(n: usize) -> Self {
        DiGraph { succ: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adjacency-pattern constructor: edge i -> j iff B(i, j).
    pub fn from_pattern(b: &BoolPattern) -> Self {
        assert_eq!(b.rows(), b.cols());
        let mut g = Self::new(b.rows());
        for (i, j) in b.iter_entries() {
            g.add_edge(i, j);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        let list = &mut self.succ[u - 1];
        if let Err(pos) = list.binary_search(&v) {
            list.insert(pos, v);
        }
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v - 1]
    }

    pub fn inverse(&self) -> DiGraph {
        let mut g = Self::new(self.n());
        for u in 1..=self.n() {
            for &v in self.successors(u) {
                g.add_edge(v, u);
            }
        }
        g
    }

    pub fn adjacency(&self) -> BoolPattern {
        let mut b = BoolPattern::new(self.n(), self.n());
        for u in 1..=self.n() {
            for &v in self.successors(u) {
                b.set(u, v, true);
            }
        }
        b
    }

    /// Vertices reachable from `v` including `v` itself (Γ⁰(v) = {v}).
    pub fn descendants(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![v];
        seen[v - 1] = true;
        while let Some(u) = stack.pop() {
            for &w in self.successors(u) {
                if !seen[w - 1] {
                    seen[w - 1] = true;
                    stack.push(w);
                }
            }
        }
        (1..=self.n()).filter(|&w| seen[w - 1]).collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        self.descendants(1).len() == self.n() && self.inverse().descendants(1).len() == self.n()
    }
}

/// Depth-first search forest with parent links, roots and both orders.
/// `visit_order[v-1]` (Ov) and `return_order[v-1]` (Or) are 1-based ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsForest {
    pub parent: Vec<Option<usize>>,
    pub roots: Vec<usize>,
    pub visit_order: Vec<usize>,
    pub return_order: Vec<usize>,
    /// k-th visited vertex (inverse of `visit_order`).
    pub visit_seq: Vec<usize>,
    /// k-th returned vertex (inverse of `return_order`).
    pub return_seq: Vec<usize>,
}

/// Canonical depth-first forest: roots and children are taken in
/// `vertex_order` among the not-yet-visited vertices. The search is
/// iterative; recursion depth is not bounded by the input.
pub fn dfs_forest(g: &DiGraph, vertex_order: &[usize]) -> Result<DfsForest> {
    let n = g.n();
    if vertex_order.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: vertex_order.len() });
    }
    // priority[v-1] = rank of v in vertex_order
    let mut priority = vec![usize::MAX; n];
    for (rank, &v) in vertex_order.iter().enumerate() {
        if v < 1 || v > n {
            return Err(Error::IndexOutOfRange { index: v, bound: n });
        }
        priority[v - 1] = rank;
    }
    if priority.iter().any(|&p| p == usize::MAX) {
        return Err(Error::Invalid("vertex_order is not a bijection".into()));
    }

    let mut parent = vec![None; n];
    let mut roots = Vec::new();
    let mut visit_order = vec![0usize; n];
    let mut return_order = vec![0usize; n];
    let mut visit_seq = Vec::with_capacity(n);
    let mut return_seq = Vec::with_capacity(n);
    let mut visited = vec![false; n];

    for &root in vertex_order {
        if visited[root - 1] {
            continue;
        }
        roots.push(root);
        visited[root - 1] = true;
        visit_seq.push(root);
        visit_order[root - 1] = visit_seq.len();
        // (vertex, children sorted by priority, next child position)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, ordered(g, root, &priority), 0)];
        while let Some((v, children, at)) = stack.last_mut() {
            let mut advanced = false;
            while *at < children.len() {
                let w = children[*at];
                *at += 1;
                if !visited[w - 1] {
                    visited[w - 1] = true;
                    parent[w - 1] = Some(*v);
                    visit_seq.push(w);
                    visit_order[w - 1] = visit_seq.len();
                    let next = (w, ordered(g, w, &priority), 0);
                    stack.push(next);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                let (v, _, _) = stack.pop().unwrap();
                return_seq.push(v);
                return_order[v - 1] = return_seq.len();
            }
        }
    }
    Ok(DfsForest { parent, roots, visit_order, return_order, visit_seq, return_seq })
}

fn ordered(g: &DiGraph, v: usize, priority: &[usize]) -> Vec<usize> {
    let mut ch: Vec<usize> = g.successors(v).to_vec();
    ch.sort_by_key(|&w| priority[w - 1]);
    ch
}

/// Strongly connected components with the coherent reordering delivered by
/// the second search pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    /// 1-based component id per vertex; ids follow `components` order.
    pub component_of: Vec<usize>,
    /// Components in topological order of the reduced graph.
    pub components: Vec<Vec<usize>>,
    /// Coherent reordering of the vertices (second-pass visit sequence).
    pub coherent_order: Vec<usize>,
}

impl SccPartition {
    /// Canonical form for comparisons: each component sorted, components
    /// sorted by smallest member.
    pub fn canonical_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = self
            .components
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        sets.sort();
        sets
    }
}

/// Two-pass strongly-connected-components algorithm: a canonical forest on
/// G recording return order, then a canonical forest on G⁻¹ with vertices
/// taken in decreasing return order. Each second-pass tree covers exactly
/// one component, and the second-pass visit order is a coherent reordering.
pub fn tarjan_scc(g: &DiGraph) -> SccPartition {
    let n = g.n();
    let natural: Vec<usize> = (1..=n).collect();
    let first = dfs_forest(g, &natural).expect("natural order is a bijection");
    let mut by_return_desc: Vec<usize> = first.return_seq.clone();
    by_return_desc.reverse();
    let inv = g.inverse();
    let second = dfs_forest(&inv, &by_return_desc).expect("permuted order is a bijection");

    let mut component_of = vec![0usize; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    // trees of the second pass, in creation order, are the components
    let mut root_comp = vec![0usize; n];
    for (k, &r) in second.roots.iter().enumerate() {
        root_comp[r - 1] = k + 1;
        components.push(Vec::new());
    }
    for &v in &second.visit_seq {
        // walk to the root of v's tree
        let mut r = v;
        while let Some(p) = second.parent[r - 1] {
            r = p;
        }
        let c = root_comp[r - 1];
        component_of[v - 1] = c;
        components[c - 1].push(v);
    }
    SccPartition { component_of, components, coherent_order: second.visit_seq.clone() }
}

/// Reduced graph on the component ids of `scc` (no loops).
pub fn reduced_graph(g: &DiGraph, scc: &SccPartition) -> DiGraph {
    let k = scc.components.len();
    let mut r = DiGraph::new(k);
    for u in 1..=g.n() {
        for &v in g.successors(u) {
            let (cu, cv) = (scc.component_of[u - 1], scc.component_of[v - 1]);
            if cu != cv {
                r.add_edge(cu, cv);
            }
        }
    }
    r
}

pub fn is_acyclic(g: &DiGraph) -> bool {
    // Kahn peeling on in-degrees
    let n = g.n();
    let mut indeg = vec![0usize; n];
    for u in 1..=n {
        for &v in g.successors(u) {
            indeg[v - 1] += 1;
        }
    }
    let mut queue: Vec<usize> = (1..=n).filter(|&v| indeg[v - 1] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for &v in g.successors(u) {
            indeg[v - 1] -= 1;
            if indeg[v - 1] == 0 {
                queue.push(v);
            }
        }
    }
    removed == n
}

/// Transitive closure as an adjacency pattern, with Γ⁰(i) = {i}.
pub fn transitive_closure(g: &DiGraph) -> BoolPattern {
    let n = g.n();
    let mut b = BoolPattern::new(n, n);
    for v in 1..=n {
        for w in g.descendants(v) {
            b.set(v, w, true);
        }
    }
    b
}

/// Result of the two coherence criteria for a reordering: criterion 1 is
/// the subordination to the reduced partial order, criterion 2 forbids
/// interleaving vertices of distinct components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coherence {
    pub criterion1: bool,
    pub criterion2: bool,
}

impl Coherence {
    pub fn is_coherent(&self) -> bool {
        self.criterion1 && self.criterion2
    }
}

pub fn is_coherent(g: &DiGraph, q: &[usize]) -> Result<Coherence> {
    let n = g.n();
    if q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.len() });
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in q.iter().enumerate() {
        if v < 1 || v > n {
            return Err(Error::IndexOutOfRange { index: v, bound: n });
        }
        pos[v - 1] = k;
    }
    if pos.iter().any(|&p| p == usize::MAX) {
        return Err(Error::Invalid("q is not a bijection".into()));
    }
    let closure = transitive_closure(g);
    let scc = tarjan_scc(g);

    // criterion 1: a <= b and not b <= a forces a before b
    let mut criterion1 = true;
    'c1: for a in 1..=n {
        for b in 1..=n {
            if a != b && closure.get(a, b) && !closure.get(b, a) && pos[a - 1] > pos[b - 1] {
                criterion1 = false;
                break 'c1;
            }
        }
    }
    // criterion 2: each component occupies a contiguous run of q
    let mut criterion2 = true;
    for comp in &scc.components {
        let mut ps: Vec<usize> = comp.iter().map(|&v| pos[v - 1]).collect();
        ps.sort_unstable();
        if ps.windows(2).any(|w| w[1] != w[0] + 1) {
            criterion2 = false;
            break;
        }
    }
    Ok(Coherence { criterion1, criterion2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The four adjacency matrices of the order-relations example.
    pub fn example3_graphs() -> [DiGraph; 4] {
        [
            DiGraph::from_edges(4, &[(1, 2), (2, 1), (2, 3)]),
            DiGraph::from_edges(4, &[(1, 2), (2, 1), (3, 4), (4, 3)]),
            DiGraph::from_edges(4, &[(1, 2), (1, 3), (2, 4), (3, 4)]),
            DiGraph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]),
        ]
    }

    #[test]
    fn single_vertex_forest() {
        let g = DiGraph::new(1);
        let f = dfs_forest(&g, &[1]).unwrap();
        assert_eq!(f.roots, vec![1]);
        assert_eq!(f.visit_order, vec![1]);
        assert_eq!(f.return_order, vec![1]);
    }

    #[test]
    fn path_graph_return_order_reversed() {
        let g = DiGraph::from_edges(3, &[(1, 2), (2, 3)]);
        let f = dfs_forest(&g, &[1, 2, 3]).unwrap();
        assert_eq!(f.roots, vec![1]);
        assert_eq!(f.visit_seq, vec![1, 2, 3]);
        assert_eq!(f.return_seq, vec![3, 2, 1]);
        assert_eq!(f.parent, vec![None, Some(1), Some(2)]);
    }

    #[test]
    fn forest_parents_visited_before_children() {
        let g = DiGraph::from_edges(6, &[(2, 2), (4, 3), (4, 5), (4, 6), (5, 3), (5, 4), (5, 5), (6, 5)]);
        let f = dfs_forest(&g, &(1..=6).collect::<Vec<_>>()).unwrap();
        for v in 1..=6 {
            if let Some(p) = f.parent[v - 1] {
                assert!(f.visit_order[p - 1] < f.visit_order[v - 1]);
            }
        }
    }

    #[test]
    fn scc_partitions_match_printed_example() {
        let [g1, g2, g3, g4] = example3_graphs();
        assert_eq!(tarjan_scc(&g1).canonical_sets(), vec![vec![1, 2], vec![3], vec![4]]);
        assert_eq!(tarjan_scc(&g2).canonical_sets(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(tarjan_scc(&g3).canonical_sets(), vec![vec![1], vec![2], vec![3], vec![4]]);
        assert_eq!(tarjan_scc(&g4).canonical_sets(), vec![vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn emitted_order_is_coherent_and_reduced_graph_acyclic() {
        for g in example3_graphs() {
            let scc = tarjan_scc(&g);
            assert!(is_coherent(&g, &scc.coherent_order).unwrap().is_coherent());
            assert!(is_acyclic(&reduced_graph(&g, &scc)));
        }
    }

    #[test]
    fn closure_of_printed_4x4() {
        let g = DiGraph::from_edges(4, &[(1, 2), (2, 2), (2, 3), (3, 4)]);
        let c = transitive_closure(&g);
        let expect = BoolPattern::from_rows01(&[
            &[1, 1, 1, 1],
            &[0, 1, 1, 1],
            &[0, 0, 1, 1],
            &[0, 0, 0, 1],
        ]);
        assert_eq!(c, expect);
    }

    #[test]
    fn closure_of_edgeless_graph_is_identity() {
        let g = DiGraph::new(5);
        let c = transitive_closure(&g);
        for i in 1..=5 {
            for j in 1..=5 {
                assert_eq!(c.get(i, j), i == j);
            }
        }
    }

    #[test]
    fn coherence_printed_cases() {
        // no-edge reading of G1 consistent with the printed "(1)" annotation
        let g1_no_23 = DiGraph::from_edges(4, &[(1, 2), (2, 1)]);
        let c = is_coherent(&g1_no_23, &[1, 3, 2, 4]).unwrap();
        assert!(c.criterion1);
        assert!(!c.criterion2);

        let [_, _, g3, g4] = example3_graphs();
        assert!(is_coherent(&g4, &[1, 2, 3, 4]).unwrap().is_coherent());
        assert!(is_coherent(&g3, &[1, 3, 2, 4]).unwrap().is_coherent());
        assert!(!is_coherent(&g4, &[2, 1, 3, 4]).unwrap().criterion1);
    }

    #[test]
    fn printed_reduced_graph_of_g1_has_class_edge() {
        let [g1, _, _, _] = example3_graphs();
        let scc = tarjan_scc(&g1);
        let r = reduced_graph(&g1, &scc);
        // {1,2} -> {3} is the single reduced edge
        let total: usize = (1..=r.n()).map(|v| r.successors(v).len()).sum();
        assert_eq!(total, 1);
    }
}
