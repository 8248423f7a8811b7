//! Bipartite matching: augmenting-path search over canonical M-alternating
//! trees, Hall violator extraction, and the greedy minimum-weight heuristics
//! (single-minimum and pair-minimum) backed by the Hungarian step.

use crate::error::{Error, Result};
use crate::pattern::BoolPattern;

/// Bipartite graph; rows of the pattern are the X side, columns the Y side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartite {
    nx: usize,
    ny: usize,
    adj_x: Vec<Vec<usize>>,
    adj_y: Vec<Vec<usize>>,
}

impl Bipartite {
    pub fn from_pattern(b: &BoolPattern) -> Self {
        let (nx, ny) = (b.rows(), b.cols());
        let mut adj_x = vec![Vec::new(); nx];
        let mut adj_y = vec![Vec::new(); ny];
        for (i, j) in b.iter_entries() {
            adj_x[i - 1].push(j);
            adj_y[j - 1].push(i);
        }
        Bipartite { nx, ny, adj_x, adj_y }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn neighbors_of_x(&self, x: usize) -> &[usize] {
        &self.adj_x[x - 1]
    }

    pub fn neighbors_of_y(&self, y: usize) -> &[usize] {
        &self.adj_y[y - 1]
    }
}

/// Partner maps; `None` means single.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub x_to_y: Vec<Option<usize>>,
    pub y_to_x: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(b: &Bipartite) -> Self {
        Matching { x_to_y: vec![None; b.nx], y_to_x: vec![None; b.ny] }
    }

    pub fn size(&self) -> usize {
        self.x_to_y.iter().filter(|p| p.is_some()).count()
    }

    pub fn pair(&mut self, x: usize, y: usize) {
        self.x_to_y[x - 1] = Some(y);
        self.y_to_x[y - 1] = Some(x);
    }

    pub fn is_valid(&self, b: &Bipartite) -> bool {
        for x in 1..=b.nx {
            if let Some(y) = self.x_to_y[x - 1] {
                if self.y_to_x[y - 1] != Some(x) || !b.neighbors_of_x(x).contains(&y) {
                    return false;
                }
            }
        }
        for y in 1..=b.ny {
            if let Some(x) = self.y_to_x[y - 1] {
                if self.x_to_y[x - 1] != Some(y) {
                    return false;
                }
            }
        }
        true
    }
}

/// A set S ⊆ X with #Γ(S) = #S - 1, produced when no augmenting path exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallViolator {
    pub rows: Vec<usize>,
    pub image: Vec<usize>,
}

pub enum AugmentOutcome {
    /// Alternating vertex sequence x, y₁, x₁, …, y_k of the applied path.
    Augmented(Vec<usize>),
    Violator(HallViolator),
}

/// Grows `m` by one along an augmenting path rooted at the single vertex
/// `x`, exploring the canonical (least index first) M-alternating tree.
/// When the tree is maximal with no single leaf, returns the Hall violator
/// it spans instead.
pub fn augment(b: &Bipartite, m: &mut Matching, x: usize) -> Result<AugmentOutcome> {
    if x < 1 || x > b.nx {
        return Err(Error::IndexOutOfRange { index: x, bound: b.nx });
    }
    if m.x_to_y[x - 1].is_some() {
        return Err(Error::Invalid(format!("x{x} is not single")));
    }
    let mut seen_y = vec![false; b.ny];
    let mut seen_x = vec![false; b.nx];
    seen_x[x - 1] = true;
    if let Some(path) = dfs_alternate(b, m, x, &mut seen_x, &mut seen_y) {
        // flip the path: odd positions are X, even are Y
        for pair in path.chunks(2) {
            m.pair(pair[0], pair[1]);
        }
        let mut flat = Vec::with_capacity(path.len());
        flat.extend(path);
        return Ok(AugmentOutcome::Augmented(flat));
    }
    let rows: Vec<usize> = (1..=b.nx).filter(|&v| seen_x[v - 1]).collect();
    let image: Vec<usize> = (1..=b.ny).filter(|&v| seen_y[v - 1]).collect();
    debug_assert_eq!(image.len() + 1, rows.len());
    Ok(AugmentOutcome::Violator(HallViolator { rows, image }))
}

/// Returns the path as [x, y1, x1, y2, ..., yk] when found; pairs (x,y1),
/// (x1,y2), ... are the new matched edges.
fn dfs_alternate(
    b: &Bipartite,
    m: &Matching,
    x: usize,
    seen_x: &mut [bool],
    seen_y: &mut [bool],
) -> Option<Vec<usize>> {
    for &y in b.neighbors_of_x(x) {
        if seen_y[y - 1] {
            continue;
        }
        seen_y[y - 1] = true;
        match m.y_to_x[y - 1] {
            None => return Some(vec![x, y]),
            Some(x2) => {
                if !seen_x[x2 - 1] {
                    seen_x[x2 - 1] = true;
                    if let Some(mut rest) = dfs_alternate(b, m, x2, seen_x, seen_y) {
                        let mut path = vec![x, y];
                        path.append(&mut rest);
                        return Some(path);
                    }
                }
            }
        }
    }
    None
}

/// Matching policy: pure Hungarian sweeps, the single-minimum heuristic,
/// the pair-minimum heuristic, or HMS switching to HMP below a weight limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    HungarianOnly,
    Hms,
    Hmp,
    /// HMS while the minimum weight exceeds the limit, HMP at or below it.
    Mixed { hmp_at_or_below: usize },
}

impl Default for Policy {
    fn default() -> Self {
        Policy::Mixed { hmp_at_or_below: 2 }
    }
}

pub enum MatchOutcome {
    Perfect(Matching),
    Violator(HallViolator),
}

/// Vertex handle over both sides, X first for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum V {
    X(usize),
    Y(usize),
}

/// Builds a maximum matching; in perfect-matching mode (|X| = |Y|) a
/// violator is returned as soon as some vertex cannot be matched.
///
/// The heuristics pair single vertices of minimum weight (weight = number
/// of single neighbors); zero-weight singles are handed to the Hungarian
/// augmenting step. Weights are kept lazily: a vertex is re-counted only
/// after a neighbor changed state.
pub fn perfect_match(b: &Bipartite, policy: Policy) -> Result<MatchOutcome> {
    if b.nx != b.ny {
        return Err(Error::DimensionMismatch { expected: b.nx, found: b.ny });
    }
    let mut m = Matching::empty(b);
    let mut weights_x: Vec<Option<usize>> = vec![None; b.nx]; // None = dirty
    let mut weights_y: Vec<Option<usize>> = vec![None; b.ny];

    loop {
        if m.size() == b.nx {
            return Ok(MatchOutcome::Perfect(m));
        }
        if policy == Policy::HungarianOnly {
            let x = (1..=b.nx).find(|&x| m.x_to_y[x - 1].is_none()).unwrap();
            match augment(b, &mut m, x)? {
                AugmentOutcome::Augmented(_) => continue,
                AugmentOutcome::Violator(v) => return Ok(MatchOutcome::Violator(v)),
            }
        }

        // refresh weights of single vertices
        let weight_of = |v: V, m: &Matching| -> usize {
            match v {
                V::X(x) => b.neighbors_of_x(x).iter().filter(|&&y| m.y_to_x[y - 1].is_none()).count(),
                V::Y(y) => b.neighbors_of_y(y).iter().filter(|&&x| m.x_to_y[x - 1].is_none()).count(),
            }
        };
        let mut best: Option<(usize, V)> = None;
        for x in 1..=b.nx {
            if m.x_to_y[x - 1].is_none() {
                let w = *weights_x[x - 1].get_or_insert_with(|| weight_of(V::X(x), &m));
                if best.map_or(true, |(bw, bv)| (w, V::X(x)) < (bw, bv)) {
                    best = Some((w, V::X(x)));
                }
            }
        }
        for y in 1..=b.ny {
            if m.y_to_x[y - 1].is_none() {
                let w = *weights_y[y - 1].get_or_insert_with(|| weight_of(V::Y(y), &m));
                if best.map_or(true, |(bw, bv)| (w, V::Y(y)) < (bw, bv)) {
                    best = Some((w, V::Y(y)));
                }
            }
        }
        let (min_w, min_v) = best.expect("some vertex is single");

        if min_w == 0 {
            // isolated among singles: only an alternating path can fix it;
            // the search is rooted on the X side
            let x = match min_v {
                V::X(x) => x,
                V::Y(_) => (1..=b.nx).find(|&x| m.x_to_y[x - 1].is_none()).unwrap(),
            };
            match augment(b, &mut m, x)? {
                AugmentOutcome::Augmented(path) => {
                    // only the two endpoints changed singleness
                    mark_neighbors_dirty(b, V::X(path[0]), &mut weights_x, &mut weights_y);
                    mark_neighbors_dirty(
                        b,
                        V::Y(*path.last().unwrap()),
                        &mut weights_x,
                        &mut weights_y,
                    );
                    continue;
                }
                AugmentOutcome::Violator(v) => return Ok(MatchOutcome::Violator(v)),
            }
        }

        let use_hmp = match policy {
            Policy::Hmp => true,
            Policy::Hms => false,
            Policy::Mixed { hmp_at_or_below } => min_w <= hmp_at_or_below,
            Policy::HungarianOnly => unreachable!(),
        };

        let (vx, vy) = if use_hmp {
            // pair rule: among all minimum-weight singles, take the
            // (vertex, suitor) pair with minimum suitor weight
            let mut best_pair: Option<(usize, V, V)> = None;
            let mut consider = |v: V, m: &Matching| {
                let suitors: Vec<V> = match v {
                    V::X(x) => b
                        .neighbors_of_x(x)
                        .iter()
                        .filter(|&&y| m.y_to_x[y - 1].is_none())
                        .map(|&y| V::Y(y))
                        .collect(),
                    V::Y(y) => b
                        .neighbors_of_y(y)
                        .iter()
                        .filter(|&&x| m.x_to_y[x - 1].is_none())
                        .map(|&x| V::X(x))
                        .collect(),
                };
                for s in suitors {
                    let sw = weight_of(s, m);
                    if best_pair.map_or(true, |(bw, bs, bv)| (sw, s, v) < (bw, bs, bv)) {
                        best_pair = Some((sw, s, v));
                    }
                }
            };
            for x in 1..=b.nx {
                if m.x_to_y[x - 1].is_none() && weight_of(V::X(x), &m) == min_w {
                    consider(V::X(x), &m);
                }
            }
            for y in 1..=b.ny {
                if m.y_to_x[y - 1].is_none() && weight_of(V::Y(y), &m) == min_w {
                    consider(V::Y(y), &m);
                }
            }
            let (_, suitor, vertex) = best_pair.expect("min_w > 0 means suitors exist");
            order_pair(vertex, suitor)
        } else {
            // single rule: min vertex with its min-weight suitor
            let suitor = match min_v {
                V::X(x) => b
                    .neighbors_of_x(x)
                    .iter()
                    .filter(|&&y| m.y_to_x[y - 1].is_none())
                    .map(|&y| (weight_of(V::Y(y), &m), y))
                    .min()
                    .map(|(_, y)| V::Y(y)),
                V::Y(y) => b
                    .neighbors_of_y(y)
                    .iter()
                    .filter(|&&x| m.x_to_y[x - 1].is_none())
                    .map(|&x| (weight_of(V::X(x), &m), x))
                    .min()
                    .map(|(_, x)| V::X(x)),
            };
            order_pair(min_v, suitor.expect("min_w > 0 means suitors exist"))
        };

        m.pair(vx, vy);
        mark_neighbors_dirty(b, V::X(vx), &mut weights_x, &mut weights_y);
        mark_neighbors_dirty(b, V::Y(vy), &mut weights_x, &mut weights_y);
    }
}

fn order_pair(a: V, b: V) -> (usize, usize) {
    match (a, b) {
        (V::X(x), V::Y(y)) | (V::Y(y), V::X(x)) => (x, y),
        _ => unreachable!("pair endpoints are on opposite sides"),
    }
}

fn mark_neighbors_dirty(
    b: &Bipartite,
    v: V,
    weights_x: &mut [Option<usize>],
    weights_y: &mut [Option<usize>],
) {
    match v {
        V::X(x) => {
            for &y in b.neighbors_of_x(x) {
                weights_y[y - 1] = None;
            }
        }
        V::Y(y) => {
            for &x in b.neighbors_of_y(y) {
                weights_x[x - 1] = None;
            }
        }
    }
}
