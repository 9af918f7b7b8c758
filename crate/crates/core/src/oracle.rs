//! Ground truth: coloring validation, recourse, and an exact solver for tiny
//! graphs.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Color, Coloring, EdgeId, Graph, Node};

/// Frozen color map taken at a batch boundary, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringSnapshot {
    colors: Vec<Option<Color>>,
}

impl ColoringSnapshot {
    pub(crate) fn new(colors: Vec<Option<Color>>) -> Self {
        ColoringSnapshot { colors }
    }

    pub fn color(&self, e: EdgeId) -> Option<Color> {
        self.colors.get(e.index()).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecourseScope<'a> {
    /// Every edge id of the graph.
    All,
    /// Only the given (updated) edges.
    Touched(&'a [EdgeId]),
}

/// Number of edges whose color (uncolored counting as a value) differs
/// between `before` and `after`.
pub fn recourse(before: &ColoringSnapshot, after: &Coloring, scope: RecourseScope<'_>) -> usize {
    match scope {
        RecourseScope::All => {
            let after_snap = after.snapshot();
            let len = before.len().max(after_snap.len());
            (0..len).filter(|&i| before.color(EdgeId(i as u32)) != after_snap.color(EdgeId(i as u32))).count()
        }
        RecourseScope::Touched(edges) => edges.iter().filter(|&&e| before.color(e) != after.color(e)).count(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ColorConflict { vertex: Node, color: Color, first: EdgeId, second: EdgeId },
    ColoredAbsent { edge: EdgeId },
    Occupancy { vertex: Node, color: Color },
    CachedWeight { cached: u64, actual: u64 },
    CachedCount { cached: usize, actual: usize },
    Graph(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ColorConflict { vertex, color, first, second } => write!(
                f,
                "vertex {vertex} has two edges ({} and {}) of color {}",
                first.0,
                second.0,
                color.0 + 1
            ),
            Violation::ColoredAbsent { edge } => write!(f, "absent edge {} is colored", edge.0),
            Violation::Occupancy { vertex, color } => {
                write!(f, "occupancy of vertex {vertex} color {} is inconsistent", color.0 + 1)
            }
            Violation::CachedWeight { cached, actual } => {
                write!(f, "cached coloring weight {cached} but colored edges weigh {actual}")
            }
            Violation::CachedCount { cached, actual } => {
                write!(f, "cached colored count {cached} but {actual} edges are colored")
            }
            Violation::Graph(msg) => write!(f, "graph: {msg}"),
        }
    }
}

/// Full O(m·k + n·k) check of properness and every cache.
pub fn validate(g: &Graph, c: &Coloring) -> Result<(), Violation> {
    g.check_consistency().map_err(Violation::Graph)?;
    let k = c.k();
    let mut seen: Vec<Option<EdgeId>> = vec![None; g.n() as usize * k];
    let mut total = 0u64;
    let mut count = 0usize;
    for (e, col) in c.colored_edges() {
        if e.index() >= g.edge_slots() || !g.is_present(e) {
            return Err(Violation::ColoredAbsent { edge: e });
        }
        total += g.weight(e);
        count += 1;
        let (u, v) = g.endpoints(e);
        for x in [u, v] {
            let slot = &mut seen[x as usize * k + col.index()];
            if let Some(first) = *slot {
                return Err(Violation::ColorConflict { vertex: x, color: col, first, second: e });
            }
            *slot = Some(e);
        }
    }
    for x in 0..g.n() {
        for col in c.colors() {
            if c.occupant(x, col) != seen[x as usize * k + col.index()] {
                return Err(Violation::Occupancy { vertex: x, color: col });
            }
        }
    }
    if total != c.total_weight() {
        return Err(Violation::CachedWeight { cached: c.total_weight(), actual: total });
    }
    if count != c.colored_count() {
        return Err(Violation::CachedCount { cached: c.colored_count(), actual: count });
    }
    Ok(())
}

/// First uncolored edge and color for which w[N_c(e)] < w(e), if any.
pub fn invariant_violation(g: &Graph, c: &Coloring) -> Option<(EdgeId, Color)> {
    g.present_edges().iter().copied().filter(|&e| !c.is_colored(e)).find_map(|e| {
        c.colors().find(|&col| c.colored_neighborhood_weight(g, e, col) < g.weight(e)).map(|col| (e, col))
    })
}

pub const DEFAULT_ORACLE_MAX_EDGES: usize = 20;

/// Exact maximum-weight partial k-coloring by branch and bound.
/// Returns the weight and a witness (`color[i]` for the i-th present edge in
/// [`Graph::present_edges`] order).
pub fn brute_force_opt(g: &Graph, k: usize) -> Result<(u64, Vec<Option<Color>>)> {
    brute_force_opt_bounded(g, k, DEFAULT_ORACLE_MAX_EDGES)
}

pub fn brute_force_opt_bounded(g: &Graph, k: usize, max_edges: usize) -> Result<(u64, Vec<Option<Color>>)> {
    let m = g.m();
    if m > max_edges {
        return Err(Error::Config(format!("brute force refuses m = {m} > {max_edges}")));
    }
    let present = g.present_edges();
    // heavy edges first so the bound bites early
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| g.weight(present[b]).cmp(&g.weight(present[a])).then(a.cmp(&b)));
    let edges: Vec<(usize, usize, u64)> = order
        .iter()
        .map(|&i| {
            let (u, v) = g.endpoints(present[i]);
            (u as usize, v as usize, g.weight(present[i]))
        })
        .collect();
    let mut suffix = vec![0u64; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] + edges[i].2;
    }
    let mut search = Search {
        edges: &edges,
        suffix: &suffix,
        k,
        used: vec![0u64; g.n() as usize],
        assign: vec![None; m],
        best: 0,
        best_assign: vec![None; m],
    };
    search.run(0, 0, 0);
    let mut witness = vec![None; m];
    for (pos, &i) in order.iter().enumerate() {
        witness[i] = search.best_assign[pos].map(|c: u16| Color(c));
    }
    Ok((search.best, witness))
}

struct Search<'a> {
    edges: &'a [(usize, usize, u64)],
    suffix: &'a [u64],
    k: usize,
    used: Vec<u64>,
    assign: Vec<Option<u16>>,
    best: u64,
    best_assign: Vec<Option<u16>>,
}

impl Search<'_> {
    // `opened` = number of distinct colors used so far; colors are
    // interchangeable, so a new color is only ever the next unused index.
    fn run(&mut self, i: usize, weight: u64, opened: usize) {
        if weight > self.best {
            self.best = weight;
            self.best_assign.clone_from(&self.assign);
        }
        if i == self.edges.len() || weight + self.suffix[i] <= self.best {
            return;
        }
        let (u, v, w) = self.edges[i];
        let limit = (opened + 1).min(self.k);
        for col in 0..limit {
            let bit = 1u64 << col;
            if self.used[u] & bit == 0 && self.used[v] & bit == 0 {
                self.used[u] |= bit;
                self.used[v] |= bit;
                self.assign[i] = Some(col as u16);
                self.run(i + 1, weight + w, opened.max(col + 1));
                self.assign[i] = None;
                self.used[u] &= !bit;
                self.used[v] &= !bit;
            }
        }
        self.run(i + 1, weight, opened);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(ws: &[u64]) -> Graph {
        let edges: Vec<_> = ws.iter().enumerate().map(|(i, &w)| (i as u32, i as u32 + 1, w)).collect();
        Graph::from_edges(ws.len() as u32 + 1, &edges).unwrap()
    }

    /// Independent enumerator: every edge subset, kept if it is k-edge-colorable.
    fn subset_opt(g: &Graph, k: usize) -> u64 {
        let present = g.present_edges();
        let m = present.len();
        let mut best = 0;
        for mask in 0u32..(1 << m) {
            let sub: Vec<EdgeId> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| present[i]).collect();
            let w: u64 = sub.iter().map(|&e| g.weight(e)).sum();
            if w > best && colorable(g, &sub, k) {
                best = w;
            }
        }
        best
    }

    fn colorable(g: &Graph, sub: &[EdgeId], k: usize) -> bool {
        fn go(g: &Graph, sub: &[EdgeId], k: usize, i: usize, cols: &mut Vec<usize>) -> bool {
            if i == sub.len() {
                return true;
            }
            let (u, v) = g.endpoints(sub[i]);
            for col in 0..k {
                let clash = (0..i).any(|j| {
                    let (a, b) = g.endpoints(sub[j]);
                    cols[j] == col && (a == u || a == v || b == u || b == v)
                });
                if !clash {
                    cols.push(col);
                    if go(g, sub, k, i + 1, cols) {
                        return true;
                    }
                    cols.pop();
                }
            }
            false
        }
        go(g, sub, k, 0, &mut Vec::new())
    }

    fn witness_coloring(g: &Graph, k: usize, witness: &[Option<Color>]) -> Coloring {
        let mut c = Coloring::new(g.n(), k);
        for (i, col) in witness.iter().enumerate() {
            if let Some(col) = col {
                c.set(g, g.present_edges()[i], *col);
            }
        }
        c
    }

    #[test]
    fn brute_force_examples() {
        let g = path(&[4, 10, 4]);
        assert_eq!(brute_force_opt(&g, 1).unwrap().0, 10);
        assert_eq!(brute_force_opt(&g, 2).unwrap().0, 18);
        let tri = Graph::from_edges(3, &[(0, 1, 5), (1, 2, 3), (0, 2, 2)]).unwrap();
        assert_eq!(brute_force_opt(&tri, 3).unwrap().0, 10);
        assert_eq!(brute_force_opt(&tri, 2).unwrap().0, 8);
    }

    #[test]
    fn brute_force_witness_is_valid() {
        let g = Graph::from_edges(5, &[(0, 1, 5), (1, 2, 3), (0, 2, 2), (2, 3, 7), (3, 4, 1), (1, 3, 4)]).unwrap();
        for k in 1..=3 {
            let (w, witness) = brute_force_opt(&g, k).unwrap();
            let c = witness_coloring(&g, k, &witness);
            validate(&g, &c).unwrap();
            assert_eq!(c.total_weight(), w);
        }
    }

    #[test]
    fn brute_force_guard() {
        let edges: Vec<_> = (0..21).map(|i| (i, i + 1, 1)).collect();
        let g = Graph::from_edges(22, &edges).unwrap();
        assert!(brute_force_opt(&g, 2).is_err());
    }

    #[test]
    fn enumerators_agree_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(2..7u32);
            let mut g = Graph::new(n);
            let m = rng.random_range(0..=10usize);
            for _ in 0..m {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u != v && g.find_edge(u, v).is_none() {
                    g.set_weight(u, v, rng.random_range(1..20)).unwrap();
                }
            }
            for k in 1..=3 {
                assert_eq!(brute_force_opt(&g, k).unwrap().0, subset_opt(&g, k));
            }
        }
    }

    #[test]
    fn validate_reports_conflict_and_absent() {
        let mut g = path(&[3, 4]);
        let mut c = Coloring::new(3, 1);
        let (e01, e12) = (g.find_edge(0, 1).unwrap(), g.find_edge(1, 2).unwrap());
        c.set(&g, e01, Color(0));
        // force a conflict behind the cache's back
        let mut bad = c.clone();
        bad.unset(&g, e01);
        bad.set(&g, e12, Color(0));
        bad.set_unchecked_for_test(&g, e01, Color(0));
        assert!(matches!(validate(&g, &bad), Err(Violation::ColorConflict { vertex: 1, .. })));

        g.set_weight(0, 1, 0).unwrap();
        assert!(matches!(validate(&g, &c), Err(Violation::ColoredAbsent { .. })));
    }

    #[test]
    fn recourse_counts() {
        let g = path(&[3, 10, 5]);
        let (e01, e12, e23) = (g.find_edge(0, 1).unwrap(), g.find_edge(1, 2).unwrap(), g.find_edge(2, 3).unwrap());
        let mut c = Coloring::new(4, 2);
        c.set(&g, e12, Color(0));
        let before = c.snapshot();
        assert_eq!(recourse(&before, &c, RecourseScope::All), 0);
        c.unset(&g, e12);
        c.set(&g, e12, Color(1));
        assert_eq!(recourse(&before, &c, RecourseScope::All), 1);

        let mut c = Coloring::new(4, 1);
        c.set(&g, e01, Color(0));
        c.set(&g, e23, Color(0));
        let before = c.snapshot();
        crate::primitives::swap_in(&g, &mut c, e12, Color(0)).unwrap().unwrap();
        assert_eq!(recourse(&before, &c, RecourseScope::All), 3);
        assert_eq!(recourse(&before, &c, RecourseScope::Touched(&[e12])), 1);
    }
}
