//! Batch-dynamic solvers: re-solve only the neighborhood of what a batch
//! touched.

use std::collections::HashSet;

use crate::error::Result;
use crate::graph::{AppliedUpdate, Coloring, EdgeId, Graph, Node};
use crate::solver::{BatchContext, Solver};
use crate::static_solvers::{greedy_rounds, node_centered_process, DEFAULT_THETA};

/// Present edges that were updated or share an endpoint with an updated
/// (possibly deleted) edge, plus the endpoints of updated edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffectedSet {
    pub edges: Vec<EdgeId>,
    pub nodes: Vec<Node>,
}

/// Both lists come out in first-seen order, deduplicated.
pub fn collect_affected(g: &Graph, updates: &[AppliedUpdate]) -> AffectedSet {
    let mut seen_nodes = HashSet::new();
    let mut seen_edges = HashSet::new();
    let mut out = AffectedSet::default();
    for up in updates {
        let (u, v) = g.endpoints(up.edge);
        for x in [u, v] {
            if !seen_nodes.insert(x) {
                continue;
            }
            out.nodes.push(x);
            for &(_, f) in g.neighbors(x) {
                if seen_edges.insert(f) {
                    out.edges.push(f);
                }
            }
        }
    }
    out
}

/// Uncolors the affected edges and reruns the iterative greedy over them.
pub fn batch_greedy(g: &Graph, c: &mut Coloring, updates: &[AppliedUpdate], local_swaps: bool) {
    let AffectedSet { mut edges, .. } = collect_affected(g, updates);
    for &e in &edges {
        c.unset(g, e);
    }
    g.sort_by_weight_desc(&mut edges);
    greedy_rounds(g, c, &edges, local_swaps);
}

/// Uncolors every edge at every updated endpoint and reruns the
/// node-centered greedy over those nodes.
pub fn batch_node_centered(g: &Graph, c: &mut Coloring, updates: &[AppliedUpdate], theta: f64) {
    let affected = collect_affected(g, updates);
    for &e in &affected.edges {
        c.unset(g, e);
    }
    node_centered_process(g, c, affected.nodes, theta);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BatchGreedy {
    pub local_swaps: bool,
}

impl Solver for BatchGreedy {
    fn end_batch(&mut self, g: &Graph, c: &mut Coloring, batch: &BatchContext<'_>) -> Result<()> {
        batch_greedy(g, c, batch.forwarded, self.local_swaps);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BatchNodeCentered {
    pub theta: f64,
}

impl Default for BatchNodeCentered {
    fn default() -> Self {
        BatchNodeCentered { theta: DEFAULT_THETA }
    }
}

impl Solver for BatchNodeCentered {
    fn end_batch(&mut self, g: &Graph, c: &mut Coloring, batch: &BatchContext<'_>) -> Result<()> {
        batch_node_centered(g, c, batch.forwarded, self.theta);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_update, Color, EdgeUpdate};
    use crate::oracle::validate;
    use crate::static_solvers::{greedy_it, node_centered};

    fn path(ws: &[u64]) -> Graph {
        let edges: Vec<_> = ws.iter().enumerate().map(|(i, &w)| (i as u32, i as u32 + 1, w)).collect();
        Graph::from_edges(ws.len() as u32 + 1, &edges).unwrap()
    }

    fn apply(g: &mut Graph, c: &mut Coloring, ups: &[(Node, Node, i64)]) -> Vec<AppliedUpdate> {
        ups.iter().map(|&(u, v, d)| apply_update(g, c, &EdgeUpdate::new(u, v, d)).unwrap()).collect()
    }

    #[test]
    fn affected_sets() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        let ids: Vec<_> = [(0, 1), (1, 2), (2, 3)].iter().map(|&(u, v)| g.find_edge(u, v).unwrap()).collect();
        let a = apply(&mut g, &mut c, &[(1, 2, 1)]);
        let mut got = collect_affected(&g, &a).edges;
        got.sort();
        assert_eq!(got, ids);

        let a = apply(&mut g, &mut c, &[(1, 2, -11)]);
        let mut got = collect_affected(&g, &a).edges;
        got.sort();
        assert_eq!(got, vec![ids[0], ids[2]]);
        assert_eq!(collect_affected(&g, &[]), AffectedSet::default());
    }

    #[test]
    fn batch_greedy_example() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let a = apply(&mut g, &mut c, &[(0, 1, 8)]);
        batch_greedy(&g, &mut c, &a, false);
        validate(&g, &c).unwrap();
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), Some(Color(0)));
        // {2,3} is outside the affected set and stays uncolored
        assert_eq!(c.total_weight(), 12);
    }

    #[test]
    fn full_insertion_matches_greedy_it() {
        let edges = [(0, 1, 5), (1, 2, 7), (2, 3, 5), (3, 0, 6), (0, 2, 3), (1, 4, 9), (4, 5, 2)];
        let target = Graph::from_edges(6, &edges).unwrap();
        for k in 1..4 {
            for ls in [false, true] {
                let mut g = Graph::new(6);
                let mut c = Coloring::new(6, k);
                let ups: Vec<_> = edges.iter().map(|&(u, v, w)| (u, v, w as i64)).collect();
                let a = apply(&mut g, &mut c, &ups);
                batch_greedy(&g, &mut c, &a, ls);
                assert!(c.same_assignment(&greedy_it(&target, k, ls)));
            }
        }
    }

    #[test]
    fn batch_nc_star_matches_scratch() {
        let mut g = Graph::from_edges(5, &[(0, 1, 9), (0, 2, 5), (0, 3, 4), (0, 4, 1)]).unwrap();
        let mut c = node_centered(&g, 2, DEFAULT_THETA).unwrap();
        let a = apply(&mut g, &mut c, &[(0, 4, 7)]);
        batch_node_centered(&g, &mut c, &a, DEFAULT_THETA);
        let scratch = node_centered(&g, 2, DEFAULT_THETA).unwrap();
        assert_eq!(c.total_weight(), scratch.total_weight());
    }

    #[test]
    fn untouched_components_keep_colors() {
        let mut g = Graph::from_edges(8, &[(0, 1, 3), (2, 3, 3), (4, 5, 3), (6, 7, 3)]).unwrap();
        let mut c = node_centered(&g, 1, DEFAULT_THETA).unwrap();
        let before = c.snapshot();
        let a = apply(&mut g, &mut c, &[(0, 1, 1), (4, 5, 2)]);
        batch_node_centered(&g, &mut c, &a, DEFAULT_THETA);
        for (u, v) in [(2, 3), (6, 7)] {
            let e = g.find_edge(u, v).unwrap();
            assert_eq!(before.color(e), c.color(e));
        }
    }
}
