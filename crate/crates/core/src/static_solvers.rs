//! From-scratch solvers: iterative greedy (optionally with local swaps),
//! node-centered greedy, and the Misra–Gries based k-edge-coloring `kec`.

use crate::error::{Error, Result};
use crate::graph::{Color, Coloring, EdgeId, Graph, Node};
use crate::primitives::swap_out;

/// Deferral threshold of the node-centered solvers.
pub const DEFAULT_THETA: f64 = 0.2;

pub fn greedy_it(g: &Graph, k: usize, local_swaps: bool) -> Coloring {
    let mut c = Coloring::new(g.n(), k);
    greedy_it_into(g, &mut c, local_swaps);
    c
}

/// Recomputes `c` from scratch with the iterative greedy.
pub fn greedy_it_into(g: &Graph, c: &mut Coloring, local_swaps: bool) {
    c.clear();
    let edges = g.edges_by_weight_desc();
    greedy_rounds(g, c, &edges, local_swaps);
}

/// One greedy round per color over `edges` (already sorted by non-increasing
/// weight). With `local_swaps`, every edge colored in a round is offered a
/// swap-out before the next color starts.
pub(crate) fn greedy_rounds(g: &Graph, c: &mut Coloring, edges: &[EdgeId], local_swaps: bool) {
    for col in c.colors() {
        let mut fresh = Vec::new();
        c.stats.touched += edges.len() as u64;
        for &e in edges {
            if c.is_colored(e) {
                continue;
            }
            let (u, v) = g.endpoints(e);
            if c.is_free(u, col) && c.is_free(v, col) {
                c.set(g, e, col);
                fresh.push(e);
            }
        }
        if local_swaps {
            for e in fresh {
                if c.color(e) == Some(col) {
                    swap_out(g, c, e).expect("edge checked colored");
                }
            }
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Config(format!("theta must be in [0, 1], got {theta}")))
    }
}

pub fn node_centered(g: &Graph, k: usize, theta: f64) -> Result<Coloring> {
    let mut c = Coloring::new(g.n(), k);
    node_centered_into(g, &mut c, theta)?;
    Ok(c)
}

pub fn node_centered_into(g: &Graph, c: &mut Coloring, theta: f64) -> Result<()> {
    check_theta(theta)?;
    c.clear();
    node_centered_process(g, c, (0..g.n()).collect(), theta);
    Ok(())
}

/// Sum of the `k` heaviest incident weights.
pub fn node_rating(g: &Graph, v: Node, k: usize) -> u64 {
    let mut ws: Vec<u64> = g.neighbors(v).iter().map(|&(_, e)| g.weight(e)).collect();
    if ws.len() > k {
        ws.select_nth_unstable_by(k - 1, |a, b| b.cmp(a));
        ws.truncate(k);
    }
    ws.iter().sum()
}

/// Node-centered greedy over `nodes`: nodes by non-increasing rating, their
/// uncolored incident edges by non-increasing weight; edges lighter than
/// `theta * W` wait for a final pass.
pub(crate) fn node_centered_process(g: &Graph, c: &mut Coloring, nodes: Vec<Node>, theta: f64) {
    let k = c.k();
    let cutoff = theta * g.max_weight() as f64;
    let mut ranked: Vec<(u64, Node)> = nodes.into_iter().map(|v| (node_rating(g, v, k), v)).collect();
    ranked.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut deferred = Vec::new();
    let mut incident = Vec::new();
    for (_, v) in ranked {
        incident.clear();
        incident.extend(g.neighbors(v).iter().map(|&(_, e)| e));
        g.sort_by_weight_desc(&mut incident);
        c.stats.touched += incident.len() as u64;
        for &e in &incident {
            if !c.has_free_color(v) {
                break;
            }
            if c.is_colored(e) {
                continue;
            }
            if (g.weight(e) as f64) < cutoff {
                deferred.push(e);
                continue;
            }
            if let Some(col) = c.common_free_color(g, e) {
                c.set(g, e, col);
            }
        }
    }
    g.sort_by_weight_desc(&mut deferred);
    deferred.dedup();
    for e in deferred {
        if !c.is_colored(e) {
            if let Some(col) = c.common_free_color(g, e) {
                c.set(g, e, col);
            }
        }
    }
}

pub fn kec(g: &Graph, k: usize) -> Coloring {
    let mut c = Coloring::new(g.n(), k);
    kec_into(g, &mut c);
    c
}

/// Recomputes `c` from scratch: every present edge, heaviest first, through
/// [`k_color_edge`].
pub fn kec_into(g: &Graph, c: &mut Coloring) {
    c.clear();
    for e in g.edges_by_weight_desc() {
        k_color_edge(g, c, e).expect("edge uncolored after clear");
    }
}

/// Misra–Gries fan around `center`: `leaves[0]` is the far end of the edge to
/// color, and for i >= 1 the color of `edges[i]` is free at `leaves[i - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub center: Node,
    pub leaves: Vec<Node>,
    pub edges: Vec<EdgeId>,
}

impl Fan {
    /// Builds a maximal fan. Extension candidates are tried in color order:
    /// for each color free at the current last leaf, the center's edge of
    /// that color.
    pub fn build(g: &Graph, c: &Coloring, center: Node, e: EdgeId) -> Fan {
        let mut fan = Fan { center, leaves: vec![g.other(e, center)], edges: vec![e] };
        'extend: loop {
            let last = *fan.leaves.last().unwrap();
            for col in c.colors() {
                if !c.is_free(last, col) {
                    continue;
                }
                if let Some(f) = c.occupant(center, col) {
                    let x = g.other(f, center);
                    if !fan.leaves.contains(&x) {
                        fan.leaves.push(x);
                        fan.edges.push(f);
                        continue 'extend;
                    }
                }
            }
            break;
        }
        fan
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Shifts colors down the prefix `0..=upto` and gives `edges[upto]` the
    /// color `last`.
    fn rotate(&self, g: &Graph, c: &mut Coloring, upto: usize, last: Color) {
        let shifted: Vec<Color> = self.edges[1..=upto].iter().map(|&f| c.color(f).expect("fan edge colored")).collect();
        for &f in &self.edges[1..=upto] {
            c.unset(g, f);
        }
        for (i, &col) in shifted.iter().enumerate() {
            c.set(g, self.edges[i], col);
        }
        c.set(g, self.edges[upto], last);
    }
}

/// Maximal path from `start` whose edge colors alternate `first`, `second`,
/// `first`, ... (`second` must be free at `start`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingPath {
    pub start: Node,
    pub first: Color,
    pub second: Color,
    pub edges: Vec<EdgeId>,
}

impl AlternatingPath {
    pub fn build(g: &Graph, c: &Coloring, start: Node, first: Color, second: Color) -> AlternatingPath {
        let mut edges = Vec::new();
        let (mut at, mut col) = (start, first);
        while let Some(f) = c.occupant(at, col) {
            edges.push(f);
            at = g.other(f, at);
            col = if col == first { second } else { first };
            if edges.len() > g.m() {
                panic!("alternating walk from {start} does not terminate");
            }
        }
        AlternatingPath { start, first, second, edges }
    }

    /// Swaps the two colors along the path.
    pub fn invert(&self, g: &Graph, c: &mut Coloring) {
        let cols: Vec<Color> = self.edges.iter().map(|&f| c.color(f).expect("path edge colored")).collect();
        for &f in &self.edges {
            c.unset(g, f);
        }
        for (&f, &col) in self.edges.iter().zip(&cols) {
            let swapped = if col == self.first { self.second } else { self.first };
            c.set(g, f, swapped);
        }
    }
}

/// Tries to color the uncolored edge `e` without uncoloring anything:
/// a common free color if there is one, otherwise a fan rotation (after an
/// alternating-path inversion when needed) around either endpoint.
pub fn k_color_edge(g: &Graph, c: &mut Coloring, e: EdgeId) -> Result<bool> {
    k_color_edge_traced(g, c, e, None)
}

/// [`k_color_edge`] that also records every vertex it visits (fan leaves,
/// path vertices, endpoints) into `trace`.
pub(crate) fn k_color_edge_traced(g: &Graph, c: &mut Coloring, e: EdgeId, mut trace: Option<&mut Vec<Node>>) -> Result<bool> {
    if c.is_colored(e) {
        return Err(Error::Contract(format!("k_color_edge on colored edge {e:?}")));
    }
    c.stats.touched += 1;
    let (u, v) = g.endpoints(e);
    if let Some(t) = trace.as_deref_mut() {
        t.extend([u, v]);
    }
    if !c.has_free_color(u) || !c.has_free_color(v) {
        return Ok(false);
    }
    if let Some(col) = c.common_free_color(g, e) {
        c.set(g, e, col);
        return Ok(true);
    }
    for center in [u, v] {
        if color_via_fan(g, c, center, e, trace.as_deref_mut())? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn color_via_fan(g: &Graph, c: &mut Coloring, u: Node, e: EdgeId, trace: Option<&mut Vec<Node>>) -> Result<bool> {
    let fan = Fan::build(g, c, u, e);
    c.stats.touched += fan.len() as u64;
    let last = *fan.leaves.last().unwrap();
    let Some(d) = c.first_free(last) else {
        if let Some(t) = trace {
            t.extend_from_slice(&fan.leaves);
        }
        return Ok(false);
    };
    if c.is_free(u, d) {
        if let Some(t) = trace {
            t.extend_from_slice(&fan.leaves);
        }
        fan.rotate(g, c, fan.len() - 1, d);
        return Ok(true);
    }
    let free_at_u = c.first_free(u).expect("center has a free color");
    let path = AlternatingPath::build(g, c, u, d, free_at_u);
    c.stats.touched += path.edges.len() as u64;
    if let Some(t) = trace {
        t.extend_from_slice(&fan.leaves);
        t.extend(path.edges.iter().map(|&f| g.endpoints(f).1));
        t.extend(path.edges.iter().map(|&f| g.endpoints(f).0));
    }
    path.invert(g, c);
    debug_assert!(c.is_free(u, d));
    let x = fan
        .leaves
        .iter()
        .position(|&f| c.is_free(f, d))
        .ok_or_else(|| Error::Internal(format!("no fan leaf frees color {} after inversion", d.0 + 1)))?;
    fan.rotate(g, c, x, d);
    Ok(true)
}
