//! Dynamic weighted demand graph, the partial k-coloring living on top of it,
//! and the update/batch types that drive both.
//!
//! Edges are undirected and identified by an [`EdgeId`] that is bound to the
//! normalized endpoint pair for the lifetime of a [`Graph`]: deleting an edge
//! removes it from every adjacency list but keeps its slot, so re-inserting
//! the same pair yields the same id. Only present edges (weight >= 1) are
//! visible through adjacency, [`Graph::present_edges`], `m`, `Δ` and `W`.

mod coloring;
mod update;

pub use coloring::{Color, Coloring, WorkStats};
pub use update::{apply_update, coalesce_batch, AppliedUpdate, Batch, EdgeUpdate, UpdateClass};

use std::cell::Cell;
use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Node = u32;

/// Stable handle of an unordered node pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

const NOT_PRESENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Slot {
    u: Node,
    v: Node,
    weight: u64,
    pos_u: u32,
    pos_v: u32,
    present_pos: u32,
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: u32,
    slots: Vec<Slot>,
    index: HashMap<(Node, Node), EdgeId>,
    adj: Vec<Vec<(Node, EdgeId)>>,
    present: Vec<EdgeId>,
    // Δ and W only grow eagerly; a decrease of the current maximum marks them
    // stale and the next read recounts.
    max_degree: Cell<usize>,
    degree_stale: Cell<bool>,
    max_weight: Cell<u64>,
    weight_stale: Cell<bool>,
}

impl Graph {
    pub fn new(n: u32) -> Self {
        Graph {
            n,
            slots: Vec::new(),
            index: HashMap::new(),
            adj: vec![Vec::new(); n as usize],
            present: Vec::new(),
            max_degree: Cell::new(0),
            degree_stale: Cell::new(false),
            max_weight: Cell::new(0),
            weight_stale: Cell::new(false),
        }
    }

    /// Builds a graph from `(u, v, weight)` triples; zero weights are skipped.
    pub fn from_edges(n: u32, edges: &[(Node, Node, u64)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v, w) in edges {
            if w > 0 {
                let (_, old) = g.set_weight(u, v, w)?;
                if old != 0 {
                    return Err(Error::Contract(format!("duplicate edge {{{u},{v}}}")));
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of present edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.present.len()
    }

    /// Number of edge ids ever handed out; ids are `0..edge_slots()`.
    #[inline]
    pub fn edge_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn find_edge(&self, u: Node, v: Node) -> Option<EdgeId> {
        self.index.get(&normalize(u, v)).copied()
    }

    /// Returns the id of `{u, v}` only when the edge is currently present.
    pub fn present_edge(&self, u: Node, v: Node) -> Option<EdgeId> {
        self.find_edge(u, v).filter(|&e| self.is_present(e))
    }

    #[inline]
    pub fn weight(&self, e: EdgeId) -> u64 {
        self.slots[e.index()].weight
    }

    #[inline]
    pub fn is_present(&self, e: EdgeId) -> bool {
        self.slots[e.index()].weight > 0
    }

    /// Endpoints with `u < v`.
    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Node, Node) {
        let s = &self.slots[e.index()];
        (s.u, s.v)
    }

    /// The endpoint of `e` that is not `x`.
    #[inline]
    pub fn other(&self, e: EdgeId, x: Node) -> Node {
        let s = &self.slots[e.index()];
        if s.u == x {
            s.v
        } else {
            s.u
        }
    }

    /// Present incident edges of `v` as `(neighbor, edge)`, in storage order.
    #[inline]
    pub fn neighbors(&self, v: Node) -> &[(Node, EdgeId)] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: Node) -> usize {
        self.adj[v as usize].len()
    }

    /// Present edges in storage order (not sorted).
    pub fn present_edges(&self) -> &[EdgeId] {
        &self.present
    }

    /// Present edges sorted by non-increasing weight, ties by edge id.
    pub fn edges_by_weight_desc(&self) -> Vec<EdgeId> {
        let mut edges = self.present.clone();
        self.sort_by_weight_desc(&mut edges);
        edges
    }

    pub fn sort_by_weight_desc(&self, edges: &mut [EdgeId]) {
        edges.sort_unstable_by(|&a, &b| self.weight(b).cmp(&self.weight(a)).then(a.cmp(&b)));
    }

    /// Maximum degree Δ over present edges.
    pub fn max_degree(&self) -> usize {
        if self.degree_stale.get() {
            let d = self.adj.iter().map(Vec::len).max().unwrap_or(0);
            self.max_degree.set(d);
            self.degree_stale.set(false);
        }
        self.max_degree.get()
    }

    /// Maximum present edge weight W.
    pub fn max_weight(&self) -> u64 {
        if self.weight_stale.get() {
            let w = self.present.iter().map(|&e| self.weight(e)).max().unwrap_or(0);
            self.max_weight.set(w);
            self.weight_stale.set(false);
        }
        self.max_weight.get()
    }

    /// Total weight of all present edges.
    pub fn total_weight(&self) -> u64 {
        self.present.iter().map(|&e| self.weight(e)).sum()
    }

    pub(crate) fn check_pair(&self, u: Node, v: Node) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::NodeOutOfRange { node: x, n: self.n });
            }
        }
        Ok(())
    }

    /// Sets the absolute weight of `{u, v}` and returns `(id, old weight)`.
    /// Coloring bookkeeping is the caller's job; see [`apply_update`].
    pub(crate) fn set_weight(&mut self, u: Node, v: Node, weight: u64) -> Result<(EdgeId, u64)> {
        self.check_pair(u, v)?;
        let (u, v) = normalize(u, v);
        let e = match self.index.get(&(u, v)) {
            Some(&e) => e,
            None => {
                let e = EdgeId(self.slots.len() as u32);
                self.slots.push(Slot {
                    u,
                    v,
                    weight: 0,
                    pos_u: NOT_PRESENT,
                    pos_v: NOT_PRESENT,
                    present_pos: NOT_PRESENT,
                });
                self.index.insert((u, v), e);
                e
            }
        };
        let old = self.slots[e.index()].weight;
        if old == weight {
            return Ok((e, old));
        }
        self.slots[e.index()].weight = weight;
        match (old, weight) {
            (0, _) => self.link(e),
            (_, 0) => self.unlink(e),
            _ => {}
        }
        if weight > old {
            if !self.weight_stale.get() && weight > self.max_weight.get() {
                self.max_weight.set(weight);
            }
        } else if old >= self.max_weight.get() {
            self.weight_stale.set(true);
        }
        Ok((e, old))
    }

    fn link(&mut self, e: EdgeId) {
        let (u, v) = self.endpoints(e);
        let pu = self.adj[u as usize].len() as u32;
        self.adj[u as usize].push((v, e));
        let pv = self.adj[v as usize].len() as u32;
        self.adj[v as usize].push((u, e));
        let pp = self.present.len() as u32;
        self.present.push(e);
        let s = &mut self.slots[e.index()];
        s.pos_u = pu;
        s.pos_v = pv;
        s.present_pos = pp;
        if !self.degree_stale.get() {
            let d = self.adj[u as usize].len().max(self.adj[v as usize].len());
            if d > self.max_degree.get() {
                self.max_degree.set(d);
            }
        }
    }

    fn unlink(&mut self, e: EdgeId) {
        let (u, v) = self.endpoints(e);
        let (pu, pv, pp) = {
            let s = &self.slots[e.index()];
            (s.pos_u, s.pos_v, s.present_pos)
        };
        let du = self.adj[u as usize].len();
        let dv = self.adj[v as usize].len();
        self.remove_adj(u, pu);
        self.remove_adj(v, pv);
        self.present.swap_remove(pp as usize);
        if let Some(&moved) = self.present.get(pp as usize) {
            self.slots[moved.index()].present_pos = pp;
        }
        let s = &mut self.slots[e.index()];
        s.pos_u = NOT_PRESENT;
        s.pos_v = NOT_PRESENT;
        s.present_pos = NOT_PRESENT;
        if du.max(dv) >= self.max_degree.get() {
            self.degree_stale.set(true);
        }
    }

    fn remove_adj(&mut self, x: Node, pos: u32) {
        let list = &mut self.adj[x as usize];
        list.swap_remove(pos as usize);
        if let Some(&(_, moved)) = list.get(pos as usize) {
            let s = &mut self.slots[moved.index()];
            if s.u == x {
                s.pos_u = pos;
            } else {
                s.pos_v = pos;
            }
        }
    }

    /// Full recount of every derived quantity. Returns a description of the
    /// first disagreement.
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut m = 0;
        for (i, s) in self.slots.iter().enumerate() {
            let e = EdgeId(i as u32);
            if s.u >= s.v {
                return Err(format!("edge {i} not normalized: ({}, {})", s.u, s.v));
            }
            let present = s.weight > 0;
            let in_u = self.adj[s.u as usize].iter().any(|&(x, f)| f == e && x == s.v);
            let in_v = self.adj[s.v as usize].iter().any(|&(x, f)| f == e && x == s.u);
            if present != in_u || present != in_v {
                return Err(format!("edge {{{},{}}} adjacency disagrees with weight {}", s.u, s.v, s.weight));
            }
            if present {
                m += 1;
                if self.present.get(s.present_pos as usize) != Some(&e) {
                    return Err(format!("edge {{{},{}}} missing from present list", s.u, s.v));
                }
            }
        }
        if m != self.present.len() {
            return Err(format!("m = {} but recount gives {m}", self.present.len()));
        }
        let deg = self.adj.iter().map(Vec::len).max().unwrap_or(0);
        if deg != self.max_degree() {
            return Err(format!("Δ = {} but recount gives {deg}", self.max_degree()));
        }
        let w = self.present.iter().map(|&e| self.weight(e)).max().unwrap_or(0);
        if w != self.max_weight() {
            return Err(format!("W = {} but recount gives {w}", self.max_weight()));
        }
        Ok(())
    }
}

#[inline]
pub fn normalize(u: Node, v: Node) -> (Node, Node) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}
