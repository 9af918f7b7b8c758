use super::{EdgeId, Graph, Node};
use crate::oracle::ColoringSnapshot;

/// Zero-based color index; the k color classes are the k disjoint matchings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(pub u16);

impl Color {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

const NONE: u32 = u32::MAX;

/// Instrumentation counters shared by all solvers.
///
/// `touched` counts edges a solver inspected or re-decided; `changes` counts
/// individual color writes (coloring or uncoloring one edge).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkStats {
    pub touched: u64,
    pub changes: u64,
}

/// Partial edge k-coloring with per-vertex color occupancy.
#[derive(Clone, Debug)]
pub struct Coloring {
    k: u16,
    n: u32,
    color: Vec<u16>,
    // occupancy[v * k + c] = edge incident to v holding color c
    occupancy: Vec<u32>,
    total: u64,
    colored: usize,
    pub stats: WorkStats,
}

const UNCOLORED: u16 = u16::MAX;

impl Coloring {
    pub fn new(n: u32, k: usize) -> Self {
        assert!(k >= 1 && k < UNCOLORED as usize, "k must be in 1..65535");
        Coloring {
            k: k as u16,
            n,
            color: Vec::new(),
            occupancy: vec![NONE; n as usize * k],
            total: 0,
            colored: 0,
            stats: WorkStats::default(),
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + Clone {
        (0..self.k).map(Color)
    }

    #[inline]
    pub fn color(&self, e: EdgeId) -> Option<Color> {
        match self.color.get(e.index()) {
            Some(&c) if c != UNCOLORED => Some(Color(c)),
            _ => None,
        }
    }

    #[inline]
    pub fn is_colored(&self, e: EdgeId) -> bool {
        self.color(e).is_some()
    }

    /// Total weight of colored edges w(C).
    #[inline]
    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Number of colored edges.
    #[inline]
    pub fn colored_count(&self) -> usize {
        self.colored
    }

    /// The edge incident to `v` that holds color `col`.
    #[inline]
    pub fn occupant(&self, v: Node, col: Color) -> Option<EdgeId> {
        match self.occupancy[v as usize * self.k as usize + col.index()] {
            NONE => None,
            e => Some(EdgeId(e)),
        }
    }

    #[inline]
    pub fn is_free(&self, v: Node, col: Color) -> bool {
        self.occupant(v, col).is_none()
    }

    pub fn free_colors_at(&self, v: Node) -> impl Iterator<Item = Color> + '_ {
        self.colors().filter(move |&c| self.is_free(v, c))
    }

    pub fn first_free(&self, v: Node) -> Option<Color> {
        self.free_colors_at(v).next()
    }

    pub fn has_free_color(&self, v: Node) -> bool {
        self.first_free(v).is_some()
    }

    /// Lowest color free at both endpoints of `e`.
    pub fn common_free_color(&self, g: &Graph, e: EdgeId) -> Option<Color> {
        let (u, v) = g.endpoints(e);
        self.colors().find(|&c| self.is_free(u, c) && self.is_free(v, c))
    }

    /// Weight of the edges adjacent to `e` colored `col`, i.e. w[N_col(e)].
    #[inline]
    pub fn colored_neighborhood_weight(&self, g: &Graph, e: EdgeId, col: Color) -> u64 {
        let (u, v) = g.endpoints(e);
        let mut w = 0;
        for x in [u, v] {
            if let Some(f) = self.occupant(x, col) {
                if f != e {
                    w += g.weight(f);
                }
            }
        }
        w
    }

    /// The edges of N_col(e), at most one per endpoint.
    pub fn colored_neighbors(&self, g: &Graph, e: EdgeId, col: Color) -> [Option<EdgeId>; 2] {
        let (u, v) = g.endpoints(e);
        let pick = |x| self.occupant(x, col).filter(|&f| f != e);
        [pick(u), pick(v)]
    }

    fn ensure(&mut self, e: EdgeId) {
        if e.index() >= self.color.len() {
            self.color.resize(e.index() + 1, UNCOLORED);
        }
    }

    /// Colors an uncolored present edge. `col` must be free at both endpoints.
    pub fn set(&mut self, g: &Graph, e: EdgeId, col: Color) {
        debug_assert!(g.is_present(e), "coloring absent edge");
        debug_assert!(!self.is_colored(e), "edge already colored");
        let (u, v) = g.endpoints(e);
        debug_assert!(self.is_free(u, col) && self.is_free(v, col), "color not free");
        self.ensure(e);
        self.color[e.index()] = col.0;
        let k = self.k as usize;
        self.occupancy[u as usize * k + col.index()] = e.0;
        self.occupancy[v as usize * k + col.index()] = e.0;
        self.total += g.weight(e);
        self.colored += 1;
        self.stats.changes += 1;
    }

    /// Uncolors `e` and returns its former color.
    pub fn unset(&mut self, g: &Graph, e: EdgeId) -> Option<Color> {
        let col = self.color(e)?;
        self.unset_with_weight(g, e, g.weight(e));
        Some(col)
    }

    /// Uncolors `e` whose weight (as accounted in the total) was `weight`.
    pub(crate) fn unset_with_weight(&mut self, g: &Graph, e: EdgeId, weight: u64) {
        let col = match self.color(e) {
            Some(c) => c,
            None => return,
        };
        let (u, v) = g.endpoints(e);
        let k = self.k as usize;
        self.color[e.index()] = UNCOLORED;
        self.occupancy[u as usize * k + col.index()] = NONE;
        self.occupancy[v as usize * k + col.index()] = NONE;
        self.total -= weight;
        self.colored -= 1;
        self.stats.changes += 1;
    }

    /// Re-accounts a colored edge whose weight changed from `old` to `new`.
    pub(crate) fn reweight(&mut self, e: EdgeId, old: u64, new: u64) {
        if self.is_colored(e) {
            self.total = self.total - old + new;
        }
    }

    /// Uncolors everything, keeping the counters.
    pub fn clear(&mut self) {
        self.color.iter_mut().for_each(|c| *c = UNCOLORED);
        self.occupancy.iter_mut().for_each(|o| *o = NONE);
        self.total = 0;
        self.colored = 0;
    }

    /// Colors indexed by edge id (trailing ids may be missing).
    pub fn snapshot(&self) -> ColoringSnapshot {
        ColoringSnapshot::new(self.color.iter().map(|&c| (c != UNCOLORED).then_some(Color(c))).collect())
    }

    /// All colored edges, in id order.
    pub fn colored_edges(&self) -> impl Iterator<Item = (EdgeId, Color)> + '_ {
        self.color
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != UNCOLORED)
            .map(|(i, &c)| (EdgeId(i as u32), Color(c)))
    }

    #[cfg(test)]
    pub(crate) fn set_unchecked_for_test(&mut self, g: &Graph, e: EdgeId, col: Color) {
        self.ensure(e);
        self.color[e.index()] = col.0;
        self.total += g.weight(e);
        self.colored += 1;
    }

    /// Compares two colorings edge by edge (same graph assumed).
    pub fn same_assignment(&self, other: &Coloring) -> bool {
        let len = self.color.len().max(other.color.len());
        (0..len).all(|i| self.color(EdgeId(i as u32)) == other.color(EdgeId(i as u32)))
    }
}
