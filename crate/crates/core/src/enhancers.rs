//! Update filtering, the post-processing pass that restores the domination
//! invariant, and the batch algorithm built on it.
//!
//! The invariant: for every uncolored edge `e` and every color `c`,
//! `w[N_c(e)] >= w(e)`. Any coloring satisfying it weighs at least half the
//! optimum.

use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{AppliedUpdate, Color, Coloring, EdgeId, Graph, UpdateClass};
use crate::primitives::swap_in;
use crate::solver::{BatchContext, Solver};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterDecision {
    Keep,
    Drop,
}

/// Drops a weight change whose ratio stays within `[1/t, t]`. Insertions and
/// deletions are always kept.
pub fn filter_decision(t: f64, w_old: u64, w_new: u64) -> FilterDecision {
    if w_old == 0 || w_new == 0 {
        return FilterDecision::Keep;
    }
    let (o, n) = (w_old as f64, w_new as f64);
    if n <= t * o && o <= t * n {
        FilterDecision::Drop
    } else {
        FilterDecision::Keep
    }
}

/// Counters of one [`post_process`] run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PostProcessReport {
    pub seeds: usize,
    pub enqueued: usize,
    /// Largest number of times a single edge entered the queue.
    pub max_enqueues_per_edge: u32,
    pub swaps: usize,
    pub colored_free: usize,
    /// Enqueues of previously dequeued edges whose invariant broke again.
    pub repairs: usize,
}

/// Max-heap of uncolored edges by weight (ties: smaller id first).
#[derive(Debug, Default)]
pub struct ViolationQueue {
    heap: BinaryHeap<(u64, std::cmp::Reverse<EdgeId>)>,
    pending: HashSet<EdgeId>,
    counts: HashMap<EdgeId, u32>,
    pub enqueued: usize,
}

impl ViolationQueue {
    /// Returns false if `e` is already waiting.
    pub fn push(&mut self, g: &Graph, e: EdgeId) -> bool {
        if !self.pending.insert(e) {
            return false;
        }
        self.heap.push((g.weight(e), std::cmp::Reverse(e)));
        *self.counts.entry(e).or_insert(0) += 1;
        self.enqueued += 1;
        true
    }

    pub fn pop(&mut self) -> Option<EdgeId> {
        let (_, std::cmp::Reverse(e)) = self.heap.pop()?;
        self.pending.remove(&e);
        Some(e)
    }

    pub fn times_enqueued(&self, e: EdgeId) -> u32 {
        self.counts.get(&e).copied().unwrap_or(0)
    }

    pub fn max_enqueues(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

fn first_violation(g: &Graph, c: &Coloring, e: EdgeId) -> Option<Color> {
    let w = g.weight(e);
    c.colors().find(|&col| c.colored_neighborhood_weight(g, e, col) < w)
}

/// Processes `seeds` (uncolored edges) heaviest first: color with a free
/// color, else swap in for the first color whose neighborhood is lighter,
/// queueing what was displaced. Uncolored edges next to a displaced edge
/// whose invariant just broke are queued too, even if they were processed
/// already: without this an earlier edge can lose neighborhood weight and
/// stay in violation. Such re-enqueues are counted in `repairs`.
pub fn post_process(g: &Graph, c: &mut Coloring, seeds: &[EdgeId]) -> Result<PostProcessReport> {
    let mut q = ViolationQueue::default();
    let mut report = PostProcessReport { seeds: seeds.len(), ..Default::default() };
    let mut sorted = seeds.to_vec();
    g.sort_by_weight_desc(&mut sorted);
    for e in sorted {
        if g.is_present(e) && !c.is_colored(e) {
            q.push(g, e);
        }
    }
    while let Some(e) = q.pop() {
        c.stats.touched += 1;
        if c.is_colored(e) || !g.is_present(e) {
            continue;
        }
        if let Some(col) = c.common_free_color(g, e) {
            c.set(g, e, col);
            report.colored_free += 1;
            continue;
        }
        let Some(col) = first_violation(g, c, e) else {
            continue;
        };
        let displaced = swap_in(g, c, e, col)?
            .ok_or_else(|| Error::Internal(format!("swap_in refused violating edge {e:?}")))?;
        report.swaps += 1;
        for f in displaced.iter() {
            q.push(g, f);
            let (a, b) = g.endpoints(f);
            for x in [a, b] {
                for &(_, h) in g.neighbors(x) {
                    if h == f || c.is_colored(h) {
                        continue;
                    }
                    c.stats.touched += 1;
                    if c.colored_neighborhood_weight(g, h, col) < g.weight(h) && q.push(g, h) && q.times_enqueued(h) > 1 {
                        report.repairs += 1;
                    }
                }
            }
        }
    }
    report.enqueued = q.enqueued;
    report.max_enqueues_per_edge = q.max_enqueues();
    Ok(report)
}

/// [`post_process`] seeded with every uncolored present edge.
pub fn post_process_all(g: &Graph, c: &mut Coloring) -> Result<PostProcessReport> {
    let seeds: Vec<EdgeId> = g.present_edges().iter().copied().filter(|&e| !c.is_colored(e)).collect();
    post_process(g, c, &seeds)
}

/// Edges whose invariant a batch may have broken: updated edges that are
/// uncolored, and uncolored neighbors of colored edges that got lighter or
/// were deleted.
pub fn batch_2apx_seeds(g: &Graph, c: &Coloring, updates: &[AppliedUpdate]) -> Vec<EdgeId> {
    let mut seeds = Vec::new();
    let mut seen = HashSet::new();
    for up in updates {
        if g.is_present(up.edge) && !c.is_colored(up.edge) && seen.insert(up.edge) {
            seeds.push(up.edge);
        }
        let lighter = matches!(up.class, UpdateClass::ChangeDown | UpdateClass::Deletion);
        if lighter && up.prior_color.is_some() {
            let (u, v) = g.endpoints(up.edge);
            for x in [u, v] {
                for &(_, f) in g.neighbors(x) {
                    if f != up.edge && !c.is_colored(f) && seen.insert(f) {
                        seeds.push(f);
                    }
                }
            }
        }
    }
    seeds
}

pub fn batch_2apx(g: &Graph, c: &mut Coloring, updates: &[AppliedUpdate]) -> Result<PostProcessReport> {
    let seeds = batch_2apx_seeds(g, c, updates);
    post_process(g, c, &seeds)
}

#[derive(Debug, Default)]
pub struct Batch2Apx {
    pub last: Option<PostProcessReport>,
}

impl Solver for Batch2Apx {
    fn end_batch(&mut self, g: &Graph, c: &mut Coloring, batch: &BatchContext<'_>) -> Result<()> {
        self.last = Some(batch_2apx(g, c, batch.forwarded)?);
        Ok(())
    }

    fn last_report(&self) -> Option<PostProcessReport> {
        self.last
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_update, EdgeUpdate};
    use crate::oracle::{brute_force_opt, invariant_violation, validate};

    #[test]
    fn filter_rule() {
        assert_eq!(filter_decision(2.0, 100, 150), FilterDecision::Drop);
        assert_eq!(filter_decision(2.0, 100, 250), FilterDecision::Keep);
        assert_eq!(filter_decision(2.0, 0, 5), FilterDecision::Keep);
        assert_eq!(filter_decision(2.0, 5, 0), FilterDecision::Keep);
        assert_eq!(filter_decision(2.0, 100, 50), FilterDecision::Drop);
        assert_eq!(filter_decision(2.0, 100, 49), FilterDecision::Keep);
        assert_eq!(filter_decision(1.0, 100, 101), FilterDecision::Keep);
    }

    #[test]
    fn star_example() {
        let g = Graph::from_edges(4, &[(0, 1, 5), (0, 2, 3), (0, 3, 2)]).unwrap();
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(0, 3).unwrap(), Color(0));
        let r = post_process_all(&g, &mut c).unwrap();
        assert_eq!(c.total_weight(), 5);
        assert_eq!(brute_force_opt(&g, 1).unwrap().0, 5);
        assert_eq!(r.swaps, 1);
        assert!(invariant_violation(&g, &c).is_none());
        assert_eq!(r.max_enqueues_per_edge, 1);
    }

    #[test]
    fn processed_edge_can_break_again() {
        // h = {0,1} is fine while f = {0,2} and g = {1,4} are colored; then
        // e = {2,3} evicts f and h is left next to g alone
        let g = Graph::from_edges(5, &[(0, 1, 10), (2, 3, 9), (0, 2, 5), (1, 4, 6)]).unwrap();
        let mut c = Coloring::new(5, 1);
        c.set(&g, g.find_edge(0, 2).unwrap(), Color(0));
        c.set(&g, g.find_edge(1, 4).unwrap(), Color(0));
        let r = post_process_all(&g, &mut c).unwrap();
        assert!(invariant_violation(&g, &c).is_none());
        assert_eq!(c.total_weight(), 19);
        assert_eq!(r.repairs, 1);
        assert_eq!(r.max_enqueues_per_edge, 2);
    }

    #[test]
    fn fixpoint_and_single_edge() {
        let g = Graph::from_edges(4, &[(0, 1, 4), (1, 2, 10), (2, 3, 4)]).unwrap();
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let before = c.snapshot();
        post_process_all(&g, &mut c).unwrap();
        assert_eq!(crate::oracle::recourse(&before, &c, crate::oracle::RecourseScope::All), 0);

        let g = Graph::from_edges(2, &[(0, 1, 7)]).unwrap();
        let mut c = Coloring::new(2, 2);
        post_process_all(&g, &mut c).unwrap();
        assert_eq!(c.total_weight(), 7);
    }

    #[test]
    fn batch_seeds_fire() {
        // increase past the colored neighborhood
        let mut g = Graph::from_edges(3, &[(0, 1, 5), (1, 2, 3)]).unwrap();
        let mut c = Coloring::new(3, 1);
        c.set(&g, g.find_edge(0, 1).unwrap(), Color(0));
        let a = apply_update(&mut g, &mut c, &EdgeUpdate::new(1, 2, 4)).unwrap();
        batch_2apx(&g, &mut c, &[a]).unwrap();
        validate(&g, &c).unwrap();
        assert_eq!(c.total_weight(), 7);

        // decrease of a colored edge below its uncolored neighbor
        let mut g = Graph::from_edges(3, &[(0, 1, 5), (1, 2, 3)]).unwrap();
        let mut c = Coloring::new(3, 1);
        c.set(&g, g.find_edge(0, 1).unwrap(), Color(0));
        let a = apply_update(&mut g, &mut c, &EdgeUpdate::new(0, 1, -4)).unwrap();
        assert_eq!(batch_2apx_seeds(&g, &c, &[a]), vec![g.find_edge(1, 2).unwrap()]);
        batch_2apx(&g, &mut c, &[a]).unwrap();
        assert_eq!(c.total_weight(), 3);

        // colored edges going up: nothing to do
        let mut g = Graph::from_edges(3, &[(0, 1, 5), (1, 2, 3)]).unwrap();
        let mut c = Coloring::new(3, 1);
        c.set(&g, g.find_edge(0, 1).unwrap(), Color(0));
        let a = apply_update(&mut g, &mut c, &EdgeUpdate::new(0, 1, 4)).unwrap();
        assert!(batch_2apx_seeds(&g, &c, &[a]).is_empty());
    }
}
