//! Per-update maintenance: the greedy dynamic algorithm with recursion depth
//! alpha and candidate sample size beta, and the dynamic k-edge-coloring one.

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::graph::{AppliedUpdate, Color, Coloring, EdgeId, Graph, Node, UpdateClass};
use crate::primitives::{fill_vacancy, swap_in, swap_out, swap_out_sampled};
use crate::solver::{seeded_rng, Rng, Solver};
use crate::static_solvers::k_color_edge_traced;

/// Candidate sample size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Beta {
    /// Consider every color and every incident edge, i.e. max{k, Delta}.
    Full,
    Sample(usize),
}

impl Beta {
    fn limit(self) -> Option<usize> {
        match self {
            Beta::Full => None,
            Beta::Sample(b) => Some(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DynGreedyConfig {
    pub alpha: u32,
    pub beta: Beta,
    pub seed: u64,
}

impl Default for DynGreedyConfig {
    fn default() -> Self {
        DynGreedyConfig { alpha: 1, beta: Beta::Full, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DynGreedyStats {
    /// Deepest recursion level reached (the initial call is level 0).
    pub max_level: u32,
    /// Most AttemptColor calls triggered by a single increase.
    pub max_attempts_per_increase: u64,
    pub increases: u64,
    pub decreases: u64,
}

#[derive(Clone)]
pub struct DynGreedy {
    cfg: DynGreedyConfig,
    rng: Rng,
    attempts: u64,
    pub stats: DynGreedyStats,
}

impl DynGreedy {
    pub fn new(cfg: DynGreedyConfig) -> Result<Self> {
        if cfg.beta == Beta::Sample(0) {
            return Err(Error::Config("beta must be at least 1".into()));
        }
        Ok(DynGreedy { cfg, rng: seeded_rng(cfg.seed), attempts: 0, stats: DynGreedyStats::default() })
    }

    pub fn config(&self) -> &DynGreedyConfig {
        &self.cfg
    }

    fn pick_color(&mut self, g: &Graph, c: &Coloring, e: EdgeId) -> Color {
        let k = c.k();
        let cost = |col: Color| c.colored_neighborhood_weight(g, e, col);
        match self.cfg.beta.limit() {
            Some(b) if b < k => {
                let mut pool: Vec<Color> = sample(&mut self.rng, k, b).iter().map(|i| Color(i as u16)).collect();
                pool.sort_unstable();
                pool.into_iter().min_by_key(|&col| cost(col)).unwrap()
            }
            _ => c.colors().min_by_key(|&col| cost(col)).unwrap(),
        }
    }

    /// AttemptColor: colors `e` with a free color, or swaps it in for the
    /// cheapest color class and recurses on what it displaced.
    pub fn attempt_color(&mut self, g: &Graph, c: &mut Coloring, e: EdgeId, depth: u32) -> Result<()> {
        self.attempt(g, c, e, depth, 0)
    }

    fn attempt(&mut self, g: &Graph, c: &mut Coloring, e: EdgeId, depth: u32, level: u32) -> Result<()> {
        self.attempts += 1;
        self.stats.max_level = self.stats.max_level.max(level);
        if let Some(col) = c.common_free_color(g, e) {
            c.stats.touched += 1;
            c.set(g, e, col);
            return Ok(());
        }
        let col = self.pick_color(g, c, e);
        let Some(displaced) = swap_in(g, c, e, col)? else {
            return Ok(());
        };
        if depth > 0 {
            for f in displaced.iter() {
                self.attempt(g, c, f, depth - 1, level + 1)?;
            }
        }
        Ok(())
    }

    /// DecreaseWeight on a colored edge whose weight just dropped.
    pub fn decrease_weight(&mut self, g: &Graph, c: &mut Coloring, e: EdgeId) -> Result<()> {
        let changed = match self.cfg.beta.limit() {
            None => swap_out(g, c, e)?,
            Some(b) => swap_out_sampled(g, c, e, b, &mut self.rng)?,
        };
        if changed {
            self.attempt(g, c, e, 0, 0)?;
        }
        Ok(())
    }
}

impl Solver for DynGreedy {
    fn on_update(&mut self, g: &Graph, c: &mut Coloring, up: &AppliedUpdate) -> Result<()> {
        match up.class {
            UpdateClass::Insertion | UpdateClass::ChangeUp if up.prior_color.is_none() => {
                self.stats.increases += 1;
                self.attempts = 0;
                self.attempt(g, c, up.edge, self.cfg.alpha, 0)?;
                self.stats.max_attempts_per_increase = self.stats.max_attempts_per_increase.max(self.attempts);
            }
            UpdateClass::ChangeDown if up.prior_color.is_some() => {
                self.stats.decreases += 1;
                self.decrease_weight(g, c, up.edge)?;
            }
            UpdateClass::Deletion => {
                if let Some(col) = up.prior_color {
                    self.stats.decreases += 1;
                    fill_vacancy(g, c, g.endpoints(up.edge), col, self.cfg.beta.limit(), &mut self.rng);
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DynKecStats {
    /// Most distinct vertices visited while handling one update.
    pub max_vertices_per_update: usize,
    pub undone: u64,
}

#[derive(Clone, Debug, Default)]
pub struct DynKec {
    trace: Vec<Node>,
    pub stats: DynKecStats,
}

impl DynKec {
    fn lightest_colored(g: &Graph, c: &Coloring, x: Node) -> Option<EdgeId> {
        if c.has_free_color(x) {
            return None;
        }
        c.colors().filter_map(|col| c.occupant(x, col)).min_by_key(|&f| (g.weight(f), f))
    }

    /// Colors the uncolored edge `e`, displacing the lightest colored edge at
    /// each saturated endpoint if that is a strict gain.
    pub fn on_increase(&mut self, g: &Graph, c: &mut Coloring, e: EdgeId) -> Result<()> {
        let (u, v) = g.endpoints(e);
        c.stats.touched += 1;
        let mut out: Vec<(EdgeId, Color)> = Vec::with_capacity(2);
        for x in [u, v] {
            if let Some(f) = Self::lightest_colored(g, c, x) {
                if !out.iter().any(|&(h, _)| h == f) {
                    out.push((f, c.color(f).unwrap()));
                }
            }
        }
        if !out.is_empty() {
            let sum: u64 = out.iter().map(|&(f, _)| g.weight(f)).sum();
            if sum >= g.weight(e) {
                return Ok(());
            }
            for &(f, _) in &out {
                c.unset(g, f);
            }
        }
        let ok = k_color_edge_traced(g, c, e, Some(&mut self.trace))?;
        if !ok {
            if !out.is_empty() {
                self.stats.undone += 1;
            }
            for &(f, col) in &out {
                c.set(g, f, col);
            }
            return Ok(());
        }
        for &(f, _) in &out {
            if let Some(col) = c.common_free_color(g, f) {
                c.set(g, f, col);
            }
        }
        Ok(())
    }

    /// After the colored edge `{u, v}` got lighter or vanished, offers the
    /// heaviest uncolored edge at each endpoint to [`DynKec::on_increase`].
    pub fn on_decrease(&mut self, g: &Graph, c: &mut Coloring, (u, v): (Node, Node), skip: EdgeId) -> Result<()> {
        let mut cands: Vec<EdgeId> = Vec::with_capacity(2);
        for x in [u, v] {
            c.stats.touched += g.degree(x) as u64;
            let best = g
                .neighbors(x)
                .iter()
                .map(|&(_, f)| f)
                .filter(|&f| f != skip && !c.is_colored(f))
                .min_by_key(|&f| (std::cmp::Reverse(g.weight(f)), f));
            if let Some(f) = best {
                cands.push(f);
            }
        }
        g.sort_by_weight_desc(&mut cands);
        cands.dedup();
        for f in cands {
            if !c.is_colored(f) {
                self.on_increase(g, c, f)?;
            }
        }
        Ok(())
    }
}

impl Solver for DynKec {
    fn on_update(&mut self, g: &Graph, c: &mut Coloring, up: &AppliedUpdate) -> Result<()> {
        self.trace.clear();
        match up.class {
            UpdateClass::Insertion | UpdateClass::ChangeUp if up.prior_color.is_none() => {
                self.on_increase(g, c, up.edge)?;
            }
            UpdateClass::ChangeDown | UpdateClass::Deletion if up.prior_color.is_some() => {
                self.on_decrease(g, c, g.endpoints(up.edge), up.edge)?;
            }
            _ => return Ok(()),
        }
        self.trace.sort_unstable();
        self.trace.dedup();
        self.stats.max_vertices_per_update = self.stats.max_vertices_per_update.max(self.trace.len());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_update, EdgeUpdate};
    use crate::oracle::{brute_force_opt, validate};

    fn path(ws: &[u64]) -> Graph {
        let edges: Vec<_> = ws.iter().enumerate().map(|(i, &w)| (i as u32, i as u32 + 1, w)).collect();
        Graph::from_edges(ws.len() as u32 + 1, &edges).unwrap()
    }

    fn step(s: &mut dyn Solver, g: &mut Graph, c: &mut Coloring, u: Node, v: Node, delta: i64) {
        let a = apply_update(g, c, &EdgeUpdate::new(u, v, delta)).unwrap();
        s.on_update(g, c, &a).unwrap();
        validate(g, c).unwrap();
    }

    #[test]
    fn greedy_isolated_insert() {
        let mut g = Graph::new(2);
        let mut c = Coloring::new(2, 3);
        let mut s = DynGreedy::new(DynGreedyConfig::default()).unwrap();
        step(&mut s, &mut g, &mut c, 0, 1, 5);
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), Some(Color(0)));
    }

    #[test]
    fn greedy_increase_swaps_in() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let mut s = DynGreedy::new(DynGreedyConfig { alpha: 1, ..Default::default() }).unwrap();
        step(&mut s, &mut g, &mut c, 0, 1, 8);
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), Some(Color(0)));
        assert_eq!(c.total_weight(), 12);
        assert_eq!(brute_force_opt(&g, 1).unwrap().0, 12 + 4);
        assert_eq!(s.stats.max_level, 1);
    }

    #[test]
    fn greedy_increase_too_small() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let mut s = DynGreedy::new(DynGreedyConfig { alpha: 3, ..Default::default() }).unwrap();
        step(&mut s, &mut g, &mut c, 0, 1, 5);
        assert_eq!(c.color(g.find_edge(1, 2).unwrap()), Some(Color(0)));
        assert_eq!(c.total_weight(), 10);
    }

    #[test]
    fn greedy_decrease_swaps_out() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let mut s = DynGreedy::new(DynGreedyConfig::default()).unwrap();
        step(&mut s, &mut g, &mut c, 1, 2, -4);
        assert_eq!(c.total_weight(), 8);
        assert_eq!(brute_force_opt(&g, 1).unwrap().0, 8);
    }

    #[test]
    fn greedy_deletion_fills_vacancy() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let mut s = DynGreedy::new(DynGreedyConfig::default()).unwrap();
        step(&mut s, &mut g, &mut c, 1, 2, -10);
        assert_eq!(c.total_weight(), 8);
    }

    #[test]
    fn kec_increase_cases() {
        // star a = (0,1) weight 8 colored, b = (0,2) grows 3 -> 5
        let mut g = Graph::from_edges(3, &[(0, 1, 8), (0, 2, 3)]).unwrap();
        let mut c = Coloring::new(3, 1);
        c.set(&g, g.find_edge(0, 1).unwrap(), Color(0));
        let mut s = DynKec::default();
        step(&mut s, &mut g, &mut c, 0, 2, 2);
        assert_eq!(c.total_weight(), 8);

        let mut g = Graph::from_edges(3, &[(0, 1, 4)]).unwrap();
        let mut c = Coloring::new(3, 1);
        c.set(&g, g.find_edge(0, 1).unwrap(), Color(0));
        step(&mut s, &mut g, &mut c, 0, 2, 9);
        assert_eq!(c.total_weight(), 9);
        assert!(!c.is_colored(g.find_edge(0, 1).unwrap()));
    }

    #[test]
    fn kec_decrease_path() {
        let mut g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(1, 2).unwrap(), Color(0));
        let mut s = DynKec::default();
        step(&mut s, &mut g, &mut c, 1, 2, -7);
        assert_eq!(c.total_weight(), 8);
        assert!(s.stats.max_vertices_per_update <= 4);
    }

    #[test]
    fn kec_displaces_both_sides() {
        let mut g = Graph::from_edges(4, &[(0, 1, 3), (2, 3, 3)]).unwrap();
        let mut c = Coloring::new(4, 1);
        c.set(&g, g.find_edge(0, 1).unwrap(), Color(0));
        c.set(&g, g.find_edge(2, 3).unwrap(), Color(0));
        let mut s = DynKec::default();
        step(&mut s, &mut g, &mut c, 1, 2, 7);
        assert_eq!(c.total_weight(), 7);
        assert_eq!(c.colored_count(), 1);
    }

    #[test]
    fn full_beta_ignores_seed() {
        let edges: Vec<_> = (0..12u32).flat_map(|i| [(i, (i + 1) % 12), (i, (i + 5) % 12)]).collect();
        let run = |seed| {
            let mut g = Graph::new(12);
            let mut c = Coloring::new(12, 2);
            let mut s = DynGreedy::new(DynGreedyConfig { alpha: 2, beta: Beta::Full, seed }).unwrap();
            for (i, &(u, v)) in edges.iter().enumerate() {
                step(&mut s, &mut g, &mut c, u, v, 1 + (i as i64 * 37) % 19);
            }
            for (i, &(u, v)) in edges.iter().enumerate().step_by(3) {
                step(&mut s, &mut g, &mut c, u, v, -((i as i64 % 5) + 1).min(1));
            }
            c
        };
        assert!(run(1).same_assignment(&run(99)));
    }
}
