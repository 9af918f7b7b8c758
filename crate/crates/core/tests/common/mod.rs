#![allow(dead_code)]

use std::collections::BTreeMap;

use djm_core::instance::{InstanceStream, WeightSet};
pub use djm_core::solver::Rng;
use djm_core::solver::seeded_rng;
use djm_core::{EdgeUpdate, Graph, Node};
use rand::Rng as _;

/// Random update stream on `n` nodes in absolute-weight form. Batch sizes
/// vary between 1 and `max_b`, with an occasional batch of about `2n` so
/// hybrids see both modes. Weights are drawn from `1..=max_w`.
pub fn random_instance(rng: &mut Rng, n: u32, batches: usize, max_b: usize, max_w: u64) -> InstanceStream {
    let mut inst = InstanceStream::new(n);
    let mut current: BTreeMap<(Node, Node), u64> = BTreeMap::new();
    for i in 0..batches {
        let size = if i > 0 && rng.random_bool(0.1) { 2 * n as usize } else { rng.random_range(1..=max_b) };
        let mut batch = Vec::with_capacity(size);
        for _ in 0..size {
            let present: Vec<(Node, Node)> = current.iter().filter(|(_, &w)| w > 0).map(|(&k, _)| k).collect();
            let (u, v) = if !present.is_empty() && rng.random_bool(0.6) {
                present[rng.random_range(0..present.len())]
            } else {
                let u = rng.random_range(0..n);
                let mut v = rng.random_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                (u.min(v), u.max(v))
            };
            let old = current.get(&(u, v)).copied().unwrap_or(0);
            let w = if old > 0 && rng.random_bool(0.25) {
                0
            } else if old > 0 && rng.random_bool(0.5) {
                // small relative change, the kind a filter drops
                (old as f64 * rng.random_range(0.6..1.6)).round().max(1.0) as u64
            } else {
                rng.random_range(1..=max_w)
            };
            current.insert((u, v), w);
            batch.push(WeightSet::new(u, v, w));
        }
        inst.batches.push(batch);
    }
    inst
}

/// Graph with at most `m` edges on `n` nodes.
pub fn random_graph(rng: &mut Rng, n: u32, m: usize, max_w: u64) -> Graph {
    let mut edges = BTreeMap::new();
    let mut tries = 0;
    while edges.len() < m && tries < 50 * m {
        tries += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)), rng.random_range(1..=max_w));
        }
    }
    let list: Vec<(Node, Node, u64)> = edges.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    Graph::from_edges(n, &list).unwrap()
}

/// Insert-everything batch for `g`.
pub fn insertion_batch(g: &Graph) -> Vec<EdgeUpdate> {
    g.present_edges()
        .iter()
        .map(|&e| {
            let (u, v) = g.endpoints(e);
            EdgeUpdate::new(u, v, g.weight(e) as i64)
        })
        .collect()
}

pub fn rng(seed: u64) -> Rng {
    seeded_rng(seed)
}

/// Prints one line per criterion and remembers failures.
#[derive(Default)]
pub struct Report {
    failed: Vec<String>,
}

impl Report {
    pub fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    pub fn finish(self) {
        assert!(self.failed.is_empty(), "failed criteria: {:?}", self.failed);
    }
}
