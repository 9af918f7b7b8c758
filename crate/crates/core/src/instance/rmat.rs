//! Dynamic RMAT instances: a static RMAT graph inserted in one batch, then
//! update batches that touch a fixed fraction of the original edges.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{InstanceStream, WeightSet};
use crate::error::{Error, Result};
use crate::graph::{normalize, Node};
use crate::solver::{seeded_rng, Rng as SeededRng};

pub const MAX_WEIGHT: u64 = 500_000;
/// Rate of the exponential weight distribution before truncation.
pub const DEFAULT_WEIGHT_RATE: f64 = 1.0 / 50_000.0;

/// Quadrant probabilities (a, b, c, d) of the recursive descent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Initiator {
    B,
    G,
    Er,
    Custom([f64; 4]),
}

impl Initiator {
    pub fn probabilities(self) -> [f64; 4] {
        match self {
            Initiator::B => [0.55, 0.15, 0.15, 0.15],
            Initiator::G => [0.45, 0.15, 0.15, 0.25],
            Initiator::Er => [0.25, 0.25, 0.25, 0.25],
            Initiator::Custom(p) => p,
        }
    }
}

impl FromStr for Initiator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b" => Ok(Initiator::B),
            "g" => Ok(Initiator::G),
            "er" => Ok(Initiator::Er),
            _ => Err(Error::Config(format!("unknown model '{s}' (expected b, g or er)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmatParams {
    pub log_nodes: u32,
    pub initiator: Initiator,
    /// Fraction of the original edges touched per update batch.
    pub fraction: f64,
    /// Probability that a touched present edge is deleted.
    pub del_prob: f64,
    pub update_batches: usize,
    /// Target edge count as a multiple of n.
    pub density: f64,
    pub weight_rate: f64,
    pub seed: u64,
}

impl Default for RmatParams {
    fn default() -> Self {
        RmatParams {
            log_nodes: 10,
            initiator: Initiator::G,
            fraction: 0.1,
            del_prob: 0.1,
            update_batches: 30,
            density: 8.0,
            weight_rate: DEFAULT_WEIGHT_RATE,
            seed: 1,
        }
    }
}

impl RmatParams {
    fn check(&self) -> Result<u64> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.log_nodes == 0 || self.log_nodes > 30 {
            return bad(format!("log node count must be in 1..=30, got {}", self.log_nodes));
        }
        let p = self.initiator.probabilities();
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad(format!("initiator probabilities {p:?} must be in [0, 1] and sum to 1"));
        }
        if !(0.0..=1.0).contains(&self.fraction) {
            return bad(format!("fraction must be in [0, 1], got {}", self.fraction));
        }
        if !(0.0..=1.0).contains(&self.del_prob) {
            return bad(format!("deletion probability must be in [0, 1], got {}", self.del_prob));
        }
        if !(self.weight_rate > 0.0 && self.weight_rate.is_finite()) {
            return bad(format!("weight rate must be positive, got {}", self.weight_rate));
        }
        let n = 1u64 << self.log_nodes;
        let target = (self.density * n as f64).floor();
        if !(target >= 0.0) || target > (n * (n - 1) / 2) as f64 {
            return bad(format!("density {} asks for more edges than a simple graph on {n} nodes has", self.density));
        }
        Ok(target as u64)
    }
}

fn draw_edge(rng: &mut SeededRng, levels: u32, cumulative: &[f64; 3]) -> (Node, Node) {
    let (mut u, mut v) = (0u32, 0u32);
    for _ in 0..levels {
        let r: f64 = rng.random();
        let q = cumulative.iter().position(|&c| r < c).unwrap_or(3) as u32;
        u = (u << 1) | (q >> 1);
        v = (v << 1) | (q & 1);
    }
    (u, v)
}

/// Truncated exponential on `[1, MAX_WEIGHT]`: rejection above the cap,
/// then floor plus one.
fn draw_weight(rng: &mut SeededRng, exp: &Exp<f64>) -> u64 {
    loop {
        let x = exp.sample(rng);
        if x < MAX_WEIGHT as f64 {
            return x.floor() as u64 + 1;
        }
    }
}

pub fn gen_rmat_dynamic(params: &RmatParams) -> Result<InstanceStream> {
    let target = params.check()? as usize;
    let mut rng = seeded_rng(params.seed);
    let p = params.initiator.probabilities();
    let cumulative = [p[0], p[0] + p[1], p[0] + p[1] + p[2]];
    let exp = Exp::new(params.weight_rate).map_err(|e| Error::Config(e.to_string()))?;
    let n = 1u32 << params.log_nodes;

    let mut seen: HashSet<(Node, Node)> = HashSet::with_capacity(target);
    let mut edges: Vec<WeightSet> = Vec::with_capacity(target);
    while edges.len() < target {
        let (a, b) = draw_edge(&mut rng, params.log_nodes, &cumulative);
        if a == b || !seen.insert(normalize(a, b)) {
            continue;
        }
        let (u, v) = normalize(a, b);
        edges.push(WeightSet { u, v, weight: draw_weight(&mut rng, &exp) });
    }

    let originals: Vec<u64> = edges.iter().map(|s| s.weight).collect();
    let mut current: HashMap<(Node, Node), u64> = edges.iter().map(|s| ((s.u, s.v), s.weight)).collect();
    let mut out = InstanceStream::new(n);
    out.batches.push(edges.clone());

    let per_batch = (params.fraction * target as f64).floor() as usize;
    for _ in 0..params.update_batches {
        let mut batch = Vec::with_capacity(per_batch);
        for i in sample(&mut rng, target, per_batch).into_iter() {
            let key = (edges[i].u, edges[i].v);
            let present = current[&key] > 0;
            let weight = if present && rng.random_bool(params.del_prob) {
                0
            } else {
                originals[rng.random_range(0..originals.len())]
            };
            current.insert(key, weight);
            batch.push(WeightSet { u: key.0, v: key.1, weight });
        }
        out.batches.push(batch);
    }
    Ok(out)
}
