//! Splits every batch into `y` sub-batches with edge weights capped at `z`,
//! simulating a switch that reconfigures `y` times as often.
//!
//! Each batch is read as a traffic matrix: an edge listed with weight `w`
//! carries `w` units during that batch, unlisted edges carry nothing. The
//! `w` units are spread over `s = ceil(w / z)` consecutive sub-batches chosen
//! uniformly: the edge is set to `z` at the first of them, reduced to the
//! remainder at the last, and zeroed after it. Summed over the sub-batches
//! the edge's weight therefore equals `w`.

use std::collections::HashSet;

use rand::Rng;

use super::{InstanceStream, WeightSet};
use crate::error::{Error, Result};
use crate::graph::Node;
use crate::solver::seeded_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitParams {
    /// Sub-batches per original batch.
    pub y: usize,
    /// Weight cap.
    pub z: u64,
    pub seed: u64,
}

struct Placement {
    key: (Node, Node),
    first: usize,
    /// Weights to set at sub-batch offsets relative to `first`.
    sets: Vec<(usize, u64)>,
    last: usize,
}

pub fn split_instance(input: &InstanceStream, params: SplitParams) -> Result<InstanceStream> {
    let SplitParams { y, z, seed } = params;
    if y == 0 || z == 0 {
        return Err(Error::Config("sub-batch count and cap must be positive".into()));
    }
    let cap = (y as u64).saturating_mul(z);
    if let Some(bad) = input.batches.iter().flatten().find(|s| s.weight > cap) {
        return Err(Error::Ineligible(format!(
            "edge {{{},{}}} has weight {} > y*z = {cap}",
            bad.u, bad.v, bad.weight
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut out = InstanceStream::new(input.n);
    // Edges whose last chosen sub-batch was the final one of the previous
    // batch; they are zeroed in sub-batch 0 unless set there again.
    let mut carry: Vec<(Node, Node)> = Vec::new();

    for batch in &input.batches {
        let mut seen = HashSet::new();
        let mut last_values: Vec<WeightSet> = Vec::new();
        for s in batch.iter().rev() {
            if seen.insert((s.u, s.v)) {
                last_values.push(*s);
            }
        }
        last_values.reverse();

        let mut placements = Vec::new();
        for s in last_values.iter().filter(|s| s.weight > 0) {
            let parts = s.weight.div_ceil(z) as usize;
            let first = rng.random_range(0..=y - parts);
            let rest = s.weight - (parts as u64 - 1) * z;
            let mut sets = vec![(0, if parts == 1 { rest } else { z })];
            if parts > 1 && rest != z {
                sets.push((parts - 1, rest));
            }
            placements.push(Placement { key: (s.u, s.v), first, sets, last: first + parts - 1 });
        }

        let mut subs: Vec<Vec<WeightSet>> = vec![Vec::new(); y];
        let set_at_zero: HashSet<(Node, Node)> = placements.iter().filter(|p| p.first == 0).map(|p| p.key).collect();
        for key in carry.drain(..) {
            if !set_at_zero.contains(&key) {
                subs[0].push(WeightSet { u: key.0, v: key.1, weight: 0 });
            }
        }
        for p in &placements {
            for &(off, w) in &p.sets {
                subs[p.first + off].push(WeightSet { u: p.key.0, v: p.key.1, weight: w });
            }
            if p.last + 1 < y {
                subs[p.last + 1].push(WeightSet { u: p.key.0, v: p.key.1, weight: 0 });
            } else {
                carry.push(p.key);
            }
        }
        for mut sub in subs {
            sub.sort_unstable_by_key(|s| (s.u, s.v));
            out.batches.push(sub);
        }
    }
    Ok(out)
}
