use std::collections::HashMap;

use super::{normalize, Color, Coloring, EdgeId, Graph, Node};
use crate::error::{Error, Result};

/// A signed weight change on one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeUpdate {
    pub u: Node,
    pub v: Node,
    pub delta: i64,
}

impl EdgeUpdate {
    pub fn new(u: Node, v: Node, delta: i64) -> Self {
        EdgeUpdate { u, v, delta }
    }

    #[inline]
    pub fn key(&self) -> (Node, Node) {
        normalize(self.u, self.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateClass {
    Insertion,
    Deletion,
    ChangeUp,
    ChangeDown,
}

impl UpdateClass {
    pub fn classify(old: u64, new: u64) -> Self {
        match (old, new) {
            (0, _) => UpdateClass::Insertion,
            (_, 0) => UpdateClass::Deletion,
            _ if new > old => UpdateClass::ChangeUp,
            _ => UpdateClass::ChangeDown,
        }
    }

    pub fn is_increase(self) -> bool {
        matches!(self, UpdateClass::Insertion | UpdateClass::ChangeUp)
    }
}

/// An update after it has been applied to a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AppliedUpdate {
    pub edge: EdgeId,
    pub old: u64,
    pub new: u64,
    pub class: UpdateClass,
    /// Color of the edge right before the update. Deletions uncolor.
    pub prior_color: Option<Color>,
}

/// A coalesced batch: at most one update per edge, no zero deltas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Batch {
    updates: Vec<EdgeUpdate>,
}

impl Batch {
    pub fn updates(&self) -> &[EdgeUpdate] {
        &self.updates
    }

    /// b, the number of coalesced updates.
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    /// Normalized node pairs touched by the batch (E_B).
    pub fn touched(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.updates.iter().map(EdgeUpdate::key)
    }
}

/// Sums same-edge deltas, drops zero sums, keeps first-occurrence order.
pub fn coalesce_batch(raw: &[EdgeUpdate]) -> Batch {
    let mut slot: HashMap<(Node, Node), usize> = HashMap::with_capacity(raw.len());
    let mut acc: Vec<((Node, Node), i64)> = Vec::with_capacity(raw.len());
    for up in raw {
        let key = up.key();
        match slot.get(&key) {
            Some(&i) => acc[i].1 += up.delta,
            None => {
                slot.insert(key, acc.len());
                acc.push((key, up.delta));
            }
        }
    }
    let updates = acc
        .into_iter()
        .filter(|&(_, d)| d != 0)
        .map(|((u, v), delta)| EdgeUpdate { u, v, delta })
        .collect();
    Batch { updates }
}

/// Applies one update to the graph and keeps the coloring consistent with it:
/// a deleted colored edge is uncolored, a reweighted colored edge is
/// re-accounted in the total.
pub fn apply_update(g: &mut Graph, c: &mut Coloring, up: &EdgeUpdate) -> Result<AppliedUpdate> {
    g.check_pair(up.u, up.v)?;
    if up.delta == 0 {
        return Err(Error::Contract("zero delta update".into()));
    }
    let old = g.find_edge(up.u, up.v).map_or(0, |e| g.weight(e));
    let result = old as i128 + up.delta as i128;
    if result < 0 || result > u64::MAX as i128 {
        let (u, v) = up.key();
        return Err(Error::NegativeWeight { u, v, weight: old, result });
    }
    let new = result as u64;
    let existing = g.find_edge(up.u, up.v);
    let prior_color = existing.and_then(|e| c.color(e));
    if new == 0 {
        if let Some(e) = existing {
            // uncolor while the endpoints are still linked
            c.unset_with_weight(g, e, old);
        }
    }
    let (edge, _) = g.set_weight(up.u, up.v, new)?;
    if new != 0 {
        c.reweight(edge, old, new);
    }
    Ok(AppliedUpdate {
        edge,
        old,
        new,
        class: UpdateClass::classify(old, new),
        prior_color,
    })
}
