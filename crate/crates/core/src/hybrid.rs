//! Per-batch choice between a dynamic algorithm and a static kec rebuild,
//! using the previous batch size as the estimate of the current one.

use crate::dynamic::{DynGreedy, DynKec};
use crate::error::Result;
use crate::graph::{AppliedUpdate, Coloring, Graph};
use crate::solver::{BatchContext, Solver};
use crate::static_solvers::kec_into;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Dynamic,
    Static,
}

/// Dynamic iff the previous batch had fewer than `n` updates. The first
/// batch has no estimate and goes static.
pub fn choose_mode(prev_batch_size: Option<usize>, n: u32) -> Mode {
    match prev_batch_size {
        Some(b) if b < n as usize => Mode::Dynamic,
        _ => Mode::Static,
    }
}

#[derive(Clone)]
pub enum Inner {
    Greedy(DynGreedy),
    Kec(DynKec),
}

impl Inner {
    fn as_solver(&mut self) -> &mut dyn Solver {
        match self {
            Inner::Greedy(s) => s,
            Inner::Kec(s) => s,
        }
    }
}

pub struct Hybrid {
    inner: Inner,
    prev: Option<usize>,
    mode: Mode,
    /// Mode of every finished batch, in order.
    pub history: Vec<Mode>,
}

impl Hybrid {
    pub fn new(inner: Inner) -> Self {
        Hybrid { inner, prev: None, mode: Mode::Static, history: Vec::new() }
    }

    pub fn greedy(s: DynGreedy) -> Self {
        Self::new(Inner::Greedy(s))
    }

    pub fn kec(s: DynKec) -> Self {
        Self::new(Inner::Kec(s))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn inner(&self) -> &Inner {
        &self.inner
    }
}

impl Solver for Hybrid {
    fn begin_batch(&mut self, g: &Graph, _c: &mut Coloring) {
        self.mode = choose_mode(self.prev, g.n());
    }

    fn on_update(&mut self, g: &Graph, c: &mut Coloring, up: &AppliedUpdate) -> Result<()> {
        match self.mode {
            Mode::Dynamic => self.inner.as_solver().on_update(g, c, up),
            Mode::Static => Ok(()),
        }
    }

    fn end_batch(&mut self, g: &Graph, c: &mut Coloring, batch: &BatchContext<'_>) -> Result<()> {
        if self.mode == Mode::Static {
            kec_into(g, c);
        }
        self.prev = Some(batch.size);
        self.history.push(self.mode);
        Ok(())
    }
}
