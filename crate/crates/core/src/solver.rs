//! Common driver interface for all algorithms and the algorithm registry.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::batch::{BatchGreedy, BatchNodeCentered};
use crate::dynamic::{Beta, DynGreedy, DynGreedyConfig, DynKec};
use crate::enhancers::{Batch2Apx, PostProcessReport};
use crate::error::{Error, Result};
use crate::graph::{AppliedUpdate, Coloring, Graph};
use crate::hybrid::Hybrid;
use crate::static_solvers::{greedy_it_into, kec_into, node_centered_into, DEFAULT_THETA};

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// What a solver sees at the end of a batch.
#[derive(Clone, Copy, Debug)]
pub struct BatchContext<'a> {
    /// Coalesced batch size b (filtered updates included).
    pub size: usize,
    /// Updates forwarded to the solver, in arrival order.
    pub forwarded: &'a [AppliedUpdate],
}

/// A dynamic k-disjoint matching algorithm driven update by update.
///
/// The driver applies each update to the graph first, then calls
/// [`Solver::on_update`]; dynamic algorithms repair the coloring there.
/// Batch and static algorithms do their work in [`Solver::end_batch`].
pub trait Solver {
    fn begin_batch(&mut self, _g: &Graph, _c: &mut Coloring) {}

    fn on_update(&mut self, _g: &Graph, _c: &mut Coloring, _up: &AppliedUpdate) -> Result<()> {
        Ok(())
    }

    fn end_batch(&mut self, _g: &Graph, _c: &mut Coloring, _batch: &BatchContext<'_>) -> Result<()> {
        Ok(())
    }

    /// Queue counters of the solver's own post-processing, if it has one.
    fn last_report(&self) -> Option<PostProcessReport> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StaticAlgo {
    Greedy { local_swaps: bool },
    NodeCentered,
    Kec,
}

/// Recomputes from scratch at the end of every batch.
#[derive(Clone, Debug)]
pub struct StaticSolver {
    pub algo: StaticAlgo,
    pub theta: f64,
}

impl Solver for StaticSolver {
    fn end_batch(&mut self, g: &Graph, c: &mut Coloring, _batch: &BatchContext<'_>) -> Result<()> {
        match self.algo {
            StaticAlgo::Greedy { local_swaps } => greedy_it_into(g, c, local_swaps),
            StaticAlgo::NodeCentered => node_centered_into(g, c, self.theta)?,
            StaticAlgo::Kec => kec_into(g, c),
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgoKind {
    Greedy,
    GreedyL,
    Nc,
    Kec,
    DynGreedy,
    DynGreedyR,
    DynKec,
    BatchGreedy,
    BatchGreedyL,
    BatchNc,
    Batch2Apx,
    HybridGreedy,
    HybridGreedyR,
    HybridKec,
}

impl AlgoKind {
    pub const ALL: [AlgoKind; 14] = [
        AlgoKind::Greedy,
        AlgoKind::GreedyL,
        AlgoKind::Nc,
        AlgoKind::Kec,
        AlgoKind::DynGreedy,
        AlgoKind::DynGreedyR,
        AlgoKind::DynKec,
        AlgoKind::BatchGreedy,
        AlgoKind::BatchGreedyL,
        AlgoKind::BatchNc,
        AlgoKind::Batch2Apx,
        AlgoKind::HybridGreedy,
        AlgoKind::HybridGreedyR,
        AlgoKind::HybridKec,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AlgoKind::Greedy => "greedy",
            AlgoKind::GreedyL => "greedy-l",
            AlgoKind::Nc => "nc",
            AlgoKind::Kec => "kec",
            AlgoKind::DynGreedy => "dyn-greedy",
            AlgoKind::DynGreedyR => "dyn-greedy-r",
            AlgoKind::DynKec => "dyn-kec",
            AlgoKind::BatchGreedy => "batch-greedy",
            AlgoKind::BatchGreedyL => "batch-greedy-l",
            AlgoKind::BatchNc => "batch-nc",
            AlgoKind::Batch2Apx => "batch-2apx",
            AlgoKind::HybridGreedy => "hybrid-greedy",
            AlgoKind::HybridGreedyR => "hybrid-greedy-r",
            AlgoKind::HybridKec => "hybrid-kec",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, AlgoKind::DynGreedyR | AlgoKind::HybridGreedyR)
    }

    /// Dynamic and hybrid algorithms react to each update as it arrives.
    pub fn is_incremental(self) -> bool {
        matches!(
            self,
            AlgoKind::DynGreedy
                | AlgoKind::DynGreedyR
                | AlgoKind::DynKec
                | AlgoKind::HybridGreedy
                | AlgoKind::HybridGreedyR
                | AlgoKind::HybridKec
        )
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AlgoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgoKind::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm id '{s}'")))
    }
}

/// An algorithm together with its `-p` / `-f` enhancements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgoSpec {
    pub kind: AlgoKind,
    pub postprocess: bool,
    /// Filter ratio threshold t >= 1.
    pub filter: Option<f64>,
    /// Recursion depth of the greedy dynamic algorithms.
    pub alpha: u32,
    pub theta: f64,
}

pub const DEFAULT_ALPHA: u32 = 1;
/// Threshold used by the benchmark presets when filtering is on.
pub const DEFAULT_FILTER_T: f64 = 2.0;

impl AlgoSpec {
    pub fn new(kind: AlgoKind) -> Self {
        AlgoSpec { kind, postprocess: false, filter: None, alpha: DEFAULT_ALPHA, theta: DEFAULT_THETA }
    }

    pub fn with_postprocess(mut self, on: bool) -> Self {
        self.postprocess = on;
        self
    }

    pub fn with_filter(mut self, t: Option<f64>) -> Self {
        self.filter = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.filter {
            if !(t >= 1.0 && t.is_finite()) {
                return Err(Error::Config(format!("filter threshold must be a finite t >= 1, got {t}")));
            }
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must be in [0, 1], got {}", self.theta)));
        }
        Ok(())
    }

    /// Id with suffix flags, e.g. `dyn-greedy-r+pf`.
    pub fn label(&self) -> String {
        let mut s = self.kind.id().to_string();
        let suffix = match (self.postprocess, self.filter.is_some()) {
            (true, true) => "+pf",
            (true, false) => "+p",
            (false, true) => "+f",
            (false, false) => "",
        };
        s.push_str(suffix);
        s
    }

    /// Parses a label produced by [`AlgoSpec::label`]; `+f` uses `t`.
    pub fn from_label(label: &str, t: f64) -> Result<Self> {
        let (id, flags) = label.split_once('+').unwrap_or((label, ""));
        let kind: AlgoKind = id.parse()?;
        if !flags.chars().all(|ch| ch == 'p' || ch == 'f') {
            return Err(Error::Config(format!("unknown suffix '+{flags}' in '{label}'")));
        }
        Ok(AlgoSpec::new(kind).with_postprocess(flags.contains('p')).with_filter(flags.contains('f').then_some(t)))
    }

    pub fn dyn_greedy_config(&self, seed: u64) -> DynGreedyConfig {
        let beta = if self.kind.is_randomized() { Beta::Sample(1) } else { Beta::Full };
        DynGreedyConfig { alpha: self.alpha, beta, seed }
    }

    pub fn build(&self, seed: u64) -> Result<Box<dyn Solver>> {
        self.validate()?;
        let theta = self.theta;
        Ok(match self.kind {
            AlgoKind::Greedy => Box::new(StaticSolver { algo: StaticAlgo::Greedy { local_swaps: false }, theta }),
            AlgoKind::GreedyL => Box::new(StaticSolver { algo: StaticAlgo::Greedy { local_swaps: true }, theta }),
            AlgoKind::Nc => Box::new(StaticSolver { algo: StaticAlgo::NodeCentered, theta }),
            AlgoKind::Kec => Box::new(StaticSolver { algo: StaticAlgo::Kec, theta }),
            AlgoKind::DynGreedy | AlgoKind::DynGreedyR => Box::new(DynGreedy::new(self.dyn_greedy_config(seed))?),
            AlgoKind::DynKec => Box::new(DynKec::default()),
            AlgoKind::BatchGreedy => Box::new(BatchGreedy { local_swaps: false }),
            AlgoKind::BatchGreedyL => Box::new(BatchGreedy { local_swaps: true }),
            AlgoKind::BatchNc => Box::new(BatchNodeCentered { theta }),
            AlgoKind::Batch2Apx => Box::new(Batch2Apx::default()),
            AlgoKind::HybridGreedy | AlgoKind::HybridGreedyR => {
                Box::new(Hybrid::greedy(DynGreedy::new(self.dyn_greedy_config(seed))?))
            }
            AlgoKind::HybridKec => Box::new(Hybrid::kec(DynKec::default())),
        })
    }
}
