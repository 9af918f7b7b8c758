//! One run of one algorithm over a stream of batches.

use crate::enhancers::{filter_decision, post_process_all, FilterDecision, PostProcessReport};
use crate::error::{Error, Result};
use crate::graph::{apply_update, coalesce_batch, AppliedUpdate, Coloring, EdgeUpdate, Graph};
use crate::oracle::validate;
use crate::solver::{AlgoSpec, BatchContext, Solver};

#[derive(Clone, Debug, Default)]
pub struct BatchOutcome {
    /// Coalesced batch size b.
    pub size: usize,
    /// Every applied update, in arrival order.
    pub applied: Vec<AppliedUpdate>,
    /// Updates the filter kept from the solver.
    pub dropped: Vec<AppliedUpdate>,
    /// Report of the `+p` pass.
    pub post: Option<PostProcessReport>,
    /// Report of a solver that post-processes internally.
    pub solver_post: Option<PostProcessReport>,
}

pub struct Session {
    pub graph: Graph,
    pub coloring: Coloring,
    solver: Box<dyn Solver>,
    filter: Option<f64>,
    postprocess: bool,
    /// Run the full validator after every batch.
    pub check: bool,
}

impl Session {
    pub fn new(n: u32, k: usize, spec: &AlgoSpec, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        Ok(Session {
            graph: Graph::new(n),
            coloring: Coloring::new(n, k),
            solver: spec.build(seed)?,
            filter: spec.filter,
            postprocess: spec.postprocess,
            check: false,
        })
    }

    pub fn with_solver(n: u32, k: usize, solver: Box<dyn Solver>) -> Self {
        Session { graph: Graph::new(n), coloring: Coloring::new(n, k), solver, filter: None, postprocess: false, check: false }
    }

    pub fn solver(&self) -> &dyn Solver {
        self.solver.as_ref()
    }

    /// Coalesces, applies and solves one batch.
    pub fn process_batch(&mut self, raw: &[EdgeUpdate]) -> Result<BatchOutcome> {
        let opts = DriveOptions { filter: self.filter, postprocess: self.postprocess };
        let out = drive_batch(&mut self.graph, &mut self.coloring, self.solver.as_mut(), raw, opts)?;
        if self.check {
            validate(&self.graph, &self.coloring)
                .map_err(|v| Error::Internal(format!("invalid coloring after batch: {v}")))?;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DriveOptions {
    pub filter: Option<f64>,
    pub postprocess: bool,
}

/// Runs one batch through `solver`: coalesce, then for each update apply it
/// and (unless filtered) notify the solver, then close the batch and
/// optionally post-process.
pub fn drive_batch(
    g: &mut Graph,
    c: &mut Coloring,
    solver: &mut dyn Solver,
    raw: &[EdgeUpdate],
    opts: DriveOptions,
) -> Result<BatchOutcome> {
    let batch = coalesce_batch(raw);
    solver.begin_batch(g, c);
    let mut out = BatchOutcome { size: batch.len(), ..Default::default() };
    let mut forwarded = Vec::with_capacity(batch.len());
    for up in batch.updates() {
        let a = apply_update(g, c, up)?;
        out.applied.push(a);
        let keep = opts.filter.is_none_or(|t| filter_decision(t, a.old, a.new) == FilterDecision::Keep);
        if keep {
            solver.on_update(g, c, &a)?;
            forwarded.push(a);
        } else {
            out.dropped.push(a);
        }
    }
    solver.end_batch(g, c, &BatchContext { size: batch.len(), forwarded: &forwarded })?;
    out.solver_post = solver.last_report();
    if opts.postprocess {
        out.post = Some(post_process_all(g, c)?);
    }
    Ok(out)
}
