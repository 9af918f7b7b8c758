//! Fixtures shared by the criterion benches.

use djm_core::instance::{gen_rmat_dynamic, Initiator, InstanceStream, RmatParams};
use djm_core::{AlgoSpec, EdgeUpdate, Session};

/// A small dynamic RMAT instance: one insertion batch of `8 * 2^log_nodes`
/// edges, then `batches` update batches touching `fraction` of them.
pub fn rmat(log_nodes: u32, fraction: f64, batches: usize, seed: u64) -> InstanceStream {
    let p = RmatParams { log_nodes, initiator: Initiator::G, fraction, update_batches: batches, seed, ..Default::default() };
    gen_rmat_dynamic(&p).expect("preset parameters are valid")
}

/// A session that has already absorbed the insertion batch, plus the
/// remaining update batches in delta form.
pub fn warmed(inst: &InstanceStream, spec: &AlgoSpec, k: usize) -> (Session, Vec<Vec<EdgeUpdate>>) {
    let mut batches = inst.to_delta_batches();
    let first = batches.remove(0);
    let mut s = Session::new(inst.n, k, spec, 1).expect("valid spec");
    s.process_batch(&first).expect("insertion batch");
    (s, batches)
}

/// Replays every batch and returns the final weight.
pub fn replay(mut s: Session, batches: &[Vec<EdgeUpdate>]) -> u64 {
    for raw in batches {
        s.process_batch(raw).expect("batch");
    }
    s.coloring.total_weight()
}
