//! Dynamic k edge-disjoint weighted matchings.
//!
//! A demand graph changes in batches of weight updates; after each batch the
//! solvers here maintain k pairwise edge-disjoint matchings of high total
//! weight, represented as a partial k-edge-coloring. The crate also carries
//! the instance formats and generators and the measurement harness used to
//! compare the algorithms.

pub mod batch;
pub mod dynamic;
pub mod enhancers;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod hybrid;
pub mod instance;
pub mod oracle;
pub mod primitives;
pub mod session;
pub mod solver;
pub mod static_solvers;

pub use error::{Error, Result};
pub use graph::{
    apply_update, coalesce_batch, AppliedUpdate, Batch, Color, Coloring, EdgeId, EdgeUpdate, Graph, Node,
    UpdateClass, WorkStats,
};
pub use oracle::{recourse, validate, ColoringSnapshot, RecourseScope};
pub use session::{drive_batch, BatchOutcome, DriveOptions, Session};
pub use solver::{AlgoKind, AlgoSpec, Solver};
