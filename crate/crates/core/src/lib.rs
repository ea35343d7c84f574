//! Constant-memory anomaly detection for dynamic graph edge streams.
//!
//! Edges are folded into a higher-order count-min sketch ([`hcms::HCms`]),
//! where each hash row is a square matrix indexed by hashed source and
//! destination. Anomalous edges and graph snapshots then show up as dense
//! submatrices:
//!
//! * [`anoedge::AnoEdgeG`] scores an edge by greedily growing a dense block
//!   around its cell.
//! * [`anoedge::AnoEdgeL`] keeps one dense block per row up to date and scores
//!   an edge by its likelihood against that block.
//! * [`anograph::AnoGraph`] scores a snapshot by greedy peeling, which is
//!   within a factor two of the densest block.
//! * [`anograph::AnoGraphK`] scores a snapshot by growing blocks around its
//!   `K` heaviest cells.
//!
//! [`oracle`] holds slow exhaustive references used by the test suites.

pub mod anoedge;
pub mod anograph;
pub mod error;
pub mod eval;
pub mod hcms;
pub mod oracle;
pub mod stream_io;
pub mod submatrix;

pub use error::{Error, Result};
pub use stream_io::{EdgeRecord, GraphSnapshot};

/// Dense integer node identifier produced by interning.
pub type NodeId = u64;

/// Scores edges one at a time, in stream order.
pub trait EdgeScorer {
    fn score_edge(&mut self, edge: &EdgeRecord) -> Result<f64>;

    /// Bytes of state held by the scorer.
    fn footprint_bytes(&self) -> usize;
}

/// Scores whole snapshots.
pub trait GraphScorer {
    fn score_graph(&mut self, graph: &GraphSnapshot) -> Result<f64>;

    fn footprint_bytes(&self) -> usize;
}

/// Minimum over an iterator of scores, `0.0` for an empty one.
pub(crate) fn min_score<I: IntoIterator<Item = f64>>(scores: I) -> f64 {
    let m = scores.into_iter().fold(f64::INFINITY, f64::min);
    if m.is_finite() {
        m
    } else {
        0.0
    }
}
