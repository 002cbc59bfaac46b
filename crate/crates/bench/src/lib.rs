//! Fixtures shared by the benchmarks.

use vlabel_core::generate::instance;
use vlabel_core::{Graph, GraphModel, LabelAssignment, LabelModel, WeightModel};

/// `gnm(n, 5n)` with weights in `[1, 10]` and `labels` uniform labels.
pub fn sparse_gnm(n: usize, labels: usize, seed: u64) -> (Graph, LabelAssignment) {
    instance(
        GraphModel::Gnm { n, m: 5 * n },
        WeightModel::Uniform { lo: 1.0, hi: 10.0 },
        LabelModel::Uniform { labels },
        seed,
    )
    .expect("valid generator parameters")
}

/// `side × side` unit grid with `labels` uniform labels.
pub fn grid(side: usize, labels: usize, seed: u64) -> (Graph, LabelAssignment) {
    instance(
        GraphModel::Grid { w: side, h: side },
        WeightModel::Unit,
        LabelModel::Uniform { labels },
        seed,
    )
    .expect("valid generator parameters")
}
