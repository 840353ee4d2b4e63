//! Cayley graphs, the coarse disjoint union of a family window, Laplacian
//! gaps and operator propagation.

mod cayley;
mod coarse;
mod propagation;

pub use cayley::{
    cayley_graph, laplacian_gap, markov_gap, CayleyGraph, CollapseFlags, LaplacianGap, DENSE_GRAPH_LIMIT,
    LAPLACIAN_IDENTITY_TOL,
};
pub use coarse::{bounded_geometry_check, coarse_union, CoarseSpace, CrossDistance, MarginRule, TriangleReport};
pub use propagation::{propagation, PropagationProfile, NONZERO_TOL};

use crate::linalg::LinalgError;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("generating set does not generate the group (Cayley graph is disconnected)")]
    NotGenerating,
    #[error("generating set contains the identity")]
    IdentityInGenset,
    #[error("generating multiset is not closed under inverses")]
    NotSymmetricSet,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("laplacian identity violated by {defect:e}")]
    LaplacianIdentity { defect: f64 },
    #[error("operator shape does not match the coarse space: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One CSV row of per-block spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub block_label: String,
    pub dim: usize,
    pub degree: usize,
    pub diameter: u32,
    pub lambda1: f64,
    pub mu2: f64,
}

pub const SPECTRUM_CSV_HEADER: [&str; 6] = ["block_label", "dim", "degree", "diameter", "lambda1", "mu2"];

/// Renders rows as CSV with the fixed header. Labels such as `SL(2,3)` are
/// quoted by the writer.
pub fn spectra_csv(rows: &[SpectrumRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SPECTRUM_CSV_HEADER).expect("writing to memory");
    for r in rows {
        w.write_record([
            r.block_label.clone(),
            r.dim.to_string(),
            r.degree.to_string(),
            r.diameter.to_string(),
            format!("{:.12e}", r.lambda1),
            format!("{:.12e}", r.mu2),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}
