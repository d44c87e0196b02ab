//! Comparison and evaluation mathematics.
//!
//! Four histogram measures (Hellinger kernel, chi-squared, intersection and
//! Pearson correlation), cutoff precision averages over rankings, mask
//! precision/recall/F1, box IoU, PSNR and undirected angular error.
//! Degenerate 0/0 cases resolve to 0 so batch evaluation never aborts.

mod boxes;
mod histogram;
mod quality;
mod retrieval;

pub use boxes::{iou, mean_iou, BBox};
pub use histogram::{histogram_measure, Histogram, MeasureKind, Polarity, SimilarityScore};
pub use quality::{mask_prf, mean_angular_error, psnr, MaskScores};
pub use retrieval::{ap_at_k, map_at_k, Label, RankedRetrieval, UNKNOWN_LABEL};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("histogram lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{0:?} requires L1-normalized histograms")]
    NotNormalized(MeasureKind),
    #[error("histogram must have at least one non-negative finite bin")]
    InvalidHistogram,
    #[error("relevant label set is empty")]
    EmptyRelevantSet,
    #[error("cutoff K must be at least 1")]
    ZeroCutoff,
    #[error("no entries to average")]
    EmptyInput,
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize, usize), (usize, usize, usize)),
    #[error("ranking contains a repeated label {0}")]
    DuplicateLabel(Label),
    #[error("box ({0}, {1}, {2}, {3}) is degenerate")]
    DegenerateBox(i64, i64, i64, i64),
}

pub type Result<T> = std::result::Result<T, MetricError>;
