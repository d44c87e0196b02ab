//! Global image descriptors: color histograms, texture vectors and the
//! painter-name text descriptor.
//!
//! Every vector carries a [`Layout`] describing how it was produced. Two
//! vectors are comparable only when their layouts are identical.

mod color;
mod text;
mod texture;

pub use color::{block_histogram, hist_3d, hist_gray_1d, multires_histogram, HistSpec};
pub(crate) use text::otsu_from_histogram;
pub use text::{
    binarize_text, match_author, otsu_threshold, read_text_descriptor, AuthorCatalog, AuthorMatch,
    CatalogEntry, FixedOcr, OcrError, OcrPort, SidecarOcr,
};
pub use texture::{
    dct_8x8, dct_descriptor, hog_descriptor, lbp_codes, lbp_descriptor, texture_input, HogParams,
    ANALYSIS_SIZE, ZIGZAG,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgproc::ImgError;
use crate::metrics::{histogram_measure, Histogram, MeasureKind, MetricError, Polarity, SimilarityScore};

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("bin count {0} outside the supported range")]
    BadBinCount(usize),
    #[error("a three-channel color image is required")]
    GrayInput,
    #[error("a single-channel image is required, got {0} channels")]
    MultiChannelInput(usize),
    #[error("image {width}x{height} is too small for a {grid}x{grid} grid")]
    ImageTooSmall {
        width: usize,
        height: usize,
        grid: usize,
    },
    #[error("grid size must be at least 1")]
    BadGrid,
    #[error("coefficient count {0} must lie in [1, 64]")]
    BadKeepCount(usize),
    #[error("HOG geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("mask is {0}x{1} but image is {2}x{3}")]
    MaskMismatch(usize, usize, usize, usize),
    #[error("descriptor layouts differ")]
    LayoutMismatch,
    #[error("values do not fit layout: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{0:?} cannot be applied to signed coefficients")]
    UnsupportedMeasure(MeasureKind),
    #[error("invalid catalog: {0}")]
    Catalog(String),
    #[error(transparent)]
    Ocr(#[from] OcrError),
    #[error(transparent)]
    Image(#[from] ImgError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

pub type Result<T> = std::result::Result<T, DescriptorError>;

/// Production parameters of a descriptor vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    Histogram { spec: HistSpec },
    Block { grid: usize, spec: HistSpec },
    Multires { levels: Vec<usize>, spec: HistSpec },
    Lbp { grid: usize },
    Dct { tiles_x: usize, tiles_y: usize, keep: usize },
    Hog { width: usize, height: usize, params: HogParams },
}

impl Layout {
    /// Number of values a vector with this layout holds.
    pub fn len(&self) -> usize {
        match self {
            Layout::Histogram { spec } => spec.len(),
            Layout::Block { grid, spec } => grid * grid * spec.len(),
            Layout::Multires { levels, spec } => levels.iter().map(|g| g * g).sum::<usize>() * spec.len(),
            Layout::Lbp { grid } => grid * grid * 256,
            Layout::Dct { tiles_x, tiles_y, keep } => tiles_x * tiles_y * keep,
            Layout::Hog { width, height, params } => params.len(*width, *height),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether values may be negative.
    pub fn is_signed(&self) -> bool {
        matches!(self, Layout::Dct { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorVector {
    values: Vec<f64>,
    layout: Layout,
}

impl DescriptorVector {
    pub fn new(values: Vec<f64>, layout: Layout) -> Result<Self> {
        let expected = layout.len();
        if values.len() != expected {
            return Err(DescriptorError::LengthMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { values, layout })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn comparable(&self, other: &Self) -> bool {
        self.layout == other.layout
    }
}

/// Compare two descriptors with a histogram measure.
///
/// Non-negative vectors are rescaled to unit mass first, so tiled layouts
/// weigh every tile equally. Signed DCT vectors only support correlation.
pub fn compare(kind: MeasureKind, a: &DescriptorVector, b: &DescriptorVector) -> Result<SimilarityScore> {
    if !a.comparable(b) {
        return Err(DescriptorError::LayoutMismatch);
    }
    if a.layout.is_signed() {
        if kind != MeasureKind::Correlation {
            return Err(DescriptorError::UnsupportedMeasure(kind));
        }
        return Ok(SimilarityScore {
            value: pearson(&a.values, &b.values),
            polarity: Polarity::HigherIsCloser,
        });
    }
    let ha = Histogram::normalized(a.values.clone())?;
    let hb = Histogram::normalized(b.values.clone())?;
    if kind.requires_normalized() && !(ha.is_normalized() && hb.is_normalized()) {
        // An all-zero vector shares no mass with anything.
        return Ok(SimilarityScore {
            value: 0.0,
            polarity: kind.polarity(),
        });
    }
    Ok(histogram_measure(kind, &ha, &hb)?)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(1) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        da += (x - ma) * (x - ma);
        db += (y - mb) * (y - mb);
    }
    let den = (da * db).sqrt();
    if den > 0.0 {
        (num / den).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

/// Split `len` into `n` spans; the last absorbs the remainder.
pub(crate) fn tile_span(len: usize, n: usize, i: usize) -> (usize, usize) {
    let step = len / n;
    let start = i * step;
    let end = if i + 1 == n { len } else { start + step };
    (start, end)
}
