//! Raster primitives shared by every pipeline stage.
//!
//! Everything here is implemented directly on 8-bit row-major buffers:
//! color conversion, grey-level morphology, Canny edges, median filtering,
//! border-following contours, minimum-area rectangles and the standard
//! (rho, theta) Hough transform. All window operations replicate edge
//! pixels at the border.

pub(crate) mod color;
mod contour;
mod edges;
mod filter;
mod geometry;
mod hough;
pub mod io;
mod morph;
mod raster;
mod transform;

pub use color::convert_color;
pub use contour::{fill_contours, find_contours, Contour};
pub use edges::{canny, sobel_gradients};
pub use filter::{box_filter, gaussian_blur, median_filter};
pub use geometry::{convex_hull, min_area_rect, OrientedRect};
pub use hough::{hough_accumulator, hough_lines, HoughAccumulator, LineSegment};
pub use morph::{morphology, morphology_mask, MorphKind, SeShape, StructuringElement};
pub use raster::{BinaryMask, ColorSpace, RasterImage};
pub use transform::{
    crop, downsample_half, resize_bilinear, rotate, rotated_extent, RotationFrame,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ImgError {
    #[error("buffer length {actual} does not match {width}x{height}x{channels}")]
    BadBuffer {
        width: usize,
        height: usize,
        channels: usize,
        actual: usize,
    },
    #[error("image dimensions must be at least 1x1, got {0}x{1}")]
    EmptyImage(usize, usize),
    #[error("no conversion from {from:?} to {to:?}")]
    UnsupportedConversion { from: ColorSpace, to: ColorSpace },
    #[error("operation requires a single-channel image, got {0} channels")]
    MultiChannelInput(usize),
    #[error("invalid structuring element {0}x{1}: sides must be odd and >= 1")]
    BadStructuringElement(usize, usize),
    #[error("invalid Canny thresholds: low {low} > high {high}")]
    InvalidThresholds { low: f32, high: f32 },
    #[error("point ({0}, {1}) lies outside the {2}x{3} canvas")]
    OutOfBounds(i64, i64, usize, usize),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub type Result<T> = std::result::Result<T, ImgError>;
