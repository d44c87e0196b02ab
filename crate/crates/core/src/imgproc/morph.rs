//! Grey-level morphology with flat structuring elements.

use serde::{Deserialize, Serialize};

use super::{BinaryMask, ImgError, RasterImage, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeShape {
    Rect,
    Ellipse,
}

/// Flat structuring element anchored at its center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuringElement {
    shape: SeShape,
    width: usize,
    height: usize,
}

impl StructuringElement {
    pub fn new(shape: SeShape, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(ImgError::BadStructuringElement(width, height));
        }
        Ok(Self {
            shape,
            width,
            height,
        })
    }

    pub fn rect(width: usize, height: usize) -> Result<Self> {
        Self::new(SeShape::Rect, width, height)
    }

    pub fn ellipse(width: usize, height: usize) -> Result<Self> {
        Self::new(SeShape::Ellipse, width, height)
    }

    pub fn shape(&self) -> SeShape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Offsets relative to the anchor covered by the element.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let rx = (self.width / 2) as isize;
        let ry = (self.height / 2) as isize;
        let mut out = Vec::new();
        for dy in -ry..=ry {
            for dx in -rx..=rx {
                let inside = match self.shape {
                    SeShape::Rect => true,
                    SeShape::Ellipse => {
                        let nx = dx as f64 / (rx as f64 + 0.5);
                        let ny = dy as f64 / (ry as f64 + 0.5);
                        nx * nx + ny * ny <= 1.0
                    }
                };
                if inside {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphKind {
    Erode,
    Dilate,
    Open,
    Close,
    TopHat,
    BlackHat,
}

pub fn morphology(kind: MorphKind, img: &RasterImage, se: &StructuringElement) -> Result<RasterImage> {
    img.require_gray()?;
    Ok(match kind {
        MorphKind::Erode => extreme(img, se, true),
        MorphKind::Dilate => extreme(img, se, false),
        MorphKind::Open => extreme(&extreme(img, se, true), se, false),
        MorphKind::Close => extreme(&extreme(img, se, false), se, true),
        MorphKind::TopHat => {
            let opened = extreme(&extreme(img, se, true), se, false);
            zip_map(img, &opened, |a, b| a.saturating_sub(b))
        }
        MorphKind::BlackHat => {
            let closed = extreme(&extreme(img, se, false), se, true);
            zip_map(&closed, img, |a, b| a.saturating_sub(b))
        }
    })
}

/// Morphology on a binary mask, treating foreground as 255.
pub fn morphology_mask(kind: MorphKind, mask: &BinaryMask, se: &StructuringElement) -> Result<BinaryMask> {
    let out = morphology(kind, &mask.to_gray(), se)?;
    BinaryMask::from_gray(&out)
}

fn zip_map(a: &RasterImage, b: &RasterImage, f: impl Fn(u8, u8) -> u8) -> RasterImage {
    let mut out = a.clone();
    for (o, &v) in out.data_mut().iter_mut().zip(b.data()) {
        *o = f(*o, v);
    }
    out
}

fn extreme(img: &RasterImage, se: &StructuringElement, take_min: bool) -> RasterImage {
    match se.shape() {
        SeShape::Rect => rect_extreme(img, se.width() / 2, se.height() / 2, take_min),
        SeShape::Ellipse => generic_extreme(img, &se.offsets(), take_min),
    }
}

fn generic_extreme(img: &RasterImage, offsets: &[(isize, isize)], take_min: bool) -> RasterImage {
    let (w, h) = img.dims();
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let mut acc = if take_min { u8::MAX } else { u8::MIN };
            for &(dx, dy) in offsets {
                let v = img.get_clamped(x as isize + dx, y as isize + dy, 0);
                acc = if take_min { acc.min(v) } else { acc.max(v) };
            }
            out.set(x, y, 0, acc);
        }
    }
    out
}

// A rectangle over replicated borders is separable: clamping acts per axis.
fn rect_extreme(img: &RasterImage, rx: usize, ry: usize, take_min: bool) -> RasterImage {
    let (w, h) = img.dims();
    let mut tmp = vec![0u8; w * h];
    let mut line = Vec::new();
    let mut res = Vec::new();
    for y in 0..h {
        line.clear();
        line.extend_from_slice(&img.data()[y * w..(y + 1) * w]);
        sliding_extreme(&line, rx, take_min, &mut res);
        tmp[y * w..(y + 1) * w].copy_from_slice(&res);
    }
    let mut out = vec![0u8; w * h];
    for x in 0..w {
        line.clear();
        line.extend((0..h).map(|y| tmp[y * w + x]));
        sliding_extreme(&line, ry, take_min, &mut res);
        for (y, &v) in res.iter().enumerate() {
            out[y * w + x] = v;
        }
    }
    RasterImage::from_vec(w, h, img.space(), out).expect("same geometry")
}

/// van Herk / Gil-Werman running min or max over a window of `2r + 1`
/// with edge replication.
fn sliding_extreme(src: &[u8], r: usize, take_min: bool, out: &mut Vec<u8>) {
    out.clear();
    let n = src.len();
    if r == 0 {
        out.extend_from_slice(src);
        return;
    }
    let k = 2 * r + 1;
    let op = |a: u8, b: u8| if take_min { a.min(b) } else { a.max(b) };
    let mut padded = Vec::with_capacity(n + 2 * r);
    padded.extend(std::iter::repeat_n(src[0], r));
    padded.extend_from_slice(src);
    padded.extend(std::iter::repeat_n(src[n - 1], r));
    let m = padded.len();
    let mut prefix = padded.clone();
    let mut suffix = padded.clone();
    for i in 1..m {
        if i % k != 0 {
            prefix[i] = op(prefix[i - 1], padded[i]);
        }
    }
    for i in (0..m - 1).rev() {
        if (i + 1) % k != 0 {
            suffix[i] = op(suffix[i + 1], padded[i]);
        }
    }
    out.extend((0..n).map(|i| op(suffix[i], prefix[i + k - 1])));
}
