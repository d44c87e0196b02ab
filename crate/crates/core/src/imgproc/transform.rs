//! Resampling: bilinear resize, half-scale pyramid steps, crops and
//! rotations onto an expanded canvas.

use super::{BinaryMask, ImgError, RasterImage, Result};

/// Bilinear sample at continuous coordinates (pixel centers on integers),
/// replicating edges.
#[inline]
pub(crate) fn sample_bilinear(img: &RasterImage, x: f64, y: f64, c: usize) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as isize, y0 as isize);
    let p00 = img.get_clamped(xi, yi, c) as f64;
    let p10 = img.get_clamped(xi + 1, yi, c) as f64;
    let p01 = img.get_clamped(xi, yi + 1, c) as f64;
    let p11 = img.get_clamped(xi + 1, yi + 1, c) as f64;
    let top = p00 + (p10 - p00) * fx;
    let bot = p01 + (p11 - p01) * fx;
    top + (bot - top) * fy
}

pub fn resize_bilinear(img: &RasterImage, width: usize, height: usize) -> Result<RasterImage> {
    if width == 0 || height == 0 {
        return Err(ImgError::EmptyImage(width, height));
    }
    if img.dims() == (width, height) {
        return Ok(img.clone());
    }
    let ch = img.channels();
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    let mut data = vec![0u8; width * height * ch];
    for y in 0..height {
        let fy = (y as f64 + 0.5) * sy - 0.5;
        for x in 0..width {
            let fx = (x as f64 + 0.5) * sx - 0.5;
            for c in 0..ch {
                data[(y * width + x) * ch + c] = sample_bilinear(img, fx, fy, c).round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    RasterImage::from_vec(width, height, img.space(), data)
}

/// 2x2 box average; odd trailing rows and columns are dropped.
pub fn downsample_half(img: &RasterImage) -> Option<RasterImage> {
    let (w, h) = (img.width() / 2, img.height() / 2);
    if w == 0 || h == 0 {
        return None;
    }
    let ch = img.channels();
    let mut data = vec![0u8; w * h * ch];
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let s = img.get(2 * x, 2 * y, c) as u32
                    + img.get(2 * x + 1, 2 * y, c) as u32
                    + img.get(2 * x, 2 * y + 1, c) as u32
                    + img.get(2 * x + 1, 2 * y + 1, c) as u32;
                data[(y * w + x) * ch + c] = ((s + 2) / 4) as u8;
            }
        }
    }
    RasterImage::from_vec(w, h, img.space(), data).ok()
}

/// Copy of `[x1, x2) x [y1, y2)`.
pub fn crop(img: &RasterImage, x1: usize, y1: usize, x2: usize, y2: usize) -> Result<RasterImage> {
    if x2 <= x1 || y2 <= y1 || x2 > img.width() || y2 > img.height() {
        return Err(ImgError::OutOfBounds(x2 as i64, y2 as i64, img.width(), img.height()));
    }
    let ch = img.channels();
    let w = x2 - x1;
    let mut data = Vec::with_capacity(w * (y2 - y1) * ch);
    for y in y1..y2 {
        let start = (y * img.width() + x1) * ch;
        data.extend_from_slice(&img.data()[start..start + w * ch]);
    }
    RasterImage::from_vec(w, y2 - y1, img.space(), data)
}

/// Canvas size holding a `width` x `height` image rotated by `degrees`.
pub fn rotated_extent(width: usize, height: usize, degrees: f64) -> (usize, usize) {
    let a = degrees.to_radians();
    let (c, s) = (a.cos().abs(), a.sin().abs());
    let w = width as f64 * c + height as f64 * s;
    let h = width as f64 * s + height as f64 * c;
    ((w - 1e-9).ceil().max(1.0) as usize, (h - 1e-9).ceil().max(1.0) as usize)
}

/// Geometry of a rotation about the image center onto an expanded canvas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationFrame {
    pub src: (usize, usize),
    pub dst: (usize, usize),
    /// Screen-CCW rotation applied to the content, degrees.
    pub degrees: f64,
}

impl RotationFrame {
    pub fn new(src: (usize, usize), degrees: f64) -> Self {
        Self {
            src,
            dst: rotated_extent(src.0, src.1, degrees),
            degrees,
        }
    }

    /// Continuous source coordinates (pixel centers on integers) to canvas coordinates.
    pub fn to_dst(&self, x: f64, y: f64) -> (f64, f64) {
        let a = self.degrees.to_radians();
        let (dx, dy) = (x + 0.5 - self.src.0 as f64 / 2.0, y + 0.5 - self.src.1 as f64 / 2.0);
        let rx = dx * a.cos() + dy * a.sin();
        let ry = -dx * a.sin() + dy * a.cos();
        (rx + self.dst.0 as f64 / 2.0 - 0.5, ry + self.dst.1 as f64 / 2.0 - 0.5)
    }

    pub fn to_src(&self, x: f64, y: f64) -> (f64, f64) {
        let a = self.degrees.to_radians();
        let (dx, dy) = (x + 0.5 - self.dst.0 as f64 / 2.0, y + 0.5 - self.dst.1 as f64 / 2.0);
        let rx = dx * a.cos() - dy * a.sin();
        let ry = dx * a.sin() + dy * a.cos();
        (rx + self.src.0 as f64 / 2.0 - 0.5, ry + self.src.1 as f64 / 2.0 - 0.5)
    }
}

/// Rotate content by `degrees` (screen counter-clockwise) about the image
/// center with bilinear interpolation. The canvas grows to the rotated
/// extent; uncovered samples take `fill`. Also returns the coverage mask.
pub fn rotate(img: &RasterImage, degrees: f64, fill: u8) -> (RasterImage, BinaryMask, RotationFrame) {
    let frame = RotationFrame::new(img.dims(), degrees);
    let (dw, dh) = frame.dst;
    let ch = img.channels();
    let (sw, sh) = (img.width() as f64, img.height() as f64);
    let mut data = vec![fill; dw * dh * ch];
    let mut valid = BinaryMask::new(dw, dh);
    for y in 0..dh {
        for x in 0..dw {
            let (sx, sy) = frame.to_src(x as f64, y as f64);
            // Snap sub-epsilon noise so an identity rotation samples exactly.
            let sx = if (sx - sx.round()).abs() < 1e-9 { sx.round() } else { sx };
            let sy = if (sy - sy.round()).abs() < 1e-9 { sy.round() } else { sy };
            if sx < -0.5 || sy < -0.5 || sx > sw - 0.5 || sy > sh - 0.5 {
                continue;
            }
            valid.set(x, y, true);
            for c in 0..ch {
                data[(y * dw + x) * ch + c] = sample_bilinear(img, sx, sy, c).round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    let out = RasterImage::from_vec(dw, dh, img.space(), data).expect("canvas is non-empty");
    (out, valid, frame)
}
