use serde::{Deserialize, Serialize};

use super::{ImgError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorSpace {
    Gray,
    Rgb,
    Lab,
    Hsv,
    YCrCb,
}

impl ColorSpace {
    pub fn channels(self) -> usize {
        match self {
            ColorSpace::Gray => 1,
            _ => 3,
        }
    }
}

/// 8-bit row-major raster, interleaved channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    space: ColorSpace,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn from_vec(width: usize, height: usize, space: ColorSpace, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ImgError::EmptyImage(width, height));
        }
        let channels = space.channels();
        if data.len() != width * height * channels {
            return Err(ImgError::BadBuffer {
                width,
                height,
                channels,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            space,
            data,
        })
    }

    /// Image filled with one value in every sample.
    ///
    /// Panics on a zero dimension.
    pub fn filled(width: usize, height: usize, space: ColorSpace, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        Self {
            width,
            height,
            space,
            data: vec![value; width * height * space.channels()],
        }
    }

    pub fn new_gray(width: usize, height: usize) -> Self {
        Self::filled(width, height, ColorSpace::Gray, 0)
    }

    pub fn from_fn_gray(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut img = Self::new_gray(width, height);
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        img
    }

    pub fn from_fn_rgb(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Self {
        let mut img = Self::filled(width, height, ColorSpace::Rgb, 0);
        for y in 0..height {
            for x in 0..width {
                let i = (y * width + x) * 3;
                img.data[i..i + 3].copy_from_slice(&f(x, y));
            }
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.space.channels()
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels() + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: u8) {
        let ch = self.channels();
        self.data[(y * self.width + x) * ch + c] = v;
    }

    /// Sample with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize, c: usize) -> u8 {
        let xi = x.clamp(0, self.width as isize - 1) as usize;
        let yi = y.clamp(0, self.height as isize - 1) as usize;
        self.get(xi, yi, c)
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let ch = self.channels();
        let i = (y * self.width + x) * ch;
        &self.data[i..i + ch]
    }

    /// Extract one channel as a grayscale-tagged image.
    pub fn channel(&self, c: usize) -> RasterImage {
        let ch = self.channels();
        assert!(c < ch, "channel index out of range");
        let data = self.data.iter().skip(c).step_by(ch).copied().collect();
        RasterImage {
            width: self.width,
            height: self.height,
            space: ColorSpace::Gray,
            data,
        }
    }

    pub(crate) fn require_gray(&self) -> Result<()> {
        if self.channels() != 1 {
            return Err(ImgError::MultiChannelInput(self.channels()));
        }
        Ok(())
    }

    /// Re-tag the buffer without touching samples. Channel counts must agree.
    pub fn with_space(mut self, space: ColorSpace) -> Result<Self> {
        if space.channels() != self.channels() {
            return Err(ImgError::UnsupportedConversion {
                from: self.space,
                to: space,
            });
        }
        self.space = space;
        Ok(self)
    }
}

/// One boolean per pixel; `true` marks foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(ImgError::BadBuffer {
                width,
                height,
                channels: 1,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Foreground where the gray sample is non-zero.
    pub fn from_gray(img: &RasterImage) -> Result<Self> {
        img.require_gray()?;
        Ok(Self {
            width: img.width(),
            height: img.height(),
            bits: img.data().iter().map(|&v| v != 0).collect(),
        })
    }

    /// 0/255 grayscale rendering.
    pub fn to_gray(&self) -> RasterImage {
        let data = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        RasterImage::from_vec(self.width.max(1), self.height.max(1), ColorSpace::Gray, data)
            .expect("mask dimensions are non-zero")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    pub fn union_with(&mut self, other: &BinaryMask) {
        assert_eq!(self.dims(), other.dims(), "mask dimensions differ");
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &BinaryMask) -> bool {
        self.bits.iter().zip(&other.bits).any(|(&a, &b)| a && b)
    }

    /// Axis-aligned bounds as `(x1, y1, x2, y2)`, exclusive on the far side.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    bb = Some(match bb {
                        None => (x, y, x + 1, y + 1),
                        Some((x1, y1, x2, y2)) => (x1.min(x), y1.min(y), x2.max(x + 1), y2.max(y + 1)),
                    });
                }
            }
        }
        bb
    }

    /// Sub-mask covering `[x1, x2) x [y1, y2)`.
    pub fn crop(&self, x1: usize, y1: usize, x2: usize, y2: usize) -> BinaryMask {
        BinaryMask::from_fn(x2 - x1, y2 - y1, |x, y| self.get(x1 + x, y1 + y))
    }
}
