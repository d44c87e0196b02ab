use serde::{Deserialize, Serialize};

use super::{tile_span, DescriptorError, DescriptorVector, Layout, Result};
use crate::imgproc::{convert_color, BinaryMask, ColorSpace, RasterImage};

/// Per-region histogram recipe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HistSpec {
    /// Gray levels into `bins` uniform buckets, `bins` in [2, 256].
    Gray { bins: usize },
    /// Joint three-channel histogram in `space`, `bins` in [2, 32] per channel.
    Joint { space: ColorSpace, bins: usize },
}

impl HistSpec {
    pub fn len(&self) -> usize {
        match *self {
            HistSpec::Gray { bins } => bins,
            HistSpec::Joint { bins, .. } => bins * bins * bins,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        match *self {
            HistSpec::Gray { bins } if !(2..=256).contains(&bins) => Err(DescriptorError::BadBinCount(bins)),
            HistSpec::Joint { bins, .. } if !(2..=32).contains(&bins) => Err(DescriptorError::BadBinCount(bins)),
            HistSpec::Joint { space, .. } if space.channels() != 3 => Err(DescriptorError::GrayInput),
            _ => Ok(()),
        }
    }

    /// Convert `img` into the space the histogram counts in.
    fn prepare(&self, img: &RasterImage) -> Result<RasterImage> {
        match *self {
            HistSpec::Gray { .. } => Ok(convert_color(img, ColorSpace::Gray)?),
            HistSpec::Joint { space, .. } => {
                if img.channels() != 3 {
                    return Err(DescriptorError::GrayInput);
                }
                Ok(convert_color(img, space)?)
            }
        }
    }
}

#[inline]
fn bucket(v: u8, bins: usize) -> usize {
    (v as usize * bins) >> 8
}

fn check_mask(img: &RasterImage, mask: Option<&BinaryMask>) -> Result<()> {
    if let Some(m) = mask {
        if m.dims() != img.dims() {
            return Err(DescriptorError::MaskMismatch(m.width(), m.height(), img.width(), img.height()));
        }
    }
    Ok(())
}

/// Count an already-converted region and L1-normalize it into `out`.
fn region_hist(
    img: &RasterImage,
    spec: HistSpec,
    mask: Option<&BinaryMask>,
    (x1, y1, x2, y2): (usize, usize, usize, usize),
    out: &mut [f64],
) {
    let mut total = 0usize;
    for y in y1..y2 {
        for x in x1..x2 {
            if mask.is_some_and(|m| !m.get(x, y)) {
                continue;
            }
            let idx = match spec {
                HistSpec::Gray { bins } => bucket(img.get(x, y, 0), bins),
                HistSpec::Joint { bins, .. } => {
                    let p = img.pixel(x, y);
                    (bucket(p[0], bins) * bins + bucket(p[1], bins)) * bins + bucket(p[2], bins)
                }
            };
            out[idx] += 1.0;
            total += 1;
        }
    }
    if total > 0 {
        let t = total as f64;
        out.iter_mut().for_each(|v| *v /= t);
    }
}

fn tiled(img: &RasterImage, grid: usize, spec: HistSpec, mask: Option<&BinaryMask>, out: &mut Vec<f64>) -> Result<()> {
    if grid == 0 {
        return Err(DescriptorError::BadGrid);
    }
    if img.width() < grid || img.height() < grid {
        return Err(DescriptorError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            grid,
        });
    }
    let n = spec.len();
    for ty in 0..grid {
        let (y1, y2) = tile_span(img.height(), grid, ty);
        for tx in 0..grid {
            let (x1, x2) = tile_span(img.width(), grid, tx);
            let start = out.len();
            out.resize(start + n, 0.0);
            region_hist(img, spec, mask, (x1, y1, x2, y2), &mut out[start..]);
        }
    }
    Ok(())
}

/// Gray-level histogram over unmasked pixels, L1-normalized.
pub fn hist_gray_1d(img: &RasterImage, bins: usize, mask: Option<&BinaryMask>) -> Result<DescriptorVector> {
    let spec = HistSpec::Gray { bins };
    spec.validate()?;
    check_mask(img, mask)?;
    let g = spec.prepare(img)?;
    let mut out = vec![0.0; bins];
    region_hist(&g, spec, mask, (0, 0, g.width(), g.height()), &mut out);
    DescriptorVector::new(out, Layout::Histogram { spec })
}

/// Joint histogram in `space`, flattened with the first channel most
/// significant.
pub fn hist_3d(
    img: &RasterImage,
    space: ColorSpace,
    bins: usize,
    mask: Option<&BinaryMask>,
) -> Result<DescriptorVector> {
    if img.channels() != 3 || space.channels() != 3 {
        return Err(DescriptorError::GrayInput);
    }
    let spec = HistSpec::Joint { space, bins };
    spec.validate()?;
    check_mask(img, mask)?;
    let c = spec.prepare(img)?;
    let mut out = vec![0.0; spec.len()];
    region_hist(&c, spec, mask, (0, 0, c.width(), c.height()), &mut out);
    DescriptorVector::new(out, Layout::Histogram { spec })
}

/// `grid`×`grid` tile histograms, each normalized, in row-major tile order.
pub fn block_histogram(
    img: &RasterImage,
    grid: usize,
    spec: HistSpec,
    mask: Option<&BinaryMask>,
) -> Result<DescriptorVector> {
    spec.validate()?;
    check_mask(img, mask)?;
    let c = spec.prepare(img)?;
    let mut out = Vec::with_capacity(grid * grid * spec.len());
    tiled(&c, grid, spec, mask, &mut out)?;
    DescriptorVector::new(out, Layout::Block { grid, spec })
}

/// Concatenated block histograms, one per grid in `levels`.
pub fn multires_histogram(
    img: &RasterImage,
    levels: &[usize],
    spec: HistSpec,
    mask: Option<&BinaryMask>,
) -> Result<DescriptorVector> {
    if levels.is_empty() {
        return Err(DescriptorError::BadGrid);
    }
    spec.validate()?;
    check_mask(img, mask)?;
    let c = spec.prepare(img)?;
    let mut out = Vec::new();
    for &grid in levels {
        tiled(&c, grid, spec, mask, &mut out)?;
    }
    DescriptorVector::new(
        out,
        Layout::Multires {
            levels: levels.to_vec(),
            spec,
        },
    )
}
