use serde::{Deserialize, Serialize};

use super::{PaintingCrop, PreprocessError, Result};
use crate::imgproc::{
    canny, convert_color, crop, fill_contours, find_contours, morphology_mask, BinaryMask, ColorSpace, MorphKind,
    RasterImage, StructuringElement,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundParams {
    pub canny_low: f32,
    pub canny_high: f32,
    /// Side of the square closing element, odd.
    pub close_size: usize,
    /// Components below this fraction of the image area are discarded.
    pub min_area_fraction: f64,
    pub max_paintings: usize,
    /// A region whose box comes within this fraction of every border is
    /// taken to be the whole frame.
    pub full_frame_margin: f64,
    /// Edges closer than this many pixels to invalid (fill) pixels are ignored.
    pub invalid_guard: usize,
}

impl Default for BackgroundParams {
    fn default() -> Self {
        Self {
            canny_low: 40.0,
            canny_high: 120.0,
            close_size: 15,
            min_area_fraction: 0.02,
            max_paintings: 3,
            full_frame_margin: 0.08,
            invalid_guard: 4,
        }
    }
}

/// Split a scene into painting crops ordered left to right.
pub fn remove_background(img: &RasterImage, params: &BackgroundParams) -> Result<Vec<PaintingCrop>> {
    remove_background_masked(img, None, params)
}

/// [`remove_background`] restricted to the pixels set in `valid`, so fill
/// borders left by a rotation do not register as edges.
pub fn remove_background_masked(
    img: &RasterImage,
    valid: Option<&BinaryMask>,
    params: &BackgroundParams,
) -> Result<Vec<PaintingCrop>> {
    let regions = painting_regions(img, valid, params)?;
    let mut crops: Vec<PaintingCrop> = regions
        .into_iter()
        .map(|r| {
            let (x1, y1, x2, y2) = r.bounding_box().expect("accepted regions are non-empty");
            Ok(PaintingCrop {
                image: crop(img, x1, y1, x2, y2)?,
                mask: r.crop(x1, y1, x2, y2),
                origin: (x1, y1),
                rotation_applied: 0.0,
                text_box: None,
            })
        })
        .collect::<Result<_>>()?;
    crops.sort_by_key(|c| (c.origin.0, c.origin.1));
    Ok(crops)
}

/// Full-image masks of the accepted, mutually disjoint painting regions.
pub(crate) fn painting_regions(
    img: &RasterImage,
    valid: Option<&BinaryMask>,
    params: &BackgroundParams,
) -> Result<Vec<BinaryMask>> {
    let gray = convert_color(img, ColorSpace::Gray)?;
    let (w, h) = gray.dims();
    let mut edges = canny(&gray, params.canny_low, params.canny_high)?;
    if let Some(v) = valid {
        if params.invalid_guard > 0 {
            let se = StructuringElement::rect(2 * params.invalid_guard + 1, 2 * params.invalid_guard + 1)?;
            let core = morphology_mask(MorphKind::Erode, v, &se)?;
            edges = BinaryMask::from_fn(w, h, |x, y| edges.get(x, y) && core.get(x, y));
        }
    }
    let size = params.close_size | 1;
    let closed = morphology_mask(MorphKind::Close, &edges, &StructuringElement::rect(size, size)?)?;
    let min_area = (params.min_area_fraction * (w * h) as f64).ceil() as usize;
    let mut accepted: Vec<BinaryMask> = Vec::new();
    let mut covered = BinaryMask::new(w, h);
    for contour in find_contours(&closed) {
        if accepted.len() >= params.max_paintings {
            break;
        }
        let (x1, y1, x2, y2) = contour.bounding_box();
        if ((x2 - x1) as usize) * ((y2 - y1) as usize) < min_area {
            continue;
        }
        let mut region = fill_contours(std::slice::from_ref(&contour), w, h)?;
        if let Some(v) = valid {
            region = BinaryMask::from_fn(w, h, |x, y| region.get(x, y) && v.get(x, y));
        }
        if region.count() < min_area || region.intersects(&covered) {
            continue;
        }
        covered.union_with(&region);
        accepted.push(region);
    }
    if accepted.is_empty() {
        return Err(PreprocessError::NoPaintingFound);
    }
    if let Some((x1, y1, x2, y2)) = accepted[0].bounding_box() {
        let (mx, my) = (params.full_frame_margin * w as f64, params.full_frame_margin * h as f64);
        let near = x1 as f64 <= mx && y1 as f64 <= my && (w - x2) as f64 <= mx && (h - y2) as f64 <= my;
        if near {
            let full = valid.cloned().unwrap_or_else(|| BinaryMask::full(w, h));
            return Ok(vec![full]);
        }
    }
    Ok(accepted)
}
