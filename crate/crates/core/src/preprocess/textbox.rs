use serde::{Deserialize, Serialize};

use super::{PaintingCrop, PreprocessError, Result};
use crate::descriptors::otsu_from_histogram;
use crate::imgproc::{
    convert_color, find_contours, morphology, morphology_mask, BinaryMask, ColorSpace, MorphKind, RasterImage,
    StructuringElement,
};
use crate::metrics::BBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabChannel {
    L,
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hat {
    TopHat,
    BlackHat,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TextBoxCandidate {
    pub bbox: BBox,
    pub channel: LabChannel,
    pub hat: Hat,
    /// Weighted geometric deviation; lower is better.
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TextboxParams {
    /// Hat element side as a fraction of the shorter crop side.
    pub hat_fraction: f64,
    /// Width of the horizontal bridging element as a fraction of crop width.
    pub bridge_fraction: f64,
    /// Indicator weights in order: center x, height band, symmetry, edge
    /// placement, aspect ratio.
    pub weights: [f64; 5],
    /// Candidates scoring at or above this are rejected.
    pub ceiling: f64,
    /// Candidates smaller than this fraction of the crop area are ignored.
    pub min_area_fraction: f64,
}

impl Default for TextboxParams {
    fn default() -> Self {
        Self {
            hat_fraction: 0.25,
            bridge_fraction: 0.06,
            weights: [1.0; 5],
            ceiling: 0.5,
            min_area_fraction: 0.005,
        }
    }
}

/// The five normalized geometric indicators for `bbox` inside a
/// `width`×`height` image, each zero at the ideal placement.
pub fn candidate_indicators(bbox: &BBox, (width, height): (usize, usize)) -> [f64; 5] {
    let (w, h) = (width as f64, height as f64);
    let (x1, x2) = (bbox.x1 as f64, bbox.x2 as f64);
    let (cx, cy) = bbox.center();
    let aspect = bbox.width() as f64 / bbox.height() as f64;
    [
        (cx - w / 2.0).abs() / w,
        (cy - h / 5.0).abs().min((cy - 4.0 * h / 5.0).abs()) / h,
        ((w / 2.0 - x1) - (x2 - w / 2.0)).abs() / w,
        ((x1 - w / 6.0).abs() + (x2 - 5.0 * w / 6.0).abs()) / w,
        (aspect - 4.0).abs() / 4.0,
    ]
}

/// Weighted sum of [`candidate_indicators`].
pub fn score_candidate(bbox: &BBox, dims: (usize, usize), weights: &[f64; 5]) -> f64 {
    candidate_indicators(bbox, dims).iter().zip(weights).map(|(i, w)| i * w).sum()
}

/// Otsu level of the hat response, then the Otsu level of its upper class,
/// so a strip brighter than an adjoining highlighted region separates.
fn hat_thresholds(response: &RasterImage) -> Vec<u8> {
    let mut hist = [0u64; 256];
    for &v in response.data() {
        hist[v as usize] += 1;
    }
    let Some(t1) = otsu_from_histogram(&hist) else { return Vec::new() };
    let mut upper = [0u64; 256];
    upper[t1 as usize + 1..].copy_from_slice(&hist[t1 as usize + 1..]);
    let mut out = vec![t1];
    out.extend(otsu_from_histogram(&upper));
    out
}

/// Longest run of indices whose coverage reaches `DENSE_FRACTION` of the span.
fn dense_run(coverage: impl Iterator<Item = usize>, span: usize) -> Option<(usize, usize)> {
    let need = (span as f64 * DENSE_FRACTION).ceil() as usize;
    let (mut best, mut start) = (None::<(usize, usize)>, None);
    for (i, c) in coverage.chain(std::iter::once(0)).enumerate() {
        match (c >= need && c > 0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if best.is_none_or(|(a, b)| i - s > b - a) {
                    best = Some((s, i));
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

const DENSE_FRACTION: f64 = 0.6;

/// `b` shrunk to its densest band of rows, then to that band's densest
/// columns; `None` when nothing changes or nothing is dense.
fn densest_core(fg: &BinaryMask, b: BBox) -> Option<BBox> {
    let (x1, y1, x2, y2) = (b.x1 as usize, b.y1 as usize, b.x2 as usize, b.y2 as usize);
    let rows = (y1..y2).map(|y| (x1..x2).filter(|&x| fg.get(x, y)).count());
    let (r0, r1) = dense_run(rows, x2 - x1)?;
    let (ry1, ry2) = (y1 + r0, y1 + r1);
    let cols = (x1..x2).map(|x| (ry1..ry2).filter(|&y| fg.get(x, y)).count());
    let (c0, c1) = dense_run(cols, ry2 - ry1)?;
    let core = BBox::new((x1 + c0) as i64, ry1 as i64, (x1 + c1) as i64, ry2 as i64).ok()?;
    (core != b).then_some(core)
}

const GROW_TOLERANCE: i32 = 16;
const GROW_FRACTION: f64 = 0.7;

/// `b` extended side by side while the next outer row or column mostly
/// matches the median tone of the ring just outside `b`, so a box around
/// lettering recovers its surrounding strip. `None` when nothing grows.
fn grow_to_strip(channel: &RasterImage, b: BBox) -> Option<BBox> {
    let (w, h) = (channel.width() as i64, channel.height() as i64);
    let mut ring = Vec::new();
    for y in (b.y1 - 2).max(0)..(b.y2 + 2).min(h) {
        for x in (b.x1 - 2).max(0)..(b.x2 + 2).min(w) {
            if x < b.x1 || x >= b.x2 || y < b.y1 || y >= b.y2 {
                ring.push(channel.get(x as usize, y as usize, 0));
            }
        }
    }
    if ring.is_empty() {
        return None;
    }
    ring.sort_unstable();
    let tone = ring[ring.len() / 2] as i32;
    let matches = |xs: std::ops::Range<i64>, ys: std::ops::Range<i64>| {
        let n = (xs.end - xs.start) * (ys.end - ys.start);
        let hits = ys
            .flat_map(|y| xs.clone().map(move |x| (x, y)))
            .filter(|&(x, y)| (channel.get(x as usize, y as usize, 0) as i32 - tone).abs() <= GROW_TOLERANCE)
            .count();
        n > 0 && hits as f64 >= GROW_FRACTION * n as f64
    };
    let mut g = b;
    loop {
        let mut grew = false;
        if g.y1 > 0 && matches(g.x1..g.x2, g.y1 - 1..g.y1) {
            g.y1 -= 1;
            grew = true;
        }
        if g.y2 < h && matches(g.x1..g.x2, g.y2..g.y2 + 1) {
            g.y2 += 1;
            grew = true;
        }
        if g.x1 > 0 && matches(g.x1 - 1..g.x1, g.y1..g.y2) {
            g.x1 -= 1;
            grew = true;
        }
        if g.x2 < w && matches(g.x2..g.x2 + 1, g.y1..g.y2) {
            g.x2 += 1;
            grew = true;
        }
        if !grew {
            break;
        }
    }
    (g != b).then_some(g)
}

/// Highlight, binarize, bridge and box text-like structures in one channel.
/// Candidates come from a coarse and a fine binarization; each blob also
/// offers its densest rectangular core and both grown to a uniform strip.
pub fn detect_textbox_channel(
    channel: &RasterImage,
    hat: Hat,
    params: &TextboxParams,
) -> Result<Vec<(BBox, f64)>> {
    let (w, h) = channel.dims();
    let side = (((w.min(h) as f64) * params.hat_fraction) as usize).max(3) | 1;
    let se = StructuringElement::rect(side, side)?;
    let kind = match hat {
        Hat::TopHat => MorphKind::TopHat,
        Hat::BlackHat => MorphKind::BlackHat,
    };
    let response = morphology(kind, channel, &se)?;
    let bw = (((w as f64) * params.bridge_fraction) as usize).max(3) | 1;
    let bridge = StructuringElement::rect(bw, 3)?;
    let min_area = params.min_area_fraction * (w * h) as f64;
    let mut out = Vec::new();
    for t in hat_thresholds(&response) {
        let fg = BinaryMask::from_fn(w, h, |x, y| response.get(x, y, 0) > t);
        let bridged = morphology_mask(MorphKind::Close, &fg, &bridge)?;
        for c in find_contours(&bridged) {
            let (x1, y1, x2, y2) = c.bounding_box();
            let Ok(b) = BBox::new(x1 as i64, y1 as i64, x2 as i64, y2 as i64) else { continue };
            let core = densest_core(&bridged, b);
            let grown = [Some(b), core].into_iter().flatten().filter_map(|c| grow_to_strip(channel, c));
            let all: Vec<BBox> = [Some(b), core].into_iter().flatten().chain(grown).collect();
            for b in all {
                if (b.area() as f64) < min_area || out.iter().any(|(o, _)| *o == b) {
                    continue;
                }
                out.push((b, score_candidate(&b, (w, h), &params.weights)));
            }
        }
    }
    Ok(out)
}

/// Best candidate over the L, A and B channels with both hats, if any
/// scores below the ceiling.
pub fn detect_textbox(img: &RasterImage, params: &TextboxParams) -> Result<Option<TextBoxCandidate>> {
    if img.channels() != 3 {
        return Err(PreprocessError::ColorRequired);
    }
    let lab = convert_color(img, ColorSpace::Lab)?;
    let mut best: Option<TextBoxCandidate> = None;
    for (ci, channel) in [LabChannel::L, LabChannel::A, LabChannel::B].into_iter().enumerate() {
        let plane = lab.channel(ci);
        for hat in [Hat::TopHat, Hat::BlackHat] {
            for (bbox, score) in detect_textbox_channel(&plane, hat, params)? {
                if score < params.ceiling && best.is_none_or(|b| score < b.score) {
                    best = Some(TextBoxCandidate {
                        bbox,
                        channel,
                        hat,
                        score,
                    });
                }
            }
        }
    }
    Ok(best)
}

/// Exclude `bbox` (crop coordinates) from the crop mask.
pub fn erase_textbox(mut crop: PaintingCrop, bbox: BBox) -> Result<PaintingCrop> {
    let (w, h) = crop.mask.dims();
    if bbox.x1 < 0 || bbox.y1 < 0 || bbox.x2 > w as i64 || bbox.y2 > h as i64 {
        return Err(PreprocessError::BoxOutsideCrop(bbox));
    }
    for y in bbox.y1 as usize..bbox.y2 as usize {
        for x in bbox.x1 as usize..bbox.x2 as usize {
            crop.mask.set(x, y, false);
        }
    }
    crop.text_box = Some(bbox);
    Ok(crop)
}
