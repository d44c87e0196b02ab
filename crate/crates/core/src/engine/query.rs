use serde::{Deserialize, Serialize};

use super::{
    combine_rankings, describe, rank_by_descriptor, rank_by_features, rank_by_text, CropQuery, DescriptorKind,
    DescriptorWeights, MuseumIndex, QueryMode, Ranking, Result,
};
use crate::descriptors::{match_author, read_text_descriptor, OcrPort, SidecarOcr};
use crate::features::{extract_features, FeatureSet, OrbParams};
use crate::imgproc::{BinaryMask, RasterImage};
use crate::metrics::{BBox, Label};
use crate::preprocess::{boxes_in_original, mask_in_original, preprocess_pipeline, PaintingCrop, PreprocessConfig, PreprocessReport};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QueryConfig {
    pub preprocess: PreprocessConfig,
    pub weights: DescriptorWeights,
    /// Matching thresholds; extraction always follows the index.
    pub matching: OrbParams,
}

/// Where crop text comes from.
#[derive(Clone, Copy)]
pub enum OcrSource<'a> {
    None,
    /// One recognizer for every crop.
    Shared(&'a dyn OcrPort),
    /// Sidecar transcript, one line per painting left to right.
    Sidecar(&'a SidecarOcr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryOutcome {
    /// One ranking per detected painting, left to right.
    pub rankings: Vec<Ranking>,
    pub report: PreprocessReport,
    /// Detected painting pixels in the query's own frame.
    pub mask: BinaryMask,
    /// Detected text boxes in the query's own frame, one slot per painting.
    pub text_boxes: Vec<Option<BBox>>,
}

impl QueryOutcome {
    pub fn labels(&self) -> Vec<Vec<Label>> {
        self.rankings.iter().map(|r| r.iter().map(|x| x.0).collect()).collect()
    }
}

/// Painting pixels of a crop with the text box cut out.
fn descriptor_mask(crop: &PaintingCrop) -> BinaryMask {
    let mut m = crop.mask.clone();
    if let Some(b) = crop.text_box {
        for y in b.y1.max(0)..b.y2.min(m.height() as i64) {
            for x in b.x1.max(0)..b.x2.min(m.width() as i64) {
                m.set(x as usize, y as usize, false);
            }
        }
    }
    m
}

/// Keypoints on painting pixels outside the text box.
fn crop_features(crop: &PaintingCrop, mask: &BinaryMask, params: &OrbParams) -> Result<FeatureSet> {
    let all = extract_features(&crop.image, params)?;
    let mut out = FeatureSet::default();
    for (kp, d) in all.keypoints.into_iter().zip(all.descriptors) {
        let (x, y) = (kp.x.round().max(0.0) as usize, kp.y.round().max(0.0) as usize);
        if x < mask.width() && y < mask.height() && mask.get(x, y) {
            out.keypoints.push(kp);
            out.descriptors.push(d);
        }
    }
    Ok(out)
}

fn crop_text(crop: &PaintingCrop, i: usize, ocr: &OcrSource<'_>) -> Result<Option<String>> {
    let Some(img) = crop.text_box_image() else { return Ok(None) };
    let text = match ocr {
        OcrSource::None => return Ok(None),
        OcrSource::Shared(p) => read_text_descriptor(&img, *p)?,
        OcrSource::Sidecar(s) => read_text_descriptor(&img, &s.painting(i))?,
    };
    Ok(Some(text))
}

fn rank_crop(
    index: &MuseumIndex,
    crop: &PaintingCrop,
    i: usize,
    mode: QueryMode,
    cfg: &QueryConfig,
    ocr: &OcrSource<'_>,
) -> Result<Ranking> {
    let mask = descriptor_mask(crop);
    let dcfg = &index.config.descriptors;
    let wants_text = match mode {
        QueryMode::Text => true,
        QueryMode::Combined => cfg.weights.text > 0.0,
        _ => false,
    };
    let author = if wants_text {
        crop_text(crop, i, ocr)?.map(|t| match_author(&t, &index.catalog()))
    } else {
        None
    };
    match mode {
        QueryMode::Color | QueryMode::Texture => {
            let kind = if mode == QueryMode::Color {
                DescriptorKind::Color
            } else {
                DescriptorKind::Texture
            };
            let d = describe(&crop.image, Some(&mask), dcfg)?;
            rank_by_descriptor(index, &d[&kind], kind, dcfg.measure(kind))
        }
        QueryMode::Text => Ok(rank_by_text(index, author.as_ref())),
        QueryMode::Combined => {
            let q = CropQuery {
                descriptors: describe(&crop.image, Some(&mask), dcfg)?,
                author,
                features: FeatureSet::default(),
            };
            combine_rankings(index, &q, &cfg.weights, |k| dcfg.measure(k))
        }
        QueryMode::Feature => {
            let fs = crop_features(crop, &mask, &index.config.features)?;
            Ok(rank_by_features(index, &fs, &cfg.matching))
        }
    }
}

/// Preprocess `image`, then rank every detected painting under `mode`,
/// keeping the best `k` labels. The unknown sentinel is never padded.
pub fn query(
    index: &MuseumIndex,
    image: &RasterImage,
    k: usize,
    mode: QueryMode,
    cfg: &QueryConfig,
    ocr: &OcrSource<'_>,
) -> Result<QueryOutcome> {
    let (crops, report) = preprocess_pipeline(image, &cfg.preprocess)?;
    let mut rankings = Vec::with_capacity(crops.len());
    for (i, crop) in crops.iter().enumerate() {
        let mut r = rank_crop(index, crop, i, mode, cfg, ocr)?;
        r.truncate(k);
        rankings.push(r);
    }
    Ok(QueryOutcome {
        rankings,
        mask: mask_in_original(&crops, &report),
        text_boxes: boxes_in_original(&report),
        report,
    })
}
