//! Oriented FAST keypoints with rotation-steered BRIEF descriptors and
//! mutual nearest-neighbor Hamming matching.

mod brief;
mod fast;
mod matching;
mod pattern;

pub use brief::{brief_describe, orient_keypoint, PATCH_MARGIN};
pub use fast::fast_detect;
pub use matching::{consistent_pairs, match_descriptors, MatchResult, Verdict};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgproc::{box_filter, convert_color, ColorSpace, ImgError, RasterImage};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("keypoint patch extends past the image border")]
    PatchOutOfBounds,
    #[error("corrupt feature block: {0}")]
    Corrupt(&'static str),
    #[error(transparent)]
    Image(#[from] ImgError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Keypoint {
    /// Full-resolution pixel coordinates.
    pub x: f32,
    pub y: f32,
    pub score: f32,
    /// Degrees in [0, 360), counter-clockwise on screen.
    pub orientation: f32,
    pub octave: i32,
}

impl Keypoint {
    /// Integer position on the keypoint's own pyramid level.
    pub fn level_position(&self) -> (isize, isize) {
        let s = (1u32 << self.octave.max(0)) as f32;
        (
            ((self.x + 0.5) / s - 0.5).round() as isize,
            ((self.y + 0.5) / s - 0.5).round() as isize,
        )
    }
}

/// 256-bit descriptor; bit `i` lives in byte `i / 8` at position `i % 8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinaryDescriptor(pub [u8; 32]);

impl BinaryDescriptor {
    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] >> (i % 8) & 1 == 1
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    pub fn complement(&self) -> Self {
        Self(self.0.map(|b| !b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbParams {
    pub fast_threshold: u8,
    pub max_keypoints: usize,
    pub pyramid_levels: usize,
    pub patch_radius: usize,
    pub max_distance: u32,
    /// Best-to-second-best ratio bound; `None` keeps only the distance cutoff.
    pub ratio: Option<f64>,
    pub min_matches: usize,
    /// Reprojection tolerance in gallery pixels for the similarity-transform
    /// consistency check; `None` counts every surviving pair.
    pub geometric_tolerance: Option<f64>,
}

impl Default for OrbParams {
    fn default() -> Self {
        Self {
            fast_threshold: 20,
            max_keypoints: 500,
            pyramid_levels: 3,
            patch_radius: 15,
            max_distance: 64,
            ratio: Some(0.8),
            min_matches: 4,
            geometric_tolerance: Some(8.0),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureSet {
    pub keypoints: Vec<Keypoint>,
    pub descriptors: Vec<BinaryDescriptor>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }

    const RECORD: usize = 20;

    /// Little-endian dump: `u32` count, keypoint records (x, y, score,
    /// orientation as `f32`, octave as `i32`), then 32-byte descriptor rows.
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        for k in &self.keypoints {
            for v in [k.x, k.y, k.score, k.orientation] {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out.extend_from_slice(&k.octave.to_le_bytes());
        }
        for d in &self.descriptors {
            out.extend_from_slice(&d.0);
        }
    }

    /// Inverse of [`FeatureSet::write_to`]; returns the set and bytes consumed.
    pub fn read_from(buf: &[u8]) -> Result<(Self, usize), FeatureError> {
        let head: [u8; 4] = buf.get(..4).ok_or(FeatureError::Corrupt("missing count"))?.try_into().unwrap();
        let n = u32::from_le_bytes(head) as usize;
        let total = n
            .checked_mul(Self::RECORD + 32)
            .and_then(|b| b.checked_add(4))
            .ok_or(FeatureError::Corrupt("count overflow"))?;
        let body = buf.get(4..total).ok_or(FeatureError::Corrupt("truncated records"))?;
        let (recs, descs) = body.split_at(n * Self::RECORD);
        let word = |b: &[u8], i: usize| -> [u8; 4] { b[i * 4..i * 4 + 4].try_into().unwrap() };
        let keypoints = recs
            .chunks_exact(Self::RECORD)
            .map(|r| Keypoint {
                x: f32::from_le_bytes(word(r, 0)),
                y: f32::from_le_bytes(word(r, 1)),
                score: f32::from_le_bytes(word(r, 2)),
                orientation: f32::from_le_bytes(word(r, 3)),
                octave: i32::from_le_bytes(word(r, 4)),
            })
            .collect();
        let descriptors = descs.chunks_exact(32).map(|d| BinaryDescriptor(d.try_into().unwrap())).collect();
        Ok((Self { keypoints, descriptors }, total))
    }
}

/// Detect, orient and describe. Keypoints are kept far enough from the
/// border for every steered sample; later keypoints repeating an earlier
/// descriptor exactly are dropped so matching stays unambiguous.
pub fn extract_features(img: &RasterImage, params: &OrbParams) -> Result<FeatureSet, FeatureError> {
    let gray = convert_color(img, ColorSpace::Gray)?;
    let levels = fast::pyramid(&gray, params.pyramid_levels);
    let margin = PATCH_MARGIN.max(params.patch_radius);
    let kps = fast::detect_pyramid(&levels, params.fast_threshold.max(1), params.max_keypoints, margin);
    let smoothed = levels.iter().map(|l| box_filter(l, 5)).collect::<Result<Vec<_>, _>>()?;
    let mut set = FeatureSet::default();
    let mut seen = std::collections::HashSet::new();
    for kp in kps {
        let octave = kp.octave as usize;
        let Ok(oriented) = orient_keypoint(&levels[octave], &kp, params.patch_radius) else { continue };
        let Ok(desc) = brief_describe(&smoothed[octave], &oriented) else { continue };
        if seen.insert(desc) {
            set.keypoints.push(oriented);
            set.descriptors.push(desc);
        }
    }
    Ok(set)
}

/// Descriptor matching, then (with a tolerance) only the pairs agreeing on
/// one similarity transform; the verdict follows the surviving count.
pub fn match_features(a: &FeatureSet, b: &FeatureSet, params: &OrbParams) -> MatchResult {
    let m = match_descriptors(&a.descriptors, &b.descriptors, params.max_distance, params.ratio, params.min_matches);
    let Some(tol) = params.geometric_tolerance else { return m };
    let pairs = consistent_pairs(&m.pairs, &a.keypoints, &b.keypoints, tol);
    let verdict = if pairs.len() >= params.min_matches.max(1) {
        Verdict::Similar
    } else {
        Verdict::Dissimilar
    };
    MatchResult { pairs, verdict }
}

/// Surviving match count and verdict between two images.
pub fn image_feature_similarity(
    a: &RasterImage,
    b: &RasterImage,
    params: &OrbParams,
) -> Result<(usize, Verdict), FeatureError> {
    let fa = extract_features(a, params)?;
    let fb = extract_features(b, params)?;
    let m = match_features(&fa, &fb, params);
    Ok((m.pairs.len(), m.verdict))
}
