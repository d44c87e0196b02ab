//! Retrieval orchestration: indexing the museum, ranking query crops under
//! one descriptor, a weighted combination or keypoint matching, clustering
//! and index persistence.

mod index;
mod kmeans;
mod query;
mod ranking;

pub use index::{build_index, build_index_from_images, load_index, save_index, BuildOptions, FORMAT_VERSION};
pub use kmeans::{kmeans, kmeans_cluster, ClusterAssignment, KMeansResult};
pub use query::{query, OcrSource, QueryConfig, QueryOutcome};
pub use ranking::{combine_rankings, rank_by_descriptor, rank_by_features, rank_by_text, CropQuery, Ranking};

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::descriptors::{
    block_histogram, dct_descriptor, hist_3d, hist_gray_1d, hog_descriptor, lbp_descriptor, multires_histogram,
    texture_input, DescriptorError, DescriptorVector, HistSpec, HogParams,
};
use crate::features::{FeatureError, FeatureSet, OrbParams};
use crate::imgproc::{convert_color, BinaryMask, ColorSpace, ImgError, RasterImage};
use crate::metrics::{Label, MeasureKind};
use crate::preprocess::PreprocessError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no descriptor has a positive weight")]
    NoActiveDescriptor,
    #[error("invalid weights: {0}")]
    BadWeights(String),
    #[error("{images} images cannot fill {clusters} clusters")]
    FewerImagesThanClusters { images: usize, clusters: usize },
    #[error("catalog mismatch: {0}")]
    CatalogMismatch(String),
    #[error("cannot read image {path}: {reason}")]
    UnreadableImage { path: PathBuf, reason: String },
    #[error("corrupt index: {0}")]
    CorruptIndex(String),
    #[error("index format version {found} is not the supported version {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("index was built with different descriptor parameters")]
    FingerprintMismatch,
    #[error("index entries carry no {0} descriptor")]
    MissingDescriptor(DescriptorKind),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Image(#[from] ImgError),
}

pub type Result<T> = std::result::Result<T, EngineError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorKind {
    Color,
    Texture,
    Text,
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DescriptorKind::Color => "color",
            DescriptorKind::Texture => "texture",
            DescriptorKind::Text => "text",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Color,
    Texture,
    Text,
    Combined,
    Feature,
}

impl FromStr for QueryMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "color" => Ok(QueryMode::Color),
            "texture" => Ok(QueryMode::Texture),
            "text" => Ok(QueryMode::Text),
            "combined" => Ok(QueryMode::Combined),
            "feature" | "features" => Ok(QueryMode::Feature),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Color descriptor recipe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ColorDescriptor {
    Global { spec: HistSpec },
    Block { grid: usize, spec: HistSpec },
    Multires { levels: Vec<usize>, spec: HistSpec },
}

impl Default for ColorDescriptor {
    fn default() -> Self {
        ColorDescriptor::Block {
            grid: 16,
            spec: HistSpec::Joint {
                space: ColorSpace::Rgb,
                bins: 4,
            },
        }
    }
}

/// Texture descriptor recipe; every variant runs on the fixed-size gray
/// texture input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TextureDescriptor {
    Hog { params: HogParams },
    Lbp { grid: usize },
    Dct { keep: usize },
}

impl Default for TextureDescriptor {
    fn default() -> Self {
        TextureDescriptor::Hog {
            params: HogParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorConfig {
    pub color: ColorDescriptor,
    pub color_measure: MeasureKind,
    pub texture: TextureDescriptor,
    pub texture_measure: MeasureKind,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self {
            color: ColorDescriptor::default(),
            color_measure: MeasureKind::Hellinger,
            texture: TextureDescriptor::default(),
            texture_measure: MeasureKind::Hellinger,
        }
    }
}

impl DescriptorConfig {
    pub fn measure(&self, kind: DescriptorKind) -> MeasureKind {
        match kind {
            DescriptorKind::Texture => self.texture_measure,
            _ => self.color_measure,
        }
    }
}

/// Everything that shapes the stored index content.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexConfig {
    pub descriptors: DescriptorConfig,
    pub features: OrbParams,
}

#[derive(Serialize)]
struct FingerprintInput<'a> {
    descriptors: &'a DescriptorConfig,
    fast_threshold: u8,
    max_keypoints: usize,
    pyramid_levels: usize,
    patch_radius: usize,
}

impl IndexConfig {
    /// SHA-256 over the extraction parameters. Matching-only parameters
    /// (distance cap, ratio, minimum matches, geometric tolerance) are excluded.
    pub fn fingerprint(&self) -> [u8; 32] {
        let input = FingerprintInput {
            descriptors: &self.descriptors,
            fast_threshold: self.features.fast_threshold,
            max_keypoints: self.features.max_keypoints,
            pyramid_levels: self.features.pyramid_levels,
            patch_radius: self.features.patch_radius,
        };
        let json = serde_json::to_vec(&input).expect("config serializes");
        Sha256::digest(&json).into()
    }
}

/// Non-negative per-kind weights; normalized to unit sum when used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorWeights {
    pub color: f64,
    pub texture: f64,
    pub text: f64,
}

impl Default for DescriptorWeights {
    fn default() -> Self {
        Self {
            color: 0.3,
            texture: 0.5,
            text: 0.2,
        }
    }
}

impl DescriptorWeights {
    pub fn only(kind: DescriptorKind) -> Self {
        let mut w = Self {
            color: 0.0,
            texture: 0.0,
            text: 0.0,
        };
        *w.get_mut(kind) = 1.0;
        w
    }

    pub fn get(&self, kind: DescriptorKind) -> f64 {
        match kind {
            DescriptorKind::Color => self.color,
            DescriptorKind::Texture => self.texture,
            DescriptorKind::Text => self.text,
        }
    }

    fn get_mut(&mut self, kind: DescriptorKind) -> &mut f64 {
        match kind {
            DescriptorKind::Color => &mut self.color,
            DescriptorKind::Texture => &mut self.texture,
            DescriptorKind::Text => &mut self.text,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.color, self.texture, self.text];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(EngineError::BadWeights("weights must be finite and non-negative".into()));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(EngineError::NoActiveDescriptor);
        }
        Ok(())
    }

    /// Active kinds with their unit-sum weights.
    pub fn normalized(&self) -> Result<Vec<(DescriptorKind, f64)>> {
        self.validate()?;
        let sum = self.color + self.texture + self.text;
        Ok([DescriptorKind::Color, DescriptorKind::Texture, DescriptorKind::Text]
            .into_iter()
            .filter(|&k| self.get(k) > 0.0)
            .map(|k| (k, self.get(k) / sum))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalleryEntry {
    pub label: Label,
    pub author: String,
    pub title: String,
    /// Mean gray level over the whole image, used for brightness clustering.
    pub mean_luma: f64,
    pub descriptors: BTreeMap<DescriptorKind, DescriptorVector>,
    pub features: FeatureSet,
}

/// Immutable museum index. Entries are sorted by label.
#[derive(Clone, Debug, PartialEq)]
pub struct MuseumIndex {
    pub(crate) entries: Vec<GalleryEntry>,
    pub(crate) config: IndexConfig,
    pub(crate) fingerprint: [u8; 32],
}

impl MuseumIndex {
    pub fn entries(&self) -> &[GalleryEntry] {
        &self.entries
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn catalog(&self) -> crate::descriptors::AuthorCatalog {
        let entries = self
            .entries
            .iter()
            .map(|e| crate::descriptors::CatalogEntry {
                label: e.label,
                author: e.author.clone(),
                title: e.title.clone(),
            })
            .collect();
        crate::descriptors::AuthorCatalog::new(entries).expect("index labels are unique")
    }
}

pub fn mean_luma(img: &RasterImage) -> Result<f64> {
    let gray = convert_color(img, ColorSpace::Gray)?;
    let sum: u64 = gray.data().iter().map(|&v| v as u64).sum();
    Ok(sum as f64 / gray.data().len() as f64)
}

/// Color and texture descriptors of `img`, restricted to `mask` when given.
pub fn describe(
    img: &RasterImage,
    mask: Option<&BinaryMask>,
    cfg: &DescriptorConfig,
) -> Result<BTreeMap<DescriptorKind, DescriptorVector>> {
    let color = match &cfg.color {
        ColorDescriptor::Global { spec } => match *spec {
            HistSpec::Gray { bins } => hist_gray_1d(img, bins, mask)?,
            HistSpec::Joint { space, bins } => hist_3d(img, space, bins, mask)?,
        },
        ColorDescriptor::Block { grid, spec } => block_histogram(img, *grid, *spec, mask)?,
        ColorDescriptor::Multires { levels, spec } => multires_histogram(img, levels, *spec, mask)?,
    };
    let input = texture_input(img, mask)?;
    let texture = match cfg.texture {
        TextureDescriptor::Hog { params } => hog_descriptor(&input, params)?,
        TextureDescriptor::Lbp { grid } => lbp_descriptor(&input, grid)?,
        TextureDescriptor::Dct { keep } => dct_descriptor(&input, keep)?,
    };
    let mut out = BTreeMap::new();
    out.insert(DescriptorKind::Color, color);
    out.insert(DescriptorKind::Texture, texture);
    Ok(out)
}
