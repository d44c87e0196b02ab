use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use gallerist::engine::{describe, DescriptorConfig, DescriptorWeights, IndexConfig, QueryConfig};
use gallerist::features::OrbParams;
use gallerist::imgproc::{ColorSpace, RasterImage};
use gallerist::preprocess::PreprocessConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KMeansConfig {
    /// Brightness sets in the first stage.
    pub k_bright: usize,
    /// Texture clusters per brightness set.
    pub k_texture: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { k_bright: 2, k_texture: 5 }
    }
}

/// Default locations; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub museum: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub index: Option<PathBuf>,
}

/// Every tunable of a run in one TOML file. Missing keys take defaults,
/// unknown keys are rejected, ranges are checked at load.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub descriptors: DescriptorConfig,
    pub features: OrbParams,
    pub preprocess: PreprocessConfig,
    pub weights: DescriptorWeights,
    pub kmeans: KMeansConfig,
    pub paths: PathsConfig,
}

fn unit_open(name: &str, v: f64) -> Result<()> {
    ensure!(v > 0.0 && v < 1.0, "{name} must lie in (0, 1), got {v}");
    Ok(())
}

fn unit_closed(name: &str, v: f64) -> Result<()> {
    ensure!(v > 0.0 && v <= 1.0, "{name} must lie in (0, 1], got {v}");
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure!(v.is_finite() && v > 0.0, "{name} must be positive, got {v}");
    Ok(())
}

fn odd(name: &str, v: usize) -> Result<()> {
    ensure!(v % 2 == 1, "{name} must be odd, got {v}");
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("invalid configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// The file at `path`, or defaults when no path is given.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn index_config(&self) -> IndexConfig {
        IndexConfig {
            descriptors: self.descriptors.clone(),
            features: self.features,
        }
    }

    pub fn query_config(&self) -> QueryConfig {
        QueryConfig {
            preprocess: self.preprocess,
            weights: self.weights,
            matching: self.features,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.features;
        ensure!(f.fast_threshold >= 1, "features.fast_threshold must be at least 1");
        ensure!(f.max_keypoints >= 1, "features.max_keypoints must be at least 1");
        ensure!((1..=8).contains(&f.pyramid_levels), "features.pyramid_levels must lie in 1..=8");
        ensure!((1..=31).contains(&f.patch_radius), "features.patch_radius must lie in 1..=31");
        ensure!(f.max_distance <= 256, "features.max_distance cannot exceed 256 bits");
        ensure!(f.min_matches >= 1, "features.min_matches must be at least 1");
        if let Some(r) = f.ratio {
            unit_closed("features.ratio", r)?;
        }
        if let Some(t) = f.geometric_tolerance {
            positive("features.geometric_tolerance", t)?;
        }

        let p = &self.preprocess;
        positive("preprocess.psnr_threshold", p.psnr_threshold)?;
        let b = &p.background;
        ensure!(
            b.canny_low >= 0.0 && b.canny_low <= b.canny_high,
            "preprocess.background needs 0 <= canny_low <= canny_high"
        );
        odd("preprocess.background.close_size", b.close_size)?;
        unit_open("preprocess.background.min_area_fraction", b.min_area_fraction)?;
        unit_open("preprocess.background.full_frame_margin", b.full_frame_margin)?;
        ensure!((1..=3).contains(&b.max_paintings), "preprocess.background.max_paintings must lie in 1..=3");
        let t = &p.textbox;
        unit_closed("preprocess.textbox.hat_fraction", t.hat_fraction)?;
        unit_closed("preprocess.textbox.bridge_fraction", t.bridge_fraction)?;
        unit_open("preprocess.textbox.min_area_fraction", t.min_area_fraction)?;
        positive("preprocess.textbox.ceiling", t.ceiling)?;
        ensure!(
            t.weights.iter().all(|w| w.is_finite() && *w >= 0.0),
            "preprocess.textbox.weights must be non-negative"
        );
        let r = &p.rotation;
        ensure!(
            r.canny_low >= 0.0 && r.canny_low <= r.canny_high,
            "preprocess.rotation needs 0 <= canny_low <= canny_high"
        );
        odd("preprocess.rotation.close_size", r.close_size)?;
        positive("preprocess.rotation.rho_step", r.rho_step)?;
        ensure!(r.theta_step > 0.0 && r.theta_step <= 10.0, "preprocess.rotation.theta_step must lie in (0, 10]");
        unit_closed("preprocess.rotation.vote_fraction", r.vote_fraction)?;
        ensure!(r.max_lines >= 1, "preprocess.rotation.max_lines must be at least 1");
        positive("preprocess.rotation.mad_cutoff", r.mad_cutoff)?;
        ensure!(
            r.dead_band >= 0.0 && r.dead_band < 90.0,
            "preprocess.rotation.dead_band must lie in [0, 90)"
        );

        self.weights.validate().context("weights")?;
        let k = &self.kmeans;
        ensure!(k.k_bright >= 1 && k.k_texture >= 1, "kmeans cluster counts must be at least 1");

        // Descriptor recipes carry their own constraints; exercising them
        // once on a small image surfaces any violation at load time.
        let probe = RasterImage::filled(64, 64, ColorSpace::Rgb, 128);
        if let Err(e) = describe(&probe, None, &self.descriptors) {
            bail!("descriptors: {e}");
        }
        Ok(())
    }
}
