//! Query image conditioning: impulse-noise removal, rotation estimation and
//! correction, painting segmentation and text-box detection.
//!
//! Denoising runs first because impulse noise floods the edge maps the
//! rotation estimators and the segmenter rely on.

mod background;
mod noise;
mod rotation;
mod textbox;

pub use background::{remove_background, remove_background_masked, BackgroundParams};
pub use noise::detect_and_denoise;
pub use rotation::{
    derotate, estimate_rotation, estimate_rotation_hough, estimate_rotation_rect, robust_mean, RotationMethod,
    RotationParams,
};
pub use textbox::{
    candidate_indicators, detect_textbox, detect_textbox_channel, erase_textbox, score_candidate, Hat, LabChannel,
    TextBoxCandidate, TextboxParams,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgproc::{BinaryMask, ImgError, RasterImage, RotationFrame};
use crate::metrics::{BBox, MetricError};

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("no painting region found")]
    NoPaintingFound,
    #[error("no near-horizontal lines found")]
    NoLinesFound,
    #[error("text box {0:?} lies outside the crop")]
    BoxOutsideCrop(BBox),
    #[error("text-box detection needs a three-channel image")]
    ColorRequired,
    #[error(transparent)]
    Image(#[from] ImgError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

pub type Result<T> = std::result::Result<T, PreprocessError>;

/// One painting cut out of a (possibly derotated) query image.
#[derive(Clone, Debug, PartialEq)]
pub struct PaintingCrop {
    pub image: RasterImage,
    /// Painting pixels within the crop, same size as `image`.
    pub mask: BinaryMask,
    /// Top-left corner in the working frame (after derotation).
    pub origin: (usize, usize),
    /// Correction applied to the whole query before cropping, degrees.
    pub rotation_applied: f64,
    /// Detected text box in crop coordinates.
    pub text_box: Option<BBox>,
}

impl PaintingCrop {
    pub fn whole(image: RasterImage) -> Self {
        let (w, h) = image.dims();
        Self {
            image,
            mask: BinaryMask::full(w, h),
            origin: (0, 0),
            rotation_applied: 0.0,
            text_box: None,
        }
    }

    /// Crop of the detected text box, if any.
    pub fn text_box_image(&self) -> Option<RasterImage> {
        let b = self.text_box?;
        crate::imgproc::crop(&self.image, b.x1 as usize, b.y1 as usize, b.x2 as usize, b.y2 as usize).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Stages {
    pub denoise: bool,
    pub rotation: bool,
    pub background: bool,
    pub textbox: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Self {
            denoise: true,
            rotation: true,
            background: true,
            textbox: true,
        }
    }
}

impl Stages {
    pub fn none() -> Self {
        Self {
            denoise: false,
            rotation: false,
            background: false,
            textbox: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessConfig {
    pub stages: Stages,
    /// Noise is declared below this PSNR (dB) between input and its median.
    pub psnr_threshold: f64,
    pub background: BackgroundParams,
    pub textbox: TextboxParams,
    pub rotation: RotationParams,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            stages: Stages::default(),
            psnr_threshold: 30.0,
            background: BackgroundParams::default(),
            textbox: TextboxParams::default(),
            rotation: RotationParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreprocessReport {
    pub noise_detected: bool,
    /// PSNR between the input and its median-filtered copy; `None` when
    /// denoising is off.
    pub psnr: Option<f64>,
    /// Estimated content rotation in degrees; `None` when not estimated.
    pub estimated_angle: Option<f64>,
    /// Rotation actually undone (zero inside the dead band).
    pub applied_angle: f64,
    /// Maps original coordinates into the working frame.
    pub frame: RotationFrame,
    pub painting_count: usize,
    /// Text boxes in working-frame coordinates, one slot per crop.
    pub text_boxes: Vec<Option<BBox>>,
}

/// Run the enabled stages in order: denoise, rotation estimate and
/// correction, background removal, then per-crop text-box detection and
/// erasure.
pub fn preprocess_pipeline(img: &RasterImage, cfg: &PreprocessConfig) -> Result<(Vec<PaintingCrop>, PreprocessReport)> {
    let mut report = PreprocessReport {
        noise_detected: false,
        psnr: None,
        estimated_angle: None,
        applied_angle: 0.0,
        frame: RotationFrame::new(img.dims(), 0.0),
        painting_count: 0,
        text_boxes: Vec::new(),
    };
    let mut work = img.clone();
    if cfg.stages.denoise {
        let (out, noisy, p) = detect_and_denoise(&work, cfg.psnr_threshold)?;
        work = out;
        report.noise_detected = noisy;
        report.psnr = Some(p);
    }
    let mut valid: Option<BinaryMask> = None;
    if cfg.stages.rotation {
        report.estimated_angle = estimate_rotation(&work, &cfg.rotation).ok();
        if let Some(a) = report.estimated_angle.filter(|a| a.abs() >= cfg.rotation.dead_band) {
            let (out, v, frame) = derotate(&work, a);
            work = out;
            valid = Some(v);
            report.applied_angle = a;
            report.frame = frame;
        }
    }
    let mut crops = if cfg.stages.background {
        match remove_background_masked(&work, valid.as_ref(), &cfg.background) {
            Ok(c) => c,
            Err(PreprocessError::NoPaintingFound) => Vec::new(),
            Err(e) => return Err(e),
        }
    } else {
        let mut c = PaintingCrop::whole(work.clone());
        if let Some(v) = valid {
            c.mask = v;
        }
        vec![c]
    };
    for c in crops.iter_mut() {
        c.rotation_applied = report.applied_angle;
    }
    if cfg.stages.textbox {
        let mut out = Vec::with_capacity(crops.len());
        for c in crops {
            let found = if c.image.channels() == 3 {
                detect_textbox(&c.image, &cfg.textbox)?
            } else {
                None
            };
            out.push(match found {
                Some(t) => erase_textbox(c, t.bbox)?,
                None => c,
            });
        }
        crops = out;
    }
    report.painting_count = crops.len();
    report.text_boxes = crops
        .iter()
        .map(|c| c.text_box.map(|b| b.translate(c.origin.0 as i64, c.origin.1 as i64)))
        .collect();
    Ok((crops, report))
}

/// Painting mask in the original image frame.
pub fn mask_in_original(crops: &[PaintingCrop], report: &PreprocessReport) -> BinaryMask {
    let (sw, sh) = report.frame.src;
    let (dw, dh) = report.frame.dst;
    let mut work = BinaryMask::new(dw, dh);
    for c in crops {
        for y in 0..c.mask.height() {
            for x in 0..c.mask.width() {
                if c.mask.get(x, y) || c.text_box.is_some_and(|b| b.contains(x as i64, y as i64)) {
                    let (wx, wy) = (x + c.origin.0, y + c.origin.1);
                    if wx < dw && wy < dh {
                        work.set(wx, wy, true);
                    }
                }
            }
        }
    }
    BinaryMask::from_fn(sw, sh, |x, y| {
        let (wx, wy) = report.frame.to_dst(x as f64, y as f64);
        let (wx, wy) = (wx.round(), wy.round());
        wx >= 0.0 && wy >= 0.0 && (wx as usize) < dw && (wy as usize) < dh && work.get(wx as usize, wy as usize)
    })
}

/// Text boxes mapped back to the original frame as axis-aligned hulls of
/// their corners, one slot per crop.
pub fn boxes_in_original(report: &PreprocessReport) -> Vec<Option<BBox>> {
    let (sw, sh) = report.frame.src;
    report
        .text_boxes
        .iter()
        .map(|b| {
            let b = (*b)?;
            let corners = [(b.x1, b.y1), (b.x2, b.y1), (b.x1, b.y2), (b.x2, b.y2)];
            let pts: Vec<(f64, f64)> = corners
                .iter()
                .map(|&(x, y)| {
                    let (sx, sy) = report.frame.to_src(x as f64 - 0.5, y as f64 - 0.5);
                    (sx + 0.5, sy + 0.5)
                })
                .collect();
            let clamp = |v: f64, hi: usize| v.round().clamp(0.0, hi as f64) as i64;
            let x1 = clamp(pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min), sw);
            let x2 = clamp(pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max), sw);
            let y1 = clamp(pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min), sh);
            let y2 = clamp(pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max), sh);
            BBox::new(x1, y1, x2, y2).ok()
        })
        .collect()
}
