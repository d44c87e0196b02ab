use serde::{Deserialize, Serialize};

use super::{PreprocessError, Result};
use crate::imgproc::{
    canny, convert_color, find_contours, hough_lines, min_area_rect, morphology_mask, rotate, BinaryMask, ColorSpace,
    MorphKind, RasterImage, RotationFrame, StructuringElement,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMethod {
    /// Minimum-area rectangle around the largest closed contour.
    Rect,
    /// Mean direction of the dominant near-horizontal Hough lines.
    Hough,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotationParams {
    pub method: RotationMethod,
    pub canny_low: f32,
    pub canny_high: f32,
    pub close_size: usize,
    pub rho_step: f64,
    /// Hough angular resolution, degrees.
    pub theta_step: f64,
    /// Lines need at least this fraction of the shorter image side in votes.
    pub vote_fraction: f64,
    /// Strongest near-horizontal lines kept before outlier rejection.
    pub max_lines: usize,
    /// Outlier cutoff in median absolute deviations.
    pub mad_cutoff: f64,
    /// Estimates smaller than this (degrees) are left uncorrected.
    pub dead_band: f64,
}

impl Default for RotationParams {
    fn default() -> Self {
        Self {
            method: RotationMethod::Hough,
            canny_low: 40.0,
            canny_high: 120.0,
            close_size: 9,
            rho_step: 1.0,
            theta_step: 0.25,
            vote_fraction: 0.2,
            max_lines: 12,
            mad_cutoff: 2.5,
            dead_band: 0.5,
        }
    }
}

fn fold(deg: f64) -> f64 {
    let a = deg.rem_euclid(180.0);
    if a > 90.0 {
        a - 180.0
    } else {
        a
    }
}

fn edges(img: &RasterImage, params: &RotationParams) -> Result<BinaryMask> {
    let gray = convert_color(img, ColorSpace::Gray)?;
    Ok(canny(&gray, params.canny_low, params.canny_high)?)
}

/// Angle of the bottom edge of the minimum-area rectangle around the
/// largest closed contour, in (-90, 90].
pub fn estimate_rotation_rect(img: &RasterImage, params: &RotationParams) -> Result<f64> {
    let e = edges(img, params)?;
    let size = params.close_size | 1;
    let closed = morphology_mask(MorphKind::Close, &e, &StructuringElement::rect(size, size)?)?;
    let contours = find_contours(&closed);
    let largest = contours.first().ok_or(PreprocessError::NoPaintingFound)?;
    if largest.len() < 3 {
        return Err(PreprocessError::NoPaintingFound);
    }
    let pts: Vec<(f64, f64)> = largest.points().iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    let rect = min_area_rect(&pts);
    let mut corners = rect.corners();
    corners.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (mut p, mut q) = (corners[0], corners[1]);
    if p.0 > q.0 {
        std::mem::swap(&mut p, &mut q);
    }
    Ok(fold((-(q.1 - p.1)).atan2(q.0 - p.0).to_degrees()))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Mean of `angles` after dropping values more than `cutoff` median
/// absolute deviations from the median. A zero MAD keeps the values within
/// `tie` of the median.
pub fn robust_mean(angles: &[f64], cutoff: f64, tie: f64) -> Option<f64> {
    if angles.is_empty() {
        return None;
    }
    let m = median(&mut angles.to_vec());
    let mad = median(&mut angles.iter().map(|a| (a - m).abs()).collect::<Vec<_>>());
    let bound = if mad > 0.0 { cutoff * mad } else { tie };
    let kept: Vec<f64> = angles.iter().copied().filter(|a| (a - m).abs() <= bound).collect();
    Some(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// Robust mean direction of the strongest near-horizontal Hough lines.
pub fn estimate_rotation_hough(img: &RasterImage, params: &RotationParams) -> Result<f64> {
    let e = edges(img, params)?;
    let (w, h) = e.dims();
    let votes = ((w.min(h) as f64 * params.vote_fraction) as u32).max(2);
    let lines = hough_lines(&e, params.rho_step, params.theta_step.to_radians(), votes)?;
    let angles: Vec<f64> = lines
        .iter()
        .map(|l| l.direction_degrees())
        .filter(|a| a.abs() <= 45.0)
        .take(params.max_lines)
        .collect();
    let mean = robust_mean(&angles, params.mad_cutoff, params.theta_step).ok_or(PreprocessError::NoLinesFound)?;
    Ok(fold(mean))
}

pub fn estimate_rotation(img: &RasterImage, params: &RotationParams) -> Result<f64> {
    match params.method {
        RotationMethod::Rect => estimate_rotation_rect(img, params),
        RotationMethod::Hough => estimate_rotation_hough(img, params),
    }
}

/// Undo a content rotation of `angle` degrees. Returns the image on an
/// expanded canvas, the mask of pixels backed by the input, and the frame.
pub fn derotate(img: &RasterImage, angle: f64) -> (RasterImage, BinaryMask, RotationFrame) {
    rotate(img, -angle, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::{crop, rotated_extent};

    /// Light wall with a framed painting, rotated then center-cropped so the
    /// result has no fill corners.
    fn scene(angle: f64) -> RasterImage {
        let big = RasterImage::from_fn_rgb(420, 360, |x, y| {
            let (fx, fy) = (x as i64 - 210, y as i64 - 180);
            if fx.abs() < 90 && fy.abs() < 65 {
                if fx.abs() < 82 && fy.abs() < 57 {
                    [150 + (x % 40) as u8, 90, 60 + (y % 30) as u8]
                } else {
                    [30, 25, 20]
                }
            } else {
                [215, 210, 200]
            }
        });
        let (rot, _, _) = rotate(&big, angle, 0);
        let (rw, rh) = rot.dims();
        crop(&rot, (rw - 300) / 2, (rh - 260) / 2, (rw - 300) / 2 + 300, (rh - 260) / 2 + 260).unwrap()
    }

    #[test]
    fn axis_aligned_scene_reads_zero() {
        let img = scene(0.0);
        let p = RotationParams::default();
        assert!(estimate_rotation_rect(&img, &p).unwrap().abs() <= 0.5);
        assert!(estimate_rotation_hough(&img, &p).unwrap().abs() <= 0.5);
    }

    #[test]
    fn sweep_recovers_angles() {
        let p = RotationParams::default();
        for theta in [-30.0, -15.0, 5.0, 10.0, 20.0] {
            let img = scene(theta);
            let r = estimate_rotation_rect(&img, &p).unwrap();
            let h = estimate_rotation_hough(&img, &p).unwrap();
            assert!((r - theta).abs() <= 1.0, "rect {theta}: {r}");
            assert!((h - theta).abs() <= 1.0, "hough {theta}: {h}");
            assert!(r > -90.0 && r <= 90.0 && h > -90.0 && h <= 90.0);
        }
    }

    #[test]
    fn single_outlier_line_is_rejected() {
        let mut angles = vec![10.0, 10.1, 9.9, 10.05, 9.95, 10.0, 10.2, 9.8, 10.0];
        let clean = robust_mean(&angles, 2.5, 0.25).unwrap();
        angles.push(-70.0);
        let with = robust_mean(&angles, 2.5, 0.25).unwrap();
        assert!((clean - with).abs() <= 0.5);
        assert!((with - 10.0).abs() < 0.05);
    }

    #[test]
    fn derotation_round_trip() {
        let img = RasterImage::from_fn_gray(90, 70, |x, y| (100.0 + 60.0 * ((x as f64) * 0.07).sin() * ((y as f64) * 0.05).cos()) as u8);
        let (same, _, _) = derotate(&img, 0.0);
        assert_eq!(same, img);
        let theta = 17.0;
        let (rot, _, _) = rotate(&img, theta, 0);
        assert_eq!(rot.dims(), rotated_extent(90, 70, theta));
        let (back, valid, frame) = derotate(&rot, theta);
        assert_eq!(back.dims(), rotated_extent(rot.width(), rot.height(), theta));
        let (mut err, mut n) = (0.0, 0usize);
        for y in 10..60 {
            for x in 10..80 {
                // Source pixel (x, y) after a forward and inverse rotation.
                let (fx, fy) = RotationFrame::new((90, 70), theta).to_dst(x as f64, y as f64);
                let (bx, by) = frame.to_dst(fx, fy);
                let (bx, by) = (bx.round() as usize, by.round() as usize);
                assert!(valid.get(bx, by));
                err += (back.get(bx, by, 0) as f64 - img.get(x, y, 0) as f64).abs();
                n += 1;
            }
        }
        assert!(err / n as f64 <= 3.0, "mae {}", err / n as f64);
    }
}
