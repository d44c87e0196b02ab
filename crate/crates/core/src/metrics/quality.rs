use crate::imgproc::{BinaryMask, RasterImage};

use super::{MetricError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaskScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Pixel-level precision, recall and F1 of `pred` against `gt`.
pub fn mask_prf(pred: &BinaryMask, gt: &BinaryMask) -> Result<MaskScores> {
    if pred.dims() != gt.dims() {
        let (a, b) = (pred.dims(), gt.dims());
        return Err(MetricError::DimensionMismatch((a.0, a.1, 1), (b.0, b.1, 1)));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(MaskScores {
        precision,
        recall,
        f1,
    })
}

/// `10 log10(255^2 / MSE)` over every sample; identical inputs give +inf.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    let da = (a.width(), a.height(), a.channels());
    let db = (b.width(), b.height(), b.channels());
    if da != db {
        return Err(MetricError::DimensionMismatch(da, db));
    }
    let sse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    let mse = sse / a.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

/// Mean undirected angle difference in degrees, each term in [0, 90].
pub fn mean_angular_error(pred: &[f64], gt: &[f64]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(MetricError::LengthMismatch(pred.len(), gt.len()));
    }
    if pred.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let sum: f64 = pred
        .iter()
        .zip(gt)
        .map(|(p, g)| {
            let d = (p - g).rem_euclid(180.0);
            d.min(180.0 - d)
        })
        .sum();
    Ok(sum / pred.len() as f64)
}
