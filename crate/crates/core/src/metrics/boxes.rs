use serde::{Deserialize, Serialize};

use super::{MetricError, Result};

/// Axis-aligned box, inclusive on `(x1, y1)` and exclusive on `(x2, y2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl BBox {
    pub fn new(x1: i64, y1: i64, x2: i64, y2: i64) -> Result<Self> {
        if x1 >= x2 || y1 >= y2 {
            return Err(MetricError::DegenerateBox(x1, y1, x2, y2));
        }
        Ok(Self { x1, y1, x2, y2 })
    }

    pub fn width(&self) -> i64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> i64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) as f64 / 2.0, (self.y1 + self.y2) as f64 / 2.0)
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x1 && x < self.x2 && y >= self.y1 && y < self.y2
    }

    pub fn intersection_area(&self, other: &BBox) -> i64 {
        let w = (self.x2.min(other.x2) - self.x1.max(other.x1)).max(0);
        let h = (self.y2.min(other.y2) - self.y1.max(other.y1)).max(0);
        w * h
    }

    pub fn translate(&self, dx: i64, dy: i64) -> BBox {
        BBox {
            x1: self.x1 + dx,
            y1: self.y1 + dy,
            x2: self.x2 + dx,
            y2: self.y2 + dy,
        }
    }
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Mean IoU over every ground-truth box. Each image's predictions are paired
/// to its ground truth greedily by descending IoU; unmatched ground-truth
/// boxes contribute 0 and surplus predictions are ignored.
pub fn mean_iou(images: &[(Vec<BBox>, Vec<BBox>)]) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (pred, gt) in images {
        count += gt.len();
        let mut cand: Vec<(f64, usize, usize)> = Vec::new();
        for (i, p) in pred.iter().enumerate() {
            for (j, g) in gt.iter().enumerate() {
                let v = iou(p, g);
                if v > 0.0 {
                    cand.push((v, i, j));
                }
            }
        }
        cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used_p = vec![false; pred.len()];
        let mut used_g = vec![false; gt.len()];
        for (v, i, j) in cand {
            if !used_p[i] && !used_g[j] {
                used_p[i] = true;
                used_g[j] = true;
                total += v;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}
