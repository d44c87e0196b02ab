use super::Keypoint;
use crate::imgproc::{downsample_half, RasterImage};

/// Radius-3 Bresenham circle, clockwise from the top.
pub(crate) const CIRCLE: [(isize, isize); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

const ARC: usize = 9;

/// Corner response at an interior pixel, `None` when no run of at least nine
/// contiguous circle pixels is uniformly brighter than `p + t` or darker than
/// `p - t`. The response is the sum of absolute differences along the
/// longest qualifying run.
pub(crate) fn corner_score(img: &RasterImage, x: usize, y: usize, t: u8) -> Option<u32> {
    let p = img.get(x, y, 0) as i32;
    let t = t as i32;
    let mut ring = [0i32; 16];
    for (i, (dx, dy)) in CIRCLE.iter().enumerate() {
        ring[i] = img.get((x as isize + dx) as usize, (y as isize + dy) as usize, 0) as i32 - p;
    }
    let mut best: Option<(usize, u32)> = None;
    for sign in [1i32, -1] {
        let hit = |i: usize| sign * ring[i % 16] > t;
        if (0..16).all(hit) {
            let s = ring.iter().map(|d| d.unsigned_abs()).sum();
            return Some(s);
        }
        // Start each run right after a miss so wrap-around runs are whole.
        let Some(miss) = (0..16).find(|&i| !hit(i)) else { continue };
        let (mut len, mut sum) = (0usize, 0u32);
        for k in 1..=16 {
            let i = (miss + k) % 16;
            if hit(i) {
                len += 1;
                sum += ring[i].unsigned_abs();
            } else {
                if len >= ARC && best.is_none_or(|(bl, bs)| (len, sum) > (bl, bs)) {
                    best = Some((len, sum));
                }
                len = 0;
                sum = 0;
            }
        }
    }
    best.map(|(_, s)| s)
}

/// Corners of one pyramid level at least `margin` pixels from every border,
/// after 3×3 non-maximum suppression. Ties keep the earlier pixel in raster
/// order.
pub(crate) fn detect_level(img: &RasterImage, t: u8, margin: usize) -> Vec<(usize, usize, u32)> {
    let (w, h) = img.dims();
    let margin = margin.max(3);
    if w <= 2 * margin || h <= 2 * margin {
        return Vec::new();
    }
    let mut scores = vec![0u32; w * h];
    for y in margin..h - margin {
        for x in margin..w - margin {
            if let Some(s) = corner_score(img, x, y, t) {
                scores[y * w + x] = s;
            }
        }
    }
    let mut out = Vec::new();
    for y in margin..h - margin {
        for x in margin..w - margin {
            let s = scores[y * w + x];
            if s == 0 {
                continue;
            }
            let mut keep = true;
            'n: for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let n = scores[(y as isize + dy) as usize * w + (x as isize + dx) as usize];
                    let earlier = dy < 0 || (dy == 0 && dx < 0);
                    if n > s || (n == s && earlier) {
                        keep = false;
                        break 'n;
                    }
                }
            }
            if keep {
                out.push((x, y, s));
            }
        }
    }
    out
}

/// Half-scale pyramid with at most `levels` images, level 0 first.
pub(crate) fn pyramid(img: &RasterImage, levels: usize) -> Vec<RasterImage> {
    let mut out = vec![img.clone()];
    while out.len() < levels.max(1) {
        match downsample_half(out.last().unwrap()) {
            Some(next) => out.push(next),
            None => break,
        }
    }
    out
}

/// Level coordinate to level-0 coordinate for pixel centers.
pub(crate) fn to_base(v: usize, octave: usize) -> f32 {
    let s = (1usize << octave) as f32;
    (v as f32 + 0.5) * s - 0.5
}

pub(crate) fn detect_pyramid(levels: &[RasterImage], t: u8, max_keypoints: usize, margin: usize) -> Vec<Keypoint> {
    let mut kps: Vec<Keypoint> = Vec::new();
    for (octave, level) in levels.iter().enumerate() {
        for (x, y, s) in detect_level(level, t, margin) {
            kps.push(Keypoint {
                x: to_base(x, octave),
                y: to_base(y, octave),
                score: s as f32,
                orientation: 0.0,
                octave: octave as i32,
            });
        }
    }
    // Stable: equal scores keep octave-then-raster order.
    kps.sort_by(|a, b| b.score.total_cmp(&a.score));
    kps.truncate(max_keypoints);
    kps
}

/// FAST-16 corners over a three-level half-scale pyramid, strongest first.
/// Coordinates refer to the full-resolution image.
pub fn fast_detect(img: &RasterImage, threshold: u8, max_keypoints: usize) -> Vec<Keypoint> {
    let levels = pyramid(img, 3);
    detect_pyramid(&levels, threshold.max(1), max_keypoints, 3)
}
