use super::pattern::BRIEF_PAIRS;
use super::{BinaryDescriptor, FeatureError, Keypoint};
use crate::imgproc::RasterImage;

/// Distance from the keypoint to the farthest pixel any steered pair may
/// sample (13·√2 rounded up).
pub const PATCH_MARGIN: usize = 19;

fn in_bounds(img: &RasterImage, x: isize, y: isize, r: usize) -> bool {
    let r = r as isize;
    x - r >= 0 && y - r >= 0 && x + r < img.width() as isize && y + r < img.height() as isize
}

/// Intensity-centroid orientation over the disc of radius `radius` around
/// the keypoint's position on `level` (the image of its octave).
///
/// The angle is measured counter-clockwise on screen, with y pointing up,
/// in [0, 360). A patch with zero first moments gets 0.
pub fn orient_keypoint(level: &RasterImage, kp: &Keypoint, radius: usize) -> Result<Keypoint, FeatureError> {
    let (cx, cy) = kp.level_position();
    if !in_bounds(level, cx, cy, radius) {
        return Err(FeatureError::PatchOutOfBounds);
    }
    let r = radius as isize;
    let (mut m10, mut m01) = (0i64, 0i64);
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let v = level.get((cx + dx) as usize, (cy + dy) as usize, 0) as i64;
            m10 += dx as i64 * v;
            m01 -= dy as i64 * v;
        }
    }
    let orientation = if m10 == 0 && m01 == 0 {
        0.0
    } else {
        (m01 as f64).atan2(m10 as f64).to_degrees().rem_euclid(360.0) as f32
    };
    Ok(Keypoint {
        orientation: if orientation >= 360.0 { 0.0 } else { orientation },
        ..*kp
    })
}

/// Steered BRIEF on a pre-smoothed octave image: each table pair is rotated
/// by the keypoint orientation and bit `i` is set iff `I(p_i) < I(q_i)`.
pub fn brief_describe(smoothed: &RasterImage, kp: &Keypoint) -> Result<BinaryDescriptor, FeatureError> {
    let (cx, cy) = kp.level_position();
    if !in_bounds(smoothed, cx, cy, PATCH_MARGIN) {
        return Err(FeatureError::PatchOutOfBounds);
    }
    let (s, c) = (kp.orientation as f64).to_radians().sin_cos();
    // Screen-counter-clockwise rotation of an offset in y-down coordinates.
    let steer = |dx: i8, dy: i8| {
        let (dx, dy) = (dx as f64, dy as f64);
        let rx = (dx * c + dy * s).round() as isize;
        let ry = (-dx * s + dy * c).round() as isize;
        smoothed.get((cx + rx) as usize, (cy + ry) as usize, 0)
    };
    let mut bytes = [0u8; 32];
    for (i, &(x1, y1, x2, y2)) in BRIEF_PAIRS.iter().enumerate() {
        if steer(x1, y1) < steer(x2, y2) {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    Ok(BinaryDescriptor(bytes))
}
