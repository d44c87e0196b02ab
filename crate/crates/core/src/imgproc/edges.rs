use super::filter::{gaussian_kernel, plane_f32, separable_f32};
use super::{BinaryMask, ImgError, RasterImage, Result};

/// 3x3 Sobel derivatives of a float plane with replicated borders.
pub(crate) fn sobel_f32(src: &[f32], w: usize, h: usize) -> (Vec<f32>, Vec<f32>) {
    let at = |x: isize, y: isize| -> f32 {
        let xi = x.clamp(0, w as isize - 1) as usize;
        let yi = y.clamp(0, h as isize - 1) as usize;
        src[yi * w + xi]
    };
    let mut gx = vec![0f32; w * h];
    let mut gy = vec![0f32; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let tl = at(x - 1, y - 1);
            let t = at(x, y - 1);
            let tr = at(x + 1, y - 1);
            let l = at(x - 1, y);
            let r = at(x + 1, y);
            let bl = at(x - 1, y + 1);
            let b = at(x, y + 1);
            let br = at(x + 1, y + 1);
            let i = y as usize * w + x as usize;
            gx[i] = (tr + 2.0 * r + br) - (tl + 2.0 * l + bl);
            gy[i] = (bl + 2.0 * b + br) - (tl + 2.0 * t + tr);
        }
    }
    (gx, gy)
}

/// Sobel gradients of a single-channel image.
pub fn sobel_gradients(img: &RasterImage) -> Result<(Vec<f32>, Vec<f32>)> {
    img.require_gray()?;
    let (w, h) = img.dims();
    Ok(sobel_f32(&plane_f32(img, 0), w, h))
}

/// Canny edge detector: 5x5 Gaussian (sigma 1.4), Sobel gradients, four-way
/// non-maximum suppression and 8-connected hysteresis on the L2 magnitude.
pub fn canny(img: &RasterImage, low: f32, high: f32) -> Result<BinaryMask> {
    img.require_gray()?;
    if !(0.0..=high).contains(&low) {
        return Err(ImgError::InvalidThresholds { low, high });
    }
    let (w, h) = img.dims();
    let k = gaussian_kernel(5, 1.4);
    let smooth = separable_f32(&plane_f32(img, 0), w, h, &k, &k);
    let (gx, gy) = sobel_f32(&smooth, w, h);
    let mag: Vec<f32> = gx.iter().zip(&gy).map(|(a, b)| (a * a + b * b).sqrt()).collect();

    let at = |x: isize, y: isize| -> f32 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };

    // 0 = weak candidate, 1 = strong, 255 = suppressed
    let mut state = vec![255u8; w * h];
    let tan22 = (22.5f32).to_radians().tan();
    let tan67 = (67.5f32).to_radians().tan();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m <= 0.0 || m < low {
                continue;
            }
            let (ax, ay) = (gx[i].abs(), gy[i].abs());
            // Neighbour offsets along the gradient direction.
            let (dx, dy) = if ay <= ax * tan22 {
                (1isize, 0isize)
            } else if ay >= ax * tan67 {
                (0, 1)
            } else if (gx[i] > 0.0) == (gy[i] > 0.0) {
                (1, 1)
            } else {
                (1, -1)
            };
            let (xi, yi) = (x as isize, y as isize);
            let before = at(xi - dx, yi - dy);
            let after = at(xi + dx, yi + dy);
            if m > before && m >= after {
                state[i] = if m >= high { 1 } else { 0 };
            }
        }
    }

    let mut out = BinaryMask::new(w, h);
    let mut stack: Vec<usize> = (0..w * h).filter(|&i| state[i] == 1).collect();
    for &i in &stack {
        out.set(i % w, i / w, true);
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if state[j] == 0 && !out.get(nx as usize, ny as usize) {
                    out.set(nx as usize, ny as usize, true);
                    stack.push(j);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::{find_contours, ColorSpace};

    #[test]
    fn constant_image_has_no_edges() {
        let img = RasterImage::filled(32, 32, ColorSpace::Gray, 120);
        assert!(canny(&img, 0.0, 10.0).unwrap().is_empty());
    }

    #[test]
    fn thresholds_validated() {
        let img = RasterImage::new_gray(4, 4);
        assert!(matches!(canny(&img, 50.0, 10.0), Err(ImgError::InvalidThresholds { .. })));
    }

    #[test]
    fn step_edge_yields_single_column() {
        let img = RasterImage::from_fn_gray(64, 64, |x, _| if x < 32 { 0 } else { 255 });
        let e = canny(&img, 50.0, 150.0).unwrap();
        let cols: Vec<usize> = (0..64).filter(|&x| (0..64).any(|y| e.get(x, y))).collect();
        assert_eq!(cols.len(), 1, "edge columns {cols:?}");
        assert!(cols[0] == 31 || cols[0] == 32);
        // Every row carries exactly one edge pixel.
        for y in 0..64 {
            assert_eq!((0..64).filter(|&x| e.get(x, y)).count(), 1);
        }
    }

    #[test]
    fn bright_square_gives_closed_loop() {
        let img = RasterImage::from_fn_gray(80, 80, |x, y| {
            if (20..60).contains(&x) && (20..60).contains(&y) { 220 } else { 20 }
        });
        let e = canny(&img, 50.0, 150.0).unwrap();
        let cs = find_contours(&e);
        assert_eq!(cs.len(), 1, "edge pixels form a single component");
        let (x1, y1, x2, y2) = cs[0].bounding_box();
        assert!((18..=21).contains(&x1) && (18..=21).contains(&y1));
        assert!((59..=62).contains(&x2) && (59..=62).contains(&y2));
        // Loop closure: each edge pixel has at least two edge neighbours.
        for y in 1..79 {
            for x in 1..79 {
                if e.get(x, y) {
                    let mut n = 0;
                    for dy in -1i32..=1 {
                        for dx in -1i32..=1 {
                            if (dx, dy) != (0, 0) && e.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) {
                                n += 1;
                            }
                        }
                    }
                    assert!(n >= 2, "open end at ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn canny_preserves_dimensions() {
        let img = RasterImage::from_fn_gray(17, 9, |x, y| ((x * 13 + y * 7) % 256) as u8);
        assert_eq!(canny(&img, 10.0, 30.0).unwrap().dims(), (17, 9));
    }
}
