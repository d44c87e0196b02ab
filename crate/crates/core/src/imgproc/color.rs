//! Color conversion with RGB as the hub space.
//!
//! Non-RGB three-channel spaces are stored in 8-bit scaled ranges:
//! LAB has L in [0, 255] (from [0, 100]) and a, b offset by 128; HSV has
//! H scaled from [0, 360) degrees to [0, 255] with S and V in [0, 255];
//! YCrCb uses the usual full-range offsets of 128 on the chroma channels.

use super::{ColorSpace, ImgError, RasterImage, Result};

/// Convert between color spaces. Conversions route through RGB and
/// grayscale sources cannot be promoted to color.
pub fn convert_color(img: &RasterImage, target: ColorSpace) -> Result<RasterImage> {
    let source = img.space();
    if source == target {
        return Ok(img.clone());
    }
    if source == ColorSpace::Gray {
        return Err(ImgError::UnsupportedConversion {
            from: source,
            to: target,
        });
    }
    let rgb;
    let rgb_ref = if source == ColorSpace::Rgb {
        img
    } else {
        rgb = map_pixels(img, ColorSpace::Rgb, to_rgb_fn(source));
        &rgb
    };
    if target == ColorSpace::Rgb {
        return Ok(rgb_ref.clone());
    }
    if target == ColorSpace::Gray {
        let data = rgb_ref
            .data()
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]))
            .collect();
        return RasterImage::from_vec(img.width(), img.height(), ColorSpace::Gray, data);
    }
    Ok(map_pixels(rgb_ref, target, from_rgb_fn(target)))
}

/// Integer luma 0.299R + 0.587G + 0.114B, rounded half-up.
#[inline]
pub(crate) fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

type PixelFn = fn([u8; 3]) -> [u8; 3];

fn map_pixels(img: &RasterImage, space: ColorSpace, f: PixelFn) -> RasterImage {
    let mut data = Vec::with_capacity(img.data().len());
    for p in img.data().chunks_exact(3) {
        data.extend_from_slice(&f([p[0], p[1], p[2]]));
    }
    RasterImage::from_vec(img.width(), img.height(), space, data).expect("same geometry")
}

fn from_rgb_fn(target: ColorSpace) -> PixelFn {
    match target {
        ColorSpace::Lab => rgb_to_lab,
        ColorSpace::Hsv => rgb_to_hsv,
        ColorSpace::YCrCb => rgb_to_ycrcb,
        ColorSpace::Rgb | ColorSpace::Gray => unreachable!("handled by caller"),
    }
}

fn to_rgb_fn(source: ColorSpace) -> PixelFn {
    match source {
        ColorSpace::Lab => lab_to_rgb,
        ColorSpace::Hsv => hsv_to_rgb,
        ColorSpace::YCrCb => ycrcb_to_rgb,
        ColorSpace::Rgb | ColorSpace::Gray => unreachable!("handled by caller"),
    }
}

#[inline]
fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub(crate) fn rgb_to_hsv([r, g, b]: [u8; 3]) -> [u8; 3] {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let s = if max > 0.0 { delta / max * 255.0 } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == rf {
        60.0 * ((gf - bf) / delta)
    } else if max == gf {
        60.0 * ((bf - rf) / delta) + 120.0
    } else {
        60.0 * ((rf - gf) / delta) + 240.0
    };
    let h = if h < 0.0 { h + 360.0 } else { h };
    [clamp_u8(h * 255.0 / 360.0), clamp_u8(s), max as u8]
}

pub(crate) fn hsv_to_rgb([h8, s8, v8]: [u8; 3]) -> [u8; 3] {
    let h = (h8 as f64 * 360.0 / 255.0) % 360.0;
    let s = s8 as f64 / 255.0;
    let v = v8 as f64;
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - ((hp % 2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [clamp_u8(r1 + m), clamp_u8(g1 + m), clamp_u8(b1 + m)]
}

fn rgb_to_ycrcb([r, g, b]: [u8; 3]) -> [u8; 3] {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let y = 0.299 * rf + 0.587 * gf + 0.114 * bf;
    let cr = (rf - y) * 0.713 + 128.0;
    let cb = (bf - y) * 0.564 + 128.0;
    [clamp_u8(y), clamp_u8(cr), clamp_u8(cb)]
}

fn ycrcb_to_rgb([y, cr, cb]: [u8; 3]) -> [u8; 3] {
    let (yf, crf, cbf) = (y as f64, cr as f64 - 128.0, cb as f64 - 128.0);
    [
        clamp_u8(yf + 1.403 * crf),
        clamp_u8(yf - 0.714 * crf - 0.344 * cbf),
        clamp_u8(yf + 1.773 * cbf),
    ]
}

// D65 reference white.
const XN: f64 = 0.950456;
const ZN: f64 = 1.088754;

fn srgb_to_linear(v: u8) -> f64 {
    let c = v as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb(c: f64) -> u8 {
    let c = c.clamp(0.0, 1.0);
    let v = if c <= 0.0031308 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    };
    clamp_u8(v * 255.0)
}

fn lab_f(t: f64) -> f64 {
    const D: f64 = 6.0 / 29.0;
    if t > D * D * D {
        t.cbrt()
    } else {
        t / (3.0 * D * D) + 4.0 / 29.0
    }
}

fn lab_f_inv(t: f64) -> f64 {
    const D: f64 = 6.0 / 29.0;
    if t > D {
        t * t * t
    } else {
        3.0 * D * D * (t - 4.0 / 29.0)
    }
}

fn rgb_to_lab([r, g, b]: [u8; 3]) -> [u8; 3] {
    let (rl, gl, bl) = (srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b));
    let x = (0.412453 * rl + 0.357580 * gl + 0.180423 * bl) / XN;
    let y = 0.212671 * rl + 0.715160 * gl + 0.072169 * bl;
    let z = (0.019334 * rl + 0.119193 * gl + 0.950227 * bl) / ZN;
    let (fx, fy, fz) = (lab_f(x), lab_f(y), lab_f(z));
    let l = 116.0 * fy - 16.0;
    let a = 500.0 * (fx - fy);
    let bb = 200.0 * (fy - fz);
    [clamp_u8(l * 255.0 / 100.0), clamp_u8(a + 128.0), clamp_u8(bb + 128.0)]
}

fn lab_to_rgb([l8, a8, b8]: [u8; 3]) -> [u8; 3] {
    let l = l8 as f64 * 100.0 / 255.0;
    let a = a8 as f64 - 128.0;
    let bb = b8 as f64 - 128.0;
    let fy = (l + 16.0) / 116.0;
    let fx = fy + a / 500.0;
    let fz = fy - bb / 200.0;
    let x = lab_f_inv(fx) * XN;
    let y = lab_f_inv(fy);
    let z = lab_f_inv(fz) * ZN;
    let rl = 3.240479 * x - 1.537150 * y - 0.498535 * z;
    let gl = -0.969256 * x + 1.875992 * y + 0.041556 * z;
    let bl = 0.055648 * x - 0.204043 * y + 1.057311 * z;
    [linear_to_srgb(rl), linear_to_srgb(gl), linear_to_srgb(bl)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(rgb: [u8; 3], target: ColorSpace) -> Vec<u8> {
        let img = RasterImage::from_fn_rgb(1, 1, |_, _| rgb);
        convert_color(&img, target).unwrap().into_data()
    }

    #[test]
    fn gray_of_white_is_white() {
        assert_eq!(px([255, 255, 255], ColorSpace::Gray), vec![255]);
    }

    #[test]
    fn gray_of_red_rounds_half_up() {
        // 0.299 * 255 = 76.245
        assert_eq!(px([255, 0, 0], ColorSpace::Gray), vec![76]);
        // 0.587 * 255 = 149.685
        assert_eq!(px([0, 255, 0], ColorSpace::Gray), vec![150]);
    }

    #[test]
    fn hsv_of_blue() {
        // H = 240 deg -> 240 * 255 / 360 = 170, full saturation and value.
        assert_eq!(px([0, 0, 255], ColorSpace::Hsv), vec![170, 255, 255]);
        assert_eq!(px([255, 0, 0], ColorSpace::Hsv), vec![0, 255, 255]);
        assert_eq!(px([128, 128, 128], ColorSpace::Hsv), vec![0, 0, 128]);
    }

    #[test]
    fn lab_of_achromatic_has_neutral_chroma() {
        assert_eq!(px([255, 255, 255], ColorSpace::Lab), vec![255, 128, 128]);
        assert_eq!(px([0, 0, 0], ColorSpace::Lab), vec![0, 128, 128]);
    }

    #[test]
    fn gray_source_cannot_be_promoted() {
        let g = RasterImage::new_gray(2, 2);
        assert!(matches!(
            convert_color(&g, ColorSpace::Rgb),
            Err(ImgError::UnsupportedConversion { .. })
        ));
        assert_eq!(convert_color(&g, ColorSpace::Gray).unwrap(), g);
    }

    #[test]
    fn round_trips_stay_close() {
        for space in [ColorSpace::Lab, ColorSpace::Hsv, ColorSpace::YCrCb] {
            for rgb in [[10u8, 200, 30], [250, 250, 5], [90, 60, 180], [128, 128, 128]] {
                let img = RasterImage::from_fn_rgb(1, 1, |_, _| rgb);
                let there = convert_color(&img, space).unwrap();
                let back = convert_color(&there, ColorSpace::Rgb).unwrap();
                // 8-bit Lab loses precision in dark, saturated channels.
                let tol = if space == ColorSpace::Lab { 12 } else { 4 };
                for c in 0..3 {
                    let d = (back.data()[c] as i32 - rgb[c] as i32).abs();
                    assert!(d <= tol, "{space:?} {rgb:?} -> {:?}", back.data());
                }
            }
        }
    }

    #[test]
    fn conversion_preserves_dimensions() {
        let img = RasterImage::from_fn_rgb(7, 5, |x, y| [x as u8 * 30, y as u8 * 40, 99]);
        for space in [ColorSpace::Gray, ColorSpace::Lab, ColorSpace::Hsv, ColorSpace::YCrCb] {
            let out = convert_color(&img, space).unwrap();
            assert_eq!(out.dims(), (7, 5));
            assert_eq!(out.channels(), space.channels());
        }
    }
}
