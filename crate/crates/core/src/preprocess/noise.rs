use crate::imgproc::{median_filter, RasterImage};
use crate::metrics::psnr;

use super::Result;

/// Median-filter `img` (3×3) and keep the filtered copy only when the two
/// differ enough to indicate impulse noise: PSNR below `psnr_threshold`.
/// Returns the chosen image, the noise flag and the measured PSNR.
pub fn detect_and_denoise(img: &RasterImage, psnr_threshold: f64) -> Result<(RasterImage, bool, f64)> {
    let filtered = median_filter(img, 1)?;
    let p = psnr(img, &filtered)?;
    if p < psnr_threshold {
        Ok((filtered, true, p))
    } else {
        Ok((img.clone(), false, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgproc::ColorSpace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth(w: usize, h: usize) -> RasterImage {
        RasterImage::from_fn_rgb(w, h, |x, y| [(x + y) as u8, (100 + x / 2) as u8, (200 - y / 2) as u8])
    }

    fn salt_and_pepper(img: &RasterImage, density: f64, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = img.clone();
        for y in 0..img.height() {
            for x in 0..img.width() {
                if rng.random_bool(density) {
                    let v = if rng.random_bool(0.5) { 255 } else { 0 };
                    for c in 0..img.channels() {
                        out.set(x, y, c, v);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn clean_constant_passes_through() {
        let img = RasterImage::filled(20, 20, ColorSpace::Rgb, 80);
        let (out, noisy, p) = detect_and_denoise(&img, 30.0).unwrap();
        assert!(!noisy);
        assert_eq!(p, f64::INFINITY);
        assert_eq!(out, img);
    }

    #[test]
    fn impulse_noise_is_filtered() {
        let noisy_img = salt_and_pepper(&smooth(120, 100), 0.1, 4);
        let (out, noisy, p) = detect_and_denoise(&noisy_img, 30.0).unwrap();
        assert!(noisy);
        assert!(p < 20.0, "psnr {p}");
        assert_eq!(out, median_filter(&noisy_img, 1).unwrap());
    }

    #[test]
    fn filtered_output_reads_clean() {
        for density in [0.02, 0.05, 0.1, 0.14] {
            let noisy_img = salt_and_pepper(&smooth(120, 100), density, 9);
            let (out, _, _) = detect_and_denoise(&noisy_img, 30.0).unwrap();
            let (_, again, _) = detect_and_denoise(&out, 30.0).unwrap();
            assert!(!again, "density {density}");
        }
    }
}
