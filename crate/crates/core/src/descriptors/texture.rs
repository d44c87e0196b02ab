use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{tile_span, DescriptorError, DescriptorVector, Layout, Result};
use crate::imgproc::{convert_color, resize_bilinear, BinaryMask, ColorSpace, RasterImage};

/// Side of the square every texture descriptor is computed on.
pub const ANALYSIS_SIZE: usize = 256;

/// Row-major positions of an 8×8 coefficient block in zigzag scan order.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21,
    28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54,
    47, 55, 62, 63,
];

const HOG_EPSILON: f64 = 1e-3;

fn require_gray(img: &RasterImage) -> Result<()> {
    if img.channels() != 1 {
        return Err(DescriptorError::MultiChannelInput(img.channels()));
    }
    Ok(())
}

/// Grayscale `ANALYSIS_SIZE` square ready for texture extraction.
///
/// Pixels outside `mask` are replaced by linear interpolation between the
/// nearest kept pixels above and below in the same column before resizing.
pub fn texture_input(img: &RasterImage, mask: Option<&BinaryMask>) -> Result<RasterImage> {
    let mut g = convert_color(img, ColorSpace::Gray)?;
    if let Some(m) = mask {
        if m.dims() != g.dims() {
            return Err(DescriptorError::MaskMismatch(m.width(), m.height(), g.width(), g.height()));
        }
        inpaint_columns(&mut g, m);
    }
    Ok(resize_bilinear(&g, ANALYSIS_SIZE, ANALYSIS_SIZE)?)
}

fn inpaint_columns(g: &mut RasterImage, mask: &BinaryMask) {
    let (w, h) = g.dims();
    let kept = mask.count();
    if kept == w * h {
        return;
    }
    let fallback = if kept == 0 {
        128.0
    } else {
        let s: u64 = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .filter(|&(x, y)| mask.get(x, y))
            .map(|(x, y)| g.get(x, y, 0) as u64)
            .sum();
        s as f64 / kept as f64
    };
    for x in 0..w {
        let mut above: Option<(usize, f64)> = None;
        let mut y = 0;
        while y < h {
            if mask.get(x, y) {
                above = Some((y, g.get(x, y, 0) as f64));
                y += 1;
                continue;
            }
            let gap_end = (y..h).find(|&yy| mask.get(x, yy)).unwrap_or(h);
            let below = (gap_end < h).then(|| (gap_end, g.get(x, gap_end, 0) as f64));
            for yy in y..gap_end {
                let v = match (above, below) {
                    (Some((ya, va)), Some((yb, vb))) => {
                        let t = (yy - ya) as f64 / (yb - ya) as f64;
                        va + t * (vb - va)
                    }
                    (Some((_, v)), None) | (None, Some((_, v))) => v,
                    (None, None) => fallback,
                };
                g.set(x, yy, 0, v.round() as u8);
            }
            y = gap_end;
        }
    }
}

/// Per-pixel 8-neighbor codes with replicate padding. Bits run clockwise
/// from the top-left neighbor (bit 7) to the left neighbor (bit 0); a bit is
/// set when the neighbor is at least the center.
pub fn lbp_codes(img: &RasterImage) -> Result<RasterImage> {
    require_gray(img)?;
    const RING: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];
    let (w, h) = img.dims();
    Ok(RasterImage::from_fn_gray(w, h, |x, y| {
        let c = img.get(x, y, 0);
        let mut code = 0u8;
        for (i, (dx, dy)) in RING.iter().enumerate() {
            if img.get_clamped(x as isize + dx, y as isize + dy, 0) >= c {
                code |= 1 << (7 - i);
            }
        }
        code
    }))
}

/// Tiled 256-bin histograms of LBP codes, each tile L1-normalized.
pub fn lbp_descriptor(img: &RasterImage, grid: usize) -> Result<DescriptorVector> {
    require_gray(img)?;
    if grid == 0 {
        return Err(DescriptorError::BadGrid);
    }
    let (w, h) = img.dims();
    if w < grid || h < grid {
        return Err(DescriptorError::ImageTooSmall { width: w, height: h, grid });
    }
    let codes = lbp_codes(img)?;
    let mut out = vec![0.0; grid * grid * 256];
    for ty in 0..grid {
        let (y1, y2) = tile_span(h, grid, ty);
        for tx in 0..grid {
            let (x1, x2) = tile_span(w, grid, tx);
            let tile = &mut out[(ty * grid + tx) * 256..][..256];
            for y in y1..y2 {
                for x in x1..x2 {
                    tile[codes.get(x, y, 0) as usize] += 1.0;
                }
            }
            let n = ((x2 - x1) * (y2 - y1)) as f64;
            tile.iter_mut().for_each(|v| *v /= n);
        }
    }
    DescriptorVector::new(out, Layout::Lbp { grid })
}

fn dct_basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (u, row) in b.iter_mut().enumerate() {
            let a = if u == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = a * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        b
    })
}

/// Orthonormal type-II 2D DCT of a row-major 8×8 block.
/// Output index `v * 8 + u` holds vertical frequency `v`, horizontal `u`.
pub fn dct_8x8(block: &[f64; 64]) -> [f64; 64] {
    let b = dct_basis();
    let mut rows = [0.0; 64];
    for y in 0..8 {
        for u in 0..8 {
            rows[y * 8 + u] = (0..8).map(|x| b[u][x] * block[y * 8 + x]).sum();
        }
    }
    let mut out = [0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            out[v * 8 + u] = (0..8).map(|y| b[v][y] * rows[y * 8 + u]).sum();
        }
    }
    out
}

/// First `keep` zigzag DCT coefficients of every full 8×8 tile, tiles in
/// row-major order. Partial tiles at the right and bottom are ignored.
pub fn dct_descriptor(img: &RasterImage, keep: usize) -> Result<DescriptorVector> {
    require_gray(img)?;
    if !(1..=64).contains(&keep) {
        return Err(DescriptorError::BadKeepCount(keep));
    }
    let (tiles_x, tiles_y) = (img.width() / 8, img.height() / 8);
    if tiles_x == 0 || tiles_y == 0 {
        return Err(DescriptorError::GeometryMismatch(format!(
            "{}x{} image holds no complete 8x8 tile",
            img.width(),
            img.height()
        )));
    }
    let mut out = Vec::with_capacity(tiles_x * tiles_y * keep);
    let mut block = [0.0; 64];
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            for y in 0..8 {
                for x in 0..8 {
                    block[y * 8 + x] = img.get(tx * 8 + x, ty * 8 + y, 0) as f64;
                }
            }
            let c = dct_8x8(&block);
            out.extend(ZIGZAG[..keep].iter().map(|&i| c[i]));
        }
    }
    DescriptorVector::new(out, Layout::Dct { tiles_x, tiles_y, keep })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HogParams {
    /// Cell side in pixels.
    pub cell: usize,
    /// Block side in cells; blocks advance one cell at a time.
    pub block: usize,
    /// Unsigned orientation bins over [0, 180).
    pub bins: usize,
}

impl Default for HogParams {
    fn default() -> Self {
        Self {
            cell: 8,
            block: 2,
            bins: 9,
        }
    }
}

impl HogParams {
    /// Descriptor length for a `width`×`height` input, 0 if it does not fit.
    pub fn len(&self, width: usize, height: usize) -> usize {
        if self.cell == 0 || self.block == 0 {
            return 0;
        }
        let (cx, cy) = (width / self.cell, height / self.cell);
        if cx < self.block || cy < self.block {
            return 0;
        }
        (cx - self.block + 1) * (cy - self.block + 1) * self.block * self.block * self.bins
    }

    fn validate(&self, width: usize, height: usize) -> Result<()> {
        let bad = |msg: String| Err(DescriptorError::GeometryMismatch(msg));
        if self.cell == 0 || self.block == 0 || self.bins == 0 {
            return bad("cell, block and bins must be positive".into());
        }
        if !width.is_multiple_of(self.cell) || !height.is_multiple_of(self.cell) {
            return bad(format!("{width}x{height} is not a multiple of the {} px cell", self.cell));
        }
        if width / self.cell < self.block || height / self.cell < self.block {
            return bad(format!("{width}x{height} holds fewer cells than one block"));
        }
        Ok(())
    }
}

/// Histogram of oriented gradients with L2-normalized overlapping blocks.
pub fn hog_descriptor(img: &RasterImage, params: HogParams) -> Result<DescriptorVector> {
    require_gray(img)?;
    let (w, h) = img.dims();
    params.validate(w, h)?;
    let HogParams { cell, block, bins } = params;
    let (cx, cy) = (w / cell, h / cell);
    let mut cells = vec![0.0f64; cx * cy * bins];
    let bin_width = 180.0 / bins as f64;
    let px = |x: isize, y: isize| img.get_clamped(x, y, 0) as f64;
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let gx = px(xi + 1, yi) - px(xi - 1, yi);
            let gy = px(xi, yi + 1) - px(xi, yi - 1);
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let angle = gy.atan2(gx).to_degrees().rem_euclid(180.0);
            let pos = angle / bin_width;
            let lo = pos.floor();
            let frac = pos - lo;
            let b0 = lo as usize % bins;
            let b1 = (b0 + 1) % bins;
            let base = ((y / cell) * cx + x / cell) * bins;
            cells[base + b0] += mag * (1.0 - frac);
            cells[base + b1] += mag * frac;
        }
    }
    let mut out = Vec::with_capacity(params.len(w, h));
    let mut v = Vec::with_capacity(block * block * bins);
    for by in 0..=cy - block {
        for bx in 0..=cx - block {
            v.clear();
            for yy in by..by + block {
                for xx in bx..bx + block {
                    v.extend_from_slice(&cells[(yy * cx + xx) * bins..][..bins]);
                }
            }
            let norm = (v.iter().map(|a| a * a).sum::<f64>() + HOG_EPSILON * HOG_EPSILON).sqrt();
            out.extend(v.iter().map(|a| a / norm));
        }
    }
    DescriptorVector::new(
        out,
        Layout::Hog {
            width: w,
            height: h,
            params,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gray(w: usize, h: usize, seed: u64, lo: u8, hi: u8) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..w * h).map(|_| rng.random_range(lo..=hi)).collect();
        RasterImage::from_vec(w, h, ColorSpace::Gray, data).unwrap()
    }

    #[test]
    fn zigzag_matches_diagonal_walk() {
        let mut order = Vec::new();
        for s in 0..15usize {
            let cells: Vec<(usize, usize)> = (0..8)
                .filter_map(|r| s.checked_sub(r).filter(|c| *c < 8).map(|c| (r, c)))
                .collect();
            // Even diagonals run bottom-left to top-right.
            let walk: Vec<_> = if s % 2 == 0 { cells.into_iter().rev().collect() } else { cells };
            order.extend(walk.into_iter().map(|(r, c)| r * 8 + c));
        }
        assert_eq!(order, ZIGZAG.to_vec());
    }

    #[test]
    fn constant_image_codes_are_all_ones() {
        let img = RasterImage::filled(9, 7, ColorSpace::Gray, 77);
        let codes = lbp_codes(&img).unwrap();
        assert!(codes.data().iter().all(|&c| c == 255));
        let d = lbp_descriptor(&img, 2).unwrap();
        for tile in d.values().chunks(256) {
            assert_eq!(tile[255], 1.0);
        }
    }

    #[test]
    fn lbp_matches_bit_assembly_oracle() {
        let img = random_gray(6, 6, 42, 0, 255);
        let codes = lbp_codes(&img).unwrap();
        for y in 1..5 {
            for x in 1..5 {
                let c = img.get(x, y, 0);
                let n = |dx: i32, dy: i32| img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize, 0);
                let bits = [n(-1, -1), n(0, -1), n(1, -1), n(1, 0), n(1, 1), n(0, 1), n(-1, 1), n(-1, 0)];
                let expect = bits.iter().fold(0u8, |acc, &b| (acc << 1) | (b >= c) as u8);
                assert_eq!(codes.get(x, y, 0), expect, "at ({x}, {y})");
            }
        }
        assert!(matches!(
            lbp_codes(&RasterImage::filled(2, 2, ColorSpace::Rgb, 0)),
            Err(DescriptorError::MultiChannelInput(3))
        ));
    }

    #[test]
    fn dct_of_constant_is_dc_only() {
        let img = RasterImage::filled(8, 8, ColorSpace::Gray, 100);
        let d = dct_descriptor(&img, 64).unwrap();
        assert!((d.values()[0] - 800.0).abs() < 1e-9);
        assert!(d.values()[1..].iter().all(|v| v.abs() < 1e-9));
        assert!(matches!(dct_descriptor(&img, 0), Err(DescriptorError::BadKeepCount(0))));
        assert!(matches!(dct_descriptor(&img, 65), Err(DescriptorError::BadKeepCount(65))));
    }

    #[test]
    fn dct_preserves_energy() {
        let img = random_gray(8, 8, 7, 0, 255);
        let d = dct_descriptor(&img, 64).unwrap();
        let energy: f64 = d.values().iter().map(|v| v * v).sum();
        let direct: f64 = img.data().iter().map(|&v| (v as f64).powi(2)).sum();
        assert!((energy - direct).abs() < 1e-6 * direct.max(1.0));
    }

    #[test]
    fn dct_length_is_tiles_times_keep() {
        let img = random_gray(37, 20, 1, 0, 255);
        let d = dct_descriptor(&img, 10).unwrap();
        assert_eq!(d.len(), 4 * 2 * 10);
    }

    #[test]
    fn hog_of_constant_is_zero() {
        let img = RasterImage::filled(32, 32, ColorSpace::Gray, 90);
        let d = hog_descriptor(&img, HogParams::default()).unwrap();
        assert_eq!(d.len(), 3 * 3 * 4 * 9);
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_step_votes_into_first_bin() {
        let img = RasterImage::from_fn_gray(32, 32, |x, _| if x < 16 { 20 } else { 200 });
        let params = HogParams::default();
        let d = hog_descriptor(&img, params).unwrap();
        let mut per_bin = [0.0; 9];
        for (i, v) in d.values().iter().enumerate() {
            per_bin[i % 9] += v;
        }
        assert!(per_bin[0] > 0.0);
        assert!(per_bin[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hog_rejects_bad_geometry() {
        let img = RasterImage::filled(30, 32, ColorSpace::Gray, 0);
        assert!(matches!(
            hog_descriptor(&img, HogParams::default()),
            Err(DescriptorError::GeometryMismatch(_))
        ));
        let tiny = RasterImage::filled(8, 8, ColorSpace::Gray, 0);
        assert!(hog_descriptor(&tiny, HogParams::default()).is_err());
    }

    #[test]
    fn inpainting_interpolates_columns() {
        let img = RasterImage::from_fn_gray(3, 5, |_, y| (y * 50) as u8);
        let mask = BinaryMask::from_fn(3, 5, |_, y| y != 2 && y != 3);
        let mut g = RasterImage::from_fn_gray(3, 5, |_, y| if y == 2 || y == 3 { 255 } else { (y * 50) as u8 });
        inpaint_columns(&mut g, &mask);
        assert_eq!(g, img);
        let t = texture_input(&img, Some(&mask)).unwrap();
        assert_eq!(t.dims(), (ANALYSIS_SIZE, ANALYSIS_SIZE));
    }

    proptest! {
        #[test]
        fn lbp_invariant_to_monotone_remap(seed in 0u64..500, offset in 0u8..50, scale in 1u32..3) {
            let img = random_gray(16, 16, seed, 0, 100);
            let mapped = RasterImage::from_fn_gray(16, 16, |x, y| (img.get(x, y, 0) as u32 * scale + offset as u32) as u8);
            prop_assert_eq!(lbp_descriptor(&img, 2).unwrap(), lbp_descriptor(&mapped, 2).unwrap());
        }

        #[test]
        fn texture_lengths_follow_layout(w in 16usize..64, h in 16usize..64, cell in 2usize..6, block in 1usize..3, bins in 2usize..12, keep in 1usize..=64, grid in 1usize..5) {
            let img = random_gray(w, h, (w * h) as u64, 0, 255);
            let d = dct_descriptor(&img, keep).unwrap();
            prop_assert_eq!(d.len(), (w / 8) * (h / 8) * keep);
            let l = lbp_descriptor(&img, grid).unwrap();
            prop_assert_eq!(l.len(), grid * grid * 256);
            let (cw, ch) = (w / cell * cell, h / cell * cell);
            let sub = crate::imgproc::crop(&img, 0, 0, cw, ch).unwrap();
            let params = HogParams { cell, block, bins };
            let hog = hog_descriptor(&sub, params).unwrap();
            prop_assert_eq!(hog.len(), (cw / cell - block + 1) * (ch / cell - block + 1) * block * block * bins);
        }
    }
}
