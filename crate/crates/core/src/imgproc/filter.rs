use super::{ImgError, RasterImage, Result};

/// Normalized 1D Gaussian taps of odd length `ksize`.
pub(crate) fn gaussian_kernel(ksize: usize, sigma: f64) -> Vec<f32> {
    let r = (ksize / 2) as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k.into_iter().map(|v| v as f32).collect()
}

/// Separable convolution of one float plane with replicated borders.
pub(crate) fn separable_f32(src: &[f32], w: usize, h: usize, kx: &[f32], ky: &[f32]) -> Vec<f32> {
    let rx = (kx.len() / 2) as isize;
    let ry = (ky.len() / 2) as isize;
    let mut tmp = vec![0f32; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0f32;
            for (i, &k) in kx.iter().enumerate() {
                let xx = (x as isize + i as isize - rx).clamp(0, w as isize - 1) as usize;
                acc += k * row[xx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0f32; w * h];
    for y in 0..h {
        for (i, &k) in ky.iter().enumerate() {
            let yy = (y as isize + i as isize - ry).clamp(0, h as isize - 1) as usize;
            let src_row = &tmp[yy * w..(yy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, &s) in dst_row.iter_mut().zip(src_row) {
                *d += k * s;
            }
        }
    }
    out
}

pub(crate) fn plane_f32(img: &RasterImage, c: usize) -> Vec<f32> {
    let ch = img.channels();
    img.data().iter().skip(c).step_by(ch).map(|&v| v as f32).collect()
}

fn map_planes(img: &RasterImage, f: impl Fn(&[f32]) -> Vec<f32>) -> RasterImage {
    let ch = img.channels();
    let mut out = img.clone();
    for c in 0..ch {
        let res = f(&plane_f32(img, c));
        for (i, v) in res.into_iter().enumerate() {
            out.data_mut()[i * ch + c] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

/// Gaussian smoothing per channel.
pub fn gaussian_blur(img: &RasterImage, ksize: usize, sigma: f64) -> Result<RasterImage> {
    if ksize.is_multiple_of(2) || sigma <= 0.0 {
        return Err(ImgError::InvalidParameter("gaussian kernel must be odd with sigma > 0"));
    }
    let k = gaussian_kernel(ksize, sigma);
    let (w, h) = img.dims();
    Ok(map_planes(img, |p| separable_f32(p, w, h, &k, &k)))
}

/// Mean over a `ksize` x `ksize` window per channel.
pub fn box_filter(img: &RasterImage, ksize: usize) -> Result<RasterImage> {
    if ksize.is_multiple_of(2) {
        return Err(ImgError::InvalidParameter("box kernel must be odd"));
    }
    let k = vec![1.0 / ksize as f32; ksize];
    let (w, h) = img.dims();
    Ok(map_planes(img, |p| separable_f32(p, w, h, &k, &k)))
}

/// Per-channel median over the `(2r+1)^2` replicate-padded window.
pub fn median_filter(img: &RasterImage, radius: usize) -> Result<RasterImage> {
    if radius == 0 {
        return Err(ImgError::InvalidParameter("median radius must be >= 1"));
    }
    let (w, h) = img.dims();
    let ch = img.channels();
    let r = radius as isize;
    let mut out = img.clone();
    let mut window = Vec::with_capacity((2 * radius + 1).pow(2));
    for c in 0..ch {
        for y in 0..h {
            for x in 0..w {
                window.clear();
                for dy in -r..=r {
                    for dx in -r..=r {
                        window.push(img.get_clamped(x as isize + dx, y as isize + dy, c));
                    }
                }
                let mid = (window.len() - 1) / 2;
                let (_, m, _) = window.select_nth_unstable(mid);
                out.set(x, y, c, *m);
            }
        }
    }
    Ok(out)
}
