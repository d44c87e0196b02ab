//! PNG/JPEG reading and writing through the `image` crate.

use std::path::Path;

use thiserror::Error;

use super::{BinaryMask, ColorSpace, RasterImage};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot decode {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("cannot encode {path}: {source}")]
    Encode {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("{0} is empty")]
    Empty(String),
    #[error("only gray and RGB rasters can be written, got {0:?}")]
    UnsupportedSpace(ColorSpace),
}

/// Load as RGB, or as gray when the file is single-channel.
pub fn load_image(path: &Path) -> Result<RasterImage, IoError> {
    let dynimg = image::open(path).map_err(|source| IoError::Decode {
        path: path.display().to_string(),
        source,
    })?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    let empty = || IoError::Empty(path.display().to_string());
    match dynimg.color().channel_count() {
        1 | 2 => RasterImage::from_vec(w, h, ColorSpace::Gray, dynimg.into_luma8().into_raw()).map_err(|_| empty()),
        _ => RasterImage::from_vec(w, h, ColorSpace::Rgb, dynimg.into_rgb8().into_raw()).map_err(|_| empty()),
    }
}

/// Write a gray or RGB raster; the format follows the file extension.
pub fn save_image(img: &RasterImage, path: &Path) -> Result<(), IoError> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let res = match img.space() {
        ColorSpace::Gray => image::GrayImage::from_raw(w, h, img.data().to_vec())
            .expect("buffer matches dimensions")
            .save(path),
        ColorSpace::Rgb => image::RgbImage::from_raw(w, h, img.data().to_vec())
            .expect("buffer matches dimensions")
            .save(path),
        other => return Err(IoError::UnsupportedSpace(other)),
    };
    res.map_err(|source| IoError::Encode {
        path: path.display().to_string(),
        source,
    })
}

/// Masks are stored as 0/255 grayscale PNG.
pub fn save_mask(mask: &BinaryMask, path: &Path) -> Result<(), IoError> {
    save_image(&mask.to_gray(), path)
}

/// Any non-zero sample reads back as foreground.
pub fn load_mask(path: &Path) -> Result<BinaryMask, IoError> {
    let img = load_image(path)?;
    let gray = if img.channels() == 1 {
        img
    } else {
        super::convert_color(&img, ColorSpace::Gray).expect("rgb converts to gray")
    };
    Ok(BinaryMask::from_gray(&gray).expect("gray input"))
}
