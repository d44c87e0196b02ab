//! Deterministic synthetic museum and query scenes.
//!
//! Museum paintings come in palette families: members share colors and
//! color proportions but arrange them differently, so global color
//! statistics barely separate them while spatial layout does. Query scenes
//! hang one or two paintings on a light wall and optionally add text strips,
//! impulse noise, hue shifts, rotation and paintings absent from the museum.

mod font;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::descriptors::{AuthorCatalog, CatalogEntry};
use crate::imgproc::color::{hsv_to_rgb, rgb_to_hsv};
use crate::imgproc::{crop, resize_bilinear, rotate, rotated_extent, BinaryMask, ColorSpace, RasterImage};
use crate::metrics::{BBox, Label, UNKNOWN_LABEL};

const AUTHORS: [&str; 15] = [
    "CEZANNE",
    "MONET",
    "RENOIR",
    "DEGAS",
    "MANET",
    "SEURAT",
    "GAUGUIN",
    "MATISSE",
    "KLIMT",
    "MUNCH",
    "GOYA",
    "TURNER",
    "VERMEER",
    "REMBRANDT",
    "KANDINSKY",
];

const FAMILY_SIZE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// One clean painting per scene.
    Ds1,
    /// Up to two paintings, each carrying a semi-transparent text strip.
    Ds2,
    /// As `Ds2`, with impulse noise and hue shifts on a random subset.
    Ds3,
    /// As `Ds3`, rotated by up to 30° and with paintings absent from the museum.
    Ds4,
}

impl Profile {
    pub const ALL: [Profile; 4] = [Profile::Ds1, Profile::Ds2, Profile::Ds3, Profile::Ds4];

    fn index(self) -> u64 {
        match self {
            Profile::Ds1 => 1,
            Profile::Ds2 => 2,
            Profile::Ds3 => 3,
            Profile::Ds4 => 4,
        }
    }

    pub fn has_text(self) -> bool {
        self != Profile::Ds1
    }

    pub fn has_corruption(self) -> bool {
        matches!(self, Profile::Ds3 | Profile::Ds4)
    }

    pub fn has_rotation(self) -> bool {
        self == Profile::Ds4
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ds{}", self.index())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ds1" => Ok(Profile::Ds1),
            "ds2" => Ok(Profile::Ds2),
            "ds3" => Ok(Profile::Ds3),
            "ds4" => Ok(Profile::Ds4),
            other => Err(format!("unknown profile `{other}` (expected ds1, ds2, ds3 or ds4)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthPainting {
    /// Museum label, or `UNKNOWN_LABEL` for paintings outside the museum.
    pub label: Label,
    pub author: String,
    pub title: String,
    pub image: RasterImage,
}

/// One painting as hung in a scene.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacedPainting {
    pub label: Label,
    pub author: String,
    /// Painting bounds in scene coordinates (axis-aligned hull when rotated).
    pub bounds: BBox,
    /// Text strip in scene coordinates (axis-aligned hull when rotated).
    pub text_box: Option<BBox>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthScene {
    pub name: String,
    pub image: RasterImage,
    /// Pixels covered by a painting.
    pub mask: BinaryMask,
    /// Left to right.
    pub paintings: Vec<PlacedPainting>,
    /// Content rotation in degrees, screen counter-clockwise.
    pub angle: f64,
    pub noisy: bool,
    pub hue_shifted: bool,
}

impl SynthScene {
    /// OCR sidecar text: one author line per painting, left to right.
    pub fn ocr_text(&self) -> Option<String> {
        if self.paintings.iter().all(|p| p.text_box.is_none()) {
            return None;
        }
        let mut s = String::new();
        for p in &self.paintings {
            s.push_str(&p.author);
            s.push('\n');
        }
        Some(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneOptions {
    pub count: usize,
    /// Probability that a ds3/ds4 scene receives impulse noise.
    pub noise_probability: f64,
    pub noise_density: f64,
    /// Probability that a ds3/ds4 scene receives a hue shift.
    pub hue_probability: f64,
    /// Probability that a ds4 painting comes from outside the museum.
    pub unknown_probability: f64,
    pub max_angle: f64,
}

impl Default for SceneOptions {
    fn default() -> Self {
        Self {
            count: 30,
            noise_probability: 0.5,
            noise_density: 0.1,
            hue_probability: 0.5,
            unknown_probability: 0.2,
            max_angle: 30.0,
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Clone, Debug)]
struct Family {
    palette: Vec<[f64; 3]>,
    rows: usize,
    cols: usize,
    /// Palette index per cell before permutation; fixes color proportions.
    cells: Vec<usize>,
}

fn random_family(rng: &mut ChaCha8Rng) -> Family {
    let n = 5;
    let base: f64 = rng.random_range(0.0..360.0);
    let palette = (0..n)
        .map(|i| {
            let h = (base + i as f64 * rng.random_range(40.0..90.0)) % 360.0;
            let s = rng.random_range(0.35..0.95);
            let v = rng.random_range(0.3..0.95);
            let [r, g, b] = hsv_to_rgb([(h / 360.0 * 255.0) as u8, (s * 255.0) as u8, (v * 255.0) as u8]);
            [r as f64, g as f64, b as f64]
        })
        .collect();
    let (rows, cols) = [(3, 4), (4, 3), (4, 4), (3, 3)][rng.random_range(0..4)];
    let cells = (0..rows * cols).map(|i| i % n).collect();
    Family { palette, rows, cols, cells }
}

fn clamp8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Bilinearly interpolated lattice of uniform values in [-1, 1].
struct ValueNoise {
    cols: usize,
    cell: f64,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(w: usize, h: usize, cell: f64, rng: &mut ChaCha8Rng) -> Self {
        let cols = (w as f64 / cell) as usize + 2;
        let rows = (h as f64 / cell) as usize + 2;
        let lattice = (0..cols * rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self { cols, cell, lattice }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        let (fx, fy) = (x as f64 / self.cell, y as f64 / self.cell);
        let (ix, iy) = (fx as usize, fy as usize);
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        let v = |cx: usize, cy: usize| self.lattice[cy * self.cols + cx];
        let top = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
        let bot = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bot * ty
    }
}

/// Textured mosaic of gradient-shaded cells plus small shapes, inside a dark frame.
fn render_painting(family: &Family, rng: &mut ChaCha8Rng) -> RasterImage {
    let w = rng.random_range(200..=280usize);
    let h = rng.random_range(170..=260usize);
    let mut cells = family.cells.clone();
    cells.shuffle(rng);
    let shading: Vec<(f64, f64)> = (0..cells.len())
        .map(|_| (rng.random_range(-18.0..18.0), rng.random_range(-18.0..18.0)))
        .collect();
    let mut px = vec![[0.0f64; 3]; w * h];
    let (cw, ch) = (w as f64 / family.cols as f64, h as f64 / family.rows as f64);
    for y in 0..h {
        for x in 0..w {
            let cx = ((x as f64 / cw) as usize).min(family.cols - 1);
            let cy = ((y as f64 / ch) as usize).min(family.rows - 1);
            let i = cy * family.cols + cx;
            let (u, v) = (x as f64 / cw - cx as f64 - 0.5, y as f64 / ch - cy as f64 - 0.5);
            let shade = shading[i].0 * u + shading[i].1 * v;
            let c = family.palette[cells[i]];
            px[y * w + x] = [c[0] + shade, c[1] + shade, c[2] + shade];
        }
    }
    let d = w.min(h) as f64;
    for _ in 0..rng.random_range(12..=18) {
        let c = family.palette[rng.random_range(0..family.palette.len())];
        let tone = rng.random_range(0.55..1.2);
        let color = [c[0] * tone, c[1] * tone, c[2] * tone];
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let rx = rng.random_range(0.04..0.1) * d;
        let ry = rng.random_range(0.04..0.1) * d;
        let round = rng.random_bool(0.5);
        let (x0, x1) = ((cx - rx).max(0.0) as usize, ((cx + rx) as usize).min(w - 1));
        let (y0, y1) = ((cy - ry).max(0.0) as usize, ((cy + ry) as usize).min(h - 1));
        for y in y0..=y1 {
            for x in x0..=x1 {
                let (u, v) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
                if !round || u * u + v * v <= 1.0 {
                    px[y * w + x] = color;
                }
            }
        }
    }
    let fine = ValueNoise::new(w, h, 6.0, rng);
    let coarse = ValueNoise::new(w, h, 17.0, rng);
    for y in 0..h {
        for x in 0..w {
            let g = 1.0 + 0.14 * fine.at(x, y) + 0.1 * coarse.at(x, y);
            for v in px[y * w + x].iter_mut() {
                *v *= g;
            }
        }
    }
    let frame = (0.045 * d).max(6.0) as usize;
    let frame_color = [rng.random_range(25.0..45.0), rng.random_range(20.0..35.0), rng.random_range(15.0..30.0)];
    for y in 0..h {
        for x in 0..w {
            if x < frame || y < frame || x >= w - frame || y >= h - frame {
                px[y * w + x] = frame_color;
            }
        }
    }
    let data = px.iter().flat_map(|p| p.iter().map(|&v| clamp8(v))).collect();
    RasterImage::from_vec(w, h, ColorSpace::Rgb, data).expect("painting is non-empty")
}

fn paintings_from(seed: u64, stream: u64, n: usize, first_label: Option<Label>) -> Vec<SynthPainting> {
    let mut rng = rng_for(seed, stream);
    let families: Vec<Family> = (0..n.div_ceil(FAMILY_SIZE)).map(|_| random_family(&mut rng)).collect();
    let mut authors: Vec<&str> = AUTHORS.to_vec();
    authors.shuffle(&mut rng);
    (0..n)
        .map(|i| {
            let image = render_painting(&families[i / FAMILY_SIZE], &mut rng);
            let author = authors[rng.random_range(0..authors.len())].to_string();
            let label = first_label.map_or(UNKNOWN_LABEL, |f| f + i as Label);
            SynthPainting {
                label,
                title: format!("Study {}", i + 1),
                author,
                image,
            }
        })
        .collect()
}

/// `n` museum paintings labelled `0..n`, depending only on `seed`.
pub fn museum(seed: u64, n: usize) -> Vec<SynthPainting> {
    paintings_from(seed, 0, n, Some(0))
}

/// Paintings in the museum's style that are not part of it.
pub fn outsiders(seed: u64, n: usize) -> Vec<SynthPainting> {
    paintings_from(seed, 1, n, None)
}

pub fn catalog(paintings: &[SynthPainting]) -> AuthorCatalog {
    let entries = paintings
        .iter()
        .map(|p| CatalogEntry {
            label: p.label,
            author: p.author.clone(),
            title: p.title.clone(),
        })
        .collect();
    AuthorCatalog::new(entries).expect("generated labels are unique")
}

/// Blend a text strip into `img` and print `text` on it. Returns the strip.
fn draw_text_strip(img: &mut RasterImage, text: &str, rng: &mut ChaCha8Rng) -> BBox {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let sw = rng.random_range(0.6..0.7) * w;
    let sh = (sw / rng.random_range(3.6..4.4)).min(0.3 * h);
    let cx = w / 2.0 + rng.random_range(-0.02..0.02) * w;
    let cy = if rng.random_bool(0.5) { 0.2 } else { 0.8 } * h + rng.random_range(-0.02..0.02) * h;
    let (x1, y1) = ((cx - sw / 2.0).round() as i64, (cy - sh / 2.0).round() as i64);
    let (x2, y2) = ((cx + sw / 2.0).round() as i64, (cy + sh / 2.0).round() as i64);
    let light = rng.random_bool(0.5);
    let (fill, ink) = if light { (238.0, 25.0) } else { (22.0, 235.0) };
    let alpha = rng.random_range(0.72..0.85);
    for y in y1..y2 {
        for x in x1..x2 {
            for c in 0..3 {
                let v = img.get(x as usize, y as usize, c) as f64;
                img.set(x as usize, y as usize, c, clamp8(alpha * fill + (1.0 - alpha) * v));
            }
        }
    }
    let bw = (x2 - x1) as usize;
    let bh = (y2 - y1) as usize;
    let cols = text.chars().count() * font::ADVANCE - 1;
    let g = ((bh as f64 * 0.55 / font::GLYPH_H as f64) as usize)
        .min((bw as f64 * 0.9 / cols as f64) as usize)
        .max(1);
    let (tw, th) = (cols * g, font::GLYPH_H * g);
    let ox = x1 as usize + bw.saturating_sub(tw) / 2;
    let oy = y1 as usize + bh.saturating_sub(th) / 2;
    for (i, ch) in text.chars().enumerate() {
        for row in 0..font::GLYPH_H {
            for col in 0..font::GLYPH_W {
                if !font::inked(ch, col, row) {
                    continue;
                }
                for dy in 0..g {
                    for dx in 0..g {
                        let x = ox + (i * font::ADVANCE + col) * g + dx;
                        let y = oy + row * g + dy;
                        if x < x2 as usize && y < y2 as usize {
                            for c in 0..3 {
                                img.set(x, y, c, ink as u8);
                            }
                        }
                    }
                }
            }
        }
    }
    BBox::new(x1, y1, x2, y2).expect("strip has area")
}

/// Axis-aligned hull of `b` after the scene's rotate-and-crop transform.
fn transform_box(b: BBox, big: (usize, usize), angle: f64, offset: (usize, usize), scene: (usize, usize)) -> Option<BBox> {
    if angle == 0.0 {
        return Some(b.translate(-(offset.0 as i64), -(offset.1 as i64)));
    }
    let frame = crate::imgproc::RotationFrame::new(big, angle);
    let corners = [(b.x1, b.y1), (b.x2, b.y1), (b.x1, b.y2), (b.x2, b.y2)];
    let pts: Vec<(f64, f64)> = corners
        .iter()
        .map(|&(x, y)| {
            let (dx, dy) = frame.to_dst(x as f64 - 0.5, y as f64 - 0.5);
            (dx + 0.5 - offset.0 as f64, dy + 0.5 - offset.1 as f64)
        })
        .collect();
    let lo = |f: fn(&(f64, f64)) -> f64| pts.iter().map(f).fold(f64::INFINITY, f64::min);
    let hi = |f: fn(&(f64, f64)) -> f64| pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let x1 = lo(|p| p.0).round().max(0.0) as i64;
    let y1 = lo(|p| p.1).round().max(0.0) as i64;
    let x2 = (hi(|p| p.0).round() as i64).min(scene.0 as i64);
    let y2 = (hi(|p| p.1).round() as i64).min(scene.1 as i64);
    BBox::new(x1, y1, x2, y2).ok()
}

fn salt_and_pepper(img: &mut RasterImage, density: f64, rng: &mut ChaCha8Rng) {
    for y in 0..img.height() {
        for x in 0..img.width() {
            if rng.random_bool(density) {
                let v = if rng.random_bool(0.5) { 255 } else { 0 };
                for c in 0..3 {
                    img.set(x, y, c, v);
                }
            }
        }
    }
}

fn shift_hue(img: &mut RasterImage, shift: u8) {
    for y in 0..img.height() {
        for x in 0..img.width() {
            let p = img.pixel(x, y);
            let [h, s, v] = rgb_to_hsv([p[0], p[1], p[2]]);
            let rgb = hsv_to_rgb([h.wrapping_add(shift), s, v]);
            for (c, &val) in rgb.iter().enumerate() {
                img.set(x, y, c, val);
            }
        }
    }
}

struct Hung {
    image: RasterImage,
    label: Label,
    author: String,
    strip: Option<BBox>,
}

fn scene(
    index: usize,
    profile: Profile,
    museum: &[SynthPainting],
    outsiders: &[SynthPainting],
    opts: &SceneOptions,
    rng: &mut ChaCha8Rng,
) -> SynthScene {
    let count = if profile == Profile::Ds1 || rng.random_bool(0.5) { 1 } else { 2 };
    let mut picks: Vec<&SynthPainting> = Vec::new();
    while picks.len() < count {
        let p = if profile == Profile::Ds4 && !outsiders.is_empty() && rng.random_bool(opts.unknown_probability) {
            &outsiders[rng.random_range(0..outsiders.len())]
        } else {
            &museum[rng.random_range(0..museum.len())]
        };
        if !picks.iter().any(|q| std::ptr::eq(*q, p)) {
            picks.push(p);
        }
    }
    let mut hung: Vec<Hung> = picks
        .iter()
        .map(|p| {
            let s = rng.random_range(0.9..1.1);
            let (w, h) = p.image.dims();
            let w2 = ((w as f64 * s).round() as usize).max(8);
            let h2 = ((h as f64 * s).round() as usize).max(8);
            let mut image = resize_bilinear(&p.image, w2, h2).expect("positive size");
            let strip = profile.has_text().then(|| draw_text_strip(&mut image, &p.author, rng));
            Hung {
                image,
                label: p.label,
                author: p.author.clone(),
                strip,
            }
        })
        .collect();
    if hung.len() == 2 && rng.random_bool(0.5) {
        hung.swap(0, 1);
    }

    let gap = if hung.len() == 2 {
        (rng.random_range(0.12..0.25) * (hung[0].image.width() + hung[1].image.width()) as f64 / 2.0) as usize
    } else {
        0
    };
    let max_h = hung.iter().map(|p| p.image.height()).max().unwrap_or(1);
    let offsets_y: Vec<usize> = hung.iter().map(|p| rng.random_range(0..=(max_h - p.image.height()))).collect();
    let group_w: usize = hung.iter().map(|p| p.image.width()).sum::<usize>() + gap;
    let group_h = max_h;

    let angle = if profile.has_rotation() {
        let mut a = rng.random_range(-opts.max_angle..=opts.max_angle);
        if a.abs() < 1.0 {
            a = a.signum() * 1.0 + a;
        }
        (a * 100.0).round() / 100.0
    } else {
        0.0
    };
    let (ew, eh) = rotated_extent(group_w, group_h, angle);
    let sw = (ew as f64 * rng.random_range(1.3..1.5)) as usize;
    let sh = (eh as f64 * rng.random_range(1.3..1.5)) as usize;
    let (bw, bh) = if angle == 0.0 {
        (sw, sh)
    } else {
        let (w, h) = rotated_extent(sw, sh, angle);
        (w + 8, h + 8)
    };

    let wall = [rng.random_range(185.0..230.0), rng.random_range(180.0..225.0), rng.random_range(170.0..220.0)];
    let grad = rng.random_range(-12.0..12.0);
    let mut big = RasterImage::from_fn_rgb(bw, bh, |_, y| {
        let t = grad * (y as f64 / bh as f64 - 0.5);
        [clamp8(wall[0] + t), clamp8(wall[1] + t), clamp8(wall[2] + t)]
    });
    let mut big_mask = BinaryMask::new(bw, bh);
    let gx = (bw - group_w) / 2;
    let gy = (bh - group_h) / 2;
    let mut placed_big = Vec::new();
    let mut x = gx;
    for (p, &oy) in hung.iter().zip(&offsets_y) {
        let (px, py) = (x, gy + oy);
        for y in 0..p.image.height() {
            for xx in 0..p.image.width() {
                for c in 0..3 {
                    big.set(px + xx, py + y, c, p.image.get(xx, y, c));
                }
                big_mask.set(px + xx, py + y, true);
            }
        }
        let bounds = BBox::new(
            px as i64,
            py as i64,
            (px + p.image.width()) as i64,
            (py + p.image.height()) as i64,
        )
        .expect("painting has area");
        let strip = p.strip.map(|s| s.translate(px as i64, py as i64));
        placed_big.push((bounds, strip));
        x += p.image.width() + gap;
    }

    let (image, mask, offset) = if angle == 0.0 {
        (big, big_mask, (0, 0))
    } else {
        let (rot, _, _) = rotate(&big, angle, 0);
        let (rot_mask, _, _) = rotate(&big_mask.to_gray(), angle, 0);
        let (rw, rh) = rot.dims();
        let (ox, oy) = ((rw - sw) / 2, (rh - sh) / 2);
        let img = crop(&rot, ox, oy, ox + sw, oy + sh).expect("crop inside rotated canvas");
        let m = crop(&rot_mask, ox, oy, ox + sw, oy + sh).expect("crop inside rotated canvas");
        let m = BinaryMask::from_fn(sw, sh, |x, y| m.get(x, y, 0) >= 128);
        (img, m, (ox, oy))
    };
    let mut image = image;
    // Exposure and white balance of the photograph.
    let gain = rng.random_range(0.94..1.04);
    let cast: [f64; 3] = std::array::from_fn(|_| gain * rng.random_range(0.95..1.05));
    for px in image.data_mut().chunks_exact_mut(3) {
        for (v, c) in px.iter_mut().zip(cast) {
            *v = clamp8(*v as f64 * c);
        }
    }
    let mut hue_shifted = false;
    let mut noisy = false;
    if profile.has_corruption() {
        if rng.random_bool(opts.hue_probability) {
            let shift = rng.random_range(14..=40u8);
            shift_hue(&mut image, if rng.random_bool(0.5) { shift } else { 0u8.wrapping_sub(shift) });
            hue_shifted = true;
        }
        if rng.random_bool(opts.noise_probability) {
            salt_and_pepper(&mut image, opts.noise_density, rng);
            noisy = true;
        }
    }

    let paintings = hung
        .iter()
        .zip(&placed_big)
        .map(|(p, &(bounds, strip))| PlacedPainting {
            label: p.label,
            author: p.author.clone(),
            bounds: transform_box(bounds, (bw, bh), angle, offset, (sw, sh)).expect("painting stays in view"),
            text_box: strip.and_then(|s| transform_box(s, (bw, bh), angle, offset, (sw, sh))),
        })
        .collect();
    SynthScene {
        name: format!("qsd_{index:05}"),
        image,
        mask,
        paintings,
        angle,
        noisy,
        hue_shifted,
    }
}

/// Query scenes for `profile`; deterministic in (`museum`, `seed`, `opts`).
pub fn scenes(museum: &[SynthPainting], profile: Profile, seed: u64, opts: &SceneOptions) -> Vec<SynthScene> {
    let others = if profile == Profile::Ds4 {
        outsiders(seed, 10)
    } else {
        Vec::new()
    };
    let mut rng = rng_for(seed, 16 + profile.index());
    (0..opts.count)
        .map(|i| scene(i, profile, museum, &others, opts, &mut rng))
        .collect()
}
