//! Index construction and the binary container.
//!
//! Layout, all integers little-endian:
//! header `GLRX`, u32 version, 32-byte fingerprint, u32 config length and
//! config JSON; catalog block (u32 count, then label i64, author and title
//! as u32-length UTF-8, mean luma f64); descriptor block per entry (u8
//! count, then kind u8, u32-length layout JSON, u32 value count, f64
//! values); feature block per entry in the features wire format.

use std::path::Path;

use rayon::prelude::*;

use super::{describe, mean_luma, DescriptorKind, EngineError, GalleryEntry, IndexConfig, MuseumIndex, Result};
use crate::descriptors::{AuthorCatalog, CatalogEntry, DescriptorVector, Layout};
use crate::features::{extract_features, FeatureSet};
use crate::imgproc::io::load_image;
use crate::imgproc::RasterImage;
use crate::metrics::Label;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"GLRX";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Skip unreadable images with a warning instead of aborting.
    pub skip_unreadable: bool,
}

fn entry_for(meta: CatalogEntry, img: &RasterImage, cfg: &IndexConfig) -> Result<GalleryEntry> {
    Ok(GalleryEntry {
        label: meta.label,
        author: meta.author,
        title: meta.title,
        mean_luma: mean_luma(img)?,
        descriptors: describe(img, None, &cfg.descriptors)?,
        features: extract_features(img, &cfg.features)?,
    })
}

/// Index in-memory museum images. Museum images are indexed as-is, with no
/// preprocessing. Entries come out sorted by label whatever the input order.
pub fn build_index_from_images(items: Vec<(CatalogEntry, RasterImage)>, cfg: &IndexConfig) -> Result<MuseumIndex> {
    let mut items = items;
    items.sort_by_key(|(m, _)| m.label);
    for w in items.windows(2) {
        if w[0].0.label == w[1].0.label {
            return Err(EngineError::CatalogMismatch(format!("label {} appears twice", w[0].0.label)));
        }
    }
    if let Some((m, _)) = items.iter().find(|(m, _)| m.label < 0) {
        return Err(EngineError::CatalogMismatch(format!("negative label {}", m.label)));
    }
    let entries = items
        .into_par_iter()
        .map(|(meta, img)| entry_for(meta, &img, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(MuseumIndex {
        entries,
        config: cfg.clone(),
        fingerprint: cfg.fingerprint(),
    })
}

/// Trailing decimal digits of the file stem, e.g. `bbdd_00012.png` → 12.
pub(crate) fn label_from_path(path: &Path) -> Option<Label> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    digits.chars().rev().collect::<String>().parse().ok()
}

pub(crate) fn is_image_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
}

/// Index every image in `museum_dir`, labelled by the trailing digits of
/// its file name and described by the matching catalog row.
pub fn build_index(museum_dir: &Path, catalog: &Path, cfg: &IndexConfig, opts: &BuildOptions) -> Result<MuseumIndex> {
    let catalog = AuthorCatalog::load(catalog)?;
    let mut paths: Vec<_> = std::fs::read_dir(museum_dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| is_image_file(p));
    paths.sort();
    let mut jobs = Vec::with_capacity(paths.len());
    for p in paths {
        let label = label_from_path(&p)
            .ok_or_else(|| EngineError::CatalogMismatch(format!("{} carries no numeric label", p.display())))?;
        let meta = catalog
            .get(label)
            .cloned()
            .ok_or_else(|| EngineError::CatalogMismatch(format!("{} has no catalog row for label {label}", p.display())))?;
        jobs.push((meta, p));
    }
    let loaded: Vec<Option<(CatalogEntry, RasterImage)>> = jobs
        .into_par_iter()
        .map(|(meta, p)| match load_image(&p) {
            Ok(img) => Ok(Some((meta, img))),
            Err(e) if opts.skip_unreadable => {
                log::warn!("skipping {}: {e}", p.display());
                Ok(None)
            }
            Err(e) => Err(EngineError::UnreadableImage {
                path: p.clone(),
                reason: e.to_string(),
            }),
        })
        .collect::<Result<_>>()?;
    build_index_from_images(loaded.into_iter().flatten().collect(), cfg)
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

fn kind_code(k: DescriptorKind) -> u8 {
    match k {
        DescriptorKind::Color => 0,
        DescriptorKind::Texture => 1,
        DescriptorKind::Text => 2,
    }
}

fn kind_from_code(c: u8) -> Result<DescriptorKind> {
    match c {
        0 => Ok(DescriptorKind::Color),
        1 => Ok(DescriptorKind::Texture),
        2 => Ok(DescriptorKind::Text),
        _ => Err(EngineError::CorruptIndex(format!("unknown descriptor kind {c}"))),
    }
}

pub(crate) fn encode(index: &MuseumIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, FORMAT_VERSION);
    out.extend_from_slice(&index.fingerprint);
    put_str(&mut out, &serde_json::to_string(&index.config).expect("config serializes"));
    put_u32(&mut out, index.entries.len() as u32);
    for e in &index.entries {
        out.extend_from_slice(&e.label.to_le_bytes());
        put_str(&mut out, &e.author);
        put_str(&mut out, &e.title);
        out.extend_from_slice(&e.mean_luma.to_le_bytes());
    }
    for e in &index.entries {
        out.push(e.descriptors.len() as u8);
        for (k, v) in &e.descriptors {
            out.push(kind_code(*k));
            put_str(&mut out, &serde_json::to_string(v.layout()).expect("layout serializes"));
            put_u32(&mut out, v.len() as u32);
            for x in v.values() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    for e in &index.entries {
        e.features.write_to(&mut out);
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| EngineError::CorruptIndex("unexpected end of file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes")))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| EngineError::CorruptIndex("invalid UTF-8".into()))
    }
}

/// Decode an index container. `active` is the caller's configuration; a
/// fingerprint mismatch against it is refused unless `force` is set.
pub(crate) fn decode(buf: &[u8], active: Option<&IndexConfig>, force: bool) -> Result<MuseumIndex> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(EngineError::CorruptIndex("bad magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(EngineError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let fingerprint: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
    let config: IndexConfig = serde_json::from_str(&r.string()?)
        .map_err(|e| EngineError::CorruptIndex(format!("config block: {e}")))?;
    if config.fingerprint() != fingerprint {
        return Err(EngineError::CorruptIndex("fingerprint does not match stored config".into()));
    }
    if let Some(a) = active {
        if a.fingerprint() != fingerprint && !force {
            return Err(EngineError::FingerprintMismatch);
        }
    }
    let n = r.u32()? as usize;
    let mut entries = Vec::with_capacity(n.min(1 << 16));
    for _ in 0..n {
        let label = r.i64()?;
        let author = r.string()?;
        let title = r.string()?;
        let mean_luma = r.f64()?;
        entries.push(GalleryEntry {
            label,
            author,
            title,
            mean_luma,
            descriptors: Default::default(),
            features: FeatureSet::default(),
        });
    }
    for e in entries.iter_mut() {
        let count = r.u8()?;
        for _ in 0..count {
            let kind = kind_from_code(r.u8()?)?;
            let layout: Layout = serde_json::from_str(&r.string()?)
                .map_err(|e| EngineError::CorruptIndex(format!("layout: {e}")))?;
            let len = r.u32()? as usize;
            let raw = r.take(len.checked_mul(8).ok_or_else(|| EngineError::CorruptIndex("length overflow".into()))?)?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
                .collect();
            let v = DescriptorVector::new(values, layout).map_err(|e| EngineError::CorruptIndex(e.to_string()))?;
            e.descriptors.insert(kind, v);
        }
    }
    for e in entries.iter_mut() {
        let (fs, used) = FeatureSet::read_from(&buf[r.pos..]).map_err(|e| EngineError::CorruptIndex(e.to_string()))?;
        r.pos += used;
        e.features = fs;
    }
    if r.pos != buf.len() {
        return Err(EngineError::CorruptIndex("trailing bytes".into()));
    }
    if entries.windows(2).any(|w| w[0].label >= w[1].label) {
        return Err(EngineError::CorruptIndex("entries are not sorted by unique label".into()));
    }
    Ok(MuseumIndex {
        entries,
        config,
        fingerprint,
    })
}

pub fn save_index(index: &MuseumIndex, path: &Path) -> Result<()> {
    std::fs::write(path, encode(index))?;
    Ok(())
}

pub fn load_index(path: &Path, active: Option<&IndexConfig>, force: bool) -> Result<MuseumIndex> {
    decode(&std::fs::read(path)?, active, force)
}
