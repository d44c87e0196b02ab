use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use super::{DescriptorError, Result};
use crate::imgproc::{convert_color, BinaryMask, ColorSpace, RasterImage};
use crate::metrics::Label;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("text recognition failed: {0}")]
pub struct OcrError(pub String);

/// Text recognizer applied to a binarized text-box crop (letters black on
/// white). Implementations must be deterministic and reentrant.
pub trait OcrPort: Send + Sync {
    fn recognize(&self, binarized: &RasterImage) -> std::result::Result<String, OcrError>;
}

/// Recognizer that always answers with the same text.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FixedOcr(pub String);

impl OcrPort for FixedOcr {
    fn recognize(&self, _: &RasterImage) -> std::result::Result<String, OcrError> {
        Ok(self.0.clone())
    }
}

/// Recognized text stored next to a query image as `<stem>.ocr.txt`,
/// one line per painting in left-to-right order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SidecarOcr {
    lines: Vec<String>,
}

impl SidecarOcr {
    pub fn sidecar_path(image: &Path) -> std::path::PathBuf {
        let stem = image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        image.with_file_name(format!("{stem}.ocr.txt"))
    }

    /// Reads the sidecar of `image`, or `None` when there is none.
    pub fn load(image: &Path) -> std::io::Result<Option<Self>> {
        let path = Self::sidecar_path(image);
        match std::fs::read_to_string(&path) {
            Ok(s) => Ok(Some(Self::from_text(&s))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn from_text(s: &str) -> Self {
        Self {
            lines: s.lines().map(|l| l.trim().to_string()).collect(),
        }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    /// Recognizer for the painting at position `index`; missing lines read
    /// as empty text.
    pub fn painting(&self, index: usize) -> FixedOcr {
        FixedOcr(self.lines.get(index).cloned().unwrap_or_default())
    }
}

/// Otsu threshold `t`: class 0 is `v <= t`. Returns `None` for constant input.
pub fn otsu_threshold(gray: &RasterImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &v in gray.data() {
        hist[v as usize] += 1;
    }
    otsu_from_histogram(&hist)
}

/// Otsu threshold over a 256-bin level histogram; `None` unless at least
/// two levels are populated.
pub(crate) fn otsu_from_histogram(hist: &[u64; 256]) -> Option<u8> {
    let total: f64 = hist.iter().map(|&c| c as f64).sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best: Option<(f64, u8)> = None;
    for t in 0..255 {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if best.is_none_or(|(b, _)| between > b) {
            best = Some((between, t as u8));
        }
    }
    best.map(|(_, t)| t)
}

/// Otsu binarization with the minority class taken as foreground; a
/// constant crop has no foreground.
pub fn binarize_text(img: &RasterImage) -> Result<BinaryMask> {
    let g = convert_color(img, ColorSpace::Gray)?;
    let (w, h) = g.dims();
    let Some(t) = otsu_threshold(&g) else {
        return Ok(BinaryMask::new(w, h));
    };
    let bright = g.data().iter().filter(|&&v| v > t).count();
    let bright_is_fg = bright * 2 <= w * h;
    Ok(BinaryMask::from_fn(w, h, |x, y| (g.get(x, y, 0) > t) == bright_is_fg))
}

/// Binarize a text-box crop and pass it to `ocr`; returns the trimmed text.
pub fn read_text_descriptor(box_image: &RasterImage, ocr: &dyn OcrPort) -> Result<String> {
    let fg = binarize_text(box_image)?;
    if fg.is_empty() {
        return Ok(String::new());
    }
    let page = RasterImage::from_fn_gray(fg.width(), fg.height(), |x, y| if fg.get(x, y) { 0 } else { 255 });
    Ok(ocr.recognize(&page)?.trim().to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub label: Label,
    pub author: String,
    pub title: String,
}

/// Museum labels with author and title; labels are unique and authors
/// non-empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuthorCatalog {
    entries: Vec<CatalogEntry>,
}

impl AuthorCatalog {
    pub fn new(mut entries: Vec<CatalogEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.label);
        for pair in entries.windows(2) {
            if pair[0].label == pair[1].label {
                return Err(DescriptorError::Catalog(format!("duplicate label {}", pair[0].label)));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.label < 0) {
            return Err(DescriptorError::Catalog(format!("negative label {}", e.label)));
        }
        if let Some(e) = entries.iter().find(|e| e.author.trim().is_empty()) {
            return Err(DescriptorError::Catalog(format!("label {} has no author", e.label)));
        }
        Ok(Self { entries })
    }

    /// Parses `label<TAB>author<TAB>title` rows; blank lines are skipped.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.splitn(3, '\t');
            let label = cols.next().unwrap_or("").trim();
            let label: Label = label
                .parse()
                .map_err(|_| DescriptorError::Catalog(format!("line {}: bad label {label:?}", n + 1)))?;
            let author = cols
                .next()
                .ok_or_else(|| DescriptorError::Catalog(format!("line {}: missing author", n + 1)))?;
            let title = cols.next().unwrap_or("");
            entries.push(CatalogEntry {
                label,
                author: author.trim().to_string(),
                title: title.trim().to_string(),
            });
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DescriptorError::Catalog(format!("{}: {e}", path.display())))?;
        Self::parse_tsv(&text)
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\t{}\n", e.label, e.author, e.title))
            .collect()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, label: Label) -> Option<&CatalogEntry> {
        self.entries
            .binary_search_by_key(&label, |e| e.label)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuthorMatch {
    pub labels: BTreeSet<Label>,
    /// Levenshtein distance over the longer name length, in [0, 1].
    pub distance: f64,
}

fn fold_name(s: &str) -> String {
    let kept: String = s
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Closest catalog author to `text`. Labels of every author at the best
/// distance are returned together.
pub fn match_author(text: &str, catalog: &AuthorCatalog) -> AuthorMatch {
    let query = fold_name(text);
    let none = AuthorMatch {
        labels: BTreeSet::new(),
        distance: 1.0,
    };
    if query.is_empty() {
        return none;
    }
    let mut by_author: BTreeMap<String, BTreeSet<Label>> = BTreeMap::new();
    for e in catalog.entries() {
        by_author.entry(fold_name(&e.author)).or_default().insert(e.label);
    }
    let qlen = query.chars().count();
    let mut best = none;
    for (name, labels) in by_author {
        let d = strsim::levenshtein(&query, &name) as f64 / qlen.max(name.chars().count()) as f64;
        if d < best.distance || best.labels.is_empty() {
            best = AuthorMatch { labels, distance: d };
        } else if d == best.distance {
            best.labels.extend(labels);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> AuthorCatalog {
        AuthorCatalog::parse_tsv("0\tMonet\tWater Lilies\n1\tManet\tOlympia\n2\tMonet\tHaystacks\n3\tGoya\tSaturn\n").unwrap()
    }

    #[test]
    fn exact_author_returns_all_its_labels() {
        let m = match_author("Monet", &catalog());
        assert_eq!(m.labels, BTreeSet::from([0, 2]));
        assert_eq!(m.distance, 0.0);
    }

    #[test]
    fn one_edit_typo_still_matches() {
        let c = AuthorCatalog::parse_tsv("0\tMonet\ta\n1\tRembrandt\tb\n2\tGoya\tc\n").unwrap();
        let m = match_author("M0net", &c);
        assert_eq!(m.labels, BTreeSet::from([0]));
        assert!((m.distance - 0.2).abs() < 1e-12);
    }

    #[test]
    fn case_and_punctuation_are_ignored() {
        let m = match_author("  goya!! ", &catalog());
        assert_eq!(m.labels, BTreeSet::from([3]));
        assert_eq!(m.distance, 0.0);
    }

    #[test]
    fn empty_text_matches_nothing() {
        let m = match_author("", &catalog());
        assert!(m.labels.is_empty());
        assert_eq!(m.distance, 1.0);
        assert!(match_author("...", &catalog()).labels.is_empty());
    }

    #[test]
    fn catalog_validation_and_round_trip() {
        let c = catalog();
        assert_eq!(AuthorCatalog::parse_tsv(&c.to_tsv()).unwrap(), c);
        assert_eq!(c.get(1).unwrap().author, "Manet");
        assert!(AuthorCatalog::parse_tsv("0\tA\tx\n0\tB\ty\n").is_err());
        assert!(AuthorCatalog::parse_tsv("0\t \tx\n").is_err());
        assert!(AuthorCatalog::parse_tsv("zero\tA\tx\n").is_err());
    }

    #[test]
    fn stub_passthrough_and_blank_crop() {
        let crop = RasterImage::from_fn_gray(40, 10, |x, y| if (10..14).contains(&x) && y > 2 && y < 8 { 250 } else { 30 });
        let ocr = FixedOcr("Claude Monet".into());
        assert_eq!(read_text_descriptor(&crop, &ocr).unwrap(), "Claude Monet");
        let blank = RasterImage::filled(40, 10, ColorSpace::Gray, 200);
        assert_eq!(read_text_descriptor(&blank, &ocr).unwrap(), "");
    }

    #[test]
    fn minority_class_becomes_foreground() {
        for (fg, bg) in [(240u8, 20u8), (15, 220)] {
            let letters = |x: usize, y: usize| (x % 6 < 2) && (3..9).contains(&y);
            let crop = RasterImage::from_fn_gray(60, 12, |x, y| if letters(x, y) { fg } else { bg });
            let mask = binarize_text(&crop).unwrap();
            assert_eq!(mask, BinaryMask::from_fn(60, 12, letters));
        }
    }

    #[test]
    fn otsu_splits_bimodal_data() {
        let img = RasterImage::from_fn_gray(10, 1, |x, _| if x < 4 { 50 } else { 200 });
        let t = otsu_threshold(&img).unwrap();
        assert!((50..200).contains(&t));
        assert_eq!(otsu_threshold(&RasterImage::filled(3, 3, ColorSpace::Gray, 5)), None);
    }

    #[test]
    fn sidecar_lines_map_to_paintings() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("q_00003.png");
        assert_eq!(SidecarOcr::load(&img).unwrap(), None);
        std::fs::write(dir.path().join("q_00003.ocr.txt"), "Goya\nMonet\n").unwrap();
        let s = SidecarOcr::load(&img).unwrap().unwrap();
        assert_eq!(s.painting(1), FixedOcr("Monet".into()));
        assert_eq!(s.painting(5), FixedOcr(String::new()));
    }
}
