use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use gallerist::metrics::{BBox, Label};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthPainting {
    /// Museum label, or -1 for a painting absent from the museum.
    pub label: Label,
}

/// Ground truth for one query image. Paths are relative to the file that
/// lists them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthQuery {
    pub image: PathBuf,
    /// Left to right.
    pub paintings: Vec<TruthPainting>,
    /// Painting-pixel mask of the whole image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<PathBuf>,
    /// Text boxes sidecar, one line per painting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<PathBuf>,
    /// Rotation sidecar holding one angle in degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub queries: Vec<TruthQuery>,
}

impl GroundTruth {
    /// Reads and checks a ground-truth file: painting counts in 1..=3,
    /// unique image names and every referenced file present. Paths come back
    /// resolved against the file's directory and queries sorted by image
    /// file name, the order query results use.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut gt: GroundTruth =
            serde_json::from_str(&text).with_context(|| format!("malformed ground truth {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for q in gt.queries.iter_mut() {
            ensure!(
                (1..=3).contains(&q.paintings.len()),
                "{}: {} paintings listed, expected 1 to 3",
                q.image.display(),
                q.paintings.len()
            );
            if let Some(p) = q.paintings.iter().find(|p| p.label < -1) {
                bail!("{}: invalid label {}", q.image.display(), p.label);
            }
            for p in [Some(&mut q.image), q.mask.as_mut(), q.boxes.as_mut(), q.angle.as_mut()]
                .into_iter()
                .flatten()
            {
                *p = base.join(&*p);
                ensure!(p.is_file(), "referenced file {} does not exist", p.display());
            }
        }
        gt.queries.sort_by(|a, b| a.image.file_name().cmp(&b.image.file_name()));
        if let Some(w) = gt.queries.windows(2).find(|w| w[0].image.file_name() == w[1].image.file_name()) {
            bail!("image {} listed twice", w[0].image.display());
        }
        Ok(gt)
    }
}

/// One line per painting: `x1 y1 x2 y2`, or `-` when it has no text box.
pub fn format_boxes(boxes: &[Option<BBox>]) -> String {
    boxes
        .iter()
        .map(|b| match b {
            Some(b) => format!("{} {} {} {}\n", b.x1, b.y1, b.x2, b.y2),
            None => "-\n".to_string(),
        })
        .collect()
}

pub fn parse_boxes(text: &str) -> Result<Vec<Option<BBox>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let l = l.trim();
            if l == "-" {
                return Ok(None);
            }
            let v: Vec<i64> = l
                .split_whitespace()
                .map(|t| t.parse().with_context(|| format!("bad box coordinate {t:?}")))
                .collect::<Result<_>>()?;
            ensure!(v.len() == 4, "box line {l:?} needs four coordinates");
            Ok(Some(BBox::new(v[0], v[1], v[2], v[3]).with_context(|| format!("box line {l:?}"))?))
        })
        .collect()
}

pub fn read_boxes(path: &Path) -> Result<Vec<Option<BBox>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_boxes(&text).with_context(|| format!("in {}", path.display()))
}

pub fn format_angle(angle: f64) -> String {
    format!("{angle}\n")
}

pub fn read_angle(path: &Path) -> Result<f64> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: f64 = text
        .trim()
        .parse()
        .with_context(|| format!("{}: not an angle", path.display()))?;
    ensure!(v.is_finite(), "{}: angle is not finite", path.display());
    Ok(v)
}
