use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use gallerist::descriptors::SidecarOcr;
use gallerist::engine::{build_index, kmeans_cluster, load_index, query as run_query, BuildOptions, OcrSource};
use gallerist::imgproc::io::{load_image, load_mask, save_image, save_mask};
use gallerist::metrics::{
    map_at_k, mask_prf, mean_angular_error, mean_iou, BBox, Label, RankedRetrieval, UNKNOWN_LABEL,
};
use gallerist::synth::{self, SceneOptions};

use crate::cli::{ArtifactEvalArgs, ClusterArgs, EvalArgs, IndexArgs, QueryArgs, Status, SynthArgs};
use crate::config::RunConfig;
use crate::results::{self, QueryResults};
use crate::truth::{self, GroundTruth, TruthPainting, TruthQuery};

fn require(flag: Option<&PathBuf>, fallback: Option<&PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or(fallback)
        .cloned()
        .with_context(|| format!("--{name} not given and no paths.{name} in the configuration"))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

/// Image files in `dir` sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))? {
        let p = e?.path();
        let is_image = p
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"));
        if p.is_file() && is_image {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Where `query --emit-artifacts` puts each per-image file.
pub struct ArtifactPaths {
    pub mask: PathBuf,
    pub boxes: PathBuf,
    pub angle: PathBuf,
}

impl ArtifactPaths {
    pub fn new(dir: &Path, image: &Path) -> Self {
        let s = stem(image);
        Self {
            mask: dir.join(format!("{s}.mask.png")),
            boxes: dir.join(format!("{s}.boxes.txt")),
            angle: dir.join(format!("{s}.angle.txt")),
        }
    }
}

pub fn index(a: &IndexArgs) -> Result<usize> {
    let cfg = RunConfig::load_or_default(a.config.as_deref())?;
    let museum = require(a.museum.as_ref(), cfg.paths.museum.as_ref(), "museum")?;
    let catalog = require(a.catalog.as_ref(), cfg.paths.catalog.as_ref(), "catalog")?;
    let out = require(a.out.as_ref(), cfg.paths.index.as_ref(), "out")?;
    let opts = BuildOptions {
        skip_unreadable: a.skip_unreadable,
    };
    let idx = build_index(&museum, &catalog, &cfg.index_config(), &opts)?;
    gallerist::engine::save_index(&idx, &out)?;
    println!("indexed {} paintings", idx.len());
    Ok(idx.len())
}

pub fn query(a: &QueryArgs) -> Result<QueryResults> {
    let cfg = RunConfig::load_or_default(a.config.as_deref())?;
    let index_path = require(a.index.as_ref(), cfg.paths.index.as_ref(), "index")?;
    let queries = require(a.queries.as_ref(), cfg.paths.queries.as_ref(), "queries")?;
    ensure!(a.k >= 1, "--k must be at least 1");
    // Without a configuration file the index's own extraction settings are trusted.
    let active = a.config.as_ref().map(|_| cfg.index_config());
    let idx = load_index(&index_path, active.as_ref(), a.force)?;
    let qcfg = cfg.query_config();
    let images = list_images(&queries)?;
    if let Some(dir) = &a.emit_artifacts {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs.unwrap_or(0)).build()?;
    let per_image: Vec<Vec<Vec<Label>>> = pool.install(|| {
        images
            .par_iter()
            .map(|path| -> Result<Vec<Vec<Label>>> {
                let img = load_image(path).with_context(|| format!("reading query {}", path.display()))?;
                let sidecar = SidecarOcr::load(path).with_context(|| format!("reading text sidecar of {}", path.display()))?;
                let ocr = sidecar.as_ref().map_or(OcrSource::None, OcrSource::Sidecar);
                let out = run_query(&idx, &img, a.k, a.mode, &qcfg, &ocr)
                    .with_context(|| format!("querying {}", path.display()))?;
                if let Some(dir) = &a.emit_artifacts {
                    let p = ArtifactPaths::new(dir, path);
                    save_mask(&out.mask, &p.mask)?;
                    std::fs::write(&p.boxes, truth::format_boxes(&out.text_boxes))?;
                    std::fs::write(&p.angle, truth::format_angle(out.report.estimated_angle.unwrap_or(0.0)))?;
                }
                Ok(out.labels())
            })
            .collect::<Result<Vec<_>>>()
    })?;
    results::write(&per_image, &a.out)?;
    log::info!("answered {} query images", per_image.len());
    Ok(per_image)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RetrievalReport {
    pub k: usize,
    pub map: f64,
    pub images: usize,
    pub paintings: usize,
    /// Ground-truth paintings absent from the museum.
    pub unknown: usize,
    /// Of those, answered by `[-1]`.
    pub unknown_answered: usize,
}

/// mAP@K of `results` against `gt`, one retrieval per ground-truth painting.
/// Paintings the results miss count with an empty ranking; extra detected
/// paintings are ignored.
pub fn retrieval_report(results: &QueryResults, gt: &GroundTruth, k: usize) -> Result<RetrievalReport> {
    ensure!(k >= 1, "k must be at least 1");
    ensure!(
        results.len() == gt.queries.len(),
        "results cover {} images but the ground truth lists {}",
        results.len(),
        gt.queries.len()
    );
    let mut fixtures = Vec::new();
    let (mut unknown, mut answered) = (0, 0);
    for (image, q) in results.iter().zip(&gt.queries) {
        for (j, p) in q.paintings.iter().enumerate() {
            let ranking = image.get(j).cloned().unwrap_or_default();
            if p.label == UNKNOWN_LABEL {
                unknown += 1;
                if ranking == [UNKNOWN_LABEL] {
                    answered += 1;
                }
            }
            fixtures.push(RankedRetrieval::new(ranking, [p.label], k)?);
        }
    }
    Ok(RetrievalReport {
        k,
        map: map_at_k(&fixtures)?,
        images: gt.queries.len(),
        paintings: fixtures.len(),
        unknown,
        unknown_answered: answered,
    })
}

pub fn eval(a: &EvalArgs) -> Result<Status> {
    let res = results::read(&a.results)?;
    let gt = GroundTruth::load(&a.gt)?;
    let r = retrieval_report(&res, &gt, a.k)?;
    println!("mAP@{} = {:.4} over {} paintings in {} images", r.k, r.map, r.paintings, r.images);
    if r.unknown > 0 {
        println!("unknown paintings answered -1: {}/{}", r.unknown_answered, r.unknown);
    }
    if let Some(p) = &a.json {
        write_json(&r, p)?;
    }
    Ok(threshold(a.assert.is_some_and(|t| r.map < t)))
}

fn threshold(missed: bool) -> Status {
    if missed {
        Status::BelowThreshold
    } else {
        Status::Success
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaskReport {
    pub images: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn mask_report(pred_dir: &Path, gt: &GroundTruth) -> Result<MaskReport> {
    let (mut p, mut r, mut f, mut n) = (0.0, 0.0, 0.0, 0usize);
    for q in &gt.queries {
        let Some(m) = &q.mask else { continue };
        let want = load_mask(m).with_context(|| format!("reading {}", m.display()))?;
        let pred_path = ArtifactPaths::new(pred_dir, &q.image).mask;
        let got = load_mask(&pred_path).with_context(|| format!("reading {}", pred_path.display()))?;
        let s = mask_prf(&got, &want).with_context(|| format!("scoring {}", pred_path.display()))?;
        p += s.precision;
        r += s.recall;
        f += s.f1;
        n += 1;
    }
    ensure!(n > 0, "the ground truth lists no masks");
    let d = n as f64;
    Ok(MaskReport {
        images: n,
        precision: p / d,
        recall: r / d,
        f1: f / d,
    })
}

pub fn mask_eval(a: &ArtifactEvalArgs) -> Result<Status> {
    let gt = GroundTruth::load(&a.gt)?;
    let r = mask_report(&a.pred, &gt)?;
    println!(
        "masks over {} images: precision {:.4} recall {:.4} F1 {:.4}",
        r.images, r.precision, r.recall, r.f1
    );
    if let Some(p) = &a.json {
        write_json(&r, p)?;
    }
    Ok(threshold(a.assert.is_some_and(|t| r.f1 < t)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TextboxReport {
    pub images: usize,
    pub miou: f64,
}

fn present(boxes: Vec<Option<BBox>>) -> Vec<BBox> {
    boxes.into_iter().flatten().collect()
}

pub fn textbox_report(pred_dir: &Path, gt: &GroundTruth) -> Result<TextboxReport> {
    let mut pairs = Vec::new();
    for q in &gt.queries {
        let Some(b) = &q.boxes else { continue };
        let want = present(truth::read_boxes(b)?);
        let got = present(truth::read_boxes(&ArtifactPaths::new(pred_dir, &q.image).boxes)?);
        pairs.push((got, want));
    }
    ensure!(!pairs.is_empty(), "the ground truth lists no text boxes");
    Ok(TextboxReport {
        images: pairs.len(),
        miou: mean_iou(&pairs),
    })
}

pub fn textbox_eval(a: &ArtifactEvalArgs) -> Result<Status> {
    let gt = GroundTruth::load(&a.gt)?;
    let r = textbox_report(&a.pred, &gt)?;
    println!("text boxes over {} images: mIoU {:.4}", r.images, r.miou);
    if let Some(p) = &a.json {
        write_json(&r, p)?;
    }
    Ok(threshold(a.assert.is_some_and(|t| r.miou < t)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleReport {
    pub images: usize,
    /// Mean angular error in degrees.
    pub mae: f64,
}

pub fn angle_report(pred_dir: &Path, gt: &GroundTruth) -> Result<AngleReport> {
    let (mut pred, mut want) = (Vec::new(), Vec::new());
    for q in &gt.queries {
        let Some(p) = &q.angle else { continue };
        want.push(truth::read_angle(p)?);
        pred.push(truth::read_angle(&ArtifactPaths::new(pred_dir, &q.image).angle)?);
    }
    ensure!(!want.is_empty(), "the ground truth lists no angles");
    Ok(AngleReport {
        images: want.len(),
        mae: mean_angular_error(&pred, &want)?,
    })
}

pub fn angle_eval(a: &ArtifactEvalArgs) -> Result<Status> {
    let gt = GroundTruth::load(&a.gt)?;
    let r = angle_report(&a.pred, &gt)?;
    println!("rotation over {} images: mAE {:.4}°", r.images, r.mae);
    if let Some(p) = &a.json {
        write_json(&r, p)?;
    }
    Ok(threshold(a.assert.is_some_and(|t| r.mae > t)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterReport {
    pub cluster_count: usize,
    pub seed: u64,
    /// Cluster id per museum label.
    pub clusters: BTreeMap<Label, usize>,
    /// Member labels of every cluster id, ascending.
    pub members: Vec<Vec<Label>>,
}

pub fn cluster(a: &ClusterArgs) -> Result<ClusterReport> {
    let cfg = RunConfig::load_or_default(a.config.as_deref())?;
    let index_path = require(a.index.as_ref(), cfg.paths.index.as_ref(), "index")?;
    let idx = load_index(&index_path, None, false)?;
    let seed = a.seed.unwrap_or(cfg.seed);
    let got = kmeans_cluster(&idx, cfg.kmeans.k_bright, cfg.kmeans.k_texture, seed)?;
    let report = ClusterReport {
        cluster_count: got.cluster_count,
        seed,
        members: (0..got.cluster_count).map(|c| got.members(c)).collect(),
        clusters: got.clusters,
    };
    write_json(&report, &a.out)?;
    let populated = report.members.iter().filter(|m| !m.is_empty()).count();
    println!("{} paintings in {populated} of {} clusters", report.clusters.len(), report.cluster_count);
    Ok(report)
}

/// Writes `museum/`, `catalog.tsv`, `queries/` (with `.ocr.txt` sidecars),
/// `truth/` (masks, box and angle sidecars) and `gt.json` under `out`.
pub fn synth(a: &SynthArgs) -> Result<GroundTruth> {
    if a.museum_size == 0 {
        bail!("--museum-size must be at least 1");
    }
    let (museum_dir, query_dir, truth_dir) = (a.out.join("museum"), a.out.join("queries"), a.out.join("truth"));
    for d in [&museum_dir, &query_dir, &truth_dir] {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let museum = synth::museum(a.seed, a.museum_size);
    museum.par_iter().try_for_each(|p| {
        save_image(&p.image, &museum_dir.join(format!("bbdd_{:05}.png", p.label)))
    })?;
    std::fs::write(a.out.join("catalog.tsv"), synth::catalog(&museum).to_tsv())?;
    let opts = SceneOptions {
        count: a.count,
        ..SceneOptions::default()
    };
    let scenes = synth::scenes(&museum, a.profile, a.seed, &opts);
    let queries = scenes
        .par_iter()
        .map(|sc| -> Result<TruthQuery> {
            let image = format!("queries/{}.png", sc.name);
            let mask = format!("truth/{}.mask.png", sc.name);
            let boxes = format!("truth/{}.boxes.txt", sc.name);
            let angle = format!("truth/{}.angle.txt", sc.name);
            save_image(&sc.image, &a.out.join(&image))?;
            save_mask(&sc.mask, &a.out.join(&mask))?;
            if let Some(text) = sc.ocr_text() {
                std::fs::write(query_dir.join(format!("{}.ocr.txt", sc.name)), text)?;
            }
            let b: Vec<Option<BBox>> = sc.paintings.iter().map(|p| p.text_box).collect();
            std::fs::write(a.out.join(&boxes), truth::format_boxes(&b))?;
            std::fs::write(a.out.join(&angle), truth::format_angle(sc.angle))?;
            Ok(TruthQuery {
                image: image.into(),
                paintings: sc.paintings.iter().map(|p| TruthPainting { label: p.label }).collect(),
                mask: Some(mask.into()),
                boxes: Some(boxes.into()),
                angle: Some(angle.into()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gt = GroundTruth { queries };
    write_json(&gt, &a.out.join("gt.json"))?;
    println!(
        "generated {} museum paintings and {} {} queries in {}",
        museum.len(),
        gt.queries.len(),
        a.profile,
        a.out.display()
    );
    Ok(gt)
}
