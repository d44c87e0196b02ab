//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
//! exit when any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gallerist::descriptors::CatalogEntry;
use gallerist::engine::{build_index_from_images, kmeans, kmeans_cluster, DescriptorKind, IndexConfig, QueryMode};
use gallerist::features::{extract_features, image_feature_similarity, match_descriptors, BinaryDescriptor, OrbParams, Verdict};
use gallerist::imgproc::{rotate, ColorSpace, RasterImage};
use gallerist::metrics::{
    histogram_measure, map_at_k, mask_prf, mean_angular_error, mean_iou, BBox, Histogram, Label, MeasureKind,
    RankedRetrieval,
};
use gallerist::preprocess::{
    boxes_in_original, detect_and_denoise, estimate_rotation, mask_in_original, preprocess_pipeline, PreprocessConfig,
    RotationMethod, RotationParams,
};
use gallerist::synth::{self, Profile, SceneOptions};
use gallerist_cli::cli::{ClusterArgs, IndexArgs, QueryArgs, SynthArgs};
use gallerist_cli::commands::{self, retrieval_report};
use gallerist_cli::truth::{GroundTruth, TruthPainting, TruthQuery};

const SEED: u64 = 1;
const MUSEUM_SIZE: usize = 50;
const SCENES: usize = 30;

struct Verdict2 {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict2> {
    Ok(Verdict2 { pass, detail })
}

/// Generated datasets shared by the end-to-end criteria.
struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
    index: PathBuf,
}

impl Workspace {
    fn new() -> Result<Self> {
        let dir = tempfile::tempdir()?;
        let root = dir.path().to_path_buf();
        for p in Profile::ALL {
            let out = root.join(p.to_string());
            commands::synth(&SynthArgs {
                out,
                seed: SEED,
                profile: p,
                museum_size: MUSEUM_SIZE,
                count: SCENES,
            })?;
        }
        let index = root.join("index.bin");
        build(&root, &root.join("ds1"), None, &index)?;
        Ok(Self { _dir: dir, root, index })
    }

    fn profile(&self, p: Profile) -> PathBuf {
        self.root.join(p.to_string())
    }

    /// mAP@1 report of `mode` on one profile's queries.
    fn retrieval(&self, p: Profile, mode: QueryMode, index: &Path, config: Option<&Path>) -> Result<gallerist_cli::commands::RetrievalReport> {
        let dir = self.profile(p);
        let out = self.root.join(format!("{p}_{mode:?}_{}.json", index.file_stem().unwrap().to_string_lossy()));
        let res = commands::query(&QueryArgs {
            index: Some(index.into()),
            queries: Some(dir.join("queries")),
            k: 1,
            mode,
            out,
            config: config.map(Into::into),
            emit_artifacts: None,
            jobs: None,
            force: false,
        })?;
        let gt = GroundTruth::load(&dir.join("gt.json"))?;
        retrieval_report(&res, &gt, 1)
    }
}

fn build(root: &Path, dataset: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let _ = root;
    commands::index(&IndexArgs {
        museum: Some(dataset.join("museum")),
        catalog: Some(dataset.join("catalog.tsv")),
        config: config.map(Into::into),
        out: Some(out.into()),
        skip_unreadable: false,
    })?;
    Ok(())
}

fn random_histogram(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.0) })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Straight summation of each measure's defining formula.
fn oracle_measure(kind: MeasureKind, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    match kind {
        MeasureKind::Hellinger => {
            for i in 0..n {
                total += (a[i] * b[i]).sqrt();
            }
        }
        MeasureKind::Chi2 => {
            for i in 0..n {
                if a[i] + b[i] != 0.0 {
                    total += (a[i] - b[i]).powi(2) / (a[i] + b[i]);
                }
            }
        }
        MeasureKind::Intersect => {
            for i in 0..n {
                total += if a[i] < b[i] { a[i] } else { b[i] };
            }
        }
        MeasureKind::Correlation => {
            let ma = a.iter().sum::<f64>() / n as f64;
            let mb = b.iter().sum::<f64>() / n as f64;
            let mut num = 0.0;
            let mut va = 0.0;
            let mut vb = 0.0;
            for i in 0..n {
                num += (a[i] - ma) * (b[i] - mb);
                va += (a[i] - ma).powi(2);
                vb += (b[i] - mb).powi(2);
            }
            total = if va * vb == 0.0 { 0.0 } else { num / (va * vb).sqrt() };
        }
    }
    total
}

fn c1_metric_oracle() -> Result<Verdict2> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    let mut range_ok = true;
    for _ in 0..1000 {
        let n = rng.random_range(1..=64);
        let (a, b) = (random_histogram(&mut rng, n), random_histogram(&mut rng, n));
        let (ha, hb) = (Histogram::new(a.clone())?, Histogram::new(b.clone())?);
        for kind in [MeasureKind::Hellinger, MeasureKind::Chi2, MeasureKind::Intersect, MeasureKind::Correlation] {
            let v = histogram_measure(kind, &ha, &hb)?.value;
            worst = worst.max((v - oracle_measure(kind, &a, &b)).abs());
            range_ok &= match kind {
                MeasureKind::Hellinger | MeasureKind::Intersect => (0.0..=1.0 + 1e-12).contains(&v),
                MeasureKind::Chi2 => v >= 0.0,
                MeasureKind::Correlation => (-1.0..=1.0).contains(&v),
            };
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-9 && range_ok && secs < 5.0,
        format!("max |error| {worst:.2e}, ranges hold: {range_ok}, {secs:.2}s"),
    )
}

/// AP@K as the literal mean of P@i over i = 1..K.
fn oracle_map(fixtures: &[(Vec<Label>, Vec<Label>, usize)]) -> f64 {
    let mut sum = 0.0;
    for (ranking, relevant, k) in fixtures {
        if relevant == &[-1] {
            sum += if ranking == &[-1] { 1.0 } else { 0.0 };
            continue;
        }
        let mut ap = 0.0;
        for i in 1..=*k {
            let hits = ranking.iter().take(i).filter(|l| relevant.contains(l)).count();
            ap += hits as f64 / i as f64;
        }
        sum += ap / *k as f64;
    }
    sum / fixtures.len() as f64
}

fn c2_map_oracle() -> Result<Verdict2> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let count = rng.random_range(1..=12);
        let mut fixtures = Vec::new();
        for _ in 0..count {
            let k = rng.random_range(1..=10);
            let mut pool: Vec<Label> = (0..20).collect();
            let len = rng.random_range(0..=k + 2).min(pool.len());
            let mut ranking = Vec::new();
            for _ in 0..len {
                ranking.push(pool.swap_remove(rng.random_range(0..pool.len())));
            }
            let mut relevant: Vec<Label> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..20)).collect();
            relevant.sort();
            relevant.dedup();
            if rng.random_bool(0.1) {
                relevant = vec![-1];
                ranking = if rng.random_bool(0.5) { vec![-1] } else { ranking };
            }
            fixtures.push((ranking, relevant, k));
        }
        let rr = fixtures
            .iter()
            .map(|(r, rel, k)| RankedRetrieval::new(r.clone(), rel.iter().copied(), *k))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        worst = worst.max((map_at_k(&rr)? - oracle_map(&fixtures)).abs());
    }
    verdict(worst <= 1e-12, format!("max |error| {worst:.2e} over 200 fixtures"))
}

fn c3_self_retrieval(ws: &Workspace) -> Result<Verdict2> {
    let t = Instant::now();
    let museum = ws.profile(Profile::Ds1).join("museum");
    let images = commands::list_images(&museum)?;
    // Ground truth for the museum images as queries.
    let truth = GroundTruth {
        queries: images
            .iter()
            .map(|p| {
                let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
                let label: Label = stem.trim_start_matches("bbdd_").parse().unwrap();
                TruthQuery {
                    image: p.clone(),
                    paintings: vec![TruthPainting { label }],
                    mask: None,
                    boxes: None,
                    angle: None,
                }
            })
            .collect(),
    };
    // Museum images are indexed as they are, so the queries skip the
    // scene preprocessing too.
    let plain = ws.root.join("plain.toml");
    std::fs::write(
        &plain,
        "[preprocess.stages]\ndenoise = false\nrotation = false\nbackground = false\ntextbox = false\n",
    )?;
    let run = |mode: QueryMode, config: Option<&Path>, tag: &str| -> Result<f64> {
        let res = commands::query(&QueryArgs {
            index: Some(ws.index.clone()),
            queries: Some(museum.clone()),
            k: 1,
            mode,
            out: ws.root.join(format!("self_{tag}_{mode:?}.json")),
            config: config.map(Into::into),
            emit_artifacts: None,
            jobs: None,
            force: false,
        })?;
        Ok(retrieval_report(&res, &truth, 1)?.map)
    };
    let modes = [QueryMode::Color, QueryMode::Texture, QueryMode::Combined, QueryMode::Feature];
    let mut parts = Vec::new();
    let mut pass = true;
    for mode in modes {
        let m = run(mode, Some(&plain), "plain")?;
        pass &= m == 1.0;
        parts.push(format!("{mode:?} {m:.3}"));
    }
    let secs = t.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    // Scene preprocessing on frameless paintings, for context only.
    let scene = run(QueryMode::Combined, None, "scene")?;
    verdict(
        pass,
        format!(
            "{} images: {}, {secs:.1}s (combined with scene preprocessing: {scene:.3})",
            images.len(),
            parts.join(", ")
        ),
    )
}

fn c4_background() -> Result<Verdict2> {
    let museum = synth::museum(SEED, MUSEUM_SIZE);
    let scenes = synth::scenes(&museum, Profile::Ds1, SEED, &SceneOptions::default());
    let cfg = PreprocessConfig::default();
    let (mut p, mut r) = (0.0, 0.0);
    for sc in &scenes {
        let (crops, report) = preprocess_pipeline(&sc.image, &cfg)?;
        let s = mask_prf(&mask_in_original(&crops, &report), &sc.mask)?;
        p += s.precision;
        r += s.recall;
    }
    let n = scenes.len() as f64;
    let (p, r) = (p / n, r / n);
    verdict(p >= 0.92 && r >= 0.98, format!("{} ds1 scenes: precision {p:.4}, recall {r:.4}", scenes.len()))
}

fn c5_rotation() -> Result<Verdict2> {
    let museum = synth::museum(SEED, MUSEUM_SIZE);
    let scenes = synth::scenes(&museum, Profile::Ds4, SEED, &SceneOptions::default());
    let cfg = PreprocessConfig::default();
    let gt: Vec<f64> = scenes.iter().map(|s| s.angle).collect();
    let inputs = scenes
        .iter()
        .map(|s| detect_and_denoise(&s.image, cfg.psnr_threshold).map(|d| d.0))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut parts = Vec::new();
    let mut pass = true;
    for method in [RotationMethod::Rect, RotationMethod::Hough] {
        let params = RotationParams { method, ..cfg.rotation };
        // A failed estimate counts as zero rotation.
        let est: Vec<f64> = inputs.iter().map(|i| estimate_rotation(i, &params).unwrap_or(0.0)).collect();
        let mae = mean_angular_error(&est, &gt)?;
        pass &= mae <= 1.0;
        parts.push(format!("{method:?} mAE {mae:.3}°"));
    }
    let span = gt.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &a| (lo.min(a), hi.max(a)));
    verdict(pass, format!("{} ds4 scenes, angles {:.1}..{:.1}: {}", gt.len(), span.0, span.1, parts.join(", ")))
}

fn c6_textbox() -> Result<Verdict2> {
    let museum = synth::museum(SEED, MUSEUM_SIZE);
    let scenes = synth::scenes(&museum, Profile::Ds2, SEED, &SceneOptions::default());
    let cfg = PreprocessConfig::default();
    let mut pairs: Vec<(Vec<BBox>, Vec<BBox>)> = Vec::new();
    for sc in &scenes {
        let (_, report) = preprocess_pipeline(&sc.image, &cfg)?;
        let pred = boxes_in_original(&report).into_iter().flatten().collect();
        let gt = sc.paintings.iter().filter_map(|p| p.text_box).collect();
        pairs.push((pred, gt));
    }
    let m = mean_iou(&pairs);
    verdict(m >= 0.70, format!("{} ds2 scenes: mIoU {m:.4}", scenes.len()))
}

fn salt_and_pepper(img: &mut RasterImage, density: f64, rng: &mut ChaCha8Rng) {
    let (w, h, c) = (img.width(), img.height(), img.channels());
    for y in 0..h {
        for x in 0..w {
            if rng.random_bool(density) {
                let v = if rng.random_bool(0.5) { 255 } else { 0 };
                for ch in 0..c {
                    img.set(x, y, ch, v);
                }
            }
        }
    }
}

fn c7_noise_gate() -> Result<Verdict2> {
    let museum = synth::museum(SEED, MUSEUM_SIZE);
    let opts = SceneOptions {
        count: 50,
        ..SceneOptions::default()
    };
    let scenes = synth::scenes(&museum, Profile::Ds1, SEED + 7, &opts);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut correct, mut clean_kept) = (0, true);
    for (i, sc) in scenes.iter().enumerate() {
        let noisy = i % 2 == 0;
        let mut img = sc.image.clone();
        if noisy {
            salt_and_pepper(&mut img, 0.1, &mut rng);
        }
        let (out, flag, _) = detect_and_denoise(&img, PreprocessConfig::default().psnr_threshold)?;
        if flag == noisy {
            correct += 1;
        }
        if !flag && out != img {
            clean_kept = false;
        }
    }
    let acc = correct as f64 / scenes.len() as f64;
    verdict(
        acc >= 0.95 && clean_kept,
        format!("{correct}/{} classified, unflagged outputs identical: {clean_kept}", scenes.len()),
    )
}

/// Every mutual-minimum pair of the full distance matrix that passes both
/// cutoffs, found by exhaustive scan.
fn oracle_matches(q: &[BinaryDescriptor], g: &[BinaryDescriptor], max: u32, ratio: f64) -> Vec<(usize, usize, u32)> {
    let dist = |a: &BinaryDescriptor, b: &BinaryDescriptor| -> u32 {
        (0..256).filter(|&i| a.bit(i) != b.bit(i)).count() as u32
    };
    let m: Vec<Vec<u32>> = q.iter().map(|a| g.iter().map(|b| dist(a, b)).collect()).collect();
    let mut out = Vec::new();
    for i in 0..q.len() {
        for j in 0..g.len() {
            let d = m[i][j];
            let first_in_row = (0..g.len()).all(|k| m[i][k] > d || (m[i][k] == d && k >= j));
            let first_in_col = (0..q.len()).all(|k| m[k][j] > d || (m[k][j] == d && k >= i));
            if !first_in_row || !first_in_col || d > max {
                continue;
            }
            let second_row = (0..g.len()).filter(|&k| k != j).map(|k| m[i][k]).min();
            let second_col = (0..q.len()).filter(|&k| k != i).map(|k| m[k][j]).min();
            let ok = |s: Option<u32>| s.is_none_or(|s| (d as f64) < ratio * s as f64);
            if ok(second_row) && ok(second_col) {
                out.push((i, j, d));
            }
        }
    }
    out
}

fn c8_orb() -> Result<Verdict2> {
    let params = OrbParams::default();
    let museum = synth::museum(SEED, 3);
    let img = &museum[0].image;
    let kp = extract_features(img, &params)?.len();
    let (self_count, self_v) = image_feature_similarity(img, img, &params)?;
    let (rotated, _, _) = rotate(img, 30.0, 0);
    let (rot_count, rot_v) = image_feature_similarity(img, &rotated, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (w, h) = img.dims();
    let noise = RasterImage::from_vec(w, h, ColorSpace::Rgb, (0..w * h * 3).map(|_| rng.random()).collect())?;
    let (noise_count, noise_v) = image_feature_similarity(img, &noise, &params)?;

    let mut exact = true;
    for trial in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + trial);
        let g: Vec<BinaryDescriptor> = (0..10).map(|_| BinaryDescriptor(rng.random())).collect();
        let q: Vec<BinaryDescriptor> = g
            .iter()
            .map(|d| {
                let mut b = d.0;
                for _ in 0..rng.random_range(0..90) {
                    let bit = rng.random_range(0..256);
                    b[bit / 8] ^= 1 << (bit % 8);
                }
                BinaryDescriptor(b)
            })
            .collect();
        let got = match_descriptors(&q, &g, params.max_distance, params.ratio, params.min_matches).pairs;
        exact &= got == oracle_matches(&q, &g, params.max_distance, params.ratio.unwrap());
    }
    let pass = self_v == Verdict::Similar
        && self_count == kp
        && rot_v == Verdict::Similar
        && noise_v == Verdict::Dissimilar
        && exact;
    verdict(
        pass,
        format!(
            "self {self_count}/{kp} matches, 30° rotated {rot_count} ({rot_v:?}), noise {noise_count} ({noise_v:?}), 10x10 oracle exact: {exact}"
        ),
    )
}

fn c9_end_to_end(ws: &Workspace) -> Result<Verdict2> {
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    let (mut unknown, mut answered) = (0, 0);
    for p in Profile::ALL {
        let r = ws.retrieval(p, QueryMode::Feature, &ws.index, None)?;
        let floor = if matches!(p, Profile::Ds1 | Profile::Ds2) { 0.90 } else { 0.85 };
        pass &= r.map >= floor;
        unknown += r.unknown;
        answered += r.unknown_answered;
        parts.push(format!("{p} {:.3}", r.map));
    }
    ensure!(unknown > 0, "ds4 generated no out-of-museum paintings");
    let rate = answered as f64 / unknown as f64;
    let secs = t.elapsed().as_secs_f64();
    pass &= rate >= 0.90 && secs < 600.0;
    verdict(
        pass,
        format!("feature mAP@1 {}; unknown answered -1 {answered}/{unknown}; {secs:.1}s", parts.join(", ")),
    )
}

fn c10_descriptor_order(ws: &Workspace) -> Result<Verdict2> {
    let texture = ws.retrieval(Profile::Ds3, QueryMode::Texture, &ws.index, None)?.map;
    let color = ws.retrieval(Profile::Ds3, QueryMode::Color, &ws.index, None)?.map;
    let block = ws.retrieval(Profile::Ds1, QueryMode::Color, &ws.index, None)?.map;
    let cfg = ws.root.join("global.toml");
    std::fs::write(
        &cfg,
        "[descriptors.color]\ntype = \"global\"\n[descriptors.color.spec]\ntype = \"joint\"\nspace = \"rgb\"\nbins = 8\n",
    )?;
    let global_index = ws.root.join("global.bin");
    build(&ws.root, &ws.profile(Profile::Ds1), Some(&cfg), &global_index)?;
    let global = ws.retrieval(Profile::Ds1, QueryMode::Color, &global_index, Some(&cfg))?.map;
    verdict(
        texture > color && block > global,
        format!("ds3 texture {texture:.3} vs color {color:.3}; ds1 block {block:.3} vs global 3D RGB {global:.3}"),
    )
}

/// Rand index adjusted for chance.
fn adjusted_rand(a: &[usize], b: &[usize]) -> f64 {
    let pairs = |x: usize| (x * x.saturating_sub(1)) as f64 / 2.0;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let (mut ra, mut rb): (BTreeMap<usize, usize>, BTreeMap<usize, usize>) = Default::default();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ra.entry(x).or_default() += 1;
        *rb.entry(y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&v| pairs(v)).sum();
    let sa: f64 = ra.values().map(|&v| pairs(v)).sum();
    let sb: f64 = rb.values().map(|&v| pairs(v)).sum();
    let expected = sa * sb / pairs(a.len());
    let max = (sa + sb) / 2.0;
    if max == expected {
        1.0
    } else {
        (index - expected) / (max - expected)
    }
}

/// Stripes in one of four orientations, or speckle, around a base brightness.
fn pattern_image(pattern: usize, base: f64, rng: &mut ChaCha8Rng) -> RasterImage {
    let (w, h) = (160, 140);
    let period = 12.0;
    let phase = rng.random_range(0.0..period);
    let mut img = RasterImage::filled(w, h, ColorSpace::Rgb, 0);
    for y in 0..h {
        for x in 0..w {
            let (fx, fy) = (x as f64 + phase, y as f64 + phase);
            let t = match pattern {
                0 => fx,
                1 => fy,
                2 => (fx + fy) / std::f64::consts::SQRT_2,
                3 => (fx - fy + 1000.0) / std::f64::consts::SQRT_2,
                // Isotropic speckle: no dominant orientation.
                _ => rng.random_range(0.0..period),
            };
            let on = (t % period) < period / 2.0;
            let v = base + if on { 30.0 } else { -30.0 } + rng.random_range(-4.0..4.0);
            for c in 0..3 {
                img.set(x, y, c, v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    img
}

fn c11_clustering() -> Result<Verdict2> {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut items = Vec::new();
    let mut truth = Vec::new();
    for group in 0..10 {
        let (bright, pattern) = (group / 5, group % 5);
        for _ in 0..4 {
            let label = items.len() as Label;
            let base = if bright == 0 { 70.0 } else { 180.0 };
            let img = pattern_image(pattern, base, &mut rng);
            items.push((
                CatalogEntry {
                    label,
                    author: "ANON".into(),
                    title: String::new(),
                },
                img,
            ));
            truth.push(group);
        }
    }
    let idx = build_index_from_images(items, &IndexConfig::default())?;
    // The construction must be separable in the clustering feature space.
    let tex: Vec<&[f64]> = idx
        .entries()
        .iter()
        .map(|e| e.descriptors[&DescriptorKind::Texture].values())
        .collect();
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let (mut within, mut between) = (0.0f64, f64::INFINITY);
    for i in 0..tex.len() {
        for j in i + 1..tex.len() {
            if truth[i] == truth[j] {
                within = within.max(d(tex[i], tex[j]));
            } else if truth[i] / 5 == truth[j] / 5 {
                between = between.min(d(tex[i], tex[j]));
            }
        }
    }
    ensure!(within < between, "constructed groups overlap: within {within:.3}, between {between:.3}");
    let mut worst_ari: f64 = 1.0;
    let mut monotone = true;
    for seed in 0..10 {
        let got = kmeans_cluster(&idx, 2, 5, seed)?;
        let labels: Vec<usize> = idx.entries().iter().map(|e| got.clusters[&e.label]).collect();
        worst_ari = worst_ari.min(adjusted_rand(&labels, &truth));
        monotone &= got.histories.iter().all(|h| h.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }
    for trial in 0..30u64 {
        let pts: Vec<Vec<f64>> = (0..60).map(|_| (0..4).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let r = kmeans(&pts, 1 + (trial % 8) as usize, trial)?;
        monotone &= r.wcss_history.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    }
    verdict(
        worst_ari == 1.0 && monotone,
        format!(
            "40 constructed images in 10 groups (texture spread {within:.3} < gap {between:.3}): min adjusted Rand {worst_ari:.3} over 10 seeds; WCSS non-increasing: {monotone}"
        ),
    )
}

fn c12_determinism(ws: &Workspace) -> Result<Verdict2> {
    let dir = ws.profile(Profile::Ds4);
    let read = |p: &Path| std::fs::read(p).with_context(|| p.display().to_string());
    let (a, b) = (ws.root.join("det_a.bin"), ws.root.join("det_b.bin"));
    build(&ws.root, &dir, None, &a)?;
    build(&ws.root, &dir, None, &b)?;
    let index_same = read(&a)? == read(&b)?;
    let query = |out: &str, jobs: usize| {
        commands::query(&QueryArgs {
            index: Some(a.clone()),
            queries: Some(dir.join("queries")),
            k: 5,
            mode: QueryMode::Combined,
            out: ws.root.join(out),
            config: None,
            emit_artifacts: Some(ws.root.join(format!("{out}.artifacts"))),
            jobs: Some(jobs),
            force: false,
        })
    };
    query("det_q1.json", 1)?;
    query("det_q2.json", 4)?;
    let mut query_same = read(&ws.root.join("det_q1.json"))? == read(&ws.root.join("det_q2.json"))?;
    for img in commands::list_images(&dir.join("queries"))? {
        let p1 = commands::ArtifactPaths::new(&ws.root.join("det_q1.json.artifacts"), &img);
        let p2 = commands::ArtifactPaths::new(&ws.root.join("det_q2.json.artifacts"), &img);
        query_same &= read(&p1.mask)? == read(&p2.mask)? && read(&p1.boxes)? == read(&p2.boxes)? && read(&p1.angle)? == read(&p2.angle)?;
    }
    let cluster = |out: &str| {
        commands::cluster(&ClusterArgs {
            index: Some(a.clone()),
            out: ws.root.join(out),
            seed: Some(SEED),
            config: None,
        })
    };
    cluster("det_c1.json")?;
    cluster("det_c2.json")?;
    let cluster_same = read(&ws.root.join("det_c1.json"))? == read(&ws.root.join("det_c2.json"))?;
    verdict(
        index_same && query_same && cluster_same,
        format!("byte-identical index {index_same}, query+artifacts (1 vs 4 jobs) {query_same}, clusters {cluster_same}"),
    )
}

fn report(n: usize, name: &str, run: impl FnOnce() -> Result<Verdict2>) -> bool {
    let t = Instant::now();
    let (pass, detail) = match run() {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (false, format!("error: {e:#}")),
    };
    let secs = Duration::as_secs_f64(&t.elapsed());
    println!("{} {n:>2} {name}: {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() {
    let mut results = vec![
        report(1, "metric oracle suite", c1_metric_oracle),
        report(2, "mAP oracle", c2_map_oracle),
    ];
    let ws = match Workspace::new() {
        Ok(ws) => Some(ws),
        Err(e) => {
            println!("FAIL    synthetic workspace: {e:#}");
            None
        }
    };
    match &ws {
        Some(ws) => results.push(report(3, "self-retrieval", || c3_self_retrieval(ws))),
        None => results.push(false),
    }
    results.push(report(4, "background removal", c4_background));
    results.push(report(5, "rotation estimation", c5_rotation));
    results.push(report(6, "text boxes", c6_textbox));
    results.push(report(7, "noise gate", c7_noise_gate));
    results.push(report(8, "ORB behavior", c8_orb));
    if let Some(ws) = &ws {
        results.push(report(9, "end-to-end feature retrieval", || c9_end_to_end(ws)));
        results.push(report(10, "descriptor ordering", || c10_descriptor_order(ws)));
    } else {
        results.extend([false, false]);
    }
    results.push(report(11, "clustering", c11_clustering));
    if let Some(ws) = &ws {
        results.push(report(12, "determinism", || c12_determinism(ws)));
    } else {
        results.push(false);
    }
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
