use super::{BinaryDescriptor, Keypoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Similar,
    Dissimilar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchResult {
    /// `(query index, gallery index, distance)`, ascending query index.
    pub pairs: Vec<(usize, usize, u32)>,
    pub verdict: Verdict,
}

/// Nearest index (lowest on ties) and the smallest distance among the rest.
fn nearest(d: &BinaryDescriptor, others: &[BinaryDescriptor]) -> Option<(usize, u32, Option<u32>)> {
    let mut best: Option<(usize, u32)> = None;
    let mut second: Option<u32> = None;
    for (j, o) in others.iter().enumerate() {
        let h = d.hamming(o);
        match best {
            Some((_, b)) if h >= b => {
                if second.is_none_or(|s| h < s) {
                    second = Some(h);
                }
            }
            _ => {
                if let Some((_, b)) = best {
                    second = Some(b);
                }
                best = Some((j, h));
            }
        }
    }
    best.map(|(j, h)| (j, h, second))
}

fn passes_ratio(best: u32, second: Option<u32>, ratio: Option<f64>) -> bool {
    match (ratio, second) {
        (Some(r), Some(s)) => (best as f64) < r * s as f64,
        _ => true,
    }
}

/// Brute-force mutual nearest neighbors under Hamming distance.
///
/// A pair survives when each side is the other's nearest neighbor, the
/// distance is at most `max_distance`, and (with `ratio`) the best distance
/// is below `ratio` times the second best on both sides.
pub fn match_descriptors(
    query: &[BinaryDescriptor],
    gallery: &[BinaryDescriptor],
    max_distance: u32,
    ratio: Option<f64>,
    min_matches: usize,
) -> MatchResult {
    let back: Vec<_> = gallery.iter().map(|g| nearest(g, query)).collect();
    let mut pairs = Vec::new();
    for (i, q) in query.iter().enumerate() {
        let Some((j, d, second)) = nearest(q, gallery) else { continue };
        let Some((bi, _, back_second)) = back[j] else { continue };
        if bi == i && d <= max_distance && passes_ratio(d, second, ratio) && passes_ratio(d, back_second, ratio) {
            pairs.push((i, j, d));
        }
    }
    let verdict = if pairs.len() >= min_matches.max(1) {
        Verdict::Similar
    } else {
        Verdict::Dissimilar
    };
    MatchResult { pairs, verdict }
}

/// Hypotheses are drawn from at most this many lowest-distance pairs.
const HYPOTHESIS_POOL: usize = 60;
const MIN_SCALE: f64 = 0.25;
const MAX_SCALE: f64 = 4.0;

/// Largest subset of `pairs` consistent with one similarity transform from
/// query to gallery keypoints.
///
/// Every two-pair hypothesis among the closest pairs is tried exhaustively,
/// so the result is deterministic; ties keep the earliest hypothesis. A
/// pair is an inlier when its mapped query point lands within `tolerance`
/// gallery pixels. Output keeps ascending query order. Fewer than two pairs
/// are returned unchanged.
pub fn consistent_pairs(
    pairs: &[(usize, usize, u32)],
    query: &[Keypoint],
    gallery: &[Keypoint],
    tolerance: f64,
) -> Vec<(usize, usize, u32)> {
    if pairs.len() < 2 {
        return pairs.to_vec();
    }
    let pt = |k: &Keypoint| (k.x as f64, k.y as f64);
    let ends: Vec<((f64, f64), (f64, f64))> = pairs.iter().map(|p| (pt(&query[p.0]), pt(&gallery[p.1]))).collect();
    let mut pool: Vec<usize> = (0..pairs.len()).collect();
    pool.sort_by_key(|&i| (pairs[i].2, i));
    pool.truncate(HYPOTHESIS_POOL);
    let tol2 = tolerance * tolerance;
    let mut best: Vec<usize> = vec![pool[0]];
    for (ai, &a) in pool.iter().enumerate() {
        for &b in &pool[ai + 1..] {
            let ((qa, ga), (qb, gb)) = (ends[a], ends[b]);
            let (dqx, dqy) = (qb.0 - qa.0, qb.1 - qa.1);
            let (dgx, dgy) = (gb.0 - ga.0, gb.1 - ga.1);
            let n = dqx * dqx + dqy * dqy;
            if n < 1.0 {
                continue;
            }
            // Complex ratio dg / dq gives scale and rotation.
            let (sr, si) = ((dgx * dqx + dgy * dqy) / n, (dgy * dqx - dgx * dqy) / n);
            let scale = (sr * sr + si * si).sqrt();
            if !(MIN_SCALE..=MAX_SCALE).contains(&scale) {
                continue;
            }
            let inliers: Vec<usize> = (0..pairs.len())
                .filter(|&i| {
                    let ((qx, qy), (gx, gy)) = ends[i];
                    let (rx, ry) = (qx - qa.0, qy - qa.1);
                    let (mx, my) = (ga.0 + sr * rx - si * ry, ga.1 + si * rx + sr * ry);
                    (mx - gx).powi(2) + (my - gy).powi(2) <= tol2
                })
                .collect();
            if inliers.len() > best.len() {
                best = inliers;
            }
        }
    }
    best.sort_unstable();
    best.into_iter().map(|i| pairs[i]).collect()
}
