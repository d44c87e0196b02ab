use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DescriptorKind, EngineError, MuseumIndex, Result};
use crate::metrics::Label;

const MAX_ITERATIONS: usize = 100;
const RESTARTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares after each assignment step.
    pub wcss_history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut t = rng.random_range(0.0..total);
            let mut chosen = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if t < d {
                    chosen = i;
                    break;
                }
                t -= d;
            }
            chosen
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[pick].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, centers.last().expect("non-empty")));
        }
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> KMeansResult {
    let dim = points[0].len();
    let mut assignments: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        let mut wcss = 0.0;
        let next: Vec<usize> = points
            .iter()
            .map(|p| {
                let mut best = (0, f64::INFINITY);
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = sq_dist(p, centroid);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                wcss += best.1;
                best.0
            })
            .collect();
        history.push(wcss);
        if next == assignments {
            break;
        }
        assignments = next;
        let mut sums = vec![vec![0.0; dim]; centroids.len()];
        let mut counts = vec![0usize; centroids.len()];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for (c, (s, &n)) in sums.into_iter().zip(&counts).enumerate() {
            // An emptied cluster keeps its centroid.
            if n > 0 {
                centroids[c] = s.into_iter().map(|v| v / n as f64).collect();
            }
        }
    }
    KMeansResult {
        assignments,
        centroids,
        wcss_history: history,
    }
}

/// Seeded k-means++ with Lloyd iterations until assignments repeat or 100
/// steps; the best of several restarts by final sum of squares. Ties assign
/// to the lower cluster index.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult> {
    if k == 0 || points.len() < k {
        return Err(EngineError::FewerImagesThanClusters {
            images: points.len(),
            clusters: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..RESTARTS {
        let run = lloyd(points, plus_plus(points, k, &mut rng));
        let better = match &best {
            None => true,
            Some(b) => run.wcss_history.last() < b.wcss_history.last(),
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment {
    /// Cluster id per label, `set · k_texture + texture cluster`.
    pub clusters: BTreeMap<Label, usize>,
    pub cluster_count: usize,
    /// Sum-of-squares trace of every k-means run, brightness stage first.
    pub histories: Vec<Vec<f64>>,
}

impl ClusterAssignment {
    pub fn members(&self, cluster: usize) -> Vec<Label> {
        self.clusters.iter().filter(|(_, &c)| c == cluster).map(|(&l, _)| l).collect()
    }
}

/// Split the museum by mean brightness into `k_bright` sets, darkest first,
/// then each set by texture descriptor into up to `k_texture` clusters.
pub fn kmeans_cluster(index: &MuseumIndex, k_bright: usize, k_texture: usize, seed: u64) -> Result<ClusterAssignment> {
    let n = index.entries.len();
    if k_bright == 0 || k_texture == 0 || n < k_bright * k_texture {
        return Err(EngineError::FewerImagesThanClusters {
            images: n,
            clusters: k_bright * k_texture,
        });
    }
    let luma: Vec<Vec<f64>> = index.entries.iter().map(|e| vec![e.mean_luma]).collect();
    let stage1 = kmeans(&luma, k_bright, seed)?;
    let mut order: Vec<usize> = (0..k_bright).collect();
    order.sort_by(|&a, &b| stage1.centroids[a][0].total_cmp(&stage1.centroids[b][0]).then(a.cmp(&b)));
    let mut rank = vec![0; k_bright];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let mut histories = vec![stage1.wcss_history.clone()];
    let mut clusters = BTreeMap::new();
    for set in 0..k_bright {
        let members: Vec<usize> = (0..n).filter(|&i| rank[stage1.assignments[i]] == set).collect();
        if members.is_empty() {
            continue;
        }
        let points = members
            .iter()
            .map(|&i| {
                index.entries[i]
                    .descriptors
                    .get(&DescriptorKind::Texture)
                    .map(|v| v.values().to_vec())
                    .ok_or(EngineError::MissingDescriptor(DescriptorKind::Texture))
            })
            .collect::<Result<Vec<_>>>()?;
        let k = k_texture.min(members.len());
        let stage2 = kmeans(&points, k, seed.wrapping_add(1 + set as u64))?;
        histories.push(stage2.wcss_history);
        for (&i, &c) in members.iter().zip(&stage2.assignments) {
            clusters.insert(index.entries[i].label, set * k_texture + c);
        }
    }
    Ok(ClusterAssignment {
        clusters,
        cluster_count: k_bright * k_texture,
        histories,
    })
}
