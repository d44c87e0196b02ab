use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{DescriptorKind, DescriptorWeights, EngineError, MuseumIndex, Result};
use crate::descriptors::{compare, AuthorMatch, DescriptorVector};
use crate::features::{match_features, FeatureSet, OrbParams, Verdict};
use crate::metrics::{Label, MeasureKind, Polarity, SimilarityScore, UNKNOWN_LABEL};

/// Labels best first with the score that ordered them.
pub type Ranking = Vec<(Label, f64)>;

/// Everything extracted from one query crop.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CropQuery {
    pub descriptors: BTreeMap<DescriptorKind, DescriptorVector>,
    /// Closest catalog author to the crop's text, when text was read.
    pub author: Option<AuthorMatch>,
    pub features: FeatureSet,
}

fn entry_scores(index: &MuseumIndex, query: &DescriptorVector, kind: DescriptorKind, measure: MeasureKind) -> Result<Vec<SimilarityScore>> {
    index
        .entries
        .iter()
        .map(|e| {
            let v = e.descriptors.get(&kind).ok_or(EngineError::MissingDescriptor(kind))?;
            Ok(compare(measure, query, v)?)
        })
        .collect()
}

/// Every entry ordered by `measure` closeness to `query`; ties go to the
/// lower label.
pub fn rank_by_descriptor(
    index: &MuseumIndex,
    query: &DescriptorVector,
    kind: DescriptorKind,
    measure: MeasureKind,
) -> Result<Ranking> {
    let scores = entry_scores(index, query, kind, measure)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .closeness_cmp(&scores[b])
            .then(index.entries[a].label.cmp(&index.entries[b].label))
    });
    Ok(order.into_iter().map(|i| (index.entries[i].label, scores[i].value)).collect())
}

/// Distances in [0, 1], lower closer: min-max normalized over the index,
/// flipped for similarity measures. A constant column maps to 0.
fn normalized_distances(scores: &[SimilarityScore]) -> Vec<f64> {
    let lo = scores.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let hi = scores.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .map(|s| {
            if hi <= lo {
                return 0.0;
            }
            let n = (s.value - lo) / (hi - lo);
            match s.polarity {
                Polarity::LowerIsCloser => n,
                Polarity::HigherIsCloser => 1.0 - n,
            }
        })
        .collect()
}

/// Weighted sum of per-kind normalized distances, ascending; ties go to the
/// lower label. Text contributes 0 to labels in the best author set and 1
/// elsewhere.
pub fn combine_rankings(
    index: &MuseumIndex,
    crop: &CropQuery,
    weights: &DescriptorWeights,
    measures: impl Fn(DescriptorKind) -> MeasureKind,
) -> Result<Ranking> {
    let active = weights.normalized()?;
    let n = index.entries.len();
    let mut total = vec![0.0; n];
    for (kind, w) in active {
        let d = match kind {
            DescriptorKind::Text => index
                .entries
                .iter()
                .map(|e| match &crop.author {
                    Some(m) if m.labels.contains(&e.label) => 0.0,
                    _ => 1.0,
                })
                .collect(),
            _ => {
                let q = crop.descriptors.get(&kind).ok_or(EngineError::MissingDescriptor(kind))?;
                normalized_distances(&entry_scores(index, q, kind, measures(kind))?)
            }
        };
        for (t, v) in total.iter_mut().zip(d) {
            *t += w * v;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        total[a]
            .total_cmp(&total[b])
            .then(index.entries[a].label.cmp(&index.entries[b].label))
    });
    Ok(order.into_iter().map(|i| (index.entries[i].label, total[i])).collect())
}

/// Labels in the best author set first, then the rest, each by label.
pub fn rank_by_text(index: &MuseumIndex, author: Option<&AuthorMatch>) -> Ranking {
    let crop = CropQuery {
        author: author.cloned(),
        ..CropQuery::default()
    };
    combine_rankings(index, &crop, &DescriptorWeights::only(DescriptorKind::Text), |_| MeasureKind::Hellinger)
        .expect("text-only weights are valid")
}

/// Entries judged similar, by descending match count then label; the lone
/// sentinel when none is.
pub fn rank_by_features(index: &MuseumIndex, crop: &FeatureSet, params: &OrbParams) -> Ranking {
    let results: Vec<(Label, usize, Verdict)> = index
        .entries
        .par_iter()
        .map(|e| {
            let m = match_features(crop, &e.features, params);
            (e.label, m.pairs.len(), m.verdict)
        })
        .collect();
    let mut similar: Vec<(Label, usize)> = results
        .into_iter()
        .filter(|r| r.2 == Verdict::Similar)
        .map(|r| (r.0, r.1))
        .collect();
    if similar.is_empty() {
        return vec![(UNKNOWN_LABEL, 0.0)];
    }
    similar.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    similar.into_iter().map(|(l, c)| (l, c as f64)).collect()
}
