use std::collections::BTreeSet;

use super::{MetricError, Result};

/// Museum label. Non-negative for catalog paintings.
pub type Label = i64;

/// Ranking value meaning "this painting is not in the collection".
pub const UNKNOWN_LABEL: Label = -1;

#[derive(Clone, Debug, PartialEq)]
pub struct RankedRetrieval {
    ranking: Vec<Label>,
    relevant: BTreeSet<Label>,
    k: usize,
}

impl RankedRetrieval {
    pub fn new(ranking: Vec<Label>, relevant: impl IntoIterator<Item = Label>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(MetricError::ZeroCutoff);
        }
        let mut seen = BTreeSet::new();
        for &l in &ranking {
            if !seen.insert(l) {
                return Err(MetricError::DuplicateLabel(l));
            }
        }
        Ok(Self {
            ranking,
            relevant: relevant.into_iter().collect(),
            k,
        })
    }

    pub fn ranking(&self) -> &[Label] {
        &self.ranking
    }

    pub fn relevant(&self) -> &BTreeSet<Label> {
        &self.relevant
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// `(sum_{i=1..K} P@i) / K`, with P@i the fraction of the first `i` ranks
/// that are relevant. Ranks past the end of a short ranking add no hits but
/// still count in the denominator of their P@i.
pub fn ap_at_k(r: &RankedRetrieval) -> Result<f64> {
    if r.relevant.is_empty() {
        return Err(MetricError::EmptyRelevantSet);
    }
    let mut hits = 0usize;
    let mut total = 0.0;
    for i in 1..=r.k {
        if let Some(l) = r.ranking.get(i - 1) {
            if r.relevant.contains(l) {
                hits += 1;
            }
        }
        total += hits as f64 / i as f64;
    }
    Ok(total / r.k as f64)
}

/// Mean of [`ap_at_k`]. A query whose only relevant label is the unknown
/// sentinel scores 1 exactly when its ranking is `[-1]`, else 0.
pub fn map_at_k(rs: &[RankedRetrieval]) -> Result<f64> {
    if rs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut sum = 0.0;
    for r in rs {
        let unknown_only = r.relevant.len() == 1 && r.relevant.contains(&UNKNOWN_LABEL);
        sum += if unknown_only {
            if r.ranking == [UNKNOWN_LABEL] {
                1.0
            } else {
                0.0
            }
        } else {
            ap_at_k(r)?
        };
    }
    Ok(sum / rs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rr(ranking: &[Label], relevant: &[Label], k: usize) -> RankedRetrieval {
        RankedRetrieval::new(ranking.to_vec(), relevant.iter().copied(), k).unwrap()
    }

    #[test]
    fn ap_examples() {
        assert_eq!(ap_at_k(&rr(&[4], &[4], 1)).unwrap(), 1.0);
        assert_eq!(ap_at_k(&rr(&[3], &[4], 1)).unwrap(), 0.0);
        let v = ap_at_k(&rr(&[1, 7, 2], &[7], 3)).unwrap();
        assert!((v - (0.0 + 0.5 + 1.0 / 3.0) / 3.0).abs() < 1e-12);
        assert!((v - 0.2778).abs() < 1e-4);
    }

    #[test]
    fn short_rankings_keep_denominators() {
        // P@1 = 1, P@2 = 1/2, P@3 = 1/3
        let v = ap_at_k(&rr(&[5], &[5], 3)).unwrap();
        assert!((v - (1.0 + 0.5 + 1.0 / 3.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn map_examples() {
        let all = [rr(&[1], &[1], 1), rr(&[2], &[2], 1)];
        assert_eq!(map_at_k(&all).unwrap(), 1.0);
        let half = [rr(&[1], &[1], 1), rr(&[3], &[2], 1)];
        assert_eq!(map_at_k(&half).unwrap(), 0.5);
        let unknown = [rr(&[-1], &[-1], 1), rr(&[5], &[-1], 1)];
        assert_eq!(map_at_k(&unknown).unwrap(), 0.5);
        // Sentinel answers are judged as a whole, even at larger K.
        assert_eq!(map_at_k(&[rr(&[-1], &[-1], 3)]).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(map_at_k(&[]), Err(MetricError::EmptyInput));
        assert_eq!(ap_at_k(&rr(&[1], &[], 1)), Err(MetricError::EmptyRelevantSet));
        assert_eq!(RankedRetrieval::new(vec![1], [1], 0), Err(MetricError::ZeroCutoff));
        assert_eq!(RankedRetrieval::new(vec![1, 1], [1], 2), Err(MetricError::DuplicateLabel(1)));
    }
}
