use serde::{Deserialize, Serialize};

use super::{MetricError, Result};

/// Tolerance on the L1 mass of a normalized histogram.
pub const NORMALIZED_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    values: Vec<f64>,
    normalized: bool,
}

impl Histogram {
    /// Raw bin values. Rejects empty input and negative or non-finite bins.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MetricError::InvalidHistogram);
        }
        let sum: f64 = values.iter().sum();
        let normalized = (sum - 1.0).abs() <= NORMALIZED_TOLERANCE;
        Ok(Self { values, normalized })
    }

    /// Divide by the total mass; an all-zero histogram stays unnormalized.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let mut h = Self::new(values)?;
        let sum: f64 = h.values.iter().sum();
        if sum > 0.0 {
            h.values.iter_mut().for_each(|v| *v /= sum);
            h.normalized = true;
        }
        Ok(h)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Hellinger,
    Chi2,
    Intersect,
    Correlation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    HigherIsCloser,
    LowerIsCloser,
}

impl MeasureKind {
    pub fn polarity(self) -> Polarity {
        match self {
            MeasureKind::Chi2 => Polarity::LowerIsCloser,
            _ => Polarity::HigherIsCloser,
        }
    }

    pub fn requires_normalized(self) -> bool {
        matches!(self, MeasureKind::Hellinger | MeasureKind::Intersect)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub polarity: Polarity,
}

impl SimilarityScore {
    /// Ordering where "less" means closer, whatever the polarity.
    pub fn closeness_cmp(&self, other: &Self) -> std::cmp::Ordering {
        match self.polarity {
            Polarity::HigherIsCloser => other.value.total_cmp(&self.value),
            Polarity::LowerIsCloser => self.value.total_cmp(&other.value),
        }
    }
}

pub fn histogram_measure(kind: MeasureKind, h1: &Histogram, h2: &Histogram) -> Result<SimilarityScore> {
    if h1.len() != h2.len() {
        return Err(MetricError::LengthMismatch(h1.len(), h2.len()));
    }
    if kind.requires_normalized() && !(h1.is_normalized() && h2.is_normalized()) {
        return Err(MetricError::NotNormalized(kind));
    }
    let (a, b) = (h1.values(), h2.values());
    let value = match kind {
        MeasureKind::Hellinger => a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum(),
        MeasureKind::Chi2 => a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let s = x + y;
                if s > 0.0 {
                    (x - y) * (x - y) / s
                } else {
                    0.0
                }
            })
            .sum(),
        MeasureKind::Intersect => a.iter().zip(b).map(|(x, y)| x.min(*y)).sum(),
        MeasureKind::Correlation => correlation(a, b),
    };
    Ok(SimilarityScore {
        value,
        polarity: kind.polarity(),
    })
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (u, v) = (x - ma, y - mb);
        num += u * v;
        da += u * u;
        db += v * v;
    }
    let den = (da * db).sqrt();
    if den > 0.0 {
        (num / den).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(v: &[f64]) -> Histogram {
        Histogram::new(v.to_vec()).unwrap()
    }

    fn m(kind: MeasureKind, a: &[f64], b: &[f64]) -> f64 {
        histogram_measure(kind, &h(a), &h(b)).unwrap().value
    }

    #[test]
    fn hellinger_examples() {
        assert!((m(MeasureKind::Hellinger, &[0.25, 0.75], &[0.25, 0.75]) - 1.0).abs() < 1e-12);
        assert_eq!(m(MeasureKind::Hellinger, &[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert!((m(MeasureKind::Hellinger, &[0.5, 0.5], &[1.0, 0.0]) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn chi2_examples() {
        assert_eq!(m(MeasureKind::Chi2, &[0.2, 0.0, 0.8], &[0.2, 0.0, 0.8]), 0.0);
        // (0.5-1)^2/1.5 + (0.5-0)^2/0.5
        let expect = 0.25 / 1.5 + 0.5;
        assert!((m(MeasureKind::Chi2, &[0.5, 0.5], &[1.0, 0.0]) - expect).abs() < 1e-12);
    }

    #[test]
    fn correlation_affine_and_degenerate() {
        let a = [0.1, 0.4, 0.2, 0.3];
        let b: Vec<f64> = a.iter().map(|x| 3.0 * x + 0.5).collect();
        assert!((m(MeasureKind::Correlation, &a, &b) - 1.0).abs() < 1e-9);
        assert_eq!(m(MeasureKind::Correlation, &[0.25; 4], &a), 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            histogram_measure(MeasureKind::Chi2, &h(&[1.0]), &h(&[0.5, 0.5])),
            Err(MetricError::LengthMismatch(1, 2))
        );
        assert_eq!(
            histogram_measure(MeasureKind::Hellinger, &h(&[2.0, 1.0]), &h(&[0.5, 0.5])),
            Err(MetricError::NotNormalized(MeasureKind::Hellinger))
        );
        assert!(histogram_measure(MeasureKind::Chi2, &h(&[2.0, 1.0]), &h(&[0.5, 0.5])).is_ok());
        assert!(Histogram::new(vec![]).is_err());
        assert!(Histogram::new(vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn polarity_ordering() {
        let close = SimilarityScore { value: 0.9, polarity: Polarity::HigherIsCloser };
        let far = SimilarityScore { value: 0.1, polarity: Polarity::HigherIsCloser };
        assert_eq!(close.closeness_cmp(&far), std::cmp::Ordering::Less);
        let close = SimilarityScore { value: 0.1, polarity: Polarity::LowerIsCloser };
        let far = SimilarityScore { value: 0.9, polarity: Polarity::LowerIsCloser };
        assert_eq!(close.closeness_cmp(&far), std::cmp::Ordering::Less);
    }

    fn arb_normalized(n: usize) -> impl Strategy<Value = Histogram> {
        proptest::collection::vec(0.0f64..1.0, n)
            .prop_filter("non-zero mass", |v| v.iter().sum::<f64>() > 1e-6)
            .prop_map(|v| Histogram::normalized(v).unwrap())
    }

    proptest! {
        #[test]
        fn measures_symmetric_and_bounded((a, b) in (1usize..48).prop_flat_map(|n| (arb_normalized(n), arb_normalized(n)))) {
            for kind in [MeasureKind::Hellinger, MeasureKind::Chi2, MeasureKind::Intersect, MeasureKind::Correlation] {
                let ab = histogram_measure(kind, &a, &b).unwrap().value;
                let ba = histogram_measure(kind, &b, &a).unwrap().value;
                prop_assert!((ab - ba).abs() < 1e-12);
                match kind {
                    MeasureKind::Hellinger | MeasureKind::Intersect => prop_assert!((-1e-12..=1.0 + 1e-9).contains(&ab)),
                    MeasureKind::Chi2 => prop_assert!(ab >= 0.0),
                    MeasureKind::Correlation => prop_assert!((-1.0..=1.0).contains(&ab)),
                }
            }
        }
    }
}
