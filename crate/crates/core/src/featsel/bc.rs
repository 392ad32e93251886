//! Bhattacharyya coefficient between class-conditional histograms.

use super::{Class, FeatureRanking, LabeledFingerprintSet, ScoreOrder, SelectionMethod};
use crate::{Error, Result};

/// ceil(sqrt(n)), at least 2.
pub fn default_bins(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(2)
}

/// Probability histograms of `a` and `b` over `bins` equal-width bins on
/// their pooled `[min, max]`. A zero-width range puts all mass in bin 0.
pub fn class_histograms(a: &[f64], b: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = a
        .iter()
        .chain(b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let width = hi - lo;
    let hist = |xs: &[f64]| {
        let mut h = vec![0.0; bins];
        for &x in xs {
            let k = if width > 0.0 {
                (((x - lo) / width) * bins as f64).floor() as usize
            } else {
                0
            };
            h[k.min(bins - 1)] += 1.0;
        }
        let n = xs.len().max(1) as f64;
        h.iter_mut().for_each(|v| *v /= n);
        h
    };
    (hist(a), hist(b))
}

/// `sum_b sqrt(p(b) q(b))`.
pub fn bhattacharyya(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(x, y)| (x * y).sqrt()).sum::<f64>().min(1.0)
}

/// Scores every feature by its class-histogram overlap; smallest first.
pub fn rank_bc(set: &LabeledFingerprintSet, bins: Option<usize>) -> Result<FeatureRanking> {
    let bins = bins.unwrap_or_else(|| default_bins(set.len()));
    if bins < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 bins, got {bins}")));
    }
    let scores = (0..set.n_features())
        .map(|r| {
            let (p, q) = class_histograms(
                &set.class_column(Class::Authorized, r),
                &set.class_column(Class::Other, r),
                bins,
            );
            bhattacharyya(&p, &q)
        })
        .collect();
    Ok(FeatureRanking::from_scores(
        SelectionMethod::Bc,
        scores,
        ScoreOrder::Ascending,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_built_histograms() {
        let p = [0.5, 0.5, 0.0, 0.0];
        let q = [0.0, 0.5, 0.5, 0.0];
        assert!((bhattacharyya(&p, &q) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identical_and_disjoint_features() {
        let c1: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, i as f64]).collect();
        let c2: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 100.0 + i as f64]).collect();
        let set = LabeledFingerprintSet::from_classes(&c1, &c2).unwrap();
        let r = rank_bc(&set, None).unwrap();
        assert!((r.scores[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.scores[1], 0.0);
        assert_eq!(r.order, vec![1, 0]);
    }

    #[test]
    fn constant_feature_overlaps_fully() {
        let (p, q) = class_histograms(&[2.0; 5], &[2.0; 3], 4);
        assert_eq!(bhattacharyya(&p, &q), 1.0);
    }
}
