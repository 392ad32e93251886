//! Relief-F feature weights, one deterministic pass over every sample.
//!
//! Per-feature differences are `|a - b| / (max_r - min_r)` with the range
//! taken over the whole column (zero for constant columns). Neighbors are
//! found by Euclidean distance in that range-normalized space, so scaling a
//! column changes neither the differences nor the neighbor sets.

use super::{Class, FeatureRanking, LabeledFingerprintSet, ScoreOrder, SelectionMethod};
use crate::{Error, Matrix, Result};

fn normalized(set: &LabeledFingerprintSet) -> Matrix {
    let x = set.features();
    let d = x.cols();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in x.iter_rows() {
        for r in 0..d {
            lo[r] = lo[r].min(row[r]);
            hi[r] = hi[r].max(row[r]);
        }
    }
    let mut out = x.clone();
    for i in 0..out.rows() {
        for (r, v) in out.row_mut(i).iter_mut().enumerate() {
            let span = hi[r] - lo[r];
            *v = if span > 0.0 { (*v - lo[r]) / span } else { 0.0 };
        }
    }
    out
}

/// Raw Relief-F weights for `n_k` hits and misses per sample.
pub fn relieff_weights(set: &LabeledFingerprintSet, n_k: usize) -> Result<Vec<f64>> {
    if n_k == 0 {
        return Err(Error::InvalidParams("Relief-F needs at least one neighbor".into()));
    }
    for class in [Class::Authorized, Class::Other] {
        let size = set.class_count(class);
        if size < n_k + 1 {
            return Err(Error::InvalidNeighborCount {
                neighbors: n_k,
                class_size: size,
            });
        }
    }
    let z = normalized(set);
    let n = z.rows();
    let d = z.cols();
    let labels = set.labels();
    let prior = |c: Class| set.class_count(c) as f64 / n as f64;

    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dij: f64 = z
                .row(i)
                .iter()
                .zip(z.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            dist[i * n + j] = dij;
            dist[j * n + i] = dij;
        }
    }

    let scale = 1.0 / (n as f64 * n_k as f64);
    let mut w = vec![0.0; d];
    let mut candidates: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        let ci = labels[i];
        let nearest = |class: Class, out: &mut Vec<usize>| {
            out.clear();
            out.extend((0..n).filter(|&j| j != i && labels[j] == class));
            out.sort_by(|&a, &b| dist[i * n + a].total_cmp(&dist[i * n + b]).then(a.cmp(&b)));
            out.truncate(n_k);
        };
        nearest(ci, &mut candidates);
        let zi = z.row(i);
        for &h in &candidates {
            for (r, wr) in w.iter_mut().enumerate() {
                *wr -= (zi[r] - z.get(h, r)).abs() * scale;
            }
        }
        for cj in [Class::Authorized, Class::Other] {
            if cj == ci {
                continue;
            }
            let factor = prior(cj) / (1.0 - prior(ci)) * scale;
            nearest(cj, &mut candidates);
            for &m in &candidates {
                for (r, wr) in w.iter_mut().enumerate() {
                    *wr += (zi[r] - z.get(m, r)).abs() * factor;
                }
            }
        }
    }
    Ok(w)
}

/// Features ordered from the largest weight to the smallest.
pub fn rank_relieff(set: &LabeledFingerprintSet, n_k: usize) -> Result<FeatureRanking> {
    Ok(FeatureRanking::from_scores(
        SelectionMethod::ReliefF,
        relieff_weights(set, n_k)?,
        ScoreOrder::Descending,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_features_get_zero_weight() {
        let c1: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64 * 0.1, 4.0]).collect();
        let c2: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, 5.0 + i as f64 * 0.1, 4.0]).collect();
        let set = LabeledFingerprintSet::from_classes(&c1, &c2).unwrap();
        let w = relieff_weights(&set, 2).unwrap();
        assert!(w[1] > 0.0);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn small_class_rejected() {
        let c1 = vec![vec![1.0], vec![2.0]];
        let c2 = vec![vec![3.0], vec![4.0], vec![5.0]];
        let set = LabeledFingerprintSet::from_classes(&c1, &c2).unwrap();
        assert!(matches!(
            rank_relieff(&set, 2),
            Err(Error::InvalidNeighborCount { neighbors: 2, class_size: 2 })
        ));
    }
}
