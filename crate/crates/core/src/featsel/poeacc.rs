//! Probability of error plus average correlation coefficient, greedy order.
//!
//! The first pick has the smallest min-max normalized POE. Every later pick
//! minimizes `w_rho * poe + w_alpha * acc`, where `acc` is the mean absolute
//! correlation with the features already chosen, min-max normalized over
//! the remaining candidates.

use super::bc::{class_histograms, default_bins};
use super::{Class, FeatureRanking, LabeledFingerprintSet, ScoreOrder, SelectionMethod};
use crate::{Error, Result};

/// Histogram estimate of the Bayes error `sum_b min(p1 P1(b), p2 P2(b))`
/// with class priors from the counts.
pub fn poe_histogram(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let (p, q) = class_histograms(a, b, bins);
    let total = (a.len() + b.len()) as f64;
    let (pa, pb) = (a.len() as f64 / total, b.len() as f64 / total);
    p.iter().zip(&q).map(|(x, y)| (pa * x).min(pb * y)).sum()
}

fn min_max_normalize(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    for v in values.iter_mut() {
        *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
    }
}

pub fn rank_poeacc(
    set: &LabeledFingerprintSet,
    w_rho: f64,
    w_alpha: f64,
    bins: Option<usize>,
) -> Result<FeatureRanking> {
    if !(w_rho > 0.0 && w_rho < 1.0 && w_alpha > 0.0 && w_alpha < 1.0)
        || (w_rho + w_alpha - 1.0).abs() > 1e-9
    {
        return Err(Error::InvalidParams(format!(
            "POEACC weights must lie in (0, 1) and sum to 1, got {w_rho} and {w_alpha}"
        )));
    }
    let bins = bins.unwrap_or_else(|| default_bins(set.len()));
    if bins < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 bins, got {bins}")));
    }
    let d = set.n_features();
    let x = set.features();
    let n = x.rows() as f64;

    let mut poe: Vec<f64> = (0..d)
        .map(|r| {
            poe_histogram(
                &set.class_column(Class::Authorized, r),
                &set.class_column(Class::Other, r),
                bins,
            )
        })
        .collect();
    min_max_normalize(&mut poe);

    let mut mean = vec![0.0; d];
    for row in x.iter_rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut centered: Vec<Vec<f64>> = (0..d)
        .map(|r| x.iter_rows().map(|row| row[r] - mean[r]).collect())
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let flagged: Vec<usize> = (0..d).filter(|&r| norms[r] == 0.0).collect();
    for (c, &nrm) in centered.iter_mut().zip(&norms) {
        if nrm > 0.0 {
            c.iter_mut().for_each(|v| *v /= nrm);
        }
    }
    let abs_corr = |r: usize, q: usize| -> f64 {
        if norms[r] == 0.0 || norms[q] == 0.0 {
            return 0.0;
        }
        centered[r]
            .iter()
            .zip(&centered[q])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs()
            .min(1.0)
    };

    let mut scores = vec![f64::NAN; d];
    let mut order = Vec::with_capacity(d);
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut corr_sum = vec![0.0; d];

    let first = *remaining
        .iter()
        .min_by(|&&a, &&b| poe[a].total_cmp(&poe[b]).then(a.cmp(&b)))
        .expect("at least one feature");
    scores[first] = poe[first];
    order.push(first);
    remaining.retain(|&r| r != first);

    while !remaining.is_empty() {
        let last = *order.last().unwrap();
        for &r in &remaining {
            corr_sum[r] += abs_corr(r, last);
        }
        let mut acc: Vec<f64> = remaining
            .iter()
            .map(|&r| corr_sum[r] / order.len() as f64)
            .collect();
        min_max_normalize(&mut acc);
        let (pos, score) = remaining
            .iter()
            .zip(&acc)
            .map(|(&r, &a)| w_rho * poe[r] + w_alpha * a)
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        let pick = remaining.remove(pos);
        scores[pick] = score;
        order.push(pick);
    }

    Ok(FeatureRanking {
        method: SelectionMethod::Poeacc,
        scores,
        order,
        direction: ScoreOrder::Sequential,
        flagged,
    })
}
