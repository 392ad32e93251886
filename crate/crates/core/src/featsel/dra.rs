//! Relevance-vector ranking and the relevance learner that feeds it.
//!
//! The learner is generalized relevance LVQ with one prototype per class
//! and multiplicative relevance updates. Inputs are z-scored first so the
//! relevances compare features on equal footing.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{
    standardize, Class, FeatureRanking, LabeledFingerprintSet, ScoreOrder, SelectionMethod,
};
use crate::{seed, Error, Result};

/// Ranks features by descending relevance; ties go to the lower index.
pub fn rank_dra(relevance: &[f64]) -> Result<FeatureRanking> {
    if relevance.is_empty() {
        return Err(Error::InvalidInput("empty relevance vector".into()));
    }
    if let Some((index, &value)) = relevance
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::InvalidRelevance { index, value });
    }
    Ok(FeatureRanking::from_scores(
        SelectionMethod::Dra,
        relevance.to_vec(),
        ScoreOrder::Descending,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrlvqParams {
    pub epochs: usize,
    /// Prototype step per epoch; divided by the number of samples per update.
    pub prototype_rate: f64,
    /// Relevance step per epoch; divided by the number of samples per update.
    pub relevance_rate: f64,
    /// Largest per-epoch relevance change that counts as converged.
    pub tolerance: f64,
}

impl Default for GrlvqParams {
    fn default() -> Self {
        Self {
            epochs: 20,
            prototype_rate: 1.0,
            relevance_rate: 0.2,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceFit {
    /// Relevance in `[0, 1]`, max entry 1.
    pub relevance: Vec<f64>,
    pub converged: bool,
    pub epochs_run: usize,
}

pub fn train_grlvq_relevance(
    set: &LabeledFingerprintSet,
    params: &GrlvqParams,
    seed: u64,
) -> Result<RelevanceFit> {
    if params.epochs == 0 {
        return Err(Error::InvalidParams("GRLVQ needs at least one epoch".into()));
    }
    let x = standardize(set.features());
    let n = x.rows();
    let d = x.cols();
    let class_index = |c: Class| match c {
        Class::Authorized => 0usize,
        Class::Other => 1usize,
    };

    let mut protos = vec![vec![0.0; d]; 2];
    let mut counts = [0usize; 2];
    for (i, row) in x.iter_rows().enumerate() {
        let c = class_index(set.labels()[i]);
        counts[c] += 1;
        for (p, v) in protos[c].iter_mut().zip(row) {
            *p += v;
        }
    }
    for c in 0..2 {
        protos[c].iter_mut().for_each(|p| *p /= counts[c] as f64);
    }

    let mut lambda = vec![1.0 / d as f64; d];
    let eps_w = params.prototype_rate / n as f64;
    let eps_l = params.relevance_rate / n as f64;
    let mut rng = seed::rng(seed, &[seed::RELEVANCE]);
    let mut order: Vec<usize> = (0..n).collect();
    let mut converged = false;
    let mut epochs_run = 0;
    let mut grad = vec![0.0; d];

    for _ in 0..params.epochs {
        epochs_run += 1;
        let before = lambda.clone();
        order.shuffle(&mut rng);
        for &i in &order {
            let xi = x.row(i);
            let own = class_index(set.labels()[i]);
            let (pj, pk) = if own == 0 {
                let (a, b) = protos.split_at_mut(1);
                (&mut a[0], &mut b[0])
            } else {
                let (a, b) = protos.split_at_mut(1);
                (&mut b[0], &mut a[0])
            };
            let mut dj = 0.0;
            let mut dk = 0.0;
            for r in 0..d {
                dj += lambda[r] * (xi[r] - pj[r]).powi(2);
                dk += lambda[r] * (xi[r] - pk[r]).powi(2);
            }
            let denom = (dj + dk) * (dj + dk);
            if !(denom > 0.0) {
                continue;
            }
            // mu = (dj - dk)/(dj + dk)
            let xi_plus = 2.0 * dk / denom;
            let xi_minus = 2.0 * dj / denom;
            for r in 0..d {
                let ej = xi[r] - pj[r];
                let ek = xi[r] - pk[r];
                grad[r] = xi_plus * ej * ej - xi_minus * ek * ek;
                pj[r] += eps_w * 2.0 * xi_plus * lambda[r] * ej;
                pk[r] -= eps_w * 2.0 * xi_minus * lambda[r] * ek;
            }
            let mut total = 0.0;
            for r in 0..d {
                lambda[r] *= (-eps_l * grad[r]).exp();
                total += lambda[r];
            }
            if !(total > 0.0 && total.is_finite()) {
                return Err(Error::NumericalFailure("relevance vector collapsed".into()));
            }
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        let change = lambda
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).abs() * d as f64)
            .fold(0.0, f64::max);
        if change < params.tolerance {
            converged = true;
            break;
        }
    }

    let peak = lambda.iter().cloned().fold(0.0, f64::max);
    let relevance = lambda.iter().map(|l| (l / peak).clamp(0.0, 1.0)).collect();
    Ok(RelevanceFit {
        relevance,
        converged,
        epochs_run,
    })
}
