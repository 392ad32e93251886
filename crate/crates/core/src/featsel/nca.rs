//! Neighborhood component analysis feature weighting.
//!
//! Minimizes the regularized leave-one-out misclassification probability
//!
//! ```text
//! E(w) = 1/N sum_i sum_{j != i} p_ij l(c_i, c_j) + lambda_R sum_r w_r^2
//! p_ij = exp(-d_w(i, j) / psi) / sum_{k != i} exp(-d_w(i, k) / psi)
//! d_w(i, j) = sum_r w_r^2 |f_ir - f_jr|
//! ```
//!
//! by gradient descent with backtracking. The step never grows, so the
//! objective trace is non-increasing. Features are z-scored first.

use serde::{Deserialize, Serialize};

use super::{
    standardize, FeatureRanking, LabeledFingerprintSet, ScoreOrder, SelectionMethod,
};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NcaParams {
    /// `None` means `1 / N_tau`.
    pub lambda_r: Option<f64>,
    /// Kernel width.
    pub psi: f64,
    /// Initial step; `None` means `1 / N_tau`.
    pub step: Option<f64>,
    pub iterations: usize,
}

impl Default for NcaParams {
    fn default() -> Self {
        Self {
            lambda_r: None,
            psi: 1.0,
            step: None,
            iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcaFit {
    pub ranking: FeatureRanking,
    pub weights: Vec<f64>,
    /// Objective before the first step and after every accepted step.
    pub objective: Vec<f64>,
}

struct Problem<'a> {
    x: &'a Matrix,
    same: Vec<bool>,
    n: usize,
    psi: f64,
    lambda_r: f64,
}

impl Problem<'_> {
    fn same_class(&self, i: usize, j: usize) -> bool {
        self.same[i * self.n + j]
    }

    /// Objective and, when `grad` is given, its gradient.
    fn evaluate(&self, w: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let d = w.len();
        let w2: Vec<f64> = w.iter().map(|v| v * v).collect();
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        let mut dist = vec![0.0; self.n];
        let mut p = vec![0.0; self.n];
        let mut acc_p = vec![0.0; d];
        let mut acc_a = vec![0.0; d];
        let mut loss = 0.0;
        for i in 0..self.n {
            let xi = self.x.row(i);
            let mut dmin = f64::INFINITY;
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                let xj = self.x.row(j);
                let dij: f64 = (0..d).map(|r| w2[r] * (xi[r] - xj[r]).abs()).sum();
                dist[j] = dij;
                dmin = dmin.min(dij);
            }
            let mut z = 0.0;
            for j in 0..self.n {
                p[j] = if j == i { 0.0 } else { (-(dist[j] - dmin) / self.psi).exp() };
                z += p[j];
            }
            let mut li = 0.0;
            for j in 0..self.n {
                p[j] /= z;
                if j != i && !self.same_class(i, j) {
                    li += p[j];
                }
            }
            loss += li;
            if let Some(g) = grad.as_deref_mut() {
                acc_p.iter_mut().for_each(|v| *v = 0.0);
                acc_a.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..self.n {
                    if j == i || p[j] == 0.0 {
                        continue;
                    }
                    let xj = self.x.row(j);
                    let miss = !self.same_class(i, j);
                    for r in 0..d {
                        let delta = (xi[r] - xj[r]).abs();
                        acc_p[r] += p[j] * delta;
                        if miss {
                            acc_a[r] += p[j] * delta;
                        }
                    }
                }
                for r in 0..d {
                    g[r] += (2.0 * w[r] / self.psi) * (li * acc_p[r] - acc_a[r]);
                }
            }
        }
        let n = self.n as f64;
        if let Some(g) = grad {
            for r in 0..d {
                g[r] = g[r] / n + 2.0 * self.lambda_r * w[r];
            }
        }
        loss / n + self.lambda_r * w2.iter().sum::<f64>()
    }
}

/// Objective value for weights `w` on z-scored features of `set`.
pub fn nca_objective(set: &LabeledFingerprintSet, w: &[f64], params: &NcaParams) -> f64 {
    let x = standardize(set.features());
    let problem = build(set, &x, params);
    problem.evaluate(w, None)
}

fn build<'a>(set: &LabeledFingerprintSet, x: &'a Matrix, params: &NcaParams) -> Problem<'a> {
    let n = set.len();
    let labels = set.labels();
    let same = (0..n * n).map(|k| labels[k / n] == labels[k % n]).collect();
    Problem {
        x,
        same,
        n,
        psi: params.psi,
        lambda_r: params.lambda_r.unwrap_or(1.0 / n as f64),
    }
}

pub fn rank_nca(set: &LabeledFingerprintSet, params: &NcaParams) -> Result<NcaFit> {
    if !(params.psi > 0.0) {
        return Err(Error::InvalidParams(format!("psi must be > 0, got {}", params.psi)));
    }
    if params.lambda_r.is_some_and(|l| !(l >= 0.0)) {
        return Err(Error::InvalidParams("lambda_R must be >= 0".into()));
    }
    let x = standardize(set.features());
    let problem = build(set, &x, params);
    let d = set.n_features();
    let mut w = vec![1.0; d];
    let mut grad = vec![0.0; d];
    let mut f = problem.evaluate(&w, Some(&mut grad));
    if !f.is_finite() {
        return Err(Error::NumericalFailure("NCA objective is not finite".into()));
    }
    let mut trace = vec![f];
    let mut step = params.step.unwrap_or(1.0 / set.len() as f64);
    let mut trial = vec![0.0; d];
    for _ in 0..params.iterations {
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if !(g2 > 0.0) {
            break;
        }
        // Armijo with c = 1/2; the accepted step carries over.
        let mut accepted = None;
        while step > 1e-14 {
            for r in 0..d {
                trial[r] = w[r] - step * grad[r];
            }
            let ft = problem.evaluate(&trial, None);
            if !ft.is_finite() {
                return Err(Error::NumericalFailure("NCA objective is not finite".into()));
            }
            if ft <= f - 0.5 * step * g2 {
                accepted = Some(ft);
                break;
            }
            step *= 0.5;
        }
        if accepted.is_none() {
            break;
        }
        std::mem::swap(&mut w, &mut trial);
        f = problem.evaluate(&w, Some(&mut grad));
        trace.push(f);
    }
    let scores: Vec<f64> = w.iter().map(|v| v * v).collect();
    Ok(NcaFit {
        ranking: FeatureRanking::from_scores(SelectionMethod::Nca, scores, ScoreOrder::Descending),
        weights: w,
        objective: trace,
    })
}
