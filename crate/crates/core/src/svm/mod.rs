//! Two-class soft-margin RBF SVM verifier.
//!
//! Labels are +1 for the authorized radio (c1) and -1 for the others (c2).
//! Inputs are standardized with training statistics before the kernel
//! `G(a, b) = exp(-zeta * |a - b|^2)` is applied. The decision function is
//!
//! ```text
//! f(x) = sum_j coef_j G(sv_j, x) + bias,    coef_j = alpha_j y_j
//! ```

mod smo;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::featsel::{column_moments, Class, FeatureTransform, LabeledFingerprintSet};
use crate::{Error, Matrix, Result};

pub(crate) use smo::{solve, KernelRows, Solution, SolverParams};

/// Per-feature affine standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Population standard deviation; columns without spread use 1.
    pub spread: Vec<f64>,
}

impl Scaler {
    pub fn fit(rows: &Matrix) -> Self {
        let (mean, spread) = column_moments(rows);
        Self { mean, spread }
    }

    pub fn dims(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.spread))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// How a 204-feature fingerprint is reduced to the model's inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMap {
    /// Retained feature indices, in ranking order.
    Indices(Vec<usize>),
    /// Rows of `basis` applied to `x - mean`.
    Projection { mean: Vec<f64>, basis: Vec<Vec<f64>> },
}

impl FeatureMap {
    /// First `n` dimensions of a fitted selection method.
    pub fn from_transform(transform: &FeatureTransform, n: usize) -> Result<Self> {
        if n == 0 || n > transform.max_dims() {
            return Err(Error::InvalidCount {
                requested: n,
                available: transform.max_dims(),
            });
        }
        Ok(match transform {
            FeatureTransform::Ranked(r) => FeatureMap::Indices(r.order[..n].to_vec()),
            FeatureTransform::Projection(p) => FeatureMap::Projection {
                mean: p.mean.clone(),
                basis: p.basis[..n].to_vec(),
            },
        })
    }

    pub fn output_dims(&self) -> usize {
        match self {
            FeatureMap::Indices(idx) => idx.len(),
            FeatureMap::Projection { basis, .. } => basis.len(),
        }
    }

    pub fn apply(&self, fp: &[f64]) -> Result<Vec<f64>> {
        match self {
            FeatureMap::Indices(idx) => idx
                .iter()
                .map(|&i| {
                    fp.get(i).copied().ok_or_else(|| {
                        Error::InvalidShape(format!(
                            "feature index {i} outside fingerprint of length {}",
                            fp.len()
                        ))
                    })
                })
                .collect(),
            FeatureMap::Projection { mean, basis } => {
                if fp.len() != mean.len() {
                    return Err(Error::InvalidShape(format!(
                        "projection expects {} features, got {}",
                        mean.len(),
                        fp.len()
                    )));
                }
                Ok(basis
                    .iter()
                    .map(|b| {
                        b.iter()
                            .zip(fp.iter().zip(mean))
                            .map(|(w, (v, m))| w * (v - m))
                            .sum()
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub cost: f64,
    /// `None` means `1 / N_r`.
    pub zeta: Option<f64>,
    /// Maximal KKT violation accepted at termination.
    pub tolerance: f64,
    pub max_updates: usize,
    /// Kernel cache size in matrix entries.
    pub cache_entries: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            cost: 1.0,
            zeta: None,
            tolerance: 1e-3,
            max_updates: 1_000_000,
            cache_entries: 16 << 20,
        }
    }
}

impl SvmParams {
    pub fn zeta_for(&self, dims: usize) -> f64 {
        self.zeta.unwrap_or(1.0 / dims as f64)
    }

    pub(crate) fn validate(&self, dims: usize) -> Result<()> {
        let zeta = self.zeta_for(dims);
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(Error::InvalidParams(format!("cost must be positive, got {}", self.cost)));
        }
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidParams(format!("zeta must be positive, got {zeta}")));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub(crate) fn solver(&self) -> SolverParams {
        SolverParams {
            cost: self.cost,
            tolerance: self.tolerance,
            max_updates: self.max_updates,
            cache_entries: self.cache_entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub feature_map: FeatureMap,
    pub scaler: Scaler,
    pub zeta: f64,
    pub cost: f64,
    pub bias: f64,
    /// Standardized support vectors, one per row.
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_j * y_j` for each support vector.
    pub dual_coeffs: Vec<f64>,
}

/// Squared Euclidean distance, accumulated in index order.
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        d += t * t;
    }
    d
}

struct RbfRows<'a> {
    x: &'a Matrix,
    zeta: f64,
}

impl KernelRows for RbfRows<'_> {
    fn len(&self) -> usize {
        self.x.rows()
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        let xi = self.x.row(i);
        for (j, o) in out.iter_mut().enumerate() {
            *o = (-self.zeta * sq_dist(xi, self.x.row(j))).exp();
        }
    }

    fn diag(&self, _: usize) -> f64 {
        1.0
    }
}

/// Solves with labels oriented so the first sample is +1; a label-flipped
/// problem therefore follows the same path and yields exactly `-f`.
pub(crate) fn solve_oriented<K: KernelRows + ?Sized>(
    kernel: &K,
    labels: &[Class],
    params: &SvmParams,
) -> Result<Solution> {
    let flip = labels.first() == Some(&Class::Other);
    let y: Vec<f64> = labels
        .iter()
        .map(|c| if flip { c.flipped() } else { *c }.sign())
        .collect();
    let mut sol = solve(kernel, &y, &params.solver())?;
    if flip {
        sol.bias = -sol.bias;
    }
    Ok(sol)
}

/// Assembles a model from a dual solution over standardized rows `x`.
pub(crate) fn model_from_solution(
    sol: &Solution,
    labels: &[Class],
    x: &Matrix,
    scaler: Scaler,
    feature_map: FeatureMap,
    zeta: f64,
    cost: f64,
) -> SvmModel {
    let mut support_vectors = Vec::new();
    let mut dual_coeffs = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x.row(i).to_vec());
            dual_coeffs.push(a * labels[i].sign());
        }
    }
    SvmModel {
        feature_map,
        scaler,
        zeta,
        cost,
        bias: sol.bias,
        support_vectors,
        dual_coeffs,
    }
}

/// Trains on `set`, whose columns are the retained features.
///
/// The returned model maps fingerprints with `FeatureMap::Indices(0..N_r)`;
/// replace `feature_map` when the set was reduced from full fingerprints.
pub fn train_svm(set: &LabeledFingerprintSet, params: &SvmParams) -> Result<SvmModel> {
    let dims = set.n_features();
    params.validate(dims)?;
    let zeta = params.zeta_for(dims);
    let scaler = Scaler::fit(set.features());
    let mut x = set.features().clone();
    for i in 0..x.rows() {
        let s = scaler.apply(x.row(i));
        x.row_mut(i).copy_from_slice(&s);
    }
    let sol = solve_oriented(&RbfRows { x: &x, zeta }, set.labels(), params)?;
    Ok(model_from_solution(
        &sol,
        set.labels(),
        &x,
        scaler,
        FeatureMap::Indices((0..dims).collect()),
        zeta,
        params.cost,
    ))
}

impl SvmModel {
    pub fn dims(&self) -> usize {
        self.scaler.dims()
    }

    /// Score of an already standardized input.
    pub fn score_scaled(&self, z: &[f64]) -> f64 {
        let mut f = self.bias;
        for (sv, c) in self.support_vectors.iter().zip(&self.dual_coeffs) {
            f += c * (-self.zeta * sq_dist(sv, z)).exp();
        }
        f
    }

    /// Score of a full fingerprint, reduced through `feature_map` first.
    pub fn score_fingerprint(&self, fp: &[f64]) -> Result<f64> {
        svm_score(self, &self.feature_map.apply(fp)?)
    }

    pub fn check(&self) -> Result<()> {
        let d = self.dims();
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.scaler.spread.len() != d {
            return bad("scaler mean and spread differ in length".into());
        }
        if self.feature_map.output_dims() != d {
            return bad(format!(
                "feature map yields {} dims but scaler has {d}",
                self.feature_map.output_dims()
            ));
        }
        if let FeatureMap::Projection { mean, basis } = &self.feature_map {
            if basis.iter().any(|b| b.len() != mean.len()) {
                return bad("projection basis rows differ from mean length".into());
            }
        }
        if self.support_vectors.len() != self.dual_coeffs.len() {
            return bad("support vectors and dual coefficients differ in count".into());
        }
        if self.support_vectors.iter().any(|sv| sv.len() != d) {
            return bad("support vector of wrong dimension".into());
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) || !(self.cost > 0.0 && self.cost.is_finite()) {
            return bad("zeta and cost must be positive and finite".into());
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !self.bias.is_finite()
            || !finite(&self.scaler.mean)
            || !self.scaler.spread.iter().all(|s| s.is_finite() && *s > 0.0)
            || !finite(&self.dual_coeffs)
            || !self.support_vectors.iter().all(|sv| finite(sv))
        {
            return bad("non-finite or non-positive parameter".into());
        }
        if self.dual_coeffs.iter().any(|c| c.abs() > self.cost * (1.0 + 1e-12)) {
            return bad("dual coefficient exceeds cost".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: SvmModel = serde_json::from_str(text)
            .map_err(|e| Error::InvalidModel(format!("model JSON: {e}")))?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// `f(x)` for a retained-feature vector `x` (not yet standardized).
pub fn svm_score(model: &SvmModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.dims() {
        return Err(Error::InvalidShape(format!(
            "model expects {} features, got {}",
            model.dims(),
            x.len()
        )));
    }
    Ok(model.score_scaled(&model.scaler.apply(x)))
}

/// Sign of a score; exactly zero rejects.
pub fn decide_score(score: f64) -> Class {
    if score > 0.0 {
        Class::Authorized
    } else {
        Class::Other
    }
}

pub fn svm_decide(model: &SvmModel, x: &[f64]) -> Result<Class> {
    svm_score(model, x).map(decide_score)
}

/// `m = 2 y f(x)`.
pub fn margin_of(score: f64, y: Class) -> f64 {
    2.0 * y.sign() * score
}

pub fn margin(model: &SvmModel, x: &[f64], y: Class) -> Result<f64> {
    svm_score(model, x).map(|f| margin_of(f, y))
}
