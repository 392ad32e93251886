//! Two-class feature ranking and projection.
//!
//! Class `Authorized` (c1) holds the radio whose identity is being verified;
//! `Other` (c2) holds the remaining authorized radios. Ranking methods
//! produce a [`FeatureRanking`]; LDA and PCA produce a [`ProjectionBasis`].

mod bc;
mod dra;
mod lda;
mod nca;
mod pca;
mod poeacc;
mod relieff;
mod ttest;

pub use bc::{bhattacharyya, class_histograms, default_bins, rank_bc};
pub use dra::{rank_dra, train_grlvq_relevance, GrlvqParams, RelevanceFit};
pub use lda::{lda_direction, project_lda};
pub use nca::{nca_objective, rank_nca, NcaFit, NcaParams};
pub use pca::{project_pca, PcaFit};
pub use poeacc::{poe_histogram, rank_poeacc};
pub use relieff::{rank_relieff, relieff_weights};
pub use ttest::{rank_ttest, welch, WelchResult};

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    /// c1, label +1.
    Authorized,
    /// c2, label -1.
    Other,
}

impl Class {
    pub fn sign(self) -> f64 {
        match self {
            Class::Authorized => 1.0,
            Class::Other => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Class::Authorized => Class::Other,
            Class::Other => Class::Authorized,
        }
    }
}

/// Training fingerprints (one per row) with their class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFingerprintSet {
    features: Matrix,
    labels: Vec<Class>,
}

impl LabeledFingerprintSet {
    pub fn new(features: Matrix, labels: Vec<Class>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::InvalidShape(format!(
                "{} rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.cols() == 0 {
            return Err(Error::InvalidShape("fingerprints have no features".into()));
        }
        let n1 = labels.iter().filter(|&&c| c == Class::Authorized).count();
        if n1 == 0 || n1 == labels.len() {
            return Err(Error::InvalidInput("both classes must be non-empty".into()));
        }
        if features.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("fingerprint set holds non-finite values".into()));
        }
        Ok(Self { features, labels })
    }

    /// Stacks `c1` rows then `c2` rows.
    pub fn from_classes<R: AsRef<[f64]>>(c1: &[R], c2: &[R]) -> Result<Self> {
        let rows: Vec<&[f64]> = c1.iter().chain(c2).map(|r| r.as_ref()).collect();
        let features = Matrix::from_rows(&rows)
            .ok_or_else(|| Error::InvalidShape("fingerprints differ in length".into()))?;
        let labels = std::iter::repeat_n(Class::Authorized, c1.len())
            .chain(std::iter::repeat_n(Class::Other, c2.len()))
            .collect();
        Self::new(features, labels)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn class_count(&self, class: Class) -> usize {
        self.labels.iter().filter(|&&c| c == class).count()
    }

    pub fn class_rows(&self, class: Class) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Values of feature `r` for members of `class`.
    pub fn class_column(&self, class: Class, r: usize) -> Vec<f64> {
        (0..self.len())
            .filter(|&i| self.labels[i] == class)
            .map(|i| self.features.get(i, r))
            .collect()
    }

    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        Self::new(features, self.labels.clone())
    }

    pub fn with_labels(&self, labels: Vec<Class>) -> Result<Self> {
        Self::new(self.features.clone(), labels)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        Self::new(
            self.features.select_rows(idx),
            idx.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    pub fn select_features(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.features.select_cols(idx), self.labels.clone())
    }

    /// Deterministic stratified subsample of at most `max_rows` rows, keeping
    /// evenly spaced members of each class in proportion.
    pub fn stratified_subsample(&self, max_rows: usize) -> Result<Self> {
        if self.len() <= max_rows {
            return Ok(self.clone());
        }
        let mut keep = Vec::with_capacity(max_rows);
        for class in [Class::Authorized, Class::Other] {
            let rows = self.class_rows(class);
            let quota = ((rows.len() * max_rows) / self.len()).max(2).min(rows.len());
            keep.extend((0..quota).map(|q| rows[q * rows.len() / quota]));
        }
        keep.sort_unstable();
        self.select_rows(&keep)
    }
}

/// Per-column mean and population standard deviation; zero spread maps to 1.
pub(crate) fn column_moments(m: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows() as f64;
    let d = m.cols();
    let mut mean = vec![0.0; d];
    for r in m.iter_rows() {
        for (acc, v) in mean.iter_mut().zip(r) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut var = vec![0.0; d];
    for r in m.iter_rows() {
        for ((acc, v), mu) in var.iter_mut().zip(r).zip(&mean) {
            *acc += (v - mu) * (v - mu);
        }
    }
    let spread = var
        .iter()
        .map(|v| {
            let s = (v / n).sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    (mean, spread)
}

pub(crate) fn standardize(m: &Matrix) -> Matrix {
    let (mean, spread) = column_moments(m);
    let mut out = m.clone();
    for i in 0..out.rows() {
        for (j, v) in out.row_mut(i).iter_mut().enumerate() {
            *v = (*v - mean[j]) / spread[j];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Dra,
    Lda,
    Pca,
    Nca,
    Poeacc,
    Bc,
    #[serde(rename = "ttest")]
    TTest,
    #[serde(rename = "relieff")]
    ReliefF,
}

impl SelectionMethod {
    pub const ALL: [SelectionMethod; 8] = [
        SelectionMethod::Dra,
        SelectionMethod::Lda,
        SelectionMethod::Pca,
        SelectionMethod::Nca,
        SelectionMethod::Poeacc,
        SelectionMethod::Bc,
        SelectionMethod::TTest,
        SelectionMethod::ReliefF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectionMethod::Dra => "dra",
            SelectionMethod::Lda => "lda",
            SelectionMethod::Pca => "pca",
            SelectionMethod::Nca => "nca",
            SelectionMethod::Poeacc => "poeacc",
            SelectionMethod::Bc => "bc",
            SelectionMethod::TTest => "ttest",
            SelectionMethod::ReliefF => "relieff",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown selection method {s:?}")))
    }
}

impl std::fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How `FeatureRanking::scores` relate to `order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreOrder {
    /// Best feature has the largest score.
    Descending,
    /// Best feature has the smallest score.
    Ascending,
    /// Order is a greedy selection sequence; each score is the criterion
    /// value at the step the feature was picked.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub method: SelectionMethod,
    /// One score per input feature; NaN where the method excluded a feature.
    pub scores: Vec<f64>,
    /// Feature indices, best first. May be shorter than `scores`.
    pub order: Vec<usize>,
    pub direction: ScoreOrder,
    /// Features the method treated as degenerate.
    pub flagged: Vec<usize>,
}

impl FeatureRanking {
    /// Sorts all features by `scores` in `direction`, ties by lower index.
    pub(crate) fn from_scores(
        method: SelectionMethod,
        scores: Vec<f64>,
        direction: ScoreOrder,
    ) -> Self {
        let order = sort_indices(&scores, (0..scores.len()).collect(), direction);
        Self {
            method,
            scores,
            order,
            direction,
            flagged: Vec::new(),
        }
    }

    pub fn ranked_count(&self) -> usize {
        self.order.len()
    }
}

pub(crate) fn sort_indices(scores: &[f64], mut idx: Vec<usize>, direction: ScoreOrder) -> Vec<usize> {
    match direction {
        ScoreOrder::Descending => idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b))),
        ScoreOrder::Ascending => idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b))),
        ScoreOrder::Sequential => {}
    }
    idx
}

/// First `n_r` indices of the ranking.
pub fn select_top(ranking: &FeatureRanking, n_r: usize) -> Result<Vec<usize>> {
    if n_r == 0 || n_r > ranking.order.len() {
        return Err(Error::InvalidCount {
            requested: n_r,
            available: ranking.order.len(),
        });
    }
    Ok(ranking.order[..n_r].to_vec())
}

/// Linear map `x -> [(x - mean) . b for b in basis]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBasis {
    pub method: SelectionMethod,
    pub basis: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

impl ProjectionBasis {
    pub fn project(&self, x: &[f64], n_components: usize) -> Vec<f64> {
        self.basis[..n_components]
            .iter()
            .map(|b| {
                b.iter()
                    .zip(x.iter().zip(&self.mean))
                    .map(|(w, (v, m))| w * (v - m))
                    .sum()
            })
            .collect()
    }
}

/// Output of any of the eight methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureTransform {
    Ranked(FeatureRanking),
    Projection(ProjectionBasis),
}

impl FeatureTransform {
    pub fn method(&self) -> SelectionMethod {
        match self {
            FeatureTransform::Ranked(r) => r.method,
            FeatureTransform::Projection(p) => p.method,
        }
    }

    /// Largest usable `N_r`.
    pub fn max_dims(&self) -> usize {
        match self {
            FeatureTransform::Ranked(r) => r.order.len(),
            FeatureTransform::Projection(p) => p.basis.len(),
        }
    }

    /// Columns of the reduced representation, in priority order, for the
    /// first `n` dimensions. Prefixes are nested: the first `k` columns for
    /// any `n >= k` are identical.
    pub fn reduce(&self, x: &[f64], n: usize) -> Vec<f64> {
        match self {
            FeatureTransform::Ranked(r) => r.order[..n].iter().map(|&i| x[i]).collect(),
            FeatureTransform::Projection(p) => p.project(x, n),
        }
    }
}

/// Knobs for every method, with the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodParams {
    pub grlvq: GrlvqParams,
    pub nca: NcaParams,
    /// Rows kept (stratified) before NCA, whose cost is quadratic in rows.
    pub nca_max_rows: usize,
    pub poe_weight: f64,
    pub acc_weight: f64,
    /// `None` means ceil(sqrt(N_tau)).
    pub histogram_bins: Option<usize>,
    pub ttest_alpha: f64,
    pub relieff_neighbors: usize,
    /// Upper bound on PCA components kept.
    pub pca_components: usize,
    pub seed: u64,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            grlvq: GrlvqParams::default(),
            nca: NcaParams::default(),
            nca_max_rows: 300,
            poe_weight: 0.5,
            acc_weight: 0.5,
            histogram_bins: None,
            ttest_alpha: 0.05,
            relieff_neighbors: 10,
            pca_components: 200,
            seed: 0,
        }
    }
}

/// Runs `method` on `set`.
pub fn fit_method(
    method: SelectionMethod,
    set: &LabeledFingerprintSet,
    params: &MethodParams,
) -> Result<FeatureTransform> {
    Ok(match method {
        SelectionMethod::Dra => {
            let fit = train_grlvq_relevance(set, &params.grlvq, params.seed)?;
            FeatureTransform::Ranked(rank_dra(&fit.relevance)?)
        }
        SelectionMethod::Lda => FeatureTransform::Projection(project_lda(set)?),
        SelectionMethod::Pca => {
            let n = params.pca_components.min(set.n_features());
            FeatureTransform::Projection(project_pca(set, n)?.basis)
        }
        SelectionMethod::Nca => {
            let sub = set.stratified_subsample(params.nca_max_rows)?;
            FeatureTransform::Ranked(rank_nca(&sub, &params.nca)?.ranking)
        }
        SelectionMethod::Poeacc => FeatureTransform::Ranked(rank_poeacc(
            set,
            params.poe_weight,
            params.acc_weight,
            params.histogram_bins,
        )?),
        SelectionMethod::Bc => FeatureTransform::Ranked(rank_bc(set, params.histogram_bins)?),
        SelectionMethod::TTest => FeatureTransform::Ranked(rank_ttest(set, params.ttest_alpha)?),
        SelectionMethod::ReliefF => {
            FeatureTransform::Ranked(rank_relieff(set, params.relieff_neighbors)?)
        }
    })
}
