//! Per-radio model training over the N_r sweep.
//!
//! For each training realization `z` and fold `f`, squared distances among
//! the fold's standardized training rows are accumulated one retained
//! dimension at a time, so every grid value of N_r reuses the work of the
//! smaller ones. The lowest fold error per N_r wins; the winners become the
//! candidates handed to model selection.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, StoreView, TrialConfig};
use crate::featsel::{column_moments, fit_method, Class, FeatureTransform, LabeledFingerprintSet, SelectionMethod};
use crate::modelsel::{pmfs_from_margins, select_best_index, CandidateModel};
use crate::svm::{
    decide_score, margin_of, model_from_solution, solve_oriented, svm_score, FeatureMap, KernelRows, Scaler,
    SvmModel,
};
use crate::{seed, Error, Matrix, Result};

/// Two-class training sets, one per training realization.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub claimed_id: String,
    pub other_ids: Vec<String>,
    pub sets: Vec<LabeledFingerprintSet>,
    /// Per set row: `None` for the claimed radio, `Some(k)` for `other_ids[k]`.
    pub sources: Vec<Vec<Option<usize>>>,
}

/// Builds the class-1 / class-2 sets for `claimed` from authorized radios
/// only. Class 1 takes the first `n_b` bursts of realization `z`; each other
/// radio contributes `others_per_radio` fingerprints drawn from
/// realizations `z, z+1, ...` (wrapping within the training realizations).
pub fn assemble_training(
    view: &StoreView,
    trial: &TrialConfig,
    claimed: &str,
    config: &ExperimentConfig,
) -> Result<TrainingData> {
    config.validate()?;
    let other_ids = trial.others(claimed)?;
    let n_other = config.others_per_radio();
    let n_z = config.n_z as u32;
    let mut sets = Vec::with_capacity(config.n_z);
    let mut sources = Vec::with_capacity(config.n_z);
    for z in 0..n_z {
        let own = view.fingerprints(claimed, z)?;
        if own.len() < config.n_b {
            return Err(Error::InvalidCount {
                requested: config.n_b,
                available: own.len(),
            });
        }
        let mut rows: Vec<&[f64]> = own[..config.n_b].iter().map(|f| f.features.as_slice()).collect();
        let mut src = vec![None; config.n_b];
        let mut labels = vec![Class::Authorized; config.n_b];
        for (k, other) in other_ids.iter().enumerate() {
            let mut taken = 0;
            for step in 0..n_z {
                if taken == n_other {
                    break;
                }
                let fps = view.fingerprints(other, (z + step) % n_z)?;
                let take = fps.len().min(n_other - taken);
                rows.extend(fps[..take].iter().map(|f| f.features.as_slice()));
                taken += take;
            }
            if taken < n_other {
                return Err(Error::InvalidCount {
                    requested: n_other,
                    available: taken,
                });
            }
            src.extend(std::iter::repeat_n(Some(k), n_other));
            labels.extend(std::iter::repeat_n(Class::Other, n_other));
        }
        let features = Matrix::from_rows(&rows)
            .ok_or_else(|| Error::InvalidShape("fingerprints differ in length".into()))?;
        sets.push(LabeledFingerprintSet::new(features, labels)?);
        sources.push(src);
    }
    Ok(TrainingData {
        claimed_id: claimed.to_string(),
        other_ids,
        sets,
        sources,
    })
}

/// Candidates over the N_r sweep and the index chosen among them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelection {
    pub claimed_id: String,
    pub method: SelectionMethod,
    pub candidates: Vec<CandidateModel>,
    pub selected: usize,
}

impl ModelSelection {
    pub fn best(&self) -> &CandidateModel {
        &self.candidates[self.selected]
    }
}

/// Fits `method` on realization 0's set.
pub fn fit_transform(
    data: &TrainingData,
    method: SelectionMethod,
    config: &ExperimentConfig,
) -> Result<FeatureTransform> {
    let mut params = config.selection.clone();
    params.seed = seed::derive(config.master_seed, &[seed::RELEVANCE, seed::key(&data.claimed_id)]);
    fit_method(method, &data.sets[0], &params)
}

/// Fits `method` on realization 0's set, then sweeps N_r.
pub fn train_best_model(
    view: &StoreView,
    trial: &TrialConfig,
    claimed: &str,
    method: SelectionMethod,
    config: &ExperimentConfig,
) -> Result<ModelSelection> {
    let data = assemble_training(view, trial, claimed, config)?;
    let transform = fit_transform(&data, method, config)?;
    train_with_transform(&data, &transform, config)
}

/// Squared distances held in the upper triangle of a `t x t` buffer.
struct DistanceKernel<'a> {
    d: &'a [f64],
    t: usize,
    zeta: f64,
}

impl KernelRows for DistanceKernel<'_> {
    fn len(&self) -> usize {
        self.t
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        let t = self.t;
        for (j, o) in out.iter_mut().enumerate() {
            let d = match i.cmp(&j) {
                std::cmp::Ordering::Less => self.d[i * t + j],
                std::cmp::Ordering::Greater => self.d[j * t + i],
                std::cmp::Ordering::Equal => 0.0,
            };
            *o = (-self.zeta * d).exp();
        }
    }

    fn diag(&self, _: usize) -> f64 {
        1.0
    }
}

fn reduce_all(set: &LabeledFingerprintSet, transform: &FeatureTransform, dims: usize) -> Matrix {
    let x = set.features();
    let mut out = Vec::with_capacity(x.rows() * dims);
    for row in x.iter_rows() {
        out.extend(transform.reduce(row, dims));
    }
    Matrix::from_vec(x.rows(), dims, out)
}

/// Fold index per row, stratified by class.
fn fold_assignment(labels: &[Class], k: usize, seed: u64) -> Vec<usize> {
    let mut fold = vec![0; labels.len()];
    let mut rng = seed::rng(seed, &[]);
    for class in [Class::Authorized, Class::Other] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        for (pos, i) in rows.into_iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    fold
}

struct FoldModels {
    /// `(test error, model)` per grid entry.
    models: Vec<(f64, SvmModel)>,
}

#[allow(clippy::too_many_arguments)]
fn train_fold(
    reduced: &Matrix,
    labels: &[Class],
    train: &[usize],
    test: &[usize],
    grid: &[usize],
    transform: &FeatureTransform,
    config: &ExperimentConfig,
) -> Result<FoldModels> {
    let t = train.len();
    let top = *grid.last().expect("non-empty grid");
    let rt = reduced.select_rows(train);
    let (mean, spread) = column_moments(&rt);
    // column-major standardized training block
    let cols: Vec<Vec<f64>> = (0..top)
        .map(|r| (0..t).map(|i| (rt.get(i, r) - mean[r]) / spread[r]).collect())
        .collect();
    let train_labels: Vec<Class> = train.iter().map(|&i| labels[i]).collect();
    let mut dist = vec![0.0; t * t];
    let mut done = 0;
    let mut models = Vec::with_capacity(grid.len());
    for &n_r in grid {
        for col in &cols[done..n_r] {
            for i in 0..t {
                let a = col[i];
                let row = &mut dist[i * t..(i + 1) * t];
                for j in i + 1..t {
                    let diff = a - col[j];
                    row[j] += diff * diff;
                }
            }
        }
        done = n_r;
        let zeta = config.svm.zeta_for(n_r);
        let sol = solve_oriented(
            &DistanceKernel {
                d: &dist,
                t,
                zeta,
            },
            &train_labels,
            &config.svm,
        )?;
        let scaled = Matrix::from_vec(
            t,
            n_r,
            (0..t).flat_map(|i| cols[..n_r].iter().map(move |c| c[i])).collect(),
        );
        let model = model_from_solution(
            &sol,
            &train_labels,
            &scaled,
            Scaler {
                mean: mean[..n_r].to_vec(),
                spread: spread[..n_r].to_vec(),
            },
            FeatureMap::from_transform(transform, n_r)?,
            zeta,
            config.svm.cost,
        );
        let mut wrong = 0usize;
        for &e in test {
            let f = svm_score(&model, &reduced.row(e)[..n_r])?;
            if decide_score(f) != labels[e] {
                wrong += 1;
            }
        }
        models.push((wrong as f64 / test.len() as f64, model));
    }
    Ok(FoldModels { models })
}

/// Runs the N_r sweep for a fitted selection method.
pub fn train_with_transform(
    data: &TrainingData,
    transform: &FeatureTransform,
    config: &ExperimentConfig,
) -> Result<ModelSelection> {
    config.validate()?;
    let grid = config.effective_nr_grid(transform.max_dims());
    let Some(&top) = grid.last() else {
        return Err(Error::InvalidCount {
            requested: 1,
            available: 0,
        });
    };
    let k = config.k_folds;
    let reduced: Vec<Matrix> = data.sets.iter().map(|s| reduce_all(s, transform, top)).collect();

    let mut best: Vec<Option<(f64, SvmModel)>> = vec![None; grid.len()];
    for (z, set) in data.sets.iter().enumerate() {
        let labels = set.labels();
        let folds = fold_assignment(
            labels,
            k,
            seed::derive(config.master_seed, &[seed::FOLDS, seed::key(&data.claimed_id), z as u64]),
        );
        for f in 0..k {
            let (train, test): (Vec<usize>, Vec<usize>) = if k == 1 {
                ((0..set.len()).collect(), (0..set.len()).collect())
            } else {
                (0..set.len()).partition(|&i| folds[i] != f)
            };
            let fm = train_fold(&reduced[z], labels, &train, &test, &grid, transform, config)?;
            for (slot, (err, model)) in best.iter_mut().zip(fm.models) {
                if slot.as_ref().is_none_or(|(e, _)| err < *e) {
                    *slot = Some((err, model));
                }
            }
        }
    }

    let mut candidates = Vec::with_capacity(grid.len());
    for (&n_r, slot) in grid.iter().zip(best) {
        let (cv_error, model) = slot.expect("every grid entry trained");
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut own_accept = 0usize;
        let mut other_accept = vec![0usize; data.other_ids.len()];
        let mut other_total = vec![0usize; data.other_ids.len()];
        for (z, set) in data.sets.iter().enumerate() {
            for i in 0..set.len() {
                let f = svm_score(&model, &reduced[z].row(i)[..n_r])?;
                let accepted = decide_score(f) == Class::Authorized;
                match data.sources[z][i] {
                    None => {
                        own_accept += accepted as usize;
                        pos.push(margin_of(f, Class::Authorized));
                    }
                    Some(o) => {
                        other_accept[o] += accepted as usize;
                        other_total[o] += 1;
                        neg.push(margin_of(f, Class::Other));
                    }
                }
            }
        }
        let fvr_others_train = other_accept
            .iter()
            .zip(&other_total)
            .map(|(&a, &t)| a as f64 / t as f64)
            .fold(0.0, f64::max);
        candidates.push(CandidateModel {
            tvr_train: own_accept as f64 / pos.len() as f64,
            fvr_others_train,
            pmf_pair: pmfs_from_margins(&pos, &neg, config.pmf_bins)?,
            cv_error,
            n_r,
            model,
        });
    }
    let selected = select_best_index(&candidates)?;
    Ok(ModelSelection {
        claimed_id: data.claimed_id.clone(),
        method: transform.method(),
        candidates,
        selected,
    })
}
