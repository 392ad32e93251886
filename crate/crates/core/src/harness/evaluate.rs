//! Trial evaluation and SNR sweeps.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_dataset, train_best_model, Cohort, ExperimentConfig, ModelSelection, StoreView, TrialConfig};
use crate::featsel::{Class, MethodParams, SelectionMethod};
use crate::modelsel::{FVR_GATE, TVR_GATE};
use crate::signal::Snr;
use crate::svm::{decide_score, SvmModel};
use crate::{Error, Result};

/// Acceptance count for one radio presenting one claimed id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub radio_id: String,
    pub accepted: usize,
    pub rejected: usize,
    /// `accepted / total`.
    pub fvr: f64,
    /// `rejected / total`.
    pub trr: f64,
}

impl AttackOutcome {
    fn new(radio_id: String, accepted: usize, total: usize) -> Self {
        Self {
            radio_id,
            accepted,
            rejected: total - accepted,
            fvr: accepted as f64 / total as f64,
            trr: (total - accepted) as f64 / total as f64,
        }
    }

    pub fn total(&self) -> usize {
        self.accepted + self.rejected
    }
}

/// How the model for one claimed id was chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub n_r: usize,
    pub tvr_train: f64,
    pub fvr_others_train: f64,
    pub cv_error: f64,
    pub bc: f64,
    pub mean_distance: f64,
    pub variance_sum: f64,
    pub passed_gates: bool,
    pub support_vectors: usize,
    pub zeta: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claimed_id: String,
    pub n_r: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub tvr: f64,
    pub frr: f64,
    /// Other authorized radios presenting the claimed id.
    pub others: Vec<AttackOutcome>,
    /// Rogue radios presenting the claimed id.
    pub attacks: Vec<AttackOutcome>,
    pub selection: SelectionSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub trial_id: u32,
    pub snr_db: f64,
    pub method: SelectionMethod,
    pub method_params: MethodParams,
    pub claims: Vec<ClaimReport>,
    /// Every TVR at least 0.9 and every rogue FVR at most 0.1.
    pub gates_passed: bool,
    /// The method failed the gates at a higher SNR in this sweep.
    pub eliminated: bool,
}

impl VerificationReport {
    pub fn attack_count(&self) -> usize {
        self.claims.iter().map(|c| c.attacks.len()).sum()
    }

    pub fn mean_tvr(&self) -> f64 {
        self.claims.iter().map(|c| c.tvr).sum::<f64>() / self.claims.len() as f64
    }
}

fn count_accepted(model: &SvmModel, view: &StoreView, radio: &str, config: &ExperimentConfig) -> Result<(usize, usize)> {
    let mut accepted = 0;
    let mut total = 0;
    for z in config.eval_range() {
        for fp in view.fingerprints(radio, z)? {
            if decide_score(model.score_fingerprint(&fp.features)?) == Class::Authorized {
                accepted += 1;
            }
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::MissingData(format!("no evaluation fingerprints for {radio}")));
    }
    Ok((accepted, total))
}

/// Scores held-out realizations of every radio against each claimed id's
/// selected model.
pub fn evaluate_trial(
    view: &StoreView,
    trial: &TrialConfig,
    method: SelectionMethod,
    models: &[ModelSelection],
    config: &ExperimentConfig,
) -> Result<VerificationReport> {
    trial.validate()?;
    let snr_db = view
        .snr_db()
        .ok_or_else(|| Error::MissingData("empty fingerprint store".into()))?;
    let claims = trial
        .authorized_ids
        .par_iter()
        .map(|claimed| {
            let sel = models
                .iter()
                .find(|m| &m.claimed_id == claimed)
                .ok_or_else(|| Error::InvalidModel(format!("no model for {claimed}")))?;
            if sel.method != method {
                return Err(Error::InvalidModel(format!(
                    "model for {claimed} was trained with {}, not {method}",
                    sel.method
                )));
            }
            let best = sel.best();
            let model = &best.model;
            let (accepted, total) = count_accepted(model, view, claimed, config)?;
            let outcomes = |ids: &[String]| -> Result<Vec<AttackOutcome>> {
                ids.iter()
                    .map(|id| {
                        let (a, t) = count_accepted(model, view, id, config)?;
                        Ok(AttackOutcome::new(id.clone(), a, t))
                    })
                    .collect()
            };
            let q = best.quality();
            Ok(ClaimReport {
                claimed_id: claimed.clone(),
                n_r: best.n_r,
                accepted,
                rejected: total - accepted,
                tvr: accepted as f64 / total as f64,
                frr: (total - accepted) as f64 / total as f64,
                others: outcomes(&trial.others(claimed)?)?,
                attacks: outcomes(&trial.rogue_ids)?,
                selection: SelectionSummary {
                    n_r: best.n_r,
                    tvr_train: best.tvr_train,
                    fvr_others_train: best.fvr_others_train,
                    cv_error: best.cv_error,
                    bc: q.bc,
                    mean_distance: q.mean_distance,
                    variance_sum: q.variance_sum,
                    passed_gates: best.passes_gates(),
                    support_vectors: model.support_vectors.len(),
                    zeta: model.zeta,
                    cost: model.cost,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gates_passed = claims
        .iter()
        .all(|c| c.tvr >= TVR_GATE && c.attacks.iter().all(|a| a.fvr <= FVR_GATE));
    Ok(VerificationReport {
        trial_id: trial.trial_id,
        snr_db,
        method,
        method_params: config.selection.clone(),
        claims,
        gates_passed,
        eliminated: false,
    })
}

/// Trains all six verifiers of a trial through an authorized-only view,
/// then evaluates them with full access.
pub fn run_trial(
    store: &super::FingerprintStore,
    trial: &TrialConfig,
    method: SelectionMethod,
    config: &ExperimentConfig,
) -> Result<(Vec<ModelSelection>, VerificationReport)> {
    let training_view = StoreView::restricted(store, &trial.authorized_ids);
    let models = trial
        .authorized_ids
        .par_iter()
        .map(|claimed| train_best_model(&training_view, trial, claimed, method, config))
        .collect::<Result<Vec<_>>>()?;
    let report = evaluate_trial(&StoreView::unrestricted(store), trial, method, &models, config)?;
    Ok((models, report))
}

/// Evaluates every (SNR, trial, method) from the highest SNR down. A method
/// that fails the gates for a trial is flagged as eliminated at all lower
/// SNRs for that trial; flagged points are still evaluated.
pub fn snr_sweep(
    cohort: &Cohort,
    trials: &[TrialConfig],
    config: &ExperimentConfig,
) -> Result<Vec<VerificationReport>> {
    config.validate()?;
    let mut failed: BTreeSet<(u32, SelectionMethod)> = BTreeSet::new();
    let mut reports = Vec::new();
    for &snr in config.snr_grid.iter().rev() {
        let store = generate_dataset(
            cohort,
            Snr::Db(snr),
            config.total_realizations() as u32,
            config.master_seed,
            &config.pipeline,
        )?;
        for trial in trials {
            for &method in &config.methods {
                let (_, mut report) = run_trial(&store, trial, method, config)?;
                report.eliminated = failed.contains(&(trial.trial_id, method));
                if !report.gates_passed {
                    failed.insert((trial.trial_id, method));
                }
                reports.push(report);
            }
        }
    }
    Ok(reports)
}
