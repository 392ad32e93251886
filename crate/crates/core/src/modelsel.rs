//! Margin PMFs and the choice of one model per authorized radio.
//!
//! Every candidate in the N_r sweep is scored on the authorized cohort's
//! training fingerprints only. A candidate must reach the TVR and
//! others-FVR gates; survivors are ranked by PMF overlap (smallest
//! Bhattacharyya coefficient), then mean separation (largest), then summed
//! variance (smallest), then feature count (smallest).

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::featsel::{bhattacharyya, Class};
use crate::svm::{margin_of, SvmModel};
use crate::{Error, Result};

pub const DEFAULT_PMF_BINS: usize = 100;
pub const TVR_GATE: f64 = 0.90;
pub const FVR_GATE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmfStats {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of a PMF placed at bin centers.
pub fn pmf_stats(pmf: &[f64], edges: &[f64]) -> PmfStats {
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mean: f64 = pmf.iter().zip(&centers).map(|(p, c)| p * c).sum();
    let variance = pmf
        .iter()
        .zip(&centers)
        .map(|(p, c)| p * (c - mean) * (c - mean))
        .sum();
    PmfStats { mean, variance }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginPmfPair {
    /// `bins + 1` shared edges.
    pub bin_edges: Vec<f64>,
    pub pmf_pos: Vec<f64>,
    pub pmf_neg: Vec<f64>,
    pub stats_pos: PmfStats,
    pub stats_neg: PmfStats,
    pub bc: f64,
}

impl MarginPmfPair {
    /// Pair from explicit histograms on shared edges.
    pub fn from_pmfs(bin_edges: Vec<f64>, pmf_pos: Vec<f64>, pmf_neg: Vec<f64>) -> Result<Self> {
        if pmf_pos.is_empty()
            || pmf_pos.len() != pmf_neg.len()
            || bin_edges.len() != pmf_pos.len() + 1
        {
            return Err(Error::InvalidShape(format!(
                "{} edges for PMFs of {} and {} bins",
                bin_edges.len(),
                pmf_pos.len(),
                pmf_neg.len()
            )));
        }
        for p in [&pmf_pos, &pmf_neg] {
            let s: f64 = p.iter().sum();
            if p.iter().any(|v| !(*v >= 0.0)) || (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidValue("PMF must be non-negative and sum to 1".into()));
            }
        }
        Ok(Self {
            stats_pos: pmf_stats(&pmf_pos, &bin_edges),
            stats_neg: pmf_stats(&pmf_neg, &bin_edges),
            bc: bhattacharyya(&pmf_pos, &pmf_neg),
            bin_edges,
            pmf_pos,
            pmf_neg,
        })
    }
}

/// PMFs of precomputed margins over `bins` equal bins spanning both sets.
pub fn pmfs_from_margins(pos: &[f64], neg: &[f64], bins: usize) -> Result<MarginPmfPair> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidInput("margin PMFs need both classes".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParams("PMF needs at least one bin".into()));
    }
    if pos.iter().chain(neg).any(|m| !m.is_finite()) {
        return Err(Error::InvalidValue("non-finite margin".into()));
    }
    let (lo, hi) = pos
        .iter()
        .chain(neg)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &m| (lo.min(m), hi.max(m)));
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + k as f64 * width })
        .collect();
    let histogram = |ms: &[f64]| {
        let mut h = vec![0.0; bins];
        for &m in ms {
            let k = if width > 0.0 {
                (((m - lo) / width) as usize).min(bins - 1)
            } else {
                0
            };
            h[k] += 1.0;
        }
        let n = ms.len() as f64;
        h.iter_mut().for_each(|v| *v /= n);
        h
    };
    let pmf_pos = histogram(pos);
    let pmf_neg = histogram(neg);
    Ok(MarginPmfPair {
        stats_pos: pmf_stats(&pmf_pos, &edges),
        stats_neg: pmf_stats(&pmf_neg, &edges),
        bc: bhattacharyya(&pmf_pos, &pmf_neg),
        bin_edges: edges,
        pmf_pos,
        pmf_neg,
    })
}

/// Margins `2 y f` of full fingerprints, `y = +1` for `authorized` and
/// `y = -1` for `others`, binned into a PMF pair.
pub fn build_margin_pmfs<A: AsRef<[f64]>, B: AsRef<[f64]>>(
    model: &SvmModel,
    authorized: &[A],
    others: &[B],
    bins: usize,
) -> Result<MarginPmfPair> {
    if authorized.is_empty() || others.is_empty() {
        return Err(Error::InvalidInput("margin PMFs need both classes".into()));
    }
    let pos = authorized
        .iter()
        .map(|fp| model.score_fingerprint(fp.as_ref()).map(|f| margin_of(f, Class::Authorized)))
        .collect::<Result<Vec<_>>>()?;
    let neg = others
        .iter()
        .map(|fp| model.score_fingerprint(fp.as_ref()).map(|f| margin_of(f, Class::Other)))
        .collect::<Result<Vec<_>>>()?;
    pmfs_from_margins(&pos, &neg, bins)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelQuality {
    pub mean_distance: f64,
    pub bc: f64,
    pub variance_sum: f64,
}

pub fn model_quality(pair: &MarginPmfPair) -> ModelQuality {
    ModelQuality {
        mean_distance: (pair.stats_pos.mean - pair.stats_neg.mean).abs(),
        bc: pair.bc,
        variance_sum: pair.stats_pos.variance + pair.stats_neg.variance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateModel {
    pub model: SvmModel,
    pub n_r: usize,
    /// Fraction of the claimed radio's training fingerprints accepted.
    pub tvr_train: f64,
    /// Largest acceptance fraction over the other authorized radios.
    pub fvr_others_train: f64,
    /// Mean cross-validation error of the kept model's fold.
    pub cv_error: f64,
    pub pmf_pair: MarginPmfPair,
}

impl CandidateModel {
    pub fn passes_gates(&self) -> bool {
        self.tvr_train >= TVR_GATE && self.fvr_others_train <= FVR_GATE
    }

    pub fn quality(&self) -> ModelQuality {
        model_quality(&self.pmf_pair)
    }
}

fn survivor_order(a: &CandidateModel, b: &CandidateModel) -> Ordering {
    let (qa, qb) = (a.quality(), b.quality());
    qa.bc
        .total_cmp(&qb.bc)
        .then(qb.mean_distance.total_cmp(&qa.mean_distance))
        .then(qa.variance_sum.total_cmp(&qb.variance_sum))
        .then(a.n_r.cmp(&b.n_r))
}

fn fallback_order(a: &CandidateModel, b: &CandidateModel) -> Ordering {
    b.tvr_train.total_cmp(&a.tvr_train).then(a.n_r.cmp(&b.n_r))
}

/// Index of the chosen candidate.
pub fn select_best_index(candidates: &[CandidateModel]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate models".into()));
    }
    let pick = |order: fn(&CandidateModel, &CandidateModel) -> Ordering, gated: bool| {
        candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| !gated || c.passes_gates())
            .min_by(|(i, a), (j, b)| order(a, b).then(i.cmp(j)))
            .map(|(i, _)| i)
    };
    Ok(pick(survivor_order, true)
        .or_else(|| pick(fallback_order, false))
        .expect("non-empty"))
}

pub fn select_best(candidates: &[CandidateModel]) -> Result<&CandidateModel> {
    select_best_index(candidates).map(|i| &candidates[i])
}

/// CSV with one row per candidate.
pub fn write_candidate_ledger<W: Write>(
    out: W,
    candidates: &[CandidateModel],
    selected: Option<usize>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fmt = |e: csv::Error| Error::Format(format!("candidate ledger: {e}"));
    w.write_record([
        "n_r",
        "tvr_train",
        "fvr_others_train",
        "bc",
        "mean_distance",
        "variance_sum",
        "selected",
    ])
    .map_err(fmt)?;
    for (i, c) in candidates.iter().enumerate() {
        let q = c.quality();
        w.write_record([
            c.n_r.to_string(),
            c.tvr_train.to_string(),
            c.fvr_others_train.to_string(),
            q.bc.to_string(),
            q.mean_distance.to_string(),
            q.variance_sum.to_string(),
            (selected == Some(i)).to_string(),
        ])
        .map_err(fmt)?;
    }
    w.flush().map_err(|e| Error::Format(format!("candidate ledger: {e}")))
}
