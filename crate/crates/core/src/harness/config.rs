use serde::{Deserialize, Serialize};

use crate::featsel::{MethodParams, SelectionMethod};
use crate::signal::{DetectionSpec, FilterSpec};
use crate::svm::SvmParams;
use crate::tfr::GaborParams;
use crate::{Error, Result};

/// Signal-chain settings shared by cohort synthesis and fingerprinting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineSpec {
    pub filter: FilterSpec,
    pub detection: DetectionSpec,
    pub gabor: GaborParams,
}

impl Default for PipelineSpec {
    fn default() -> Self {
        Self {
            filter: FilterSpec::default(),
            detection: DetectionSpec::default(),
            gabor: GaborParams::default(),
        }
    }
}

impl PipelineSpec {
    /// Samples kept after transient alignment.
    pub fn retained_len(&self) -> usize {
        self.gabor.block_len() * (self.gabor.block_index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// dB, ascending.
    pub snr_grid: Vec<f64>,
    /// Training noise realizations per radio.
    pub n_z: usize,
    /// Held-out realizations used for evaluation.
    pub eval_realizations: usize,
    pub k_folds: usize,
    /// Class-1 training fingerprints per realization.
    pub n_b: usize,
    /// Class-2 fingerprints drawn from each other authorized radio per
    /// realization; `None` means `ceil(1.2 * n_b)`.
    pub others_per_radio: Option<usize>,
    pub nr_grid: Vec<usize>,
    pub methods: Vec<SelectionMethod>,
    pub master_seed: u64,
    pub pmf_bins: usize,
    pub svm: SvmParams,
    pub selection: MethodParams,
    pub pipeline: PipelineSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            snr_grid: (-1..=9).map(|k| 3.0 * k as f64).collect(),
            n_z: 10,
            eval_realizations: 1,
            k_folds: 5,
            n_b: 900,
            others_per_radio: None,
            nr_grid: (1..=200).collect(),
            methods: SelectionMethod::ALL.to_vec(),
            master_seed: 0,
            pmf_bins: crate::modelsel::DEFAULT_PMF_BINS,
            svm: SvmParams::default(),
            selection: MethodParams::default(),
            pipeline: PipelineSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn others_per_radio(&self) -> usize {
        self.others_per_radio.unwrap_or((6 * self.n_b).div_ceil(5))
    }

    pub fn total_realizations(&self) -> usize {
        self.n_z + self.eval_realizations
    }

    /// Realization indices held out for evaluation.
    pub fn eval_range(&self) -> std::ops::Range<u32> {
        self.n_z as u32..self.total_realizations() as u32
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("experiment config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.snr_grid.iter().any(|s| !s.is_finite()) {
            return bad("SNR grid values must be finite".into());
        }
        if self.snr_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("SNR grid must be strictly ascending".into());
        }
        if self.n_z == 0 || self.eval_realizations == 0 {
            return bad("need at least one training and one evaluation realization".into());
        }
        if self.k_folds == 0 {
            return bad("k_folds must be at least 1".into());
        }
        if self.n_b == 0 || self.others_per_radio() == 0 {
            return bad("training counts must be positive".into());
        }
        if self.nr_grid.is_empty() || self.nr_grid.contains(&0) {
            return bad("nr_grid must be non-empty and exclude 0".into());
        }
        if self.methods.is_empty() {
            return bad("at least one selection method is required".into());
        }
        if self.pmf_bins == 0 {
            return bad("pmf_bins must be positive".into());
        }
        u32::try_from(self.total_realizations())
            .map_err(|_| Error::InvalidParams("too many realizations".into()))?;
        self.pipeline.gabor.validate()?;
        self.svm.validate(1)?;
        Ok(())
    }

    /// `nr_grid` sorted, deduplicated and clipped to `max_dims`; falls back
    /// to `[max_dims]` when no grid value fits.
    pub fn effective_nr_grid(&self, max_dims: usize) -> Vec<usize> {
        let mut g: Vec<usize> = self.nr_grid.iter().copied().filter(|&n| n <= max_dims).collect();
        g.sort_unstable();
        g.dedup();
        if g.is_empty() && max_dims > 0 {
            g.push(max_dims);
        }
        g
    }
}
