//! Synthetic emitter cohorts.

use std::path::Path;

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PipelineSpec, TrialConfig};
use crate::io::{read_iq, write_iq, IqSidecar};
use crate::signal::{align_transient, butterworth_filter, synth_burst, ComplexBurst, EmitterProfile, MIN_TEMPLATE_LEN};
use crate::{seed, Error, Result};

const MANIFEST_FILE: &str = "manifest.json";

/// Profiles plus the burst count each radio contributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortManifest {
    /// `N_B`.
    pub bursts_per_radio: usize,
    pub template_len: usize,
    pub sample_rate: f64,
    pub seed: u64,
    pub profiles: Vec<EmitterProfile>,
}

impl CohortManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: CohortManifest = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("cohort manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.profiles.is_empty() || self.bursts_per_radio == 0 {
            return Err(Error::InvalidParams("cohort needs radios and bursts".into()));
        }
        if self.template_len < MIN_TEMPLATE_LEN {
            return Err(Error::InvalidLength(format!(
                "template_len {} < {MIN_TEMPLATE_LEN}",
                self.template_len
            )));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(Error::InvalidParams(format!("bad sample_rate {}", self.sample_rate)));
        }
        let mut ids: Vec<&str> = Vec::with_capacity(self.profiles.len());
        for p in &self.profiles {
            p.validate()?;
            if p.radio_id.is_empty() || p.radio_id.len() > 256 || p.radio_id.contains(['/', '\\']) {
                return Err(Error::InvalidParams(format!("unusable radio id {:?}", p.radio_id)));
            }
            ids.push(&p.radio_id);
        }
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("duplicate radio id in cohort".into()));
        }
        Ok(())
    }
}

/// Gain imbalance, phase imbalance, CFO, PA coefficient and ramp constant
/// per reference radio. Spread by a max-min search over mean clean
/// fingerprints, then pulled toward the identity profile.
const PROFILES: [[f64; 5]; 18] = [
    [0.9743, -0.0600, -0.0000468, 0.0166, 9.518],
    [1.0627, -0.0468, 0.0001878, -0.0064, 10.947],
    [1.0576, 0.0428, 0.0002016, -0.0365, 10.207],
    [1.0699, 0.0021, -0.0000978, -0.0273, 10.834],
    [0.9340, 0.0510, 0.0001500, 0.0540, 6.900],
    [0.9604, -0.0600, -0.0000732, 0.0411, 11.100],
    [1.0000, 0.0510, -0.0001500, 0.0540, 9.300],
    [0.9397, 0.0113, 0.0001233, -0.0449, 7.033],
    [1.0257, -0.0410, 0.0001554, -0.0365, 6.900],
    [1.0000, 0.0000, 0.0001500, 0.0540, 11.100],
    [0.9310, 0.0517, -0.0001026, -0.0065, 11.100],
    [0.9269, -0.0252, 0.0002037, 0.0023, 11.082],
    [1.0105, 0.0215, 0.0001911, 0.0029, 10.255],
    [1.0402, -0.0247, -0.0001806, 0.0600, 10.667],
    [0.9591, 0.0126, -0.0002517, 0.0098, 8.353],
    [1.0602, 0.0600, -0.0000549, -0.0090, 7.313],
    [1.0750, -0.0474, -0.0001611, 0.0464, 6.900],
    [1.0051, -0.0486, -0.0003000, -0.0174, 9.535],
];

const COLORATION_TAPS: usize = 6;
const COLORATION_LEVEL: f64 = 0.4;
const COLORATION_DECAY: f64 = 0.7;

/// Complex Gaussian taps with geometrically decaying spread, fixed per
/// radio id.
pub(crate) fn coloration_taps(radio_id: &str, n_taps: usize, level: f64, decay: f64) -> Vec<[f64; 2]> {
    let mut rng = seed::rng(seed::COHORT, &[seed::COLORATION, seed::key(radio_id)]);
    let unit = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    (0..n_taps)
        .map(|k| {
            let s = level * decay.powi(k as i32);
            [s * unit.sample(&mut rng), s * unit.sample(&mut rng)]
        })
        .collect()
}

/// The 18 reference radio ids with impairments taken from [`PROFILES`].
pub fn default_cohort(bursts_per_radio: usize, seed: u64) -> CohortManifest {
    let profiles = TrialConfig::reference_radio_ids()
        .into_iter()
        .zip(PROFILES)
        .map(|(radio_id, [g, p, c, a, r])| EmitterProfile {
            coloration: coloration_taps(&radio_id, COLORATION_TAPS, COLORATION_LEVEL, COLORATION_DECAY),
            radio_id,
            iq_gain_imbalance: g,
            iq_phase_imbalance: p,
            carrier_freq_offset: c,
            phase_noise_std: 0.002,
            pa_nonlinearity: a,
            ramp_time_constant: r,
        })
        .collect();
    CohortManifest {
        bursts_per_radio,
        template_len: 256,
        sample_rate: 20e6,
        seed,
        profiles,
    }
}

/// Aligned, `f32`-quantized near-transient bursts for every radio.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub manifest: CohortManifest,
    /// `bursts[i]` belongs to `manifest.profiles[i]`.
    pub bursts: Vec<Vec<ComplexBurst>>,
}

impl Cohort {
    pub fn radio_ids(&self) -> impl Iterator<Item = &str> {
        self.manifest.profiles.iter().map(|p| p.radio_id.as_str())
    }
}

fn quantize(samples: &mut [Complex64]) {
    for s in samples {
        *s = Complex64::new(s.re as f32 as f64, s.im as f32 as f64);
    }
}

/// Synthesizes, filters and aligns `bursts_per_radio` bursts per profile.
pub fn synthesize_cohort(manifest: &CohortManifest, pipeline: &PipelineSpec) -> Result<Cohort> {
    manifest.validate()?;
    let retained = pipeline.retained_len();
    let bursts = manifest
        .profiles
        .par_iter()
        .map(|p| {
            (0..manifest.bursts_per_radio)
                .map(|b| {
                    let s = seed::derive(manifest.seed, &[seed::COHORT, seed::key(&p.radio_id), b as u64]);
                    let raw = synth_burst(p, manifest.template_len, s)?;
                    let filtered = butterworth_filter(&raw, pipeline.filter.order, pipeline.filter.cutoff)?;
                    let mut aligned = align_transient(
                        &filtered,
                        pipeline.detection.window,
                        pipeline.detection.threshold,
                        retained,
                    )?;
                    quantize(&mut aligned.samples);
                    aligned.sample_rate = manifest.sample_rate;
                    Ok(aligned)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cohort {
        manifest: manifest.clone(),
        bursts,
    })
}

/// `manifest.json` plus one `<radio_id>.iq` / `<radio_id>.json` pair per radio.
pub fn write_cohort(dir: &Path, cohort: &Cohort) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mpath = dir.join(MANIFEST_FILE);
    std::fs::write(&mpath, cohort.manifest.to_json()).map_err(|e| Error::io(&mpath, e))?;
    for (p, bursts) in cohort.manifest.profiles.iter().zip(&cohort.bursts) {
        let sidecar = IqSidecar {
            sample_rate: cohort.manifest.sample_rate,
            radio_id: p.radio_id.clone(),
            profile: p.clone(),
            seed: cohort.manifest.seed,
            burst_len: bursts.first().map_or(0, |b| b.len()),
            burst_count: bursts.len(),
        };
        write_iq(&dir.join(&p.radio_id), &sidecar, bursts)?;
    }
    Ok(())
}

pub fn read_cohort(dir: &Path) -> Result<Cohort> {
    let mpath = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let manifest = CohortManifest::from_json(&text)?;
    let mut bursts = Vec::with_capacity(manifest.profiles.len());
    for p in &manifest.profiles {
        let (sidecar, b) = read_iq(&dir.join(&p.radio_id))?;
        if sidecar.profile != *p || sidecar.burst_count != manifest.bursts_per_radio {
            return Err(Error::Format(format!(
                "IQ sidecar for {} disagrees with the cohort manifest",
                p.radio_id
            )));
        }
        bursts.push(b);
    }
    Ok(Cohort { manifest, bursts })
}
