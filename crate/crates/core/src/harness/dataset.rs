//! Noisy fingerprint datasets and audited read access to them.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;

use super::{Cohort, PipelineSpec};
use crate::fingerprint::{fingerprint_samples, Fingerprint, FingerprintMeta};
use crate::io::{read_store, write_store};
use crate::signal::{add_awgn, Snr};
use crate::tfr::GaborTransform;
use crate::{seed, Error, Result};

/// All fingerprints for one SNR, grouped by radio then realization.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintStore {
    records: Vec<Fingerprint>,
    index: BTreeMap<(String, u32), Range<usize>>,
    radios: Vec<String>,
}

impl FingerprintStore {
    /// Each `(radio, realization)` group must be contiguous, and all records
    /// must share one SNR.
    pub fn from_records(records: Vec<Fingerprint>) -> Result<Self> {
        let mut index: BTreeMap<(String, u32), Range<usize>> = BTreeMap::new();
        let mut radios: Vec<String> = Vec::new();
        let mut start = 0;
        for i in 1..=records.len() {
            let boundary = i == records.len()
                || records[i].radio_id != records[start].radio_id
                || records[i].realization != records[start].realization;
            if !boundary {
                continue;
            }
            let r = &records[start];
            if radios.last() != Some(&r.radio_id) {
                if radios.contains(&r.radio_id) {
                    return Err(Error::Format(format!("records of {} are not contiguous", r.radio_id)));
                }
                radios.push(r.radio_id.clone());
            }
            if index.insert((r.radio_id.clone(), r.realization), start..i).is_some() {
                return Err(Error::Format(format!(
                    "realization {} of {} appears twice",
                    r.realization, r.radio_id
                )));
            }
            start = i;
        }
        if let Some(first) = records.first() {
            if records.iter().any(|r| r.snr_db.to_bits() != first.snr_db.to_bits()) {
                return Err(Error::Format("store mixes SNR values".into()));
            }
        }
        Ok(Self {
            records,
            index,
            radios,
        })
    }

    pub fn records(&self) -> &[Fingerprint] {
        &self.records
    }

    pub fn radios(&self) -> &[String] {
        &self.radios
    }

    /// `+inf` for clean data; `None` for an empty store.
    pub fn snr_db(&self) -> Option<f64> {
        self.records.first().map(|r| r.snr_db)
    }

    pub fn get(&self, radio: &str, realization: u32) -> Option<&[Fingerprint]> {
        self.index
            .get(&(radio.to_string(), realization))
            .map(|r| &self.records[r.clone()])
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_store(path, &self.records)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_records(read_store(path)?)
    }
}

/// Adds noise to every burst for each realization and fingerprints it.
/// Noise seeds depend on (radio, realization, burst) but not on the SNR, so
/// grids share noise shapes across SNR values.
pub fn generate_dataset(
    cohort: &Cohort,
    snr: Snr,
    realizations: u32,
    master_seed: u64,
    pipeline: &PipelineSpec,
) -> Result<FingerprintStore> {
    let transform = GaborTransform::new(pipeline.gabor)?;
    let snr_db = snr.as_db();
    let units: Vec<(usize, u32)> = (0..cohort.bursts.len())
        .flat_map(|r| (0..realizations).map(move |z| (r, z)))
        .collect();
    let groups = units
        .par_iter()
        .map(|&(r, z)| {
            let id = &cohort.manifest.profiles[r].radio_id;
            cohort.bursts[r]
                .iter()
                .enumerate()
                .map(|(b, burst)| {
                    let s = seed::derive(master_seed, &[seed::AWGN, seed::key(id), z as u64, b as u64]);
                    let noisy = add_awgn(burst, snr, pipeline.filter, s)?;
                    fingerprint_samples(
                        &noisy.samples,
                        &transform,
                        FingerprintMeta {
                            radio_id: id.clone(),
                            snr_db,
                            realization: z,
                        },
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FingerprintStore::from_records(groups.into_iter().flatten().collect())
}

/// Read access to a store limited to a set of radios. Every request,
/// granted or not, is logged by radio id.
#[derive(Debug)]
pub struct StoreView<'a> {
    store: &'a FingerprintStore,
    allowed: Option<Vec<String>>,
    log: Mutex<Vec<String>>,
}

impl<'a> StoreView<'a> {
    pub fn restricted<S: AsRef<str>>(store: &'a FingerprintStore, allowed: &[S]) -> Self {
        Self {
            store,
            allowed: Some(allowed.iter().map(|s| s.as_ref().to_string()).collect()),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn unrestricted(store: &'a FingerprintStore) -> Self {
        Self {
            store,
            allowed: None,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn snr_db(&self) -> Option<f64> {
        self.store.snr_db()
    }

    pub fn fingerprints(&self, radio: &str, realization: u32) -> Result<&'a [Fingerprint]> {
        self.log.lock().expect("log lock").push(radio.to_string());
        if let Some(allowed) = &self.allowed {
            if !allowed.iter().any(|a| a == radio) {
                return Err(Error::InvalidInput(format!("{radio} is not readable through this view")));
            }
        }
        self.store.get(radio, realization).ok_or_else(|| {
            Error::MissingData(format!("no fingerprints for {radio}, realization {realization}"))
        })
    }

    /// Radio ids requested so far, in request order.
    pub fn access_log(&self) -> Vec<String> {
        self.log.lock().expect("log lock").clone()
    }
}
