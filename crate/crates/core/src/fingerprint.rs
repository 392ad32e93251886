//! Patch statistics over the normalized Gabor surface.
//!
//! The 150x150 centered surface is cut down to the 50 frequency columns
//! around DC, and that 150x50 band is tiled by 10 time blocks x 5 frequency
//! blocks of 15x10 cells. Each patch contributes (std, var, skew, kurt); the
//! same four statistics over the whole surface close the vector, for
//! 50 * 4 + 4 = 204 features.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tfr::{normalize_tf, GaborTransform, TimeFrequencyMatrix};
use crate::{Error, Result};

pub const GRID_SIZE: usize = 150;
pub const N_T: usize = 15;
pub const N_F: usize = 10;
pub const BAND_COLS: usize = 50;
pub const N_PATCHES: usize = (GRID_SIZE / N_T) * (BAND_COLS / N_F);
pub const N_FEATURES: usize = 4 * N_PATCHES + 4;

/// First centered frequency column of the tiled band.
pub const BAND_START: usize = GRID_SIZE / 2 - BAND_COLS / 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub time_block: usize,
    pub freq_block: usize,
    /// Flat indices (`row * cols + col`) into the surface, time-major.
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid {
    pub patches: Vec<Patch>,
    /// Half-open centered column span that was tiled.
    pub band: (usize, usize),
}

/// Tiles the centered band of a 150x150 normalized surface. Patches are
/// ordered by time block, then frequency block.
pub fn tile_patches(tf: &TimeFrequencyMatrix) -> Result<PatchGrid> {
    if tf.rows != GRID_SIZE || tf.cols != GRID_SIZE || tf.values.len() != GRID_SIZE * GRID_SIZE {
        return Err(Error::InvalidShape(format!(
            "expected a {GRID_SIZE}x{GRID_SIZE} surface, got {}x{}",
            tf.rows, tf.cols
        )));
    }
    if !tf.normalized || !tf.centered {
        return Err(Error::InvalidShape(
            "surface must be normalized and centered before tiling".into(),
        ));
    }
    let mut patches = Vec::with_capacity(N_PATCHES);
    for tb in 0..GRID_SIZE / N_T {
        for fb in 0..BAND_COLS / N_F {
            let mut cells = Vec::with_capacity(N_T * N_F);
            for r in tb * N_T..(tb + 1) * N_T {
                for c in 0..N_F {
                    cells.push(r * tf.cols + BAND_START + fb * N_F + c);
                }
            }
            patches.push(Patch {
                time_block: tb,
                freq_block: fb,
                cells,
            });
        }
    }
    Ok(PatchGrid {
        patches,
        band: (BAND_START, BAND_START + BAND_COLS),
    })
}

/// Population moments of one region; kurtosis is not excess.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PatchStats {
    pub std_dev: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl PatchStats {
    pub fn as_array(&self) -> [f64; 4] {
        [self.std_dev, self.variance, self.skewness, self.kurtosis]
    }
}

/// Zero variance yields all-zero statistics.
pub fn patch_stats(cells: &[f64]) -> Result<PatchStats> {
    if cells.is_empty() {
        return Err(Error::InvalidValue("empty patch".into()));
    }
    if let Some(i) = cells.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidValue(format!("non-finite cell at {i}")));
    }
    let n = cells.len() as f64;
    let mean = cells.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in cells {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = m2 / n;
    // Spread at the level of rounding in the mean counts as a constant patch.
    let scale = cells.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = n * f64::EPSILON * scale;
    if variance <= floor * floor {
        return Ok(PatchStats::default());
    }
    let std_dev = variance.sqrt();
    Ok(PatchStats {
        std_dev,
        variance,
        skewness: (m3 / n) / (variance * std_dev),
        kurtosis: (m4 / n) / (variance * variance),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub features: Vec<f64>,
    pub radio_id: String,
    #[serde(default)]
    pub claimed_id: Option<String>,
    /// `+inf` marks a clean (noise-free) fingerprint.
    pub snr_db: f64,
    pub realization: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintMeta {
    pub radio_id: String,
    pub snr_db: f64,
    pub realization: u32,
}

/// 50 patch feature quads in patch order, then the global quad.
pub fn gen_fingerprint(tf: &TimeFrequencyMatrix, meta: FingerprintMeta) -> Result<Fingerprint> {
    let grid = tile_patches(tf)?;
    let mut features = Vec::with_capacity(N_FEATURES);
    let mut buf = Vec::with_capacity(N_T * N_F);
    for patch in &grid.patches {
        buf.clear();
        buf.extend(patch.cells.iter().map(|&i| tf.values[i]));
        features.extend(patch_stats(&buf)?.as_array());
    }
    features.extend(patch_stats(&tf.values)?.as_array());
    debug_assert_eq!(features.len(), N_FEATURES);
    Ok(Fingerprint {
        features,
        radio_id: meta.radio_id,
        claimed_id: None,
        snr_db: meta.snr_db,
        realization: meta.realization,
    })
}

/// Gabor transform, normalization and feature extraction in one call.
pub fn fingerprint_samples(
    samples: &[Complex64],
    transform: &GaborTransform,
    meta: FingerprintMeta,
) -> Result<Fingerprint> {
    let grid = transform.transform(samples)?;
    let tf = normalize_tf(&grid)?;
    gen_fingerprint(&tf, meta)
}
