//! Oversampled discrete Gabor transform and the normalized, centered
//! magnitude-squared surface fingerprints are built from.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaborParams {
    /// Number of time shifts.
    pub m: usize,
    /// Number of frequency shifts.
    pub k_g: usize,
    /// Time step between shifts, samples.
    pub n_delta: usize,
    /// Spread of the Gaussian analysis window, samples.
    pub window_sigma: f64,
    /// Which length-`m * n_delta` block of the input is analysed.
    pub block_index: usize,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            m: 150,
            k_g: 150,
            n_delta: 1,
            window_sigma: 150.0 / 6.0,
            block_index: 0,
        }
    }
}

impl GaborParams {
    /// Samples consumed per block.
    pub fn block_len(&self) -> usize {
        self.m * self.n_delta
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k_g == 0 || self.n_delta == 0 {
            return Err(Error::InvalidParams("M, K_G and N_delta must be positive".into()));
        }
        if self.block_len() % self.k_g != 0 {
            return Err(Error::InvalidParams(format!(
                "M*N_delta = {} is not a multiple of K_G = {}",
                self.block_len(),
                self.k_g
            )));
        }
        if self.k_g <= self.n_delta {
            return Err(Error::InvalidParams(format!(
                "K_G = {} must exceed N_delta = {} for oversampling",
                self.k_g, self.n_delta
            )));
        }
        if !(self.window_sigma > 0.0 && self.window_sigma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "window_sigma must be positive, got {}",
                self.window_sigma
            )));
        }
        Ok(())
    }

    /// Gaussian window at integer offset `d`, indexed circularly over one
    /// block and centred on offset zero.
    pub fn window(&self, d: i64) -> f64 {
        let len = self.block_len() as i64;
        let c = d.rem_euclid(len);
        let signed = if 2 * c >= len { c - len } else { c };
        let x = signed as f64;
        (-x * x / (2.0 * self.window_sigma * self.window_sigma)).exp()
    }
}

/// Complex Gabor coefficients, `m` time rows by `k_g` frequency columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborGrid {
    pub m: usize,
    pub k_g: usize,
    pub coeffs: Vec<Complex64>,
}

impl GaborGrid {
    pub fn get(&self, m: usize, k: usize) -> Complex64 {
        self.coeffs[m * self.k_g + k]
    }
}

/// Reusable transform: window table and FFT plan for one parameter set.
pub struct GaborTransform {
    params: GaborParams,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl GaborTransform {
    pub fn new(params: GaborParams) -> Result<Self> {
        params.validate()?;
        let len = params.block_len() as i64;
        let window = (0..len).map(|d| params.window(d)).collect();
        let fft = FftPlanner::new().plan_fft_forward(params.k_g);
        Ok(Self {
            params,
            window,
            fft,
        })
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }

    /// `G[m][k] = sum_{n=1}^{L} s(n + l L) w(n - m N) exp(-j 2 pi k n / K_G)`
    /// for `m = 1..=M`, `k = 0..K_G`, with `s(1)` the first input sample.
    pub fn transform(&self, samples: &[Complex64]) -> Result<GaborGrid> {
        let p = &self.params;
        let len = p.block_len();
        let offset = p.block_index * len;
        if samples.len() < offset + len {
            return Err(Error::InvalidLength(format!(
                "need {} samples for block {}, have {}",
                offset + len,
                p.block_index,
                samples.len()
            )));
        }
        let block = &samples[offset..offset + len];
        let mut coeffs = Vec::with_capacity(p.m * p.k_g);
        let mut buf = vec![Complex64::default(); p.k_g];
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        for m in 1..=p.m {
            buf.iter_mut().for_each(|b| *b = Complex64::default());
            for n in 1..=len {
                let d = (n as i64 - (m * p.n_delta) as i64).rem_euclid(len as i64) as usize;
                buf[n % p.k_g] += block[n - 1] * self.window[d];
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            coeffs.extend_from_slice(&buf);
        }
        Ok(GaborGrid {
            m: p.m,
            k_g: p.k_g,
            coeffs,
        })
    }
}

/// One-shot transform; see [`GaborTransform::transform`].
pub fn dgt(samples: &[Complex64], params: &GaborParams) -> Result<GaborGrid> {
    GaborTransform::new(*params)?.transform(samples)
}

/// Real time-frequency surface, `rows` time by `cols` frequency, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub normalized: bool,
    pub centered: bool,
}

impl TimeFrequencyMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// `|G|^2 / max |G|^2` with the frequency axis rotated so bin 0 lands on
/// column `k_g / 2`.
pub fn normalize_tf(grid: &GaborGrid) -> Result<TimeFrequencyMatrix> {
    let mag: Vec<f64> = grid.coeffs.iter().map(|c| c.norm_sqr()).collect();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::DegenerateTf);
    }
    let k_g = grid.k_g;
    let half = k_g / 2;
    let mut values = vec![0.0; mag.len()];
    for m in 0..grid.m {
        for k in 0..k_g {
            values[m * k_g + (k + half) % k_g] = mag[m * k_g + k] / peak;
        }
    }
    Ok(TimeFrequencyMatrix {
        rows: grid.m,
        cols: k_g,
        values,
        normalized: true,
        centered: true,
    })
}
