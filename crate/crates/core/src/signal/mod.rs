//! Burst synthesis, capture filtering, transient detection and noise.

mod detect;
mod filter;
mod noise;
mod synth;

pub use detect::{align_transient, detect_transient, window_variances};
pub use filter::{butterworth_filter, Biquad, Butterworth};
pub use noise::{add_awgn, awgn_component, mean_power};
pub use synth::{clean_template, synth_burst, TEMPLATE_ONSET};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shortest burst `synth_burst` will produce.
pub const MIN_TEMPLATE_LEN: usize = 150;

/// Transmitter impairments that make one synthetic emitter distinct from
/// another. The identity profile (gain 1, everything else 0) reproduces the
/// clean template exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterProfile {
    pub radio_id: String,
    /// Linear Q/I gain ratio.
    pub iq_gain_imbalance: f64,
    /// Radians.
    pub iq_phase_imbalance: f64,
    /// Fraction of the sample rate.
    pub carrier_freq_offset: f64,
    /// Standard deviation of the per-sample phase random-walk increment, radians.
    pub phase_noise_std: f64,
    /// Third-order coefficient of the amplifier model `x + a3 x |x|^2`.
    pub pa_nonlinearity: f64,
    /// Time constant of the extra turn-on envelope, samples. Zero disables it.
    pub ramp_time_constant: f64,
    /// Trailing taps `[re, im]` of the transmit coloration filter
    /// `y[n] = x[n] + sum_k c_k x[n - k]`, k = 1, 2, ... Empty disables it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coloration: Vec<[f64; 2]>,
}

impl EmitterProfile {
    pub fn identity(radio_id: impl Into<String>) -> Self {
        Self {
            radio_id: radio_id.into(),
            iq_gain_imbalance: 1.0,
            iq_phase_imbalance: 0.0,
            carrier_freq_offset: 0.0,
            phase_noise_std: 0.0,
            pa_nonlinearity: 0.0,
            ramp_time_constant: 0.0,
            coloration: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.iq_gain_imbalance,
            self.iq_phase_imbalance,
            self.carrier_freq_offset,
            self.phase_noise_std,
            self.pa_nonlinearity,
            self.ramp_time_constant,
        ]
        .iter()
        .chain(self.coloration.iter().flatten())
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidValue(format!(
                "profile {} has non-finite fields",
                self.radio_id
            )));
        }
        if self.iq_gain_imbalance <= 0.0 {
            return Err(Error::InvalidValue(format!(
                "profile {}: iq_gain_imbalance must be > 0",
                self.radio_id
            )));
        }
        if self.carrier_freq_offset <= -0.5 || self.carrier_freq_offset >= 0.5 {
            return Err(Error::InvalidValue(format!(
                "profile {}: carrier_freq_offset must lie in (-0.5, 0.5)",
                self.radio_id
            )));
        }
        if self.phase_noise_std < 0.0 || self.ramp_time_constant < 0.0 {
            return Err(Error::InvalidValue(format!(
                "profile {}: phase_noise_std and ramp_time_constant must be >= 0",
                self.radio_id
            )));
        }
        Ok(())
    }
}

/// Signal-to-noise ratio of a burst. `Clean` means no noise was added.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Clean,
    Db(f64),
}

impl Snr {
    /// `Clean` maps to `+inf`, which is also how stores encode it.
    pub fn as_db(self) -> f64 {
        match self {
            Snr::Clean => f64::INFINITY,
            Snr::Db(db) => db,
        }
    }

    pub fn from_db(db: f64) -> Self {
        if db == f64::INFINITY {
            Snr::Clean
        } else {
            Snr::Db(db)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBurst {
    pub samples: Vec<Complex64>,
    /// Samples per second.
    pub sample_rate: f64,
    pub radio_id: String,
    pub snr: Snr,
}

impl ComplexBurst {
    pub fn new(radio_id: impl Into<String>, sample_rate: f64, samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            sample_rate,
            radio_id: radio_id.into(),
            snr: Snr::Clean,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn power(&self) -> f64 {
        mean_power(&self.samples)
    }
}

/// Receive-filter settings shared by the signal and noise paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order: usize,
    /// Fraction of Nyquist.
    pub cutoff: f64,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            order: 6,
            cutoff: 0.35,
        }
    }
}

/// Variance-trajectory detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionSpec {
    pub window: usize,
    pub threshold: f64,
}

impl Default for DetectionSpec {
    fn default() -> Self {
        Self {
            window: 16,
            threshold: 0.05,
        }
    }
}
