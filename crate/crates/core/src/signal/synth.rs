//! Synthetic near-transient bursts.
//!
//! The clean template is silence followed by a raised-cosine turn-on of a
//! fixed multi-tone plus chirp waveform confined to about +/-0.13 cycles per
//! sample. Emitter impairments are applied on top in a fixed order: ramp
//! envelope, transmit coloration, IQ imbalance, third-order nonlinearity,
//! carrier offset, phase noise walk.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};

use super::{ComplexBurst, EmitterProfile, MIN_TEMPLATE_LEN};
use crate::{seed, Error, Result};

/// Index of the first non-zero template sample.
pub const TEMPLATE_ONSET: usize = 40;
const RISE: usize = 24;

const TONES: [(f64, f64, f64); 6] = [
    (-0.12, 0.45, 0.3),
    (-0.07, 0.8, 1.9),
    (-0.02, 1.0, 0.7),
    (0.03, 0.9, 2.6),
    (0.075, 0.6, 4.1),
    (0.11, 0.4, 5.3),
];
const CHIRP_AMP: f64 = 0.6;
const CHIRP_START: f64 = -0.1;
const CHIRP_RATE: f64 = 0.2 / 150.0;

/// The impairment-free burst of length `len`.
pub fn clean_template(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|n| {
            if n < TEMPLATE_ONSET {
                return Complex64::default();
            }
            let t = (n - TEMPLATE_ONSET) as f64;
            let env = if t < RISE as f64 {
                0.5 * (1.0 - (PI * t / RISE as f64).cos())
            } else {
                1.0
            };
            let tones: Complex64 = TONES
                .iter()
                .map(|&(f, a, ph)| Complex64::from_polar(a, 2.0 * PI * f * t + ph))
                .sum();
            let chirp = Complex64::from_polar(
                CHIRP_AMP,
                2.0 * PI * (CHIRP_START * t + 0.5 * CHIRP_RATE * t * t),
            );
            (tones + chirp) * (env * 0.5)
        })
        .collect()
}

/// Synthesizes one burst for `profile`. The result depends only on
/// `(profile, template_len, seed)`.
pub fn synth_burst(profile: &EmitterProfile, template_len: usize, seed: u64) -> Result<ComplexBurst> {
    if template_len < MIN_TEMPLATE_LEN {
        return Err(Error::InvalidLength(format!(
            "template_len {template_len} < {MIN_TEMPLATE_LEN}"
        )));
    }
    profile.validate()?;
    let mut x = clean_template(template_len);

    if profile.ramp_time_constant > 0.0 {
        for (n, s) in x.iter_mut().enumerate().skip(TEMPLATE_ONSET) {
            let t = (n - TEMPLATE_ONSET) as f64;
            *s *= 1.0 - (-t / profile.ramp_time_constant).exp();
        }
    }

    if !profile.coloration.is_empty() {
        let taps: Vec<Complex64> = profile.coloration.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let src = x.clone();
        for (n, s) in x.iter_mut().enumerate() {
            for (k, c) in taps.iter().enumerate().take(n) {
                *s += c * src[n - k - 1];
            }
        }
    }

    if profile.iq_gain_imbalance != 1.0 || profile.iq_phase_imbalance != 0.0 {
        // y = mu x + nu conj(x)
        let g = profile.iq_gain_imbalance;
        let phi = profile.iq_phase_imbalance;
        let mu = (Complex64::new(1.0, 0.0) + Complex64::from_polar(g, -phi)) * 0.5;
        let nu = (Complex64::new(1.0, 0.0) - Complex64::from_polar(g, phi)) * 0.5;
        for s in x.iter_mut() {
            *s = mu * *s + nu * s.conj();
        }
    }

    if profile.pa_nonlinearity != 0.0 {
        let a3 = profile.pa_nonlinearity;
        for s in x.iter_mut() {
            *s += *s * (a3 * s.norm_sqr());
        }
    }

    if profile.carrier_freq_offset != 0.0 {
        let w = 2.0 * PI * profile.carrier_freq_offset;
        for (n, s) in x.iter_mut().enumerate() {
            *s *= Complex64::from_polar(1.0, w * n as f64);
        }
    }

    if profile.phase_noise_std > 0.0 {
        let step = Normal::new(0.0, profile.phase_noise_std)
            .map_err(|e| Error::InvalidValue(e.to_string()))?;
        let mut rng = seed::rng(seed, &[seed::PHASE_NOISE]);
        let mut theta = 0.0;
        for s in x.iter_mut() {
            theta += step.sample(&mut rng);
            *s *= Complex64::from_polar(1.0, theta);
        }
    }

    Ok(ComplexBurst::new(profile.radio_id.clone(), 1.0, x))
}
