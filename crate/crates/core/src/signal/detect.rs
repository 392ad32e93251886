//! Amplitude-based variance trajectory detection.

use super::ComplexBurst;
use crate::{Error, Result};

/// Population variance of `|s|` over every length-`window` window,
/// indexed by the window's first sample.
pub fn window_variances(amplitude: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || amplitude.len() < window {
        return Vec::new();
    }
    amplitude
        .windows(window)
        .map(|w| {
            let mean = w.iter().sum::<f64>() / window as f64;
            w.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / window as f64
        })
        .collect()
}

/// Index of the first window whose amplitude variance exceeds
/// `threshold * max_variance`.
pub fn detect_transient(record: &ComplexBurst, window: usize, threshold: f64) -> Result<usize> {
    if window < 2 {
        return Err(Error::InvalidParams(format!("window must be >= 2, got {window}")));
    }
    if record.len() <= window {
        return Err(Error::InvalidLength(format!(
            "record of {} samples is not longer than the window ({window})",
            record.len()
        )));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "threshold must be in (0, 1], got {threshold}"
        )));
    }
    let amplitude: Vec<f64> = record.samples.iter().map(|s| s.norm()).collect();
    let peak_amp = amplitude.iter().cloned().fold(0.0, f64::max);
    let vars = window_variances(&amplitude, window);
    let max_var = vars.iter().cloned().fold(0.0, f64::max);
    // rounding in the window mean leaves ~eps^2 variance on constant records
    if !(max_var > 1e-24 * peak_amp * peak_amp) {
        return Err(Error::NoTransientFound);
    }
    let level = threshold * max_var;
    vars.iter()
        .position(|&v| v > level)
        .ok_or(Error::NoTransientFound)
}

/// Cuts `retained` samples starting at the detected transient.
pub fn align_transient(
    record: &ComplexBurst,
    window: usize,
    threshold: f64,
    retained: usize,
) -> Result<ComplexBurst> {
    let start = detect_transient(record, window, threshold)?;
    if start + retained > record.len() {
        return Err(Error::InvalidLength(format!(
            "only {} samples after transient start {start}, need {retained}",
            record.len() - start
        )));
    }
    Ok(ComplexBurst {
        samples: record.samples[start..start + retained].to_vec(),
        ..record.clone()
    })
}
