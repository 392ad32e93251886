//! Like-filtered complex AWGN.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{Butterworth, ComplexBurst, FilterSpec, Snr};
use crate::{seed, Error, Result};

/// Filter settling samples generated and discarded ahead of the noise.
const WARMUP: usize = 256;

pub fn mean_power(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Noise of length `len`, shaped by the receive filter and scaled so its
/// mean power is `signal_power / 10^(snr_db/10)`.
pub fn awgn_component(
    len: usize,
    signal_power: f64,
    snr_db: f64,
    filter: FilterSpec,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if !(signal_power > 0.0) || !signal_power.is_finite() {
        return Err(Error::DegenerateSignal(format!(
            "signal power {signal_power} must be positive"
        )));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidValue(format!("snr {snr_db} dB")));
    }
    let filt = Butterworth::from_spec(filter)?;
    let mut rng = seed::rng(seed, &[seed::AWGN]);
    let white: Vec<Complex64> = (0..len + WARMUP)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let shaped = filt.apply(&white);
    let shaped = &shaped[WARMUP..];
    let p = mean_power(shaped);
    if !(p > 0.0) {
        return Err(Error::NumericalFailure("filtered noise has zero power".into()));
    }
    let target = signal_power / 10f64.powf(snr_db / 10.0);
    let scale = (target / p).sqrt();
    Ok(shaped.iter().map(|s| s * scale).collect())
}

/// Adds like-filtered AWGN at `snr` measured against the burst's own mean
/// power. `Snr::Clean` returns the burst unchanged.
pub fn add_awgn(burst: &ComplexBurst, snr: Snr, filter: FilterSpec, seed: u64) -> Result<ComplexBurst> {
    let snr_db = match snr {
        Snr::Clean => return Ok(burst.clone()),
        Snr::Db(db) => db,
    };
    let noise = awgn_component(burst.len(), burst.power(), snr_db, filter, seed)?;
    Ok(ComplexBurst {
        samples: burst.samples.iter().zip(&noise).map(|(s, n)| s + n).collect(),
        snr,
        ..burst.clone()
    })
}
