//! Raw IQ captures: interleaved little-endian `f32` pairs (I then Q) with
//! no header, plus a JSON sidecar. A file holds `burst_count` consecutive
//! bursts of `burst_len` samples each.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{read_bytes, write_bytes};
use crate::signal::{ComplexBurst, EmitterProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IqSidecar {
    pub sample_rate: f64,
    pub radio_id: String,
    pub profile: EmitterProfile,
    pub seed: u64,
    pub burst_len: usize,
    pub burst_count: usize,
}

impl IqSidecar {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: IqSidecar =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("IQ sidecar: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if self.radio_id != self.profile.radio_id {
            return Err(Error::Format(format!(
                "sidecar radio_id {:?} differs from profile {:?}",
                self.radio_id, self.profile.radio_id
            )));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(Error::Format(format!("bad sample_rate {}", self.sample_rate)));
        }
        if self.burst_len == 0 {
            return Err(Error::Format("burst_len must be positive".into()));
        }
        self.burst_len
            .checked_mul(self.burst_count)
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Format("burst_len * burst_count overflows".into()))?;
        Ok(())
    }
}

/// Rounds each component to `f32`.
pub fn encode_iq(samples: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_iq(bytes: &[u8]) -> Result<Vec<Complex64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!(
            "IQ data length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect())
}

/// Sample file and sidecar for a base path: `<base>.iq`, `<base>.json`.
pub fn iq_paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("iq"), base.with_extension("json"))
}

pub fn write_iq(base: &Path, sidecar: &IqSidecar, bursts: &[ComplexBurst]) -> Result<()> {
    sidecar.validate()?;
    if bursts.len() != sidecar.burst_count || bursts.iter().any(|b| b.len() != sidecar.burst_len) {
        return Err(Error::InvalidShape(format!(
            "sidecar promises {} bursts of {} samples",
            sidecar.burst_count, sidecar.burst_len
        )));
    }
    let (data, meta) = iq_paths(base);
    let mut bytes = Vec::with_capacity(sidecar.burst_count * sidecar.burst_len * 8);
    for b in bursts {
        bytes.extend(encode_iq(&b.samples));
    }
    write_bytes(&data, &bytes)?;
    write_bytes(&meta, sidecar.to_json().as_bytes())
}

pub fn read_iq(base: &Path) -> Result<(IqSidecar, Vec<ComplexBurst>)> {
    let (data, meta) = iq_paths(base);
    let text = String::from_utf8(read_bytes(&meta)?)
        .map_err(|_| Error::Format(format!("{} is not UTF-8", meta.display())))?;
    let sidecar = IqSidecar::from_json(&text)?;
    let samples = decode_iq(&read_bytes(&data)?)?;
    if samples.len() != sidecar.burst_len * sidecar.burst_count {
        return Err(Error::Format(format!(
            "{} holds {} samples, sidecar promises {}",
            data.display(),
            samples.len(),
            sidecar.burst_len * sidecar.burst_count
        )));
    }
    let bursts = samples
        .chunks(sidecar.burst_len)
        .map(|c| ComplexBurst::new(sidecar.radio_id.clone(), sidecar.sample_rate, c.to_vec()))
        .collect();
    Ok((sidecar, bursts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f32_values_round_trip() {
        let s = vec![Complex64::new(0.25, -1.5), Complex64::new(1e-3f32 as f64, 7.0)];
        assert_eq!(decode_iq(&encode_iq(&s)).unwrap(), s);
        assert!(decode_iq(&[0u8; 7]).is_err());
    }
}
