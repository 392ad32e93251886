//! Binary fingerprint store.
//!
//! ```text
//! "RFDN"  version:u32  n_f:u32  count:u32
//! count x { id_len:u32  id:utf8  snr_db:f64  realization:u32  n_f x f64 }
//! ```
//!
//! All integers and floats are little-endian. A clean SNR is `+inf`.

use std::io::Write;
use std::path::Path;

use super::{read_bytes, write_bytes};
use crate::fingerprint::Fingerprint;
use crate::{Error, Result};

pub const STORE_MAGIC: &[u8; 4] = b"RFDN";
pub const STORE_VERSION: u32 = 1;
/// Longest radio id accepted by the decoder.
const MAX_ID_LEN: usize = 4096;

pub fn encode_store(records: &[Fingerprint]) -> Result<Vec<u8>> {
    let n_f = records.first().map_or(0, |r| r.features.len());
    let mut out = Vec::with_capacity(16 + records.len() * (24 + 8 * n_f));
    out.extend_from_slice(STORE_MAGIC);
    out.extend_from_slice(&STORE_VERSION.to_le_bytes());
    out.extend_from_slice(&(n_f as u32).to_le_bytes());
    let count = u32::try_from(records.len())
        .map_err(|_| Error::InvalidLength(format!("{} records exceed u32", records.len())))?;
    out.extend_from_slice(&count.to_le_bytes());
    for r in records {
        if r.features.len() != n_f {
            return Err(Error::InvalidShape(format!(
                "record for {} has {} features, store has {n_f}",
                r.radio_id,
                r.features.len()
            )));
        }
        if r.radio_id.len() > MAX_ID_LEN {
            return Err(Error::InvalidLength(format!("radio id of {} bytes", r.radio_id.len())));
        }
        out.extend_from_slice(&(r.radio_id.len() as u32).to_le_bytes());
        out.extend_from_slice(r.radio_id.as_bytes());
        out.extend_from_slice(&r.snr_db.to_le_bytes());
        out.extend_from_slice(&r.realization.to_le_bytes());
        for v in &r.features {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format(format!("store truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

pub fn decode_store(bytes: &[u8]) -> Result<Vec<Fingerprint>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != STORE_MAGIC {
        return Err(Error::Format("missing RFDN magic".into()));
    }
    let version = r.u32()?;
    if version != STORE_VERSION {
        return Err(Error::Format(format!("unsupported store version {version}")));
    }
    let n_f = r.u32()? as usize;
    let count = r.u32()? as usize;
    let min_record = 16 + 8 * n_f;
    if count
        .checked_mul(min_record)
        .is_none_or(|need| need > r.remaining())
    {
        return Err(Error::Format(format!(
            "{count} records cannot fit in {} bytes",
            r.remaining()
        )));
    }
    let mut records = Vec::with_capacity(count);
    for k in 0..count {
        let id_len = r.u32()? as usize;
        if id_len > MAX_ID_LEN {
            return Err(Error::Format(format!("record {k}: radio id of {id_len} bytes")));
        }
        let radio_id = std::str::from_utf8(r.take(id_len)?)
            .map_err(|_| Error::Format(format!("record {k}: radio id is not UTF-8")))?
            .to_owned();
        let snr_db = r.f64()?;
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::Format(format!("record {k}: invalid SNR {snr_db}")));
        }
        let realization = r.u32()?;
        let features = (0..n_f).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format(format!("record {k}: non-finite feature")));
        }
        records.push(Fingerprint {
            features,
            radio_id,
            claimed_id: None,
            snr_db,
            realization,
        });
    }
    if r.remaining() != 0 {
        return Err(Error::Format(format!("{} trailing bytes", r.remaining())));
    }
    Ok(records)
}

pub fn write_store(path: &Path, records: &[Fingerprint]) -> Result<()> {
    write_bytes(path, &encode_store(records)?)
}

pub fn read_store(path: &Path) -> Result<Vec<Fingerprint>> {
    decode_store(&read_bytes(path)?).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Metadata columns then `feature_001..`.
pub fn write_store_csv<W: Write>(out: W, records: &[Fingerprint]) -> Result<()> {
    let fmt = |e: csv::Error| Error::Format(format!("store CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let n_f = records.first().map_or(0, |r| r.features.len());
    let mut header = vec!["radio_id".to_string(), "snr_db".into(), "realization".into()];
    header.extend((1..=n_f).map(|i| format!("feature_{i:03}")));
    w.write_record(&header).map_err(fmt)?;
    for r in records {
        let mut row = vec![r.radio_id.clone(), r.snr_db.to_string(), r.realization.to_string()];
        row.extend(r.features.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(fmt)?;
    }
    w.flush().map_err(|e| Error::Format(format!("store CSV: {e}")))
}
