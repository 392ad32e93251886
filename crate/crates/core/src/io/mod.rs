//! File formats. Every decoder accepts arbitrary bytes and reports
//! malformed input as an error rather than panicking.

mod iq;
mod store;
mod text;

pub use iq::{decode_iq, encode_iq, iq_paths, read_iq, write_iq, IqSidecar};
pub use store::{decode_store, encode_store, read_store, write_store, write_store_csv, STORE_MAGIC, STORE_VERSION};
pub use text::{encode_tf, parse_relevance, read_relevance, write_ranking_csv, write_tf_dump};

use std::path::Path;

use crate::{Error, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
