//! Text exports and imports: ranking CSV, relevance vectors, TF dumps.

use std::io::Write;
use std::path::Path;

use super::{read_bytes, write_bytes};
use crate::featsel::FeatureRanking;
use crate::tfr::TimeFrequencyMatrix;
use crate::{Error, Result};

/// Columns `feature_index, score, rank, method`; `rank` is 1-based and
/// empty for features the method did not retain.
pub fn write_ranking_csv<W: Write>(out: W, ranking: &FeatureRanking) -> Result<()> {
    let fmt = |e: csv::Error| Error::Format(format!("ranking CSV: {e}"));
    let mut rank = vec![None; ranking.scores.len()];
    for (pos, &i) in ranking.order.iter().enumerate() {
        rank[i] = Some(pos + 1);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["feature_index", "score", "rank", "method"])
        .map_err(fmt)?;
    for (i, s) in ranking.scores.iter().enumerate() {
        w.write_record([
            i.to_string(),
            s.to_string(),
            rank[i].map_or(String::new(), |r| r.to_string()),
            ranking.method.name().to_string(),
        ])
        .map_err(fmt)?;
    }
    w.flush().map_err(|e| Error::Format(format!("ranking CSV: {e}")))
}

/// Relevance vector as decimal numbers separated by whitespace or commas.
/// Lines starting with `#` are comments.
pub fn parse_relevance(text: &str, expected: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(expected);
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if out.len() == expected {
                return Err(Error::Format(format!("more than {expected} relevance values")));
            }
            let v: f64 = tok.parse().map_err(|_| {
                Error::Format(format!("line {}: {tok:?} is not a number", line_no + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::Format(format!("line {}: non-finite value", line_no + 1)));
            }
            out.push(v);
        }
    }
    if out.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} relevance values, found {}",
            out.len()
        )));
    }
    Ok(out)
}

pub fn read_relevance(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let text = String::from_utf8(read_bytes(path)?)
        .map_err(|_| Error::Format(format!("{} is not UTF-8", path.display())))?;
    parse_relevance(&text, expected)
}

/// Row-major little-endian `f64` values.
pub fn encode_tf(tf: &TimeFrequencyMatrix) -> Vec<u8> {
    tf.values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn write_tf_dump(path: &Path, tf: &TimeFrequencyMatrix) -> Result<()> {
    write_bytes(path, &encode_tf(tf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relevance_parsing() {
        assert_eq!(parse_relevance("# w\n0.5, 1\n0\n", 3).unwrap(), vec![0.5, 1.0, 0.0]);
        assert!(parse_relevance("0.5 1", 3).is_err());
        assert!(parse_relevance("0.5 1 2 3", 3).is_err());
        assert!(parse_relevance("0.5 x 2", 3).is_err());
        assert!(parse_relevance("NaN 1 2", 3).is_err());
    }
}
