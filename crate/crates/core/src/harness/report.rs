//! Report files: a flat CSV of every outcome, the full JSON, and one
//! plot-data CSV per (trial, SNR, method).

use std::path::{Path, PathBuf};

use super::VerificationReport;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plots: Vec<PathBuf>,
}

const HEADER: [&str; 12] = [
    "trial_id",
    "snr_db",
    "method",
    "claimed_id",
    "n_r",
    "kind",
    "radio_id",
    "accepted",
    "total",
    "rate",
    "complement",
    "eliminated",
];

/// One row per scenario: the claimed radio itself (`tvr`), each other
/// authorized radio (`others_fvr`) and each rogue (`rogue_fvr`).
pub fn report_rows(report: &VerificationReport) -> Vec<[String; 12]> {
    let mut rows = Vec::new();
    for c in &report.claims {
        let row = |kind: &str, radio: &str, accepted: usize, total: usize, rate: f64, comp: f64| {
            [
                report.trial_id.to_string(),
                report.snr_db.to_string(),
                report.method.to_string(),
                c.claimed_id.clone(),
                c.n_r.to_string(),
                kind.to_string(),
                radio.to_string(),
                accepted.to_string(),
                total.to_string(),
                rate.to_string(),
                comp.to_string(),
                report.eliminated.to_string(),
            ]
        };
        rows.push(row("tvr", &c.claimed_id, c.accepted, c.accepted + c.rejected, c.tvr, c.frr));
        for o in &c.others {
            rows.push(row("others_fvr", &o.radio_id, o.accepted, o.total(), o.fvr, o.trr));
        }
        for a in &c.attacks {
            rows.push(row("rogue_fvr", &a.radio_id, a.accepted, a.total(), a.fvr, a.trr));
        }
    }
    rows
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Format(format!("{}: {e}", path.display()))
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `results.csv`, `results.json` and `plots/*.csv` under `dir`.
pub fn emit_report(reports: &[VerificationReport], dir: &Path) -> Result<ReportFiles> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no reports to emit".into()));
    }
    let plot_dir = dir.join("plots");
    std::fs::create_dir_all(&plot_dir).map_err(|e| Error::io(&plot_dir, e))?;

    let csv_path = dir.join("results.csv");
    write_csv(&csv_path, &HEADER, reports.iter().flat_map(report_rows))?;

    let json_path = dir.join("results.json");
    let text = serde_json::to_string_pretty(reports)
        .map_err(|e| Error::Format(format!("report JSON: {e}")))?;
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;

    let mut plots = Vec::new();
    for r in reports {
        let path = plot_dir.join(format!("trial{}_snr{}_{}.csv", r.trial_id, r.snr_db, r.method));
        let rows = r.claims.iter().flat_map(|c| {
            let label = format!("{} ({})", c.claimed_id, c.n_r);
            let mut v = vec![[label.clone(), "tvr".to_string(), c.claimed_id.clone(), c.tvr.to_string()]];
            v.extend(c.others.iter().map(|o| [label.clone(), "others_fvr".into(), o.radio_id.clone(), o.fvr.to_string()]));
            v.extend(c.attacks.iter().map(|a| [label.clone(), "rogue_fvr".into(), a.radio_id.clone(), a.fvr.to_string()]));
            v
        });
        write_csv(&path, &["group", "series", "radio_id", "value"], rows)?;
        plots.push(path);
    }
    Ok(ReportFiles {
        csv: csv_path,
        json: json_path,
        plots,
    })
}

pub fn read_report_json(path: &Path) -> Result<Vec<VerificationReport>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}
