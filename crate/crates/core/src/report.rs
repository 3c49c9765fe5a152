//! CSV and canonical JSON emission. Keys in JSON objects are sorted; CSV uses
//! LF line endings and `.` decimals. Both embed the config hash and seed.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::montecarlo::SuccessRateReport;

pub const REPORT_CSV_HEADER: [&str; 7] = ["campaign", "cell_key", "n", "k", "rate", "ci_lo", "ci_hi"];

/// Canonical pretty JSON: sorted keys, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's default map is ordered by key
    let v: Value = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn provenance(config_sha256: &str, seed: u64) -> String {
    format!("# config_sha256={config_sha256}\n# seed={seed}\n")
}

/// Write `rows` under `header` with the provenance comment lines on top.
pub fn csv_with_provenance(
    config_sha256: &str,
    seed: u64,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let body = w.into_inner().map_err(|e| e.into_error())?;
    let mut out = provenance(config_sha256, seed);
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn report_csv(report: &SuccessRateReport) -> Result<String, csv::Error> {
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                report.campaign_id.clone(),
                c.key.clone(),
                c.n.to_string(),
                c.k.to_string(),
                fmt_f64(c.rate),
                fmt_f64(c.ci_lo),
                fmt_f64(c.ci_hi),
            ]
        })
        .collect();
    csv_with_provenance(&report.config_sha256, report.seed, &REPORT_CSV_HEADER, &rows)
}

pub fn min_closure_csv(report: &SuccessRateReport) -> Result<String, csv::Error> {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let rows: Vec<Vec<String>> = report
        .min_closures
        .iter()
        .map(|r| {
            vec![
                r.condition.clone(),
                fmt_f64(r.finger_separation_mm),
                opt(r.hybrid_mm),
                opt(r.rigid_mm),
                opt(r.ratio),
            ]
        })
        .collect();
    csv_with_provenance(
        &report.config_sha256,
        report.seed,
        &["condition", "finger_separation_mm", "hybrid_min_closure_mm", "rigid_min_closure_mm", "ratio"],
        &rows,
    )
}

/// Write `contents` to `dir/name`, creating `dir` if needed.
pub fn write_artifact(dir: &Path, name: &str, contents: &str) -> std::io::Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path)?;
    f.write_all(contents.as_bytes())?;
    Ok(path)
}
