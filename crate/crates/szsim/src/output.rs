use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::Result;
use crate::record::{Metadata, RunRecord, RunResult};

/// Renders the record body. CSV carries no timing except for the scaling
/// benchmark, whose payload is timing.
pub fn render(record: &RunRecord, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(record).map_err(std::io::Error::from)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        OutputFormat::Csv => render_csv(&record.result),
    }
}

fn render_csv(result: &RunResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| std::io::Error::other(e);
    match result {
        RunResult::Distributions { nodes, steps } => {
            w.write_record(["step", "node", "probability"]).map_err(csv_err)?;
            for d in steps {
                for (node, p) in nodes.iter().zip(&d.probabilities) {
                    w.write_record([d.step.to_string(), node.to_string(), p.to_string()])
                        .map_err(csv_err)?;
                }
            }
        }
        RunResult::MarkedProbability { probability, .. } => {
            w.write_record(["step", "probability"]).map_err(csv_err)?;
            for (t, p) in probability.iter().enumerate() {
                w.write_record([t.to_string(), p.to_string()]).map_err(csv_err)?;
            }
        }
        RunResult::Scaling { sizes, seconds, .. } => {
            w.write_record(["size", "seconds"]).map_err(csv_err)?;
            for (n, s) in sizes.iter().zip(seconds) {
                w.write_record([n.to_string(), s.to_string()]).map_err(csv_err)?;
            }
        }
    }
    w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
}

/// `results.csv` -> `results.csv.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    #[serde(flatten)]
    metadata: &'a Metadata,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max_predicted: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_local_max: Option<usize>,
}

/// Writes the record to `out` plus a JSON sidecar with the full
/// configuration, each through a temp file and rename. Without `out` the
/// body goes to stdout and no sidecar is written.
pub fn write_record(record: &RunRecord, out: Option<&Path>, format: OutputFormat) -> Result<()> {
    let body = render(record, format)?;
    let Some(out) = out else {
        std::io::stdout().lock().write_all(&body)?;
        return Ok(());
    };
    let (mut slope, mut t_max_predicted, mut first_local_max) = (None, None, None);
    match &record.result {
        RunResult::Scaling { slope: s, .. } => slope = *s,
        RunResult::MarkedProbability {
            t_max_predicted: p,
            first_local_max: f,
            ..
        } => {
            t_max_predicted = *p;
            first_local_max = *f;
        }
        RunResult::Distributions { .. } => {}
    }
    let sidecar = Sidecar {
        metadata: &record.metadata,
        slope,
        t_max_predicted,
        first_local_max,
    };
    let mut meta = serde_json::to_vec_pretty(&sidecar).map_err(std::io::Error::from)?;
    meta.push(b'\n');
    write_atomic(out, &body)?;
    write_atomic(&sidecar_path(out), &meta)?;
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
