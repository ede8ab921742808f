//! File ingestion, deterministic output writing, and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use natsamp::{wavio, AnalyticSignal, SampleStream};
use serde::Serialize;

use crate::error::{io_err, CliError, Result};
use crate::spec::InputSource;

/// Resolve an input source into a sample stream. Tones are sampled under
/// the half-sample convention; CSV and WAV files are validated against the
/// amplitude contract with sample indices in the error.
pub fn resolve_input(source: &InputSource, f1: f64) -> Result<SampleStream> {
    match source {
        InputSource::Tone {
            freq,
            amp,
            duration,
        } => {
            let len = (duration * f1).round() as usize;
            if len == 0 {
                return Err(CliError::Spec(format!(
                    "tone duration {duration} s yields no samples at {f1} Hz"
                )));
            }
            let signal = AnalyticSignal::tone(*freq, *amp)?;
            Ok(signal.sample(f1, len)?)
        }
        InputSource::File(path) => read_input_file(path, f1),
    }
}

fn read_input_file(path: &Path, f1: f64) -> Result<SampleStream> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase();
    match ext.as_str() {
        "wav" => {
            let file = fs::File::open(path).map_err(io_err(path.display().to_string()))?;
            let (rate, samples) = wavio::read_wav_mono(file).map_err(|e| CliError::InputFile {
                path: path.to_path_buf(),
                line: None,
                reason: e.to_string(),
            })?;
            if samples.is_empty() {
                return Err(CliError::InputFile {
                    path: path.to_path_buf(),
                    line: None,
                    reason: "no samples".into(),
                });
            }
            Ok(SampleStream::new(rate as f64, samples)?)
        }
        _ => read_csv_stream(path, f1),
    }
}

/// CSV ingestion: one value per line or `index,value`; a non-numeric first
/// line is treated as a header. Errors carry line numbers.
fn read_csv_stream(path: &Path, f1: f64) -> Result<SampleStream> {
    let text = fs::read_to_string(path).map_err(io_err(path.display().to_string()))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value_field = trimmed.rsplit(',').next().unwrap_or(trimmed).trim();
        match value_field.parse::<f64>() {
            Ok(v) => samples.push(v),
            Err(_) if lineno == 0 => continue, // header row
            Err(_) => {
                return Err(CliError::InputFile {
                    path: path.to_path_buf(),
                    line: Some(lineno + 1),
                    reason: format!("cannot parse {value_field:?} as a sample"),
                })
            }
        }
    }
    if samples.is_empty() {
        return Err(CliError::InputFile {
            path: path.to_path_buf(),
            line: None,
            reason: "no samples".into(),
        });
    }
    Ok(SampleStream::new(f1, samples)?)
}

/// One output artifact staged for writing.
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl OutputFile {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            bytes,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub file: String,
    pub bytes: usize,
    pub crc32: String,
}

/// Write every staged file atomically (temp file + rename) and return the
/// checksum records for the manifest. Nothing is written until all
/// contents exist, so failed runs leave no partial outputs.
pub fn commit_outputs(out_dir: &Path, files: &[OutputFile]) -> Result<Vec<FileRecord>> {
    fs::create_dir_all(out_dir).map_err(io_err(format!("create {}", out_dir.display())))?;
    let mut records = Vec::with_capacity(files.len());
    for file in files {
        let path = out_dir.join(&file.name);
        write_atomic(&path, &file.bytes)?;
        records.push(FileRecord {
            file: file.name.clone(),
            bytes: file.bytes.len(),
            crc32: format!("{:08x}", crc32fast::hash(&file.bytes)),
        });
    }
    Ok(records)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp: PathBuf = path.with_extension("tmp-partial");
    fs::write(&tmp, bytes).map_err(io_err(format!("write {}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(io_err(format!("rename to {}", path.display())))?;
    Ok(())
}

/// Run manifest: every parameter affecting the output, the library
/// version, and checksums of the data files. The timestamp is the only
/// nondeterministic field and is excluded from all checksums.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub created_unix: u64,
    pub parameters: serde_json::Value,
    pub outputs: Vec<FileRecord>,
}

impl Manifest {
    pub fn new(command: &str, parameters: serde_json::Value, outputs: Vec<FileRecord>) -> Self {
        Self {
            tool: "natsamp",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            parameters,
            outputs,
        }
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&out_dir.join("manifest.json"), json.as_bytes())
    }
}

/// Converted stream as `index,value` rows with full round-trip precision.
pub fn stream_to_csv(stream: &SampleStream) -> String {
    let mut out = String::with_capacity(stream.len() * 28 + 16);
    out.push_str("index,value\n");
    for (i, v) in stream.samples().iter().enumerate() {
        out.push_str(&format!("{i},{v:.16e}\n"));
    }
    out
}

/// Rendered signal as `time_s,value` rows.
pub fn rendered_to_csv(stream: &SampleStream) -> String {
    let mut out = String::with_capacity(stream.len() * 28 + 16);
    out.push_str("time_s,value\n");
    let period = stream.period();
    for (i, v) in stream.samples().iter().enumerate() {
        out.push_str(&format!("{:.12e},{v}\n", i as f64 * period));
    }
    out
}
