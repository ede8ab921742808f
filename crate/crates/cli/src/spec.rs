//! Experiment descriptions: everything that affects the output of a run.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{CliError, Result};

/// Where the modulating samples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    /// Synthetic sinusoid: frequency (Hz), amplitude, duration (s).
    Tone { freq: f64, amp: f64, duration: f64 },
    /// CSV (`index,value` or one value per line) or WAV (16/24-bit mono).
    File(PathBuf),
}

impl InputSource {
    /// Parse the `--tone f,amp,dur` descriptor.
    pub fn parse_tone(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(CliError::Spec(format!(
                "tone descriptor must be freq,amp,duration - got {text:?}"
            )));
        }
        let mut values = [0.0f64; 3];
        for (slot, part) in values.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| CliError::Spec(format!("bad tone field {part:?}")))?;
        }
        let [freq, amp, duration] = values;
        if freq <= 0.0 || duration <= 0.0 {
            return Err(CliError::Spec(
                "tone frequency and duration must be positive".into(),
            ));
        }
        if amp.is_nan() || amp.abs() >= 1.0 {
            return Err(CliError::Spec(format!(
                "tone amplitude must satisfy |a| < 1, got {amp}"
            )));
        }
        Ok(InputSource::Tone {
            freq,
            amp,
            duration,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            InputSource::Tone {
                freq,
                amp,
                duration,
            } => format!("tone {freq} Hz, amplitude {amp}, {duration} s"),
            InputSource::File(path) => path.display().to_string(),
        }
    }
}

/// Which conversion pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Polyphase interpolation/differentiation plus the nonlinear stage.
    #[default]
    Combined,
    /// Zero-insertion upsampling + full-rate filter, then the same-rate
    /// stencil conversion at the output rate.
    Baseline,
    /// Same-rate stencil conversion only (no upsampling).
    Algorithm1,
}

impl std::str::FromStr for Algorithm {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combined" => Ok(Algorithm::Combined),
            "baseline" => Ok(Algorithm::Baseline),
            "algorithm1" => Ok(Algorithm::Algorithm1),
            other => Err(CliError::Spec(format!(
                "unknown algorithm {other:?} (expected combined|baseline|algorithm1)"
            ))),
        }
    }
}

/// Kernel window selection exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    #[default]
    Standard,
    Wide,
}

impl std::str::FromStr for KernelChoice {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(KernelChoice::Standard),
            "wide" => Ok(KernelChoice::Wide),
            other => Err(CliError::Spec(format!(
                "unknown kernel {other:?} (expected standard|wide)"
            ))),
        }
    }
}

impl From<KernelChoice> for natsamp::KernelVariant {
    fn from(choice: KernelChoice) -> Self {
        match choice {
            KernelChoice::Standard => natsamp::KernelVariant::Standard,
            KernelChoice::Wide => natsamp::KernelVariant::Wide,
        }
    }
}

/// A conversion run (`convert` and `render` subcommands).
#[derive(Debug, Clone)]
pub struct ConvertSpec {
    pub input: InputSource,
    /// Input rate for tones and CSV files; WAV files carry their own.
    pub f1: f64,
    pub upsampling: usize,
    pub terms: u8,
    pub algorithm: Algorithm,
    pub kernel: KernelChoice,
    pub normalize_dc: bool,
    pub out_dir: PathBuf,
}

/// The harmonic-decay sweep (`sweep` subcommand).
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub convert: ConvertSpec,
    /// Depths to sweep, normally 1,2,3,4.
    pub k_list: Vec<u8>,
    /// Demodulator cutoff (Hz).
    pub cutoff: f64,
    /// Render grid density per carrier period.
    pub oversample: usize,
    /// Downcounter resolution; None renders continuous edges.
    pub bits: Option<u8>,
}

/// PWM rendering export (`render` subcommand).
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub convert: ConvertSpec,
    pub oversample: usize,
    pub bits: Option<u8>,
    pub format: RenderFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    #[default]
    Wav,
    Csv,
}

impl std::str::FromStr for RenderFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wav" => Ok(RenderFormat::Wav),
            "csv" => Ok(RenderFormat::Csv),
            other => Err(CliError::Spec(format!(
                "unknown render format {other:?} (expected wav|csv)"
            ))),
        }
    }
}

/// Coefficient dump (`bank` subcommand).
#[derive(Debug, Clone)]
pub struct BankSpec {
    pub f1: f64,
    pub upsampling: usize,
    pub half_window: usize,
    pub kernel: KernelChoice,
    pub normalize_dc: bool,
    pub csv: bool,
    /// None dumps to stdout.
    pub out_file: Option<PathBuf>,
}
