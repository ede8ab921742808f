//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample rate must be positive and finite, got {0}")]
    InvalidRate(f64),

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("sample {index} violates the amplitude contract |x| < 1: {value}")]
    AmplitudeOutOfRange { index: usize, value: f64 },

    #[error("input stream is empty")]
    EmptyInput,

    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    DerivativeOrder { requested: usize, max: usize },

    #[error("evaluation instant must be finite")]
    NonFiniteTime,

    #[error("kernel input period must be positive and finite, got {0}")]
    InvalidPeriod(f64),

    #[error("upsampling factor must be at least 2, got {0}")]
    InvalidUpsampling(usize),

    #[error("half-window must be at least 1, got {0}")]
    InvalidHalfWindow(usize),

    #[error("truncation depth must be in 1..=4, got {0}")]
    InvalidTerms(u8),

    #[error("window must hold exactly {expected} samples, got {got}")]
    WindowLength { expected: usize, got: usize },

    #[error("filter bank was built for input period {expected} s but the stream has period {got} s")]
    RateMismatch { expected: f64, got: f64 },

    #[error("filter bank holds derivative orders up to {available} but a depth of {requested} terms needs order {}", .requested - 1)]
    BankOrder { requested: u8, available: usize },

    #[error("natural value {value} lies outside [-1, 1]{}", .index.map(|i| format!(" at sample {i}")).unwrap_or_default())]
    WidthOutOfRange { value: f64, index: Option<usize> },

    #[error("downcounter resolution must be in 4..=16 bits, got {0}")]
    InvalidBits(u8),

    #[error("oversample {oversample} cannot place {bits}-bit pulse edges on the render grid; it must be a multiple of 2^{bits}")]
    OversampleMismatch { oversample: usize, bits: u8 },

    #[error("oversample must be at least 2, got {0}")]
    InvalidOversample(usize),

    #[error("cutoff {cutoff} Hz must lie in (0, {nyquist} Hz)")]
    InvalidCutoff { cutoff: f64, nyquist: f64 },

    #[error("harmonic {order} at {frequency} Hz is at or above the Nyquist frequency {nyquist} Hz")]
    HarmonicOutOfBand { order: u32, frequency: f64, nyquist: f64 },

    #[error("no ramp crossing found in carrier period {period}")]
    NoCrossing { period: u64 },

    #[error("{crossings} ramp crossings in carrier period {period}; natural sampling requires a unique crossing (carrier too slow for the signal)")]
    MultipleCrossings { period: u64, crossings: usize },

    #[error("series supports at most {max} terms, got {requested}")]
    SeriesTerms { requested: usize, max: usize },

    #[error("signal amplitudes sum to {0}; the amplitude contract requires a total below 1")]
    SignalTooLoud(f64),

    #[error("offset {tau} s lies outside the window span of +/-{span} s")]
    OffsetOutOfRange { tau: f64, span: f64 },

    #[error("coefficient dump line {line}: {reason}")]
    DumpParse { line: usize, reason: String },

    #[error("malformed WAV data: {0}")]
    WavFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
