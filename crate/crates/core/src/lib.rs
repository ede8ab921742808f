//! Natural-sample value computation for digital pulse-width modulators.
//!
//! Digital audio arrives as uniformly spaced samples, but a trailing-edge
//! PWM stage wants the values a natural-sampling modulator would have
//! used: the intersections of the continuous signal with the carrier ramp.
//! This crate computes those values two ways and verifies both:
//!
//! - [`stirling`]: same-rate conversion from 7-point central-difference
//!   stencils and a truncated series combiner;
//! - [`converter`]: the combined pipeline that upsamples (8x by default),
//!   interpolates and differentiates through polyphase FIR banks sampled
//!   from a Hamming-windowed sinc [`kernel`], then applies the same
//!   nonlinear combiner at the high rate;
//! - [`pwm`] and [`spectral`]: trailing-edge PWM synthesis, rendering,
//!   ideal low-pass demodulation and harmonic measurement;
//! - [`oracle`]: independent ground truth (root-finding natural sampler,
//!   series evaluation, dual-route interpolation checks).
//!
//! Streams and filter banks are immutable after construction; the block
//! pipelines are data-parallel via rayon when the `parallel` feature
//! (default) is enabled, with identical sequential fallbacks.

pub mod converter;
pub mod error;
pub mod kernel;
pub mod nonlinear;
pub mod oracle;
pub mod pwm;
pub mod spectral;
pub mod stirling;
pub mod stream;
pub mod wavio;

mod par;

pub use converter::{
    baseline_convert, build_bank, convert_block, convert_stream, convert_stream_seq,
    convert_stream_with_bank, upsample_direct, ConversionConfig,
};
pub use error::{Error, Result};
pub use kernel::{
    build_polyphase_bank, dump_bank, dump_bank_csv, full_rate_taps, parse_bank_dump, Kernel,
    KernelVariant, PolyphaseBank,
};
pub use nonlinear::{natural_sample, NatBlock};
pub use oracle::{
    natural_samples, natural_samples_seq, root_find_natural, series_from_derivatives,
    series_natural, dual_route_check, AnalyticSignal,
};
pub use pwm::{
    quantize_width, render_binary, render_for_analysis, uniform_pwm, uniform_pwm_clamped,
    PwmWaveform,
};
pub use spectral::{demodulate, harmonic_levels, spectrum, AnalysisWindow, SpectrumReport};
pub use stirling::{algorithm1_convert, stirling_derivatives, width_from_natural};
pub use stream::{Conversion, DcGainReport, Overmodulation, SampleStream};
