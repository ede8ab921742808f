//! Rate-tagged sample sequences and conversion results.

use crate::error::{Error, Result};

/// A finite sequence of real samples together with its sample rate.
///
/// Streams built with [`SampleStream::new`] enforce the modulator amplitude
/// contract `|x| < 1`; use [`SampleStream::from_raw`] for synthesized or
/// analysis signals (rendered PWM, demodulator output, converter output)
/// that legitimately reach or exceed full scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    rate: f64,
    samples: Vec<f64>,
}

impl SampleStream {
    /// Ingest samples under the amplitude contract. Violations are reported
    /// with the index of the first offending sample.
    pub fn new(rate: f64, samples: Vec<f64>) -> Result<Self> {
        let stream = Self::from_raw(rate, samples)?;
        for (index, &value) in stream.samples.iter().enumerate() {
            if value.abs() >= 1.0 {
                return Err(Error::AmplitudeOutOfRange { index, value });
            }
        }
        Ok(stream)
    }

    /// Wrap samples without the amplitude check. Finiteness and a valid
    /// rate are still required.
    pub fn from_raw(rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidRate(rate));
        }
        for (index, &value) in samples.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
        }
        Ok(Self { rate, samples })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Sample period in seconds.
    pub fn period(&self) -> f64 {
        1.0 / self.rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }
}

/// Where the converted natural values left [-1, 1].
///
/// Overmodulation is reported, never silently clipped; clamping happens
/// only at the PWM stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overmodulation {
    /// Number of output samples with |value| > 1.
    pub count: usize,
    /// Index of the first overmodulated output sample.
    pub first_index: Option<usize>,
    /// Largest |value| seen on the output.
    pub peak: f64,
}

impl Overmodulation {
    pub(crate) fn scan(samples: &[f64]) -> Self {
        let mut report = Overmodulation::default();
        for (index, &value) in samples.iter().enumerate() {
            let mag = value.abs();
            if mag > report.peak {
                report.peak = mag;
            }
            if mag > 1.0 {
                report.count += 1;
                if report.first_index.is_none() {
                    report.first_index = Some(index);
                }
            }
        }
        report
    }
}

/// DC gain of the interpolation stage, per polyphase branch.
#[derive(Debug, Clone, PartialEq)]
pub struct DcGainReport {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Conversion output plus the diagnostics that are surfaced rather than
/// hidden.
#[derive(Debug, Clone)]
pub struct Conversion {
    pub output: SampleStream,
    pub overmodulation: Overmodulation,
    /// Present for pipelines that run the interpolation bank.
    pub dc_gain: Option<DcGainReport>,
}
