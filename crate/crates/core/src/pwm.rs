//! Trailing-edge PWM synthesis: width mapping, downcounter quantization,
//! and rendering to sampled signals for spectral analysis.
//!
//! Pulses are trailing-edge: the leading edge of pulse `k` sits at exactly
//! `kT` and the normalized width `w_k` in [0, 1] places the falling edge.
//! Rendered levels are +1 during the pulse and -1 otherwise, so a 50% duty
//! cycle renders with zero mean and the demodulated baseband compares
//! directly against the modulating signal.

use crate::error::{Error, Result};
use crate::stream::SampleStream;

/// A trailing-edge PWM pulse train: one normalized width per carrier
/// period.
#[derive(Debug, Clone, PartialEq)]
pub struct PwmWaveform {
    carrier_period: f64,
    widths: Vec<f64>,
    bits: Option<u8>,
}

impl PwmWaveform {
    pub fn carrier_period(&self) -> f64 {
        self.carrier_period
    }

    pub fn carrier_frequency(&self) -> f64 {
        1.0 / self.carrier_period
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    /// Downcounter resolution when the widths have been quantized.
    pub fn bits(&self) -> Option<u8> {
        self.bits
    }

    /// Snap every width onto the downcounter tick grid: a B-bit counter
    /// loads `round(w (2^B - 1))` and counts down at `2^B f_c`, so the
    /// realized width is that many ticks of `T / 2^B`. Full width T is
    /// only approached asymptotically.
    pub fn quantize(&self, bits: u8) -> Result<PwmWaveform> {
        let ticks = 2f64.powi(bits as i32);
        let widths = self
            .widths
            .iter()
            .map(|&w| Ok(quantize_width(w, bits)? as f64 / ticks))
            .collect::<Result<Vec<_>>>()?;
        Ok(PwmWaveform {
            carrier_period: self.carrier_period,
            widths,
            bits: Some(bits),
        })
    }
}

/// Uniform-sampling PWM: the k-th sample value sets the k-th pulse width
/// through `w = (1 + x) / 2`. Feeding computed natural-sample values makes
/// the same mapping synthesize computed-natural PWM. Values exactly at
/// full scale are allowed and map to empty/full pulses.
pub fn uniform_pwm(stream: &SampleStream) -> Result<PwmWaveform> {
    let widths = stream
        .samples()
        .iter()
        .enumerate()
        .map(|(index, &x)| {
            if x.abs() > 1.0 {
                Err(Error::WidthOutOfRange {
                    value: x,
                    index: Some(index),
                })
            } else {
                Ok((1.0 + x) / 2.0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PwmWaveform {
        carrier_period: stream.period(),
        widths,
        bits: None,
    })
}

/// Clamp overmodulated values to full scale before the width mapping and
/// report how many samples were touched. Conversion never clips; this is
/// the one place clipping is allowed.
pub fn uniform_pwm_clamped(stream: &SampleStream) -> Result<(PwmWaveform, usize)> {
    let mut clamped = 0usize;
    let widths = stream
        .samples()
        .iter()
        .map(|&x| {
            if x.abs() > 1.0 {
                clamped += 1;
            }
            (1.0 + x.clamp(-1.0, 1.0)) / 2.0
        })
        .collect();
    Ok((
        PwmWaveform {
            carrier_period: stream.period(),
            widths,
            bits: None,
        },
        clamped,
    ))
}

/// Downcounter load value for a normalized width: `round(w (2^B - 1))`
/// with ties to even, the unsigned full-scale mapping.
pub fn quantize_width(width: f64, bits: u8) -> Result<u32> {
    if !(4..=16).contains(&bits) {
        return Err(Error::InvalidBits(bits));
    }
    if !width.is_finite() || !(0.0..=1.0).contains(&width) {
        return Err(Error::WidthOutOfRange {
            value: width,
            index: None,
        });
    }
    let full_scale = (1u32 << bits) - 1;
    Ok((width * full_scale as f64).round_ties_even() as u32)
}

fn check_oversample(waveform: &PwmWaveform, oversample: usize) -> Result<()> {
    if oversample < 2 {
        return Err(Error::InvalidOversample(oversample));
    }
    if let Some(bits) = waveform.bits {
        let ticks = 1usize << bits;
        if !oversample.is_multiple_of(ticks) {
            return Err(Error::OversampleMismatch { oversample, bits });
        }
    }
    Ok(())
}

/// Render as a strictly two-level signal at `oversample` samples per
/// carrier period: the first `round(w * oversample)` samples of each
/// period are +1, the rest -1. Quantized waveforms place every edge on the
/// grid exactly (hence the divisibility requirement on `oversample`);
/// arbitrary widths are rounded to the nearest grid point.
pub fn render_binary(waveform: &PwmWaveform, oversample: usize) -> Result<SampleStream> {
    check_oversample(waveform, oversample)?;
    let mut out = vec![-1.0; waveform.len() * oversample];
    render_periods(&mut out, waveform, oversample, false);
    SampleStream::from_raw(oversample as f64 / waveform.carrier_period, out)
}

/// Render for spectral analysis: identical to [`render_binary`] except
/// that the one sample containing the falling edge takes the value
/// `2 frac - 1`, preserving the pulse area exactly. This removes the
/// edge-rounding noise floor that would otherwise mask harmonic levels far
/// below full scale; in-band content matches the ideal continuous-edge
/// waveform to within the (negligible) one-sample-boxcar droop.
pub fn render_for_analysis(waveform: &PwmWaveform, oversample: usize) -> Result<SampleStream> {
    check_oversample(waveform, oversample)?;
    let mut out = vec![-1.0; waveform.len() * oversample];
    render_periods(&mut out, waveform, oversample, true);
    SampleStream::from_raw(oversample as f64 / waveform.carrier_period, out)
}

fn render_periods(out: &mut [f64], waveform: &PwmWaveform, oversample: usize, area_exact: bool) {
    let widths = waveform.widths();
    crate::par::for_each_chunk(out, oversample, |start, period| {
        let w = widths[start / oversample].clamp(0.0, 1.0);
        let exact = w * oversample as f64;
        if area_exact {
            let full = exact.floor() as usize;
            let frac = exact - full as f64;
            for slot in period.iter_mut().take(full.min(oversample)) {
                *slot = 1.0;
            }
            if full < oversample && frac > 0.0 {
                period[full] = 2.0 * frac - 1.0;
            }
        } else {
            let high = (exact.round() as usize).min(oversample);
            for slot in period.iter_mut().take(high) {
                *slot = 1.0;
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn stream_of(values: Vec<f64>) -> SampleStream {
        SampleStream::from_raw(352_800.0, values).unwrap()
    }

    #[test]
    fn width_mapping_is_affine() {
        let pwm = uniform_pwm(&stream_of(vec![0.0, 0.5, -0.5, -1.0, 1.0])).unwrap();
        assert_eq!(pwm.widths(), &[0.5, 0.75, 0.25, 0.0, 1.0]);
    }

    #[test]
    fn width_mapping_rejects_overmodulation_with_index() {
        let err = uniform_pwm(&stream_of(vec![0.0, 1.2])).unwrap_err();
        assert!(matches!(
            err,
            Error::WidthOutOfRange { index: Some(1), .. }
        ));
    }

    #[test]
    fn clamped_mapping_counts_touched_samples() {
        let (pwm, clamped) = uniform_pwm_clamped(&stream_of(vec![0.0, 1.2, -1.4])).unwrap();
        assert_eq!(clamped, 2);
        assert_eq!(pwm.widths(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn quantizer_endpoints_and_tie() {
        assert_eq!(quantize_width(0.0, 8).unwrap(), 0);
        assert_eq!(quantize_width(1.0, 8).unwrap(), 255);
        // 0.5 * 255 = 127.5 -> ties-to-even picks 128.
        assert_eq!(quantize_width(0.5, 8).unwrap(), 128);
        assert!(quantize_width(0.5, 3).is_err());
        assert!(quantize_width(1.1, 8).is_err());
    }

    #[test]
    fn quantizer_is_monotone_with_bounded_error() {
        let bits = 8u8;
        let mut prev = 0u32;
        let mut worst_code = 0.0f64;
        let mut worst_tick = 0.0f64;
        for i in 0..=10_000 {
            let w = i as f64 / 10_000.0;
            let q = quantize_width(w, bits).unwrap();
            assert!(q >= prev, "non-monotone at {w}");
            prev = q;
            worst_code = worst_code.max((q as f64 / 255.0 - w).abs());
            worst_tick = worst_tick.max((q as f64 / 256.0 - w).abs());
        }
        // Half a code step in the 2^B - 1 mapping.
        let code_bound = (1.0 / 256.0) / 2.0 * (1.0 + 1.0 / 255.0);
        assert!(worst_code <= code_bound + 1e-15, "code error {worst_code}");
        // Realized tick widths additionally carry the full-scale skew of
        // counting T/2^B ticks (width T is unreachable).
        assert!(worst_tick <= code_bound + 1.0 / 256.0 + 1e-15);
    }

    #[test]
    fn binary_render_patterns() {
        let pwm = uniform_pwm(&stream_of(vec![0.0, 0.0])).unwrap();
        let rendered = render_binary(&pwm, 8).unwrap();
        let expected = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
        assert_eq!(&rendered.samples()[..8], &expected);
        assert_eq!(&rendered.samples()[8..], &expected);

        let empty = uniform_pwm(&stream_of(vec![-1.0])).unwrap();
        let rendered = render_binary(&empty, 8).unwrap();
        assert!(rendered.samples().iter().all(|&v| v == -1.0));
    }

    #[test]
    fn render_rate_is_oversampled_carrier() {
        let pwm = uniform_pwm(&stream_of(vec![0.0; 4])).unwrap();
        let rendered = render_binary(&pwm, 16).unwrap();
        assert_eq!(rendered.rate(), 16.0 * 352_800.0);
        assert_eq!(rendered.len(), 64);
    }

    #[test]
    fn quantized_edges_land_on_the_grid_exactly() {
        let mut rng = StdRng::seed_from_u64(11);
        let values: Vec<f64> = (0..100).map(|_| rng.random::<f64>() * 1.8 - 0.9).collect();
        let pwm = uniform_pwm(&stream_of(values)).unwrap().quantize(8).unwrap();
        let rendered = render_binary(&pwm, 256).unwrap();
        // Duty/DC identity is exact when every edge is on the grid.
        let mean_rendered: f64 =
            rendered.samples().iter().sum::<f64>() / rendered.len() as f64;
        let mean_widths: f64 =
            pwm.widths().iter().map(|w| 2.0 * w - 1.0).sum::<f64>() / pwm.len() as f64;
        assert!((mean_rendered - mean_widths).abs() < 1e-12);
        // Oversample must be a multiple of 2^B.
        assert!(matches!(
            render_binary(&pwm, 300),
            Err(Error::OversampleMismatch { .. })
        ));
    }

    #[test]
    fn analysis_render_preserves_area_for_arbitrary_widths() {
        let mut rng = StdRng::seed_from_u64(12);
        let values: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 1.9 - 0.95).collect();
        let pwm = uniform_pwm(&stream_of(values)).unwrap();
        let rendered = render_for_analysis(&pwm, 32).unwrap();
        let mean_rendered: f64 =
            rendered.samples().iter().sum::<f64>() / rendered.len() as f64;
        let mean_widths: f64 =
            pwm.widths().iter().map(|w| 2.0 * w - 1.0).sum::<f64>() / pwm.len() as f64;
        assert!((mean_rendered - mean_widths).abs() < 1e-12);
    }

    #[test]
    fn quantized_constant_demodulates_to_itself_within_resolution() {
        // Downcounter model end to end: constant input, B-bit widths,
        // rendered and brick-wall demodulated back to the constant.
        let c = 0.37;
        let pwm = uniform_pwm(&stream_of(vec![c; 64]))
            .unwrap()
            .quantize(10)
            .unwrap();
        let rendered = render_binary(&pwm, 1024).unwrap();
        let demod = crate::spectral::demodulate(&rendered, 20_000.0).unwrap();
        let resolution = 2.0 / 1024.0;
        for &v in demod.samples() {
            assert!((v - c).abs() <= resolution, "{v}");
        }
    }
}
