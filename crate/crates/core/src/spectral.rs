//! Magnitude spectra, ideal low-pass demodulation, and harmonic-level
//! extraction for the distortion experiments.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::stream::SampleStream;

/// Analysis window applied before the transform. Coherently placed tones
/// need no window; Blackman-Harris covers everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnalysisWindow {
    #[default]
    Rect,
    BlackmanHarris,
}

/// One extracted harmonic line.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    pub frequency: f64,
    /// dB relative to the fundamental.
    pub level_db: f64,
}

/// One-sided magnitude spectrum with the fundamental as 0 dB reference.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub sample_rate: f64,
    pub bin_hz: f64,
    /// Amplitude-normalized linear magnitudes, bins 0..=N/2: a coherent
    /// tone of amplitude A reads A at its bin.
    pub magnitude: Vec<f64>,
    /// Strongest non-DC bin.
    pub fundamental_bin: usize,
    pub fundamental_hz: f64,
    pub fundamental_level: f64,
    /// Filled by [`SpectrumReport::analyze_harmonics`].
    pub harmonics: Vec<Harmonic>,
    /// Harmonic-to-fundamental energy ratio over the analyzed orders.
    pub thd: Option<f64>,
    signal_energy: f64,
    raw_power: f64,
}

fn fft_forward(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Deterministic discrete Fourier magnitude spectrum.
pub fn spectrum(signal: &SampleStream, window: AnalysisWindow) -> Result<SpectrumReport> {
    if signal.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = signal.len();
    let samples = signal.samples();

    let (windowed, norm): (Vec<f64>, f64) = match window {
        AnalysisWindow::Rect => (samples.to_vec(), n as f64),
        AnalysisWindow::BlackmanHarris => {
            let (a0, a1, a2, a3) = (0.35875, 0.48829, 0.14128, 0.01168);
            let mut sum = 0.0;
            let w: Vec<f64> = samples
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    let wi = a0 - a1 * phi.cos() + a2 * (2.0 * phi).cos() - a3 * (3.0 * phi).cos();
                    sum += wi;
                    x * wi
                })
                .collect();
            (w, sum)
        }
    };

    let spec = fft_forward(&windowed);
    let raw_power: f64 = spec.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
    let half = n / 2;
    let magnitude: Vec<f64> = (0..=half)
        .map(|k| {
            let full = if k == 0 || (n.is_multiple_of(2) && k == half) {
                1.0
            } else {
                2.0
            };
            spec[k].norm() * full / norm
        })
        .collect();

    let fundamental_bin = magnitude
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let bin_hz = signal.rate() / n as f64;
    let signal_energy = samples.iter().map(|&x| x * x).sum();

    Ok(SpectrumReport {
        sample_rate: signal.rate(),
        bin_hz,
        fundamental_hz: fundamental_bin as f64 * bin_hz,
        fundamental_level: magnitude[fundamental_bin],
        magnitude,
        fundamental_bin,
        harmonics: Vec::new(),
        thd: None,
        signal_energy,
        raw_power,
    })
}

impl SpectrumReport {
    /// Time-domain energy of the analyzed (windowed) signal; equals
    /// `sum |X_k|^2 / N` by Parseval, which is how it is computed.
    pub fn energy(&self) -> f64 {
        self.raw_power
    }

    /// Energy of the raw input samples, for Parseval checks against
    /// [`SpectrumReport::energy`] under the rectangular window.
    pub fn input_energy(&self) -> f64 {
        self.signal_energy
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate / 2.0
    }

    fn peak_near(&self, frequency: f64) -> (usize, f64) {
        let center = (frequency / self.bin_hz).round() as i64;
        let lo = (center - 1).max(0) as usize;
        let hi = ((center + 1) as usize).min(self.magnitude.len() - 1);
        (lo..=hi)
            .map(|k| (k, self.magnitude[k]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    /// Level of the strongest bin within one bin of `frequency`, in dB
    /// relative to the fundamental.
    pub fn level_near_db(&self, frequency: f64) -> f64 {
        let (_, mag) = self.peak_near(frequency);
        to_db(mag, self.fundamental_level)
    }

    /// Extract harmonic levels at `orders * f0` (peak within one bin) and
    /// fill the report's harmonic table and THD. Errors if a requested
    /// harmonic sits at or above Nyquist.
    pub fn analyze_harmonics(&mut self, f0: f64, orders: &[u32]) -> Result<Vec<f64>> {
        let (fund_bin, fund_mag) = self.peak_near(f0);
        let mut harmonics = Vec::with_capacity(orders.len());
        let mut levels = Vec::with_capacity(orders.len());
        let mut harmonic_power = 0.0;
        for &order in orders {
            let f = order as f64 * f0;
            if f >= self.nyquist() {
                return Err(Error::HarmonicOutOfBand {
                    order,
                    frequency: f,
                    nyquist: self.nyquist(),
                });
            }
            let (_, mag) = self.peak_near(f);
            let level_db = to_db(mag, fund_mag);
            levels.push(level_db);
            harmonics.push(Harmonic {
                order,
                frequency: f,
                level_db,
            });
            if order >= 2 {
                harmonic_power += mag * mag;
            }
        }
        self.fundamental_bin = fund_bin;
        self.fundamental_hz = fund_bin as f64 * self.bin_hz;
        self.fundamental_level = fund_mag;
        self.harmonics = harmonics;
        self.thd = Some(harmonic_power.sqrt() / fund_mag);
        Ok(levels)
    }

    /// Plot-ready `frequency_hz,magnitude_db` rows, dB relative to the
    /// fundamental, up to `max_frequency` (or Nyquist).
    pub fn to_csv(&self, max_frequency: Option<f64>) -> String {
        let limit = max_frequency.unwrap_or(self.nyquist());
        let mut out = String::from("frequency_hz,magnitude_db\n");
        for (k, &mag) in self.magnitude.iter().enumerate() {
            let f = k as f64 * self.bin_hz;
            if f > limit {
                break;
            }
            out.push_str(&format!("{},{:.4}\n", f, to_db(mag, self.fundamental_level)));
        }
        out
    }
}

fn to_db(mag: f64, reference: f64) -> f64 {
    // Floor far below every measurable level keeps the output finite.
    20.0 * (mag.max(1e-300) / reference.max(1e-300)).log10()
}

/// Convenience wrapper: spectrum plus harmonic extraction.
pub fn harmonic_levels(
    signal: &SampleStream,
    window: AnalysisWindow,
    f0: f64,
    orders: &[u32],
) -> Result<(SpectrumReport, Vec<f64>)> {
    let mut report = spectrum(signal, window)?;
    let levels = report.analyze_harmonics(f0, orders)?;
    Ok((report, levels))
}

/// Ideal low-pass demodulator: brick-wall in the frequency domain, every
/// bin strictly above `cutoff` zeroed, linear phase and zero group delay
/// by construction.
pub fn demodulate(signal: &SampleStream, cutoff: f64) -> Result<SampleStream> {
    let nyquist = signal.rate() / 2.0;
    if !(cutoff.is_finite() && cutoff > 0.0 && cutoff < nyquist) {
        return Err(Error::InvalidCutoff { cutoff, nyquist });
    }
    if signal.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = signal.len();
    let mut buf = fft_forward(signal.samples());
    let bin_hz = signal.rate() / n as f64;
    for (k, value) in buf.iter_mut().enumerate() {
        let f = (k.min(n - k)) as f64 * bin_hz;
        if f > cutoff {
            *value = Complex64::new(0.0, 0.0);
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let out: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    SampleStream::from_raw(signal.rate(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coherent_tone(n: usize, cycles: usize, amp: f64) -> SampleStream {
        let samples = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * cycles as f64 * i as f64 / n as f64).sin())
            .collect();
        SampleStream::from_raw(44_100.0, samples).unwrap()
    }

    #[test]
    fn coherent_tone_is_a_single_line() {
        let n = 4096;
        let s = coherent_tone(n, 128, 0.8);
        let report = spectrum(&s, AnalysisWindow::Rect).unwrap();
        assert_eq!(report.fundamental_bin, 128);
        assert!((report.fundamental_level - 0.8).abs() < 1e-12);
        for (k, &mag) in report.magnitude.iter().enumerate() {
            if k != 128 && k != 0 {
                let db = 20.0 * (mag / 0.8).log10();
                assert!(db < -200.0, "bin {k} at {db} dB");
            }
        }
    }

    #[test]
    fn dc_signal_concentrates_in_bin_zero() {
        let s = SampleStream::from_raw(1000.0, vec![0.25; 512]).unwrap();
        let report = spectrum(&s, AnalysisWindow::Rect).unwrap();
        assert!((report.magnitude[0] - 0.25).abs() < 1e-13);
        for &m in &report.magnitude[1..] {
            assert!(m < 1e-14);
        }
    }

    #[test]
    fn parseval_energy_identity() {
        let mut state = 0x12345678u64;
        let mut rng = move || {
            // xorshift, plenty for test data
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let samples: Vec<f64> = (0..3000).map(|_| rng()).collect();
        let s = SampleStream::from_raw(48_000.0, samples).unwrap();
        let report = spectrum(&s, AnalysisWindow::Rect).unwrap();
        let time_energy = report.input_energy();
        let freq_energy = report.energy();
        assert!(
            ((time_energy - freq_energy) / time_energy).abs() < 1e-9,
            "{time_energy} vs {freq_energy}"
        );
    }

    #[test]
    fn rejects_empty_signals_and_bad_cutoffs() {
        let empty = SampleStream::from_raw(1000.0, vec![]).unwrap();
        assert!(matches!(
            spectrum(&empty, AnalysisWindow::Rect),
            Err(Error::EmptyInput)
        ));
        let s = coherent_tone(256, 8, 0.5);
        assert!(matches!(
            demodulate(&s, 25_000.0),
            Err(Error::InvalidCutoff { .. })
        ));
        assert!(demodulate(&s, 0.0).is_err());
    }

    #[test]
    fn demodulator_passes_below_and_kills_above_cutoff() {
        let n = 4096;
        let below = coherent_tone(n, 100, 0.5); // 100/4096 * 44100 = 1076 Hz
        let passed = demodulate(&below, 2000.0).unwrap();
        for (a, b) in below.samples().iter().zip(passed.samples()) {
            assert!((a - b).abs() < 1e-10);
        }
        let above = coherent_tone(n, 1000, 0.5); // 10767 Hz
        let killed = demodulate(&above, 2000.0).unwrap();
        for &v in killed.samples() {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn demodulator_is_idempotent_to_rounding() {
        // Bit-for-bit idempotence is unattainable through a forward and
        // inverse transform; the fixed point holds to rounding noise.
        let n = 2048;
        let mixed = {
            let a = coherent_tone(n, 64, 0.4);
            let b = coherent_tone(n, 700, 0.4);
            let v: Vec<f64> = a
                .samples()
                .iter()
                .zip(b.samples())
                .map(|(x, y)| x + y)
                .collect();
            SampleStream::from_raw(44_100.0, v).unwrap()
        };
        let once = demodulate(&mixed, 3000.0).unwrap();
        let twice = demodulate(&once, 3000.0).unwrap();
        for (a, b) in once.samples().iter().zip(twice.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_frequencies_follow_the_fundamental() {
        let s = coherent_tone(4096, 128, 0.8);
        let (report, levels) = harmonic_levels(
            &s,
            AnalysisWindow::Rect,
            128.0 * 44_100.0 / 4096.0,
            &[2, 3],
        )
        .unwrap();
        assert_eq!(report.harmonics.len(), 2);
        assert_eq!(report.harmonics[0].order, 2);
        let f0 = 128.0 * 44_100.0 / 4096.0;
        assert!((report.harmonics[0].frequency - 2.0 * f0).abs() < 1e-9);
        assert!((report.harmonics[1].frequency - 3.0 * f0).abs() < 1e-9);
        // A pure coherent tone has harmonics at the numerical floor.
        for level in levels {
            assert!(level < -180.0, "harmonic at {level} dB");
        }
        assert!(report.thd.unwrap() < 1e-9);
    }

    #[test]
    fn harmonics_above_nyquist_are_rejected() {
        let s = coherent_tone(4096, 128, 0.8);
        let mut report = spectrum(&s, AnalysisWindow::Rect).unwrap();
        let err = report.analyze_harmonics(9000.0, &[2, 3]).unwrap_err();
        assert!(matches!(err, Error::HarmonicOutOfBand { order: 3, .. }));
    }

    #[test]
    fn blackman_harris_contains_leakage_of_incoherent_tones() {
        // A tone placed between bins: rectangular leakage pollutes distant
        // bins, the window pulls them far down.
        let n = 4096;
        let freq_bins = 128.37;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                0.8 * (2.0 * std::f64::consts::PI * freq_bins * i as f64 / n as f64).sin()
            })
            .collect();
        let s = SampleStream::from_raw(44_100.0, samples).unwrap();
        let rect = spectrum(&s, AnalysisWindow::Rect).unwrap();
        let bh = spectrum(&s, AnalysisWindow::BlackmanHarris).unwrap();
        let far_bin = 1000;
        let rect_far = 20.0 * (rect.magnitude[far_bin] / rect.fundamental_level).log10();
        let bh_far = 20.0 * (bh.magnitude[far_bin] / bh.fundamental_level).log10();
        assert!(bh_far < rect_far - 20.0, "rect {rect_far} bh {bh_far}");
        // The windowed fundamental still reads near the true amplitude
        // (scalloping loss off the bin center costs up to ~0.8 dB).
        assert!((bh.fundamental_level - 0.8).abs() < 0.08);
    }

    #[test]
    fn csv_export_is_bounded_and_headed() {
        let s = coherent_tone(1024, 32, 0.5);
        let report = spectrum(&s, AnalysisWindow::Rect).unwrap();
        let csv = report.to_csv(Some(5000.0));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("frequency_hz,magnitude_db"));
        let rows: Vec<&str> = lines.collect();
        // 5000 Hz / (44100/1024) bins + DC
        assert_eq!(rows.len(), 117);
        assert!(rows[0].starts_with("0,"));
    }
}
