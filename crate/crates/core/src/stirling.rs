//! Same-rate natural-sample conversion from 7-point central-difference
//! stencils.
//!
//! The three fixed stencils produce the scaled derivatives
//! `a = (T/2) x'`, `b = (T^2/8) x''`, `c = (T^3/48) x'''` of the signal
//! behind the samples, exact on polynomials up to the stencil order. The
//! combiner then forms the natural-sample estimate per output position.

use crate::error::{Error, Result};
use crate::nonlinear;
use crate::par;
use crate::stream::{Conversion, Overmodulation, SampleStream};

/// Tap vectors over window offsets -3..=3.
///
/// `a[n] = 1/120 (x[n+3]-x[n-3]) - 3/40 (x[n+2]-x[n-2]) + 3/8 (x[n+1]-x[n-1])`
pub const FIRST_DERIVATIVE_TAPS: [f64; 7] = [
    -1.0 / 120.0,
    3.0 / 40.0,
    -3.0 / 8.0,
    0.0,
    3.0 / 8.0,
    -3.0 / 40.0,
    1.0 / 120.0,
];

/// `b[n] = 1/720 (x[n+3]+x[n-3]) - 3/160 (x[n+2]+x[n-2]) + 3/16 (x[n+1]+x[n-1]) - 49/144 x[n]`
pub const SECOND_DERIVATIVE_TAPS: [f64; 7] = [
    1.0 / 720.0,
    -3.0 / 160.0,
    3.0 / 16.0,
    -49.0 / 144.0,
    3.0 / 16.0,
    -3.0 / 160.0,
    1.0 / 720.0,
];

/// `c[n] = -1/384 (x[n+3]-x[n-3]) + 1/48 (x[n+2]-x[n-2]) - 13/384 (x[n+1]-x[n-1])`
pub const THIRD_DERIVATIVE_TAPS: [f64; 7] = [
    1.0 / 384.0,
    -1.0 / 48.0,
    13.0 / 384.0,
    0.0,
    -13.0 / 384.0,
    1.0 / 48.0,
    -1.0 / 384.0,
];

/// Scaled derivative estimates from 7 consecutive samples centered at the
/// evaluation position.
pub fn stirling_derivatives(window: &[f64]) -> Result<(f64, f64, f64)> {
    if window.len() != 7 {
        return Err(Error::WindowLength {
            expected: 7,
            got: window.len(),
        });
    }
    for (index, &x) in window.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFiniteSample { index });
        }
    }
    Ok(dot3(window))
}

#[inline]
fn dot3(window: &[f64]) -> (f64, f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = 0.0;
    for i in 0..7 {
        a += FIRST_DERIVATIVE_TAPS[i] * window[i];
        b += SECOND_DERIVATIVE_TAPS[i] * window[i];
        c += THIRD_DERIVATIVE_TAPS[i] * window[i];
    }
    (a, b, c)
}

/// Natural-sample conversion at the input rate.
///
/// One output per input position; the first and last three outputs use
/// zero-padded history, so experiments should discard a short warm-up.
/// Outputs that leave [-1, 1] are reported in the diagnostics, never
/// clipped here.
pub fn algorithm1_convert(stream: &SampleStream, terms: u8) -> Result<Conversion> {
    if !(1..=4).contains(&terms) {
        return Err(Error::InvalidTerms(terms));
    }
    if stream.is_empty() {
        return Err(Error::EmptyInput);
    }
    let samples = stream.samples();
    let mut out = vec![0.0; samples.len()];
    convert_into(samples, terms, &mut out, false);
    let overmodulation = Overmodulation::scan(&out);
    Ok(Conversion {
        output: SampleStream::from_raw(stream.rate(), out)?,
        overmodulation,
        dc_gain: None,
    })
}

/// Sequential twin of [`algorithm1_convert`].
pub fn algorithm1_convert_seq(stream: &SampleStream, terms: u8) -> Result<Conversion> {
    if !(1..=4).contains(&terms) {
        return Err(Error::InvalidTerms(terms));
    }
    if stream.is_empty() {
        return Err(Error::EmptyInput);
    }
    let samples = stream.samples();
    let mut out = vec![0.0; samples.len()];
    convert_into(samples, terms, &mut out, true);
    let overmodulation = Overmodulation::scan(&out);
    Ok(Conversion {
        output: SampleStream::from_raw(stream.rate(), out)?,
        overmodulation,
        dc_gain: None,
    })
}

fn convert_into(samples: &[f64], terms: u8, out: &mut [f64], sequential: bool) {
    let n = samples.len();
    let body = |start: usize, chunk: &mut [f64]| {
        let mut padded = [0.0; 7];
        for (offset, slot) in chunk.iter_mut().enumerate() {
            let center = start + offset;
            let (a, b, c);
            if center >= 3 && center + 3 < n {
                (a, b, c) = dot3(&samples[center - 3..center + 4]);
            } else {
                for (j, p) in padded.iter_mut().enumerate() {
                    let idx = center as i64 + j as i64 - 3;
                    *p = if (0..n as i64).contains(&idx) {
                        samples[idx as usize]
                    } else {
                        0.0
                    };
                }
                (a, b, c) = dot3(&padded);
            }
            *slot = nonlinear::combine(samples[center], a, b, c, terms);
        }
    };
    if sequential {
        par::for_each_chunk_seq(out, 256, body);
    } else {
        par::for_each_chunk(out, 256, body);
    }
}

/// Pulse width in seconds for a natural value in [-1, 1]:
/// `(T/2) (1 + xhat)`, spanning 0 to T across the full input range.
pub fn width_from_natural(xhat: f64, carrier_period: f64) -> Result<f64> {
    if !xhat.is_finite() || xhat.abs() > 1.0 {
        return Err(Error::WidthOutOfRange {
            value: xhat,
            index: None,
        });
    }
    Ok(carrier_period / 2.0 * (1.0 + xhat))
}
