//! Nonlinear stage: natural-sample value from a signal sample and its
//! scaled derivatives, truncated at depth K.

use crate::error::{Error, Result};

/// Signal sample and scaled derivative samples feeding the combiner:
/// `a = (T/2) x'`, `b = (T^2/8) x''`, `c = (T^3/48) x'''` at the same
/// instant, with T the carrier period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NatBlock {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl NatBlock {
    pub fn new(s: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        for (index, v) in [s, a, b, c].into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
        }
        if s.abs() >= 1.0 {
            return Err(Error::AmplitudeOutOfRange { index: 0, value: s });
        }
        Ok(Self { s, a, b, c })
    }
}

/// Truncated natural-sample combiner.
///
/// K = 1 returns the uniform sample unchanged; K = 4 is the full
/// third-derivative form
/// `s{(1 + a)(1 + a^2) + s((3a + 1)b + sc)}`.
pub fn natural_sample(block: &NatBlock, terms: u8) -> Result<f64> {
    if !(1..=4).contains(&terms) {
        return Err(Error::InvalidTerms(terms));
    }
    Ok(combine(block.s, block.a, block.b, block.c, terms))
}

/// Combiner without the range checks, for converter-internal use where the
/// interpolated signal sample may legitimately overshoot full scale.
#[inline]
pub(crate) fn combine(s: f64, a: f64, b: f64, c: f64, terms: u8) -> f64 {
    match terms {
        1 => s,
        2 => s * (1.0 + a),
        3 => s * (1.0 + a + a * a + s * b),
        _ => s * ((1.0 + a) * (1.0 + a * a) + s * ((3.0 * a + 1.0) * b + s * c)),
    }
}
