//! Independent ground-truth generators: a root-finding natural sampler on
//! the continuous signal, the series form of the natural-sampling
//! expansion for analytic test signals, and the dual-route
//! interpolation/convolution checker.
//!
//! Nothing here shares code with the conversion pipelines it validates.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::stream::SampleStream;

/// Most series terms supported by the symbolic expansion machinery.
pub const MAX_SERIES_TERMS: usize = 6;

/// A sum of sinusoids with closed-form derivatives of every order.
#[derive(Debug, Clone)]
pub struct AnalyticSignal {
    /// (amplitude, frequency Hz, phase rad)
    components: Vec<(f64, f64, f64)>,
}

impl AnalyticSignal {
    /// Total amplitude must stay below 1 to honor the modulator contract.
    pub fn new(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(a, _, _)| a.abs()).sum();
        if total.is_nan() || total >= 1.0 {
            return Err(Error::SignalTooLoud(total));
        }
        Ok(Self { components })
    }

    /// Single sinusoid `amp * sin(2 pi freq t)`.
    pub fn tone(freq: f64, amp: f64) -> Result<Self> {
        Self::new(vec![(amp, freq, 0.0)])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|&(a, f, p)| a * (2.0 * std::f64::consts::PI * f * t + p).sin())
            .sum()
    }

    /// `d^order/dt^order x(t)`, exact for any order:
    /// each sinusoid differentiates to `a w^n sin(wt + p + n pi/2)`.
    pub fn derivative(&self, t: f64, order: usize) -> f64 {
        self.components
            .iter()
            .map(|&(a, f, p)| {
                let w = 2.0 * std::f64::consts::PI * f;
                a * w.powi(order as i32)
                    * (w * t + p + order as f64 * std::f64::consts::FRAC_PI_2).sin()
            })
            .sum()
    }

    /// Uniform samples under the half-sample convention
    /// `x[n] = x((n + 1/2) T)`.
    pub fn sample(&self, rate: f64, len: usize) -> Result<SampleStream> {
        let samples = (0..len)
            .map(|n| self.eval((n as f64 + 0.5) / rate))
            .collect();
        SampleStream::new(rate, samples)
    }

    /// Largest possible |x(t)|: the amplitude sum.
    pub fn amplitude_bound(&self) -> f64 {
        self.components.iter().map(|(a, _, _)| a.abs()).sum()
    }
}

/// Natural sample of one carrier period by bracketed bisection.
///
/// Within period `k` the carrier ramp rises linearly from -1 at `kT` to
/// +1 at `(k+1)T`; the natural sample is the signal value where the ramp
/// crosses it, which equals the ramp value at the crossing. The crossing
/// is unique whenever the carrier is fast enough (`f_c > pi f_s`); the
/// period is pre-scanned at 64 points and more than one sign change
/// aborts with a diagnostic.
pub fn root_find_natural<F: Fn(f64) -> f64>(
    signal: F,
    carrier_period: f64,
    period_index: u64,
) -> Result<f64> {
    const SCAN: usize = 64;
    let t0 = period_index as f64 * carrier_period;
    // g(u) = x(t0 + u T) - (2u - 1) on the local coordinate u in [0, 1];
    // |x| < 1 makes g(0) > 0 > g(1).
    let g = |u: f64| signal(t0 + u * carrier_period) - (2.0 * u - 1.0);

    let mut crossings = 0usize;
    let mut bracket = None;
    let mut prev = g(0.0);
    for i in 1..=SCAN {
        let u = i as f64 / SCAN as f64;
        let here = g(u);
        if prev >= 0.0 && here < 0.0 || prev < 0.0 && here >= 0.0 {
            crossings += 1;
            if bracket.is_none() {
                bracket = Some(((i - 1) as f64 / SCAN as f64, u));
            }
        }
        prev = here;
    }
    if crossings > 1 {
        return Err(Error::MultipleCrossings {
            period: period_index,
            crossings,
        });
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoCrossing {
        period: period_index,
    })?;

    // Bisection to |du| <= 1e-14, i.e. |dt| <= 1e-14 T.
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    Ok(2.0 * u - 1.0)
}

/// Natural samples for `count` consecutive carrier periods starting at
/// `first_period`.
pub fn natural_samples(
    signal: &AnalyticSignal,
    carrier_period: f64,
    first_period: u64,
    count: usize,
) -> Result<Vec<f64>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .map(|i| root_find_natural(|t| signal.eval(t), carrier_period, first_period + i as u64))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        natural_samples_seq(signal, carrier_period, first_period, count)
    }
}

/// Sequential twin of [`natural_samples`].
pub fn natural_samples_seq(
    signal: &AnalyticSignal,
    carrier_period: f64,
    first_period: u64,
    count: usize,
) -> Result<Vec<f64>> {
    (0..count)
        .map(|i| root_find_natural(|t| signal.eval(t), carrier_period, first_period + i as u64))
        .collect()
}

/// N-term truncation of the natural-sampling series at instant `t`:
/// `x(t) + sum_{n=1}^{N-1} 1/(n+1)! (T/2)^n d^n/dt^n [x(t)]^(n+1)`.
///
/// The derivative of each power is expanded through truncated Taylor
/// arithmetic: `d^n/dt^n [x^{n+1}](t)` is `n!` times the degree-n
/// coefficient of the local Taylor polynomial of `x` raised to the
/// (n+1)-th power, which is exact.
pub fn series_natural(
    signal: &AnalyticSignal,
    carrier_period: f64,
    t: f64,
    terms: usize,
) -> Result<f64> {
    let derivs: Vec<f64> = (0..terms.max(1))
        .map(|j| signal.derivative(t, j))
        .collect();
    series_from_derivatives(&derivs, carrier_period, terms)
}

/// Same truncation evaluated from raw derivative values
/// `derivs[j] = x^(j)(t)`.
pub fn series_from_derivatives(derivs: &[f64], carrier_period: f64, terms: usize) -> Result<f64> {
    if terms == 0 || terms > MAX_SERIES_TERMS {
        return Err(Error::SeriesTerms {
            requested: terms,
            max: MAX_SERIES_TERMS,
        });
    }
    if derivs.len() < terms {
        return Err(Error::WindowLength {
            expected: terms,
            got: derivs.len(),
        });
    }
    let half_t = carrier_period / 2.0;
    let mut factorial = vec![1.0f64; terms + 2];
    for i in 1..factorial.len() {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    // Local Taylor coefficients of x around t.
    let taylor: Vec<f64> = derivs
        .iter()
        .take(terms)
        .enumerate()
        .map(|(j, &d)| d / factorial[j])
        .collect();

    let mut result = taylor[0];
    for n in 1..terms {
        let power = poly_pow(&taylor[..=n], n + 1, n);
        let dn = power[n] * factorial[n];
        result += dn * half_t.powi(n as i32) / factorial[n + 1];
    }
    Ok(result)
}

/// `poly^exponent` truncated at `max_degree` (coefficients above it never
/// influence the kept ones).
fn poly_pow(poly: &[f64], exponent: usize, max_degree: usize) -> Vec<f64> {
    let mut acc = vec![0.0; max_degree + 1];
    acc[0] = 1.0;
    for _ in 0..exponent {
        let mut next = vec![0.0; max_degree + 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &p) in poly.iter().enumerate() {
                if i + j <= max_degree {
                    next[i + j] += a * p;
                }
            }
        }
        acc = next;
    }
    acc
}

/// Evaluate one output instant two ways: fit the interpolation curve
/// through the window and sample it at `tau` (method 1), or build the tap
/// set `h[n] = f(nT + tau)` and convolve (method 2). The two must agree;
/// the bank construction relies on it.
pub fn dual_route_check(kernel: &Kernel, window: &[f64], tau: f64) -> Result<(f64, f64)> {
    if window.len().is_multiple_of(2) || window.is_empty() {
        return Err(Error::WindowLength {
            expected: window.len() + 1,
            got: window.len(),
        });
    }
    let k = (window.len() / 2) as i64;
    let t1 = kernel.input_period();
    let span = k as f64 * t1;
    if !tau.is_finite() || tau.abs() > span {
        return Err(Error::OffsetOutOfRange { tau, span });
    }

    // Method 1: curve = sum_n x[n] f(t - nT), sampled at tau.
    let mut method1 = 0.0;
    for n in -k..=k {
        method1 += window[(n + k) as usize] * kernel.eval(tau - n as f64 * t1, 0)?;
    }

    // Method 2: taps h[n] = f(nT + tau), output = sum_n x[n] h[-n].
    let mut taps = Vec::with_capacity(window.len());
    for n in -k..=k {
        taps.push(kernel.eval(n as f64 * t1 + tau, 0)?);
    }
    let mut method2 = 0.0;
    for n in -k..=k {
        method2 += window[(n + k) as usize] * taps[(-n + k) as usize];
    }

    Ok((method1, method2))
}
