//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured values (run with `--nocapture` to see them).

use std::fs;
use std::path::Path;

use natsamp::{
    baseline_convert, convert_stream, demodulate, natural_sample, natural_samples,
    render_for_analysis, series_from_derivatives, spectrum, stirling_derivatives, dual_route_check,
    uniform_pwm_clamped, AnalysisWindow, AnalyticSignal, ConversionConfig, Kernel, NatBlock,
    SampleStream,
};
use natsamp::{build_bank, full_rate_taps, upsample_direct};
use natsamp_cli::{run_convert, run_sweep, Algorithm, ConvertSpec, InputSource, KernelChoice, SweepSpec};
use rand::prelude::*;

const F1: f64 = 44_100.0;
const F0: f64 = 6_600.0;
const AMP: f64 = 0.8;
const LUP: usize = 8;

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance criterion {criterion} ({name}): {verdict} - {detail}");
}

/// Criterion 1: Stencil exactness on integer-grid monomials, within 1e-14.
#[test]
fn criterion_1_stencil_exactness() {
    let linear: Vec<f64> = (-3..=3).map(|n| n as f64).collect();
    let square: Vec<f64> = (-3..=3).map(|n| (n * n) as f64).collect();
    let cube: Vec<f64> = (-3..=3).map(|n| (n * n * n) as f64).collect();
    let (a, _, _) = stirling_derivatives(&linear).unwrap();
    let (_, b, _) = stirling_derivatives(&square).unwrap();
    let (_, _, c) = stirling_derivatives(&cube).unwrap();
    let pass = (a - 0.5).abs() <= 1e-14 && (b - 0.25).abs() <= 1e-14 && (c - 0.125).abs() <= 1e-14;
    report(
        1,
        "stencil exactness",
        pass,
        &format!("a={a:.17} b={b:.17} c={c:.17}"),
    );
    assert!(pass);
}

/// Criterion 2: The combiner with scaled derivative inputs equals the 4-term series
/// truncation on 1,000 random derivative tuples, within 1e-12.
#[test]
fn criterion_2_combiner_series_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let carrier_period = 1.0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = rng.random::<f64>() * 1.8 - 0.9;
        let d1 = rng.random::<f64>() * 2.0 - 1.0;
        let d2 = rng.random::<f64>() * 2.0 - 1.0;
        let d3 = rng.random::<f64>() * 2.0 - 1.0;
        // Combiner route: scaled inputs a = (T/2)x', b = (T^2/8)x'',
        // c = (T^3/48)x'''.
        let block = NatBlock::new(x, d1 / 2.0, d2 / 8.0, d3 / 48.0).unwrap();
        let combined = natural_sample(&block, 4).unwrap();
        // Independent route: Taylor-power expansion of the series.
        let series = series_from_derivatives(&[x, d1, d2, d3], carrier_period, 4).unwrap();
        worst = worst.max((combined - series).abs());
    }
    let pass = worst <= 1e-12;
    report(
        2,
        "combiner/series equivalence",
        pass,
        &format!("worst |combiner - series| = {worst:.3e} over 1000 tuples"),
    );
    assert!(pass);
}

/// Criterion 3: Dual-route interpolation: curve evaluation vs tap convolution agree
/// within 1e-12 over 10,000 random (window, tau) trials.
#[test]
fn criterion_3_dual_route_interpolation() {
    let kernel = Kernel::hamming_sinc(1.0 / F1).unwrap();
    let t1 = 1.0 / F1;
    let mut rng = StdRng::seed_from_u64(0x7E0);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let window: Vec<f64> = (0..9).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let tau = (rng.random::<f64>() * 2.0 - 1.0) * 4.0 * t1;
        let (m1, m2) = dual_route_check(&kernel, &window, tau).unwrap();
        worst = worst.max((m1 - m2).abs());
    }
    let pass = worst <= 1e-12;
    report(
        3,
        "dual-route interpolation",
        pass,
        &format!("worst |method1 - method2| = {worst:.3e} over 10000 trials"),
    );
    assert!(pass);
}

/// Criterion 4: Polyphase restructuring equals zero-insertion + full-rate
/// convolution on a 10,000-sample random input, within 1e-12 per sample,
/// for every derivative order.
#[test]
fn criterion_4_polyphase_direct_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xD1CE);
    let input: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>() * 1.8 - 0.9).collect();
    let kernel = Kernel::hamming_sinc(1.0 / F1).unwrap();
    let bank = build_bank(&ConversionConfig::default(), F1).unwrap();
    let k = bank.half_window();
    let mut worst = 0.0f64;
    for order in 0..=3usize {
        let filter = full_rate_taps(&kernel, LUP, order).unwrap();
        let direct = upsample_direct(&input, LUP, &filter);
        for n in k..input.len() - k {
            let window = &input[n - k..n + k + 1];
            for phase in 0..LUP {
                let poly = bank.apply(window, phase, order);
                let diff = (poly - direct[n * LUP + phase]).abs();
                if diff > worst {
                    worst = diff;
                }
            }
        }
    }
    let pass = worst <= 1e-12;
    report(
        4,
        "polyphase/direct-form equivalence",
        pass,
        &format!("worst per-sample deviation {worst:.3e} across orders 0..=3"),
    );
    assert!(pass);
}

fn rms(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum / a.len() as f64).sqrt()
}

/// Criterion 5: RMS error against the root-finding oracle is non-increasing in K
/// and K=4 improves on K=1 by at least 10x, on one second of the test
/// tone.
#[test]
fn criterion_5_oracle_convergence() {
    let signal = AnalyticSignal::tone(F0, AMP).unwrap();
    let input = signal.sample(F1, 44_100).unwrap();
    let n_out = input.len() * LUP;
    let trim = 64usize;
    let t2 = 1.0 / (F1 * LUP as f64);
    let oracle = natural_samples(&signal, t2, trim as u64, n_out - 2 * trim).unwrap();

    let mut errors = Vec::new();
    for terms in 1..=4u8 {
        let cfg = ConversionConfig {
            terms,
            ..Default::default()
        };
        let conv = convert_stream(&input, &cfg).unwrap();
        errors.push(rms(&conv.output.samples()[trim..n_out - trim], &oracle));
    }
    let non_increasing = errors.windows(2).all(|w| w[1] <= w[0]);
    let ratio = errors[3] / errors[0];
    let pass = non_increasing && ratio <= 0.1;
    report(
        5,
        "oracle convergence",
        pass,
        &format!(
            "rms by K = [{:.4e}, {:.4e}, {:.4e}, {:.4e}], K4/K1 = {:.4}",
            errors[0], errors[1], errors[2], errors[3], ratio
        ),
    );
    assert!(pass);
}

fn parse_summary(path: &Path) -> Vec<(u8, f64, f64, f64)> {
    let text = fs::read_to_string(path).expect("summary.csv exists");
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

fn default_sweep(out_dir: &Path, duration: f64) -> SweepSpec {
    SweepSpec {
        convert: ConvertSpec {
            input: InputSource::Tone {
                freq: F0,
                amp: AMP,
                duration,
            },
            f1: F1,
            upsampling: LUP,
            terms: 4,
            algorithm: Algorithm::Combined,
            kernel: KernelChoice::Standard,
            normalize_dc: false,
            out_dir: out_dir.to_path_buf(),
        },
        k_list: vec![1, 2, 3, 4],
        cutoff: 20_000.0,
        oversample: 64,
        bits: None,
    }
}

/// Criterion 6: Harmonic decay across the K sweep: both tracked harmonics at K=4 at
/// least 10 dB below K=1, and no K-step raising either harmonic by more
/// than 1 dB.
///
/// The second clause is expected RED: the measured chain raises the
/// 19.8 kHz harmonic by ~3.6 dB between K=3 and K=4 (from -102.6 dB to
/// -99.0 dB, both ~40 dB below K=1). The rise survives oversampling,
/// segment and duration changes, disappears when the combiner is fed
/// exact analytic derivatives, and is absent from the baseline pipeline,
/// so it is the passband error of the windowed-sinc derivative FIR
/// branches interfering at third order - a property of the algorithm
/// with this filter, not of the implementation. The criterion is asserted
/// as written rather than retuned to pass.
#[test]
fn criterion_6_harmonic_decay_sweep() {
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&default_sweep(dir.path(), 1.0)).unwrap();
    let rows = parse_summary(&dir.path().join("summary.csv"));
    assert_eq!(rows.len(), 4);
    let h2: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let h3: Vec<f64> = rows.iter().map(|r| r.2).collect();

    let drop_ok = h2[3] <= h2[0] - 10.0 && h3[3] <= h3[0] - 10.0;
    let worst_step = |v: &[f64]| -> f64 {
        v.windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let step_h2 = worst_step(&h2);
    let step_h3 = worst_step(&h3);
    let steps_ok = step_h2 <= 1.0 && step_h3 <= 1.0;

    let pass = drop_ok && steps_ok;
    report(
        6,
        "harmonic decay sweep",
        pass,
        &format!(
            "h2 = {h2:.2?} dB, h3 = {h3:.2?} dB; K4-K1 drops = ({:.1}, {:.1}) dB (>= 10 required); \
             worst steps = ({step_h2:+.2}, {step_h3:+.2}) dB (<= +1 required)",
            h2[0] - h2[3],
            h3[0] - h3[3]
        ),
    );
    if !steps_ok {
        println!(
            "  note: the K3->K4 rise of the third harmonic is reproducible, amplitude-scaled \
             (third order), independent of render oversampling and segment choice, vanishes with \
             exact analytic derivatives, and does not occur in the baseline pipeline; it is the \
             windowed-sinc differentiator branches' passband error interfering at the -100 dB level."
        );
    }
    assert!(pass, "harmonic decay criterion as written");
}

/// Criterion 7: The combined pipeline is at least as accurate as the two-stage
/// baseline against the oracle at K=4.
#[test]
fn criterion_7_combined_beats_baseline() {
    let signal = AnalyticSignal::tone(F0, AMP).unwrap();
    let input = signal.sample(F1, 44_100).unwrap();
    let n_out = input.len() * LUP;
    let trim = 64usize;
    let t2 = 1.0 / (F1 * LUP as f64);
    let oracle = natural_samples(&signal, t2, trim as u64, n_out - 2 * trim).unwrap();

    let cfg = ConversionConfig::default();
    let combined = convert_stream(&input, &cfg).unwrap();
    let baseline = baseline_convert(&input, &cfg).unwrap();
    let e_combined = rms(&combined.output.samples()[trim..n_out - trim], &oracle);
    let e_baseline = rms(&baseline.output.samples()[trim..n_out - trim], &oracle);
    let pass = e_combined <= e_baseline;
    report(
        7,
        "combined vs baseline accuracy",
        pass,
        &format!("combined rms {e_combined:.6e} vs baseline rms {e_baseline:.6e}"),
    );
    assert!(pass);
}

/// Criterion 8: Continuous-edge natural PWM demodulates with every non-fundamental
/// in-band line at least 60 dB down; uniform PWM of the same tone is at
/// least 20 dB dirtier at the tracked harmonics.
#[test]
fn criterion_8_pwm_demodulation_sanity() {
    let signal = AnalyticSignal::tone(F0, AMP).unwrap();
    let f2 = F1 * LUP as f64;
    let t2 = 1.0 / f2;
    let periods = 1176usize;
    let oversample = 64usize;
    let cutoff = 20_000.0;

    // Natural PWM from the analytic natural sampler.
    let widths = natural_samples(&signal, t2, 0, periods).unwrap();
    let natural = SampleStream::from_raw(f2, widths).unwrap();
    let (pwm, _) = uniform_pwm_clamped(&natural).unwrap();
    let rendered = render_for_analysis(&pwm, oversample).unwrap();
    let demod = demodulate(&rendered, cutoff).unwrap();
    let report_nat = spectrum(&demod, AnalysisWindow::Rect).unwrap();

    let bin_hz = report_nat.bin_hz;
    let fund_bin = (F0 / bin_hz).round() as i64;
    let cutoff_bin = (cutoff / bin_hz).floor() as usize;
    let mut worst_line = f64::NEG_INFINITY;
    for (k, &mag) in report_nat.magnitude.iter().enumerate().take(cutoff_bin + 1) {
        if k == 0 || (k as i64 - fund_bin).abs() <= 1 {
            continue;
        }
        let db = 20.0 * (mag / report_nat.fundamental_level).max(1e-300).log10();
        worst_line = worst_line.max(db);
    }
    let natural_h2 = report_nat.level_near_db(2.0 * F0);
    let natural_h3 = report_nat.level_near_db(3.0 * F0);

    // Uniform PWM of the same tone at the same carrier.
    let uniform_in = signal.sample(f2, periods).unwrap();
    let (uni_pwm, _) = uniform_pwm_clamped(&uniform_in).unwrap();
    let uni_rend = render_for_analysis(&uni_pwm, oversample).unwrap();
    let uni_demod = demodulate(&uni_rend, cutoff).unwrap();
    let mut uni_report = spectrum(&uni_demod, AnalysisWindow::Rect).unwrap();
    let uni_levels = uni_report.analyze_harmonics(F0, &[2, 3]).unwrap();

    let clean_ok = worst_line <= -60.0;
    let contrast_ok =
        uni_levels[0] >= natural_h2 + 20.0 && uni_levels[1] >= natural_h3 + 20.0;
    let tone_ok = (report_nat.fundamental_level - AMP).abs() < 0.01 * AMP;
    let pass = clean_ok && contrast_ok && tone_ok;
    report(
        8,
        "pwm demodulation sanity",
        pass,
        &format!(
            "natural PWM worst in-band line {worst_line:.1} dB (<= -60 required), fundamental \
             {:.4}; uniform PWM h2/h3 = {:.1}/{:.1} dB vs natural {:.1}/{:.1} dB",
            report_nat.fundamental_level, uni_levels[0], uni_levels[1], natural_h2, natural_h3
        ),
    );
    assert!(pass);
}

/// Criterion 9: Determinism: identical specs produce byte-identical data files.
#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));

    let convert_spec = |out: &Path| ConvertSpec {
        input: InputSource::Tone {
            freq: F0,
            amp: AMP,
            duration: 0.02,
        },
        f1: F1,
        upsampling: LUP,
        terms: 4,
        algorithm: Algorithm::Combined,
        kernel: KernelChoice::Standard,
        normalize_dc: false,
        out_dir: out.to_path_buf(),
    };
    run_convert(&convert_spec(&a)).unwrap();
    run_convert(&convert_spec(&b)).unwrap();
    let mut compared = Vec::new();
    for name in ["converted.csv", "diagnostics.json"] {
        let left = fs::read(a.join(name)).unwrap();
        let right = fs::read(b.join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between identical runs");
        compared.push(name);
    }

    let (c, d) = (dir.path().join("c"), dir.path().join("d"));
    run_sweep(&default_sweep(&c, 0.02)).unwrap();
    run_sweep(&default_sweep(&d, 0.02)).unwrap();
    for name in [
        "summary.csv",
        "summary.json",
        "diagnostics.json",
        "spectrum_k1.csv",
        "spectrum_k2.csv",
        "spectrum_k3.csv",
        "spectrum_k4.csv",
    ] {
        let left = fs::read(c.join(name)).unwrap();
        let right = fs::read(d.join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between identical runs");
        compared.push(name);
    }
    report(
        9,
        "determinism",
        true,
        &format!("{} data files byte-identical across repeated runs", compared.len()),
    );
}
