//! The experiment drivers behind the subcommands.

use natsamp::{
    baseline_convert, build_bank, convert_stream_with_bank, demodulate, dump_bank, dump_bank_csv,
    render_binary, render_for_analysis, spectrum, stirling, uniform_pwm_clamped, AnalysisWindow,
    Conversion, ConversionConfig, SampleStream,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::io::{self, commit_outputs, Manifest, OutputFile};
use crate::spec::{Algorithm, BankSpec, ConvertSpec, InputSource, RenderFormat, RenderSpec, SweepSpec};

/// Harmonic orders the decay experiment tracks.
const HARMONIC_ORDERS: [u32; 2] = [2, 3];
/// Cap on the coherent analysis segment, in repetitions of the shortest
/// coherent block.
const MAX_COHERENT_BLOCKS: usize = 4;
/// Longest incoherent analysis segment (samples) when no coherent length
/// exists and a Blackman-Harris window is used instead.
const MAX_INCOHERENT_LEN: usize = 1 << 18;

#[derive(Debug, Clone, Serialize)]
pub struct OvermodulationSummary {
    pub count: usize,
    pub first_index: Option<usize>,
    pub peak: f64,
}

impl From<&natsamp::Overmodulation> for OvermodulationSummary {
    fn from(o: &natsamp::Overmodulation) -> Self {
        Self {
            count: o.count,
            first_index: o.first_index,
            peak: o.peak,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunDiagnostics {
    pub terms: u8,
    pub overmodulation: OvermodulationSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dc_gain: Option<DcGainSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamped_at_pwm: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DcGainSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl From<&natsamp::DcGainReport> for DcGainSummary {
    fn from(r: &natsamp::DcGainReport) -> Self {
        Self {
            min: r.min,
            max: r.max,
            mean: r.mean,
        }
    }
}

fn convert_once(input: &SampleStream, spec: &ConvertSpec, terms: u8) -> Result<Conversion> {
    let cfg = ConversionConfig {
        upsampling: spec.upsampling,
        terms,
        kernel_variant: spec.kernel.into(),
        normalize_dc: spec.normalize_dc,
        ..Default::default()
    };
    let conv = match spec.algorithm {
        Algorithm::Combined => {
            let bank = build_bank(&cfg, input.rate())?;
            convert_stream_with_bank(input, &bank, terms)?
        }
        Algorithm::Baseline => baseline_convert(input, &cfg)?,
        Algorithm::Algorithm1 => stirling::algorithm1_convert(input, terms)?,
    };
    Ok(conv)
}

fn convert_parameters(spec: &ConvertSpec, input: &SampleStream) -> serde_json::Value {
    json!({
        "input": spec.input.describe(),
        "f1_hz": input.rate(),
        "input_samples": input.len(),
        "upsampling": spec.upsampling,
        "k_terms": spec.terms,
        "algorithm": spec.algorithm,
        "kernel": spec.kernel,
        "normalize_dc": spec.normalize_dc,
    })
}

/// `convert`: run one conversion, write the stream CSV, the manifest, and
/// the diagnostics.
pub fn run_convert(spec: &ConvertSpec) -> Result<()> {
    let input = io::resolve_input(&spec.input, spec.f1)?;
    let conv = convert_once(&input, spec, spec.terms)?;

    let diagnostics = RunDiagnostics {
        terms: spec.terms,
        overmodulation: (&conv.overmodulation).into(),
        dc_gain: conv.dc_gain.as_ref().map(DcGainSummary::from),
        clamped_at_pwm: None,
    };

    let files = vec![
        OutputFile::new("converted.csv", io::stream_to_csv(&conv.output).into_bytes()),
        OutputFile::new(
            "diagnostics.json",
            serde_json::to_string_pretty(&[diagnostics])
                .expect("diagnostics serialize")
                .into_bytes(),
        ),
    ];
    let records = commit_outputs(&spec.out_dir, &files)?;
    Manifest::new("convert", convert_parameters(spec, &input), records).write(&spec.out_dir)
}

/// How many carrier periods make one exactly-coherent block for a tone at
/// `f0` against carrier rate `fc` (None when the rates are not both
/// integral, where coherence bookkeeping is not worth chasing).
fn coherent_periods(f0: f64, fc: f64) -> Option<usize> {
    if f0.fract() != 0.0 || fc.fract() != 0.0 || f0 <= 0.0 || fc <= 0.0 {
        return None;
    }
    let (a, b) = (f0 as u64, fc as u64);
    let g = gcd(a, b);
    usize::try_from(b / g).ok()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct SweepRow {
    terms: u8,
    h2_db: f64,
    h3_db: f64,
    thd: f64,
    fundamental_hz: f64,
    fundamental_level: f64,
}

/// `sweep`: reproduce the harmonic-decay experiment. For each depth K:
/// convert, synthesize PWM, demodulate, measure the spectrum, and extract
/// the 2nd/3rd-harmonic levels; emit a `K,h2_db,h3_db,thd` summary plus
/// per-K spectrum CSVs.
pub fn run_sweep(spec: &SweepSpec) -> Result<()> {
    let InputSource::Tone { freq: f0, .. } = spec.convert.input else {
        return Err(CliError::Spec(
            "the sweep needs a synthetic tone (--tone f,amp,dur): harmonic levels are measured against its fundamental".into(),
        ));
    };
    for order in HARMONIC_ORDERS {
        let f = order as f64 * f0;
        if f >= spec.cutoff {
            return Err(CliError::Spec(format!(
                "harmonic {order} of {f0} Hz sits at {f} Hz, at or above the {} Hz demodulator cutoff",
                spec.cutoff
            )));
        }
    }
    if spec.k_list.is_empty() {
        return Err(CliError::Spec("empty K list".into()));
    }

    let input = io::resolve_input(&spec.convert.input, spec.convert.f1)?;
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    let mut files = Vec::new();
    let mut analysis_meta = None;

    for &terms in &spec.k_list {
        let conv = convert_once(&input, &spec.convert, terms)?;
        let (analysis, window) = analysis_segment(&conv.output, f0, spec)?;
        analysis_meta.get_or_insert((analysis.len(), window));

        let (pwm, clamped) = uniform_pwm_clamped(&analysis)?;
        let rendered = match spec.bits {
            Some(bits) => render_binary(&pwm.quantize(bits)?, spec.oversample)?,
            None => render_for_analysis(&pwm, spec.oversample)?,
        };
        let demodulated = demodulate(&rendered, spec.cutoff)?;
        let mut report = spectrum(&demodulated, window)?;
        let levels = report.analyze_harmonics(f0, &HARMONIC_ORDERS)?;

        rows.push(SweepRow {
            terms,
            h2_db: levels[0],
            h3_db: levels[1],
            thd: report.thd.unwrap_or(0.0),
            fundamental_hz: report.fundamental_hz,
            fundamental_level: report.fundamental_level,
        });
        diagnostics.push(RunDiagnostics {
            terms,
            overmodulation: (&conv.overmodulation).into(),
            dc_gain: conv.dc_gain.as_ref().map(DcGainSummary::from),
            clamped_at_pwm: Some(clamped),
        });
        files.push(OutputFile::new(
            format!("spectrum_k{terms}.csv"),
            report.to_csv(Some(2.5 * spec.cutoff)).into_bytes(),
        ));
    }

    let mut summary = String::from("K,h2_db,h3_db,thd\n");
    for row in &rows {
        summary.push_str(&format!(
            "{},{:.4},{:.4},{:.6e}\n",
            row.terms, row.h2_db, row.h3_db, row.thd
        ));
    }
    files.push(OutputFile::new("summary.csv", summary.into_bytes()));

    let summary_json: Vec<_> = rows
        .iter()
        .map(|row| {
            json!({
                "k_terms": row.terms,
                "fundamental": {"frequency_hz": row.fundamental_hz, "level": row.fundamental_level},
                "harmonics": [
                    {"order": 2, "frequency_hz": 2.0 * f0, "level_db": row.h2_db},
                    {"order": 3, "frequency_hz": 3.0 * f0, "level_db": row.h3_db},
                ],
                "thd": row.thd,
            })
        })
        .collect();
    files.push(OutputFile::new(
        "summary.json",
        serde_json::to_string_pretty(&summary_json)
            .expect("summary serializes")
            .into_bytes(),
    ));
    files.push(OutputFile::new(
        "diagnostics.json",
        serde_json::to_string_pretty(&diagnostics)
            .expect("diagnostics serialize")
            .into_bytes(),
    ));

    let (analysis_len, window) = analysis_meta.expect("at least one K ran");
    let mut parameters = convert_parameters(&spec.convert, &input);
    let extra = json!({
        "k_list": spec.k_list,
        "cutoff_hz": spec.cutoff,
        "oversample": spec.oversample,
        "bits": spec.bits,
        "harmonic_orders": HARMONIC_ORDERS,
        "analysis_periods": analysis_len,
        "analysis_window": match window {
            AnalysisWindow::Rect => "rect",
            AnalysisWindow::BlackmanHarris => "blackman-harris",
        },
    });
    merge(&mut parameters, extra);

    let records = commit_outputs(&spec.convert.out_dir, &files)?;
    Manifest::new("sweep", parameters, records).write(&spec.convert.out_dir)
}

/// Cut the converted stream to the measurement segment: warm-up trimmed on
/// both sides and, when the tone is exactly representable on the output
/// grid, a whole number of coherent blocks so the fundamental and its
/// harmonics land on DFT bins with a rectangular window.
fn analysis_segment(
    output: &SampleStream,
    f0: f64,
    spec: &SweepSpec,
) -> Result<(SampleStream, AnalysisWindow)> {
    let trim = match spec.convert.algorithm {
        Algorithm::Algorithm1 => 8,
        _ => 2 * ConversionConfig::default().half_window * spec.convert.upsampling,
    };
    let total = output.len();
    if total <= 2 * trim + 16 {
        return Err(CliError::Spec(format!(
            "input too short: {total} converted samples leave nothing after the {trim}-sample warm-up on each side"
        )));
    }
    let available = total - 2 * trim;
    let (len, window) = match coherent_periods(f0, output.rate()) {
        Some(block) if block <= available => {
            let blocks = (available / block).min(MAX_COHERENT_BLOCKS);
            (blocks * block, AnalysisWindow::Rect)
        }
        _ => (available.min(MAX_INCOHERENT_LEN), AnalysisWindow::BlackmanHarris),
    };
    let samples = output.samples()[trim..trim + len].to_vec();
    Ok((SampleStream::from_raw(output.rate(), samples)?, window))
}

fn merge(base: &mut serde_json::Value, extra: serde_json::Value) {
    if let (Some(base_map), serde_json::Value::Object(extra_map)) = (base.as_object_mut(), extra) {
        base_map.extend(extra_map);
    }
}

/// `render`: convert, synthesize the PWM pulse train, and export the
/// rendered two-level signal as WAV (requantized to 16 bits, lossy) or
/// CSV.
pub fn run_render(spec: &RenderSpec) -> Result<()> {
    let input = io::resolve_input(&spec.convert.input, spec.convert.f1)?;
    let conv = convert_once(&input, &spec.convert, spec.convert.terms)?;
    let (pwm, clamped) = uniform_pwm_clamped(&conv.output)?;
    let pwm = match spec.bits {
        Some(bits) => pwm.quantize(bits)?,
        None => pwm,
    };
    let rendered = render_binary(&pwm, spec.oversample)?;

    let mut files = Vec::new();
    match spec.format {
        RenderFormat::Wav => {
            let mut bytes = Vec::new();
            natsamp::wavio::write_wav_mono16(&mut bytes, rendered.rate() as u32, rendered.samples())?;
            files.push(OutputFile::new("pwm.wav", bytes));
        }
        RenderFormat::Csv => {
            files.push(OutputFile::new(
                "pwm.csv",
                io::rendered_to_csv(&rendered).into_bytes(),
            ));
        }
    }
    let diagnostics = RunDiagnostics {
        terms: spec.convert.terms,
        overmodulation: (&conv.overmodulation).into(),
        dc_gain: conv.dc_gain.as_ref().map(DcGainSummary::from),
        clamped_at_pwm: Some(clamped),
    };
    files.push(OutputFile::new(
        "diagnostics.json",
        serde_json::to_string_pretty(&[diagnostics])
            .expect("diagnostics serialize")
            .into_bytes(),
    ));

    let mut parameters = convert_parameters(&spec.convert, &input);
    merge(
        &mut parameters,
        json!({
            "oversample": spec.oversample,
            "bits": spec.bits,
            "format": spec.format,
            "render_rate_hz": rendered.rate(),
        }),
    );
    let records = commit_outputs(&spec.convert.out_dir, &files)?;
    Manifest::new("render", parameters, records).write(&spec.convert.out_dir)
}

/// `bank`: dump the polyphase coefficient table.
pub fn run_bank(spec: &BankSpec) -> Result<Option<String>> {
    let cfg = ConversionConfig {
        upsampling: spec.upsampling,
        half_window: spec.half_window,
        kernel_variant: spec.kernel.into(),
        normalize_dc: spec.normalize_dc,
        ..Default::default()
    };
    let bank = build_bank(&cfg, spec.f1)?;
    let table = if spec.csv {
        dump_bank_csv(&bank)
    } else {
        dump_bank(&bank)
    };
    match &spec.out_file {
        Some(path) => {
            io::write_atomic(path, table.as_bytes())?;
            Ok(None)
        }
        None => Ok(Some(table)),
    }
}
