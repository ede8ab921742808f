use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use natsamp_cli::spec::{
    Algorithm, BankSpec, ConvertSpec, InputSource, KernelChoice, RenderFormat, RenderSpec,
    SweepSpec,
};
use natsamp_cli::{run_bank, run_convert, run_render, run_sweep, CliError};

/// Natural-sample value computation for digital pulse-width modulators.
#[derive(Parser)]
#[command(name = "natsamp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert uniform samples to natural-sample values.
    Convert(ConvertArgs),
    /// Sweep the series depth K and measure harmonic decay after PWM and
    /// ideal demodulation.
    Sweep(SweepArgs),
    /// Render the PWM pulse train of a converted stream to WAV or CSV.
    Render(RenderArgs),
    /// Dump the polyphase interpolation/differentiation coefficients.
    Bank(BankArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Synthetic tone descriptor: freq_hz,amplitude,duration_s.
    #[arg(long, value_name = "F,AMP,DUR", conflicts_with = "input")]
    tone: Option<String>,

    /// Input file (.csv with `index,value` or value-per-line rows, or
    /// 16/24-bit mono .wav).
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Input sample rate in Hz (tones and CSV files; WAV carries its own).
    #[arg(long, default_value_t = 44100.0)]
    f1: f64,

    /// Upsampling factor.
    #[arg(long, default_value_t = 8)]
    lup: usize,

    /// Conversion pipeline: combined | baseline | algorithm1.
    #[arg(long, default_value = "combined")]
    algorithm: Algorithm,

    /// Interpolation kernel window: standard | wide.
    #[arg(long, default_value = "standard")]
    kernel: KernelChoice,

    /// Rescale each order-0 polyphase branch to unit DC gain.
    #[arg(long)]
    normalize_dc: bool,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl InputArgs {
    fn source(&self) -> Result<InputSource, CliError> {
        match (&self.tone, &self.input) {
            (Some(tone), None) => InputSource::parse_tone(tone),
            (None, Some(path)) => Ok(InputSource::File(path.clone())),
            (None, None) => Err(CliError::Spec(
                "provide an input: --tone f,amp,dur or --input path".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        }
    }

    fn convert_spec(&self, terms: u8) -> Result<ConvertSpec, CliError> {
        Ok(ConvertSpec {
            input: self.source()?,
            f1: self.f1,
            upsampling: self.lup,
            terms,
            algorithm: self.algorithm,
            kernel: self.kernel,
            normalize_dc: self.normalize_dc,
            out_dir: self.out.clone(),
        })
    }
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Series truncation depth K (1..=4).
    #[arg(long, default_value_t = 4)]
    k_terms: u8,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Comma-separated list of depths to sweep.
    #[arg(long, default_value = "1,2,3,4", value_delimiter = ',')]
    k_terms: Vec<u8>,

    /// Ideal demodulator cutoff in Hz.
    #[arg(long, default_value_t = 20000.0)]
    cutoff: f64,

    /// Render grid density per carrier period.
    #[arg(long, default_value_t = 64)]
    oversample: usize,

    /// Downcounter resolution in bits; omit for continuous edges.
    #[arg(long)]
    bits: Option<u8>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Series truncation depth K (1..=4).
    #[arg(long, default_value_t = 4)]
    k_terms: u8,

    /// Render grid density per carrier period.
    #[arg(long, default_value_t = 8)]
    oversample: usize,

    /// Downcounter resolution in bits; omit for continuous edges.
    #[arg(long)]
    bits: Option<u8>,

    /// Output format: wav | csv.
    #[arg(long, default_value = "wav")]
    format: RenderFormat,
}

#[derive(Args)]
struct BankArgs {
    /// Input sample rate in Hz.
    #[arg(long, default_value_t = 44100.0)]
    f1: f64,

    /// Upsampling factor.
    #[arg(long, default_value_t = 8)]
    lup: usize,

    /// Half-window k (each phase holds 2k+1 taps).
    #[arg(long, default_value_t = 4)]
    half_window: usize,

    /// Interpolation kernel window: standard | wide.
    #[arg(long, default_value = "standard")]
    kernel: KernelChoice,

    /// Rescale each order-0 branch to unit DC gain.
    #[arg(long)]
    normalize_dc: bool,

    /// Emit CSV (with header) instead of the whitespace table.
    #[arg(long)]
    csv: bool,

    /// Write to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Convert(args) => {
            let spec = args.input.convert_spec(args.k_terms)?;
            run_convert(&spec)
        }
        Command::Sweep(args) => {
            let spec = SweepSpec {
                convert: args.input.convert_spec(*args.k_terms.first().unwrap_or(&4))?,
                k_list: args.k_terms,
                cutoff: args.cutoff,
                oversample: args.oversample,
                bits: args.bits,
            };
            run_sweep(&spec)
        }
        Command::Render(args) => {
            let spec = RenderSpec {
                convert: args.input.convert_spec(args.k_terms)?,
                oversample: args.oversample,
                bits: args.bits,
                format: args.format,
            };
            run_render(&spec)
        }
        Command::Bank(args) => {
            let spec = BankSpec {
                f1: args.f1,
                upsampling: args.lup,
                half_window: args.half_window,
                kernel: args.kernel,
                normalize_dc: args.normalize_dc,
                csv: args.csv,
                out_file: args.out,
            };
            if let Some(table) = run_bank(&spec)? {
                print!("{table}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One machine-readable line on stderr.
            eprintln!("{}", serde_json::json!({ "error": err.to_string() }));
            ExitCode::FAILURE
        }
    }
}
