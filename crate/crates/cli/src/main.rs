use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use lisa_core::batch::{emit_histograms, run_batch, RunConfig, WeatherSelection};
use lisa_core::config::CONFIG_ENV;
use lisa_core::{Error, Model, ScattererSampling, WeatherConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Lisa,
    MiniLisa,
}

/// Augment a directory of clear-weather lidar scans with rain, snow or fog.
///
/// Reads every `*.bin` (KITTI float32 x y z r) and `*.txt` (one `x y z r`
/// per line) file in `--input`, writes the augmented scan under the same
/// name in `--output` plus a `.label` sidecar (0 lost, 1 scattered,
/// 2 original).
#[derive(Parser, Debug)]
#[command(name = "lisa", version, about)]
#[command(group(ArgGroup::new("weather_source").required(true).args(["weather", "rain_rate", "sample_rain_rate"])))]
struct Cli {
    #[arg(long, value_enum, default_value = "lisa")]
    model: ModelArg,

    /// Named weather preset from the config file.
    #[arg(long)]
    weather: Option<String>,

    /// Fixed rain rate for every scan, mm/hr.
    #[arg(long)]
    rain_rate: Option<f64>,

    /// Draw a rain rate per scan from the exponential sampler.
    #[arg(long)]
    sample_rain_rate: bool,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Maximum range, m.
    #[arg(long)]
    rmax: Option<f64>,
    /// Minimum range (bistatic blind zone), m.
    #[arg(long)]
    rmin: Option<f64>,
    /// Beam divergence, rad.
    #[arg(long)]
    divergence: Option<f64>,
    /// Range accuracy, m.
    #[arg(long)]
    range_accuracy: Option<f64>,
    /// Laser wavelength, m.
    #[arg(long)]
    wavelength: Option<f64>,
    /// Smallest Monte-Carlo particle diameter, mm.
    #[arg(long)]
    dmin: Option<f64>,

    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,

    /// Write the run report here.
    #[arg(long)]
    stats: Option<PathBuf>,

    /// Write rain-rate, scatterer-range and diameter histograms into this directory.
    #[arg(long)]
    histograms: Option<PathBuf>,

    /// Weather preset file (TOML). Defaults to the built-in presets.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Draw every scatterer instead of only those that can affect the label.
    #[arg(long)]
    exhaustive: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::OutOfRange(_) | Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn build_config(cli: Cli) -> Result<(RunConfig, Option<PathBuf>), Error> {
    let presets = match &cli.config {
        Some(p) => WeatherConfig::load(p)?,
        None => WeatherConfig::builtin(),
    };
    let weather = match (cli.weather, cli.rain_rate, cli.sample_rain_rate) {
        (Some(w), None, false) => WeatherSelection::Preset(w),
        (None, Some(r), false) => WeatherSelection::RainRate(r),
        (None, None, true) => WeatherSelection::SampleRainRate,
        _ => unreachable!("clap enforces exactly one weather source"),
    };
    let model = match cli.model {
        ModelArg::Lisa => Model::Lisa,
        ModelArg::MiniLisa => Model::MiniLisa,
    };

    let mut sensor = presets.sensor.unwrap_or_default();
    let overrides = [
        (cli.rmax, &mut sensor.r_max),
        (cli.rmin, &mut sensor.r_min),
        (cli.divergence, &mut sensor.divergence),
        (cli.range_accuracy, &mut sensor.range_accuracy),
        (cli.wavelength, &mut sensor.wavelength),
        (cli.dmin, &mut sensor.d_start),
    ];
    for (v, field) in overrides {
        if let Some(v) = v {
            *field = v;
        }
    }

    let mut cfg = RunConfig::new(model, weather, cli.input, cli.output);
    cfg.sensor = sensor;
    cfg.seed = cli.seed;
    cfg.stats = cli.stats;
    cfg.presets = presets;
    cfg.parallel_points = true;
    if cli.exhaustive {
        cfg.sampling = ScattererSampling::Exhaustive;
    }
    cfg.validate()?;
    Ok((cfg, cli.histograms))
}

fn run(cli: Cli) -> Result<u8, Error> {
    let (cfg, histograms) = build_config(cli)?;
    let report = run_batch(&cfg)?;
    if let Some(dir) = histograms {
        emit_histograms(&report, dir)?;
    }
    let points: u64 = report.scans.iter().map(|s| s.points).sum();
    eprintln!(
        "lisa: {} scans ({points} points) written to {}",
        report.scans.len(),
        cfg.output.display()
    );
    for f in &report.failures {
        eprintln!("lisa: {}: {}", f.name, f.error);
    }
    Ok(if report.failures.is_empty() { 0 } else { EXIT_DATA })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("lisa: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
