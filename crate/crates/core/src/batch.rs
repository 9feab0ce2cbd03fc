//! Batch augmentation of a directory of scans.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;

use crate::atmosphere::sample_rain_rate;
use crate::augment::{
    augment, point_rng, AugmentOptions, AugmentStats, Model, ScattererSampling, SensorConfig, WeatherCondition,
};
use crate::config::WeatherConfig;
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::scan_io::{self, LabelBuffer, ScanBuffer, LABEL_EXTENSION};

pub const REPORT_HEADER: &str = "# lisa-report v1";

/// Rain-rate binning used in reports and histogram files, mm/hr.
pub const RAIN_HIST_MAX: f64 = 200.0;
pub const RAIN_HIST_BINS: usize = 100;
/// Rain-rate bins for the label-fraction summary, mm/hr.
const FRACTION_BIN_WIDTH: f64 = 10.0;
const FRACTION_BINS: usize = 10;

/// RNG stream reserved for the per-scan rain-rate draw.
const RAIN_RATE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum WeatherSelection {
    Preset(String),
    RainRate(f64),
    SampleRainRate,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub weather: WeatherSelection,
    pub sensor: SensorConfig,
    pub seed: u64,
    pub input: PathBuf,
    pub output: PathBuf,
    pub stats: Option<PathBuf>,
    pub presets: WeatherConfig,
    pub sampling: ScattererSampling,
    /// Also parallelise within each scan.
    pub parallel_points: bool,
}

impl RunConfig {
    pub fn new(model: Model, weather: WeatherSelection, input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        RunConfig {
            model,
            weather,
            sensor: SensorConfig::default(),
            seed: 0,
            input: input.into(),
            output: output.into(),
            stats: None,
            presets: WeatherConfig::builtin(),
            sampling: ScattererSampling::default(),
            parallel_points: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sensor.validate()?;
        if self.model == Model::MiniLisa && !matches!(self.weather, WeatherSelection::Preset(_)) {
            return Err(Error::invalid("mini-LISA needs a fixed-extinction weather preset (--weather)"));
        }
        if let WeatherSelection::RainRate(r) = self.weather {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::invalid(format!("rain rate must be finite and >= 0, got {r}")));
            }
        }
        Ok(())
    }

    fn describe_weather(&self) -> String {
        match &self.weather {
            WeatherSelection::Preset(p) => format!("preset={p}"),
            WeatherSelection::RainRate(r) => format!("rain_rate={r}"),
            WeatherSelection::SampleRainRate => {
                format!("sample_rain_rate rate={}", self.presets.rain_rate_sampler.rate)
            }
        }
    }
}

/// Outcome for one successfully augmented scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub name: String,
    pub rain_rate: Option<f64>,
    pub alpha: f64,
    pub points: u64,
    pub lost: u64,
    pub scattered: u64,
    pub original: u64,
    pub origin_points: u64,
    pub clamped_reflectivity: u64,
    pub mean_reflectivity_in: f64,
    pub mean_reflectivity_out: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    pub name: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub header: Vec<(String, String)>,
    pub scans: Vec<ScanReport>,
    pub failures: Vec<ScanFailure>,
    pub range_hist: Histogram,
    pub diameter_hist: Histogram,
}

impl Default for RunReport {
    fn default() -> Self {
        let s = AugmentStats::default();
        RunReport {
            header: Vec::new(),
            scans: Vec::new(),
            failures: Vec::new(),
            range_hist: s.range_hist,
            diameter_hist: s.diameter_hist,
        }
    }
}

impl RunReport {
    pub fn rain_rate_histogram(&self) -> Histogram {
        let mut h = Histogram::new(0.0, RAIN_HIST_MAX, RAIN_HIST_BINS);
        for r in self.scans.iter().filter_map(|s| s.rain_rate) {
            h.add(r);
        }
        h
    }

    pub fn mean_rain_rate(&self) -> Option<f64> {
        let rates: Vec<f64> = self.scans.iter().filter_map(|s| s.rain_rate).collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }

    /// Summed label counts per rain-rate bin; the last bin is open-ended.
    pub fn label_counts_by_rain_rate(&self) -> Vec<[u64; 4]> {
        let mut bins = vec![[0u64; 4]; FRACTION_BINS];
        for s in &self.scans {
            let Some(r) = s.rain_rate else { continue };
            let i = ((r / FRACTION_BIN_WIDTH) as usize).min(FRACTION_BINS - 1);
            let b = &mut bins[i];
            b[0] += 1;
            b[1] += s.lost;
            b[2] += s.scattered;
            b[3] += s.original;
        }
        bins
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{REPORT_HEADER}");
        for (k, v) in &self.header {
            let _ = writeln!(s, "{k} {v}");
        }
        let _ = writeln!(s, "scans {} failed {}", self.scans.len(), self.failures.len());
        for r in &self.scans {
            let rain = r.rain_rate.map_or("none".to_string(), |v| v.to_string());
            let _ = writeln!(
                s,
                "scan name={} rain_rate={} alpha={} points={} lost={} scattered={} original={} \
                 origin_points={} clamped={} mean_reflectivity_in={} mean_reflectivity_out={}",
                r.name,
                rain,
                r.alpha,
                r.points,
                r.lost,
                r.scattered,
                r.original,
                r.origin_points,
                r.clamped_reflectivity,
                r.mean_reflectivity_in,
                r.mean_reflectivity_out
            );
        }
        for f in &self.failures {
            let _ = writeln!(s, "failure name={} error={}", f.name, f.error.replace('\n', " "));
        }
        let (lost, scattered, original) = self.scans.iter().fold((0, 0, 0), |(l, s, o), r| {
            (l + r.lost, s + r.scattered, o + r.original)
        });
        let mean = self.mean_rain_rate().map_or("none".to_string(), |v| v.to_string());
        let _ = writeln!(
            s,
            "total lost={lost} scattered={scattered} original={original} mean_rain_rate={mean}"
        );
        for (i, b) in self.label_counts_by_rain_rate().iter().enumerate() {
            if b[0] == 0 {
                continue;
            }
            let lo = i as f64 * FRACTION_BIN_WIDTH;
            let hi = if i + 1 == FRACTION_BINS {
                "inf".to_string()
            } else {
                (lo + FRACTION_BIN_WIDTH).to_string()
            };
            let n = (b[1] + b[2] + b[3]).max(1) as f64;
            let _ = writeln!(
                s,
                "rain_bin lo={lo} hi={hi} scans={} lost_fraction={} scattered_fraction={} original_fraction={}",
                b[0],
                b[1] as f64 / n,
                b[2] as f64 / n,
                b[3] as f64 / n
            );
        }
        s
    }
}

/// Per-scan seed from the global seed and the scan's file name.
pub fn scan_seed(global: u64, basename: &str) -> u64 {
    // FNV-1a then a splitmix64 finaliser.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in basename.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = global ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ScanFormat {
    Binary,
    Text,
}

fn scan_format(path: &Path) -> Option<ScanFormat> {
    match path.extension()?.to_str()? {
        "bin" => Some(ScanFormat::Binary),
        "txt" => Some(ScanFormat::Text),
        _ => None,
    }
}

/// Scan files (`*.bin`, `*.txt`) directly inside `dir`, sorted by name.
pub fn list_scans(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && scan_format(&path).is_some() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

struct ScanResult {
    report: ScanReport,
    stats: AugmentStats,
}

fn basename(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn process_scan(cfg: &RunConfig, fixed: Option<&WeatherCondition>, path: &Path) -> Result<ScanResult> {
    let name = basename(path);
    let format = scan_format(path).ok_or_else(|| Error::invalid(format!("{name}: unknown scan format")))?;
    let scan = match format {
        ScanFormat::Binary => scan_io::read_scan(path)?,
        ScanFormat::Text => scan_io::read_scan_text(path)?,
    };
    scan.check_reflectivity(path)?;

    let seed = scan_seed(cfg.seed, &name);
    let sampled;
    let weather = match (&cfg.weather, fixed) {
        (_, Some(w)) => w,
        (WeatherSelection::SampleRainRate, None) => {
            let u = point_rng(seed, RAIN_RATE_STREAM).random::<f64>();
            let rate = sample_rain_rate(&cfg.presets.rain_rate_sampler, u)?;
            sampled = cfg.presets.rain(rate, cfg.sensor.wavelength)?;
            &sampled
        }
        _ => unreachable!("fixed weather is resolved up front"),
    };

    let options = AugmentOptions {
        sampling: cfg.sampling,
        parallel: cfg.parallel_points,
    };
    let out = augment(cfg.model, &scan.points, weather, &cfg.sensor, seed, options)?;

    let out_path = cfg.output.join(&name);
    let records = ScanBuffer::new(out.records());
    match format {
        ScanFormat::Binary => scan_io::write_scan(&records, &out_path)?,
        ScanFormat::Text => scan_io::write_scan_text(&records, &out_path)?,
    }
    let labels: LabelBuffer = out.points.iter().map(|p| p.label).collect();
    scan_io::write_labels(&labels, out_path.with_extension(LABEL_EXTENSION))?;

    let n = scan.len() as u64;
    let mean = |sum: f64| if n == 0 { 0.0 } else { sum / n as f64 };
    let st = &out.stats;
    Ok(ScanResult {
        report: ScanReport {
            name,
            rain_rate: weather.precipitation_rate(),
            alpha: weather.alpha.per_meter(),
            points: n,
            lost: st.lost,
            scattered: st.scattered,
            original: st.original,
            origin_points: st.origin_points,
            clamped_reflectivity: st.clamped_reflectivity,
            mean_reflectivity_in: mean(st.reflectivity_in_sum),
            mean_reflectivity_out: mean(st.reflectivity_out_sum),
        },
        stats: out.stats,
    })
}

/// Augment every scan in `cfg.input` and write the results to `cfg.output`.
pub fn run_batch(cfg: &RunConfig) -> Result<RunReport> {
    let files = list_scans(&cfg.input)?;
    run_batch_files(cfg, &files)
}

/// Augment an explicit list of scan files. The result does not depend on
/// the order of `files`.
pub fn run_batch_files(cfg: &RunConfig, files: &[PathBuf]) -> Result<RunReport> {
    cfg.validate()?;
    if files.is_empty() {
        return Err(Error::invalid(format!("no scan files (*.bin, *.txt) in {}", cfg.input.display())));
    }
    fs::create_dir_all(&cfg.output).map_err(|e| Error::io(&cfg.output, e))?;

    let fixed = match &cfg.weather {
        WeatherSelection::Preset(name) => Some(cfg.presets.preset(name, cfg.sensor.wavelength)?),
        WeatherSelection::RainRate(r) => Some(cfg.presets.rain(*r, cfg.sensor.wavelength)?),
        WeatherSelection::SampleRainRate => None,
    };
    // Weather that the chosen model cannot run is a configuration problem,
    // not a per-scan failure.
    if let Some(w) = &fixed {
        augment(cfg.model, &[], w, &cfg.sensor, 0, AugmentOptions::default())?;
    }

    let mut sorted: Vec<&PathBuf> = files.iter().collect();
    sorted.sort_by_key(|p| basename(p));

    let results: Vec<(String, Result<ScanResult>)> = sorted
        .par_iter()
        .map(|p| (basename(p), process_scan(cfg, fixed.as_ref(), p)))
        .collect();

    let s = &cfg.sensor;
    let mut report = RunReport {
        header: vec![
            ("model".into(), match cfg.model {
                Model::Lisa => "lisa".into(),
                Model::MiniLisa => "mini_lisa".into(),
            }),
            ("weather".into(), cfg.describe_weather()),
            ("seed".into(), cfg.seed.to_string()),
            (
                "sensor".into(),
                format!(
                    "r_max={} r_min={} divergence={} range_accuracy={} wavelength={} d_start={}",
                    s.r_max, s.r_min, s.divergence, s.range_accuracy, s.wavelength, s.d_start
                ),
            ),
        ],
        ..Default::default()
    };
    if let Some(w) = &fixed {
        report.header.push(("alpha".into(), w.alpha.per_meter().to_string()));
    }
    for (name, r) in results {
        match r {
            Ok(r) => {
                report.range_hist.merge(&r.stats.range_hist);
                report.diameter_hist.merge(&r.stats.diameter_hist);
                report.scans.push(r.report);
            }
            Err(e) => report.failures.push(ScanFailure {
                name,
                error: e.to_string(),
            }),
        }
    }

    if let Some(path) = &cfg.stats {
        fs::write(path, report.to_text()).map_err(|e| Error::io(path, e))?;
    }
    Ok(report)
}

pub const RAIN_RATE_HIST_FILE: &str = "rain_rate_hist.txt";
pub const SCATTERER_RANGE_HIST_FILE: &str = "scatterer_range_hist.txt";
pub const DIAMETER_HIST_FILE: &str = "diameter_hist.txt";

/// Write `bin_center count` tables for the rain-rate, normalised scatterer
/// range and scatterer diameter distributions into directory `dir`.
pub fn emit_histograms(report: &RunReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tables = [
        (RAIN_RATE_HIST_FILE, report.rain_rate_histogram().to_table("rain_rate_mm_per_hr count")),
        (
            SCATTERER_RANGE_HIST_FILE,
            report.range_hist.to_table("scatterer_range_over_window count"),
        ),
        (DIAMETER_HIST_FILE, report.diameter_hist.to_table("diameter_mm count")),
    ];
    let mut written = Vec::new();
    for (file, text) in tables {
        let path = dir.join(file);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_name_and_global_seed() {
        assert_eq!(scan_seed(42, "000001.bin"), scan_seed(42, "000001.bin"));
        assert_ne!(scan_seed(42, "000001.bin"), scan_seed(42, "000002.bin"));
        assert_ne!(scan_seed(42, "000001.bin"), scan_seed(43, "000001.bin"));
    }

    #[test]
    fn mini_lisa_requires_preset() {
        let cfg = RunConfig::new(Model::MiniLisa, WeatherSelection::RainRate(5.0), "in", "out");
        assert!(cfg.validate().is_err());
        let cfg = RunConfig::new(Model::MiniLisa, WeatherSelection::Preset("strong_advection_fog".into()), "in", "out");
        cfg.validate().unwrap();
    }

    #[test]
    fn empty_report_text_and_histograms() {
        let r = RunReport::default();
        let text = r.to_text();
        assert!(text.starts_with(REPORT_HEADER));
        let dir = tempfile::tempdir().unwrap();
        for p in emit_histograms(&r, dir.path()).unwrap() {
            let t = fs::read_to_string(p).unwrap();
            assert_eq!(t.lines().count(), 1);
            assert!(t.starts_with('#'));
        }
    }
}
