//! Weather augmentation of lidar scans.
//!
//! [`lisa_augment`] runs the hybrid Monte-Carlo model for precipitation:
//! attenuation is applied on average through the extinction coefficient and
//! large particles are placed randomly in the beam to compete with the
//! target return. [`mini_lisa_augment`] keeps only the averaged attenuation,
//! range noise and detectability cut, which suits dense fog.
//!
//! Every point owns an RNG substream derived from `(seed, point index)`, so
//! results do not depend on iteration order or on the thread schedule.

mod sensor;
mod weather;

pub use sensor::*;
pub use weather::{ExtinctionMode, WeatherCondition};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atmosphere::ExtinctionCoefficient;
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::psd::{self, Psd};

/// One lidar return as stored on disk.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[repr(C)]
pub struct PointRecord {
    pub x: f32,
    pub y: f32,
    pub z: f32,
    pub reflectivity: f32,
}

impl PointRecord {
    pub fn new(x: f32, y: f32, z: f32, reflectivity: f32) -> Self {
        PointRecord { x, y, z, reflectivity }
    }

    pub fn range(&self) -> f64 {
        let (x, y, z) = (self.x as f64, self.y as f64, self.z as f64);
        (x * x + y * y + z * z).sqrt()
    }
}

/// Provenance of an augmented point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Label {
    Lost = 0,
    Scattered = 1,
    Original = 2,
}

impl Label {
    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Lost),
            1 => Some(Label::Scattered),
            2 => Some(Label::Original),
            _ => None,
        }
    }
}

/// Augmented point in double precision together with its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub reflectivity: f64,
    pub label: Label,
}

impl AugmentedPoint {
    pub const LOST: AugmentedPoint = AugmentedPoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        reflectivity: 0.0,
        label: Label::Lost,
    };

    pub fn range(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_record(&self) -> PointRecord {
        PointRecord::new(self.x as f32, self.y as f32, self.z as f32, self.reflectivity as f32)
    }
}

/// A randomly placed particle competing with the target return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScattererDraw {
    /// m
    pub range: f64,
    pub reflectivity: f64,
    /// mm
    pub diameter: f64,
    pub received_power: f64,
}

/// Augmentation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Lisa,
    MiniLisa,
}

/// How the Monte-Carlo step places particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScattererSampling {
    /// Draw every particle in the beam cone.
    Exhaustive,
    /// Draw only the particles close enough to outshine the decision
    /// threshold `max(P0, P_min)`. A particle of Fresnel reflectivity
    /// `rho_f` at range `r` returns at most `rho_f / r^2`, so particles
    /// beyond `sqrt(rho_f / threshold)` can never change the outcome; their
    /// count is thinned binomially and the rest are drawn from the same
    /// `R^2` law restricted to the nearer window. The label and scattered
    /// point distributions are identical to [`ScattererSampling::Exhaustive`].
    #[default]
    Thinned,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AugmentOptions {
    pub sampling: ScattererSampling,
    pub parallel: bool,
}

/// Bins for the sampler diagnostics.
pub const RANGE_HIST_BINS: usize = 50;
pub const DIAMETER_HIST_MAX_MM: f64 = 8.0;
pub const DIAMETER_HIST_BINS: usize = 160;

/// Per-scan counters and sampler diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentStats {
    pub lost: u64,
    pub scattered: u64,
    pub original: u64,
    /// Points at the sensor origin; emitted as lost.
    pub origin_points: u64,
    /// Scattered reflectivities clamped into [0, 1].
    pub clamped_reflectivity: u64,
    pub scatterer_draws: u64,
    pub reflectivity_in_sum: f64,
    pub reflectivity_out_sum: f64,
    /// Drawn scatterer ranges divided by the sampled window, in [0, 1).
    pub range_hist: Histogram,
    /// Drawn scatterer diameters, mm.
    pub diameter_hist: Histogram,
}

impl Default for AugmentStats {
    fn default() -> Self {
        AugmentStats {
            lost: 0,
            scattered: 0,
            original: 0,
            origin_points: 0,
            clamped_reflectivity: 0,
            scatterer_draws: 0,
            reflectivity_in_sum: 0.0,
            reflectivity_out_sum: 0.0,
            range_hist: Histogram::new(0.0, 1.0, RANGE_HIST_BINS),
            diameter_hist: Histogram::new(0.0, DIAMETER_HIST_MAX_MM, DIAMETER_HIST_BINS),
        }
    }
}

impl AugmentStats {
    pub fn total(&self) -> u64 {
        self.lost + self.scattered + self.original
    }

    pub fn merge(&mut self, o: &AugmentStats) {
        self.lost += o.lost;
        self.scattered += o.scattered;
        self.original += o.original;
        self.origin_points += o.origin_points;
        self.clamped_reflectivity += o.clamped_reflectivity;
        self.scatterer_draws += o.scatterer_draws;
        self.reflectivity_in_sum += o.reflectivity_in_sum;
        self.reflectivity_out_sum += o.reflectivity_out_sum;
        self.range_hist.merge(&o.range_hist);
        self.diameter_hist.merge(&o.diameter_hist);
    }

    fn record(&mut self, input: &PointRecord, out: &AugmentedPoint) {
        match out.label {
            Label::Lost => self.lost += 1,
            Label::Scattered => self.scattered += 1,
            Label::Original => self.original += 1,
        }
        self.reflectivity_in_sum += input.reflectivity as f64;
        self.reflectivity_out_sum += out.reflectivity;
    }
}

#[derive(Debug, Clone)]
pub struct Augmentation {
    pub points: Vec<AugmentedPoint>,
    pub stats: AugmentStats,
}

impl Augmentation {
    pub fn labels(&self) -> Vec<u8> {
        self.points.iter().map(|p| p.label as u8).collect()
    }

    pub fn records(&self) -> Vec<PointRecord> {
        self.points.iter().map(AugmentedPoint::to_record).collect()
    }
}

/// Independent RNG for point `index` under `seed`.
pub fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Range after adding zero-mean Gaussian noise of standard deviation
/// `range_sigma(snr)`, clamped at the sensor origin.
pub fn jitter_range<R: Rng + ?Sized>(range: f64, snr: f64, sensor: &SensorConfig, rng: &mut R) -> Result<f64> {
    let sigma = range_sigma(snr, sensor)?;
    let z: f64 = StandardNormal.sample(rng);
    Ok((range + sigma * z).max(0.0))
}

/// Constants shared by every point of one augmentation run.
struct Context {
    model: Model,
    sampling: ScattererSampling,
    alpha: f64,
    p_min: f64,
    r_min: f64,
    range_accuracy: f64,
    tan_div: f64,
    d_start: f64,
    /// Particles per m^3 above `d_start`.
    tail: f64,
    particle_reflectivity: f64,
    diameters: DiameterLaw,
}

#[derive(Clone, Copy)]
enum DiameterLaw {
    Exponential { lambda: f64 },
    Fixed(f64),
    None,
}

impl Context {
    fn new(model: Model, weather: &WeatherCondition, sensor: &SensorConfig, sampling: ScattererSampling) -> Result<Self> {
        sensor.validate()?;
        let (tail, diameters) = match model {
            Model::MiniLisa => (0.0, DiameterLaw::None),
            Model::Lisa => {
                let tail = psd::tail_count(&weather.psd, sensor.d_start)?;
                let law = match weather.psd {
                    _ if tail == 0.0 => DiameterLaw::None,
                    Psd::MarshallPalmer(p) => DiameterLaw::Exponential { lambda: p.lambda },
                    Psd::Monodisperse(p) => DiameterLaw::Fixed(p.diameter),
                    Psd::Gamma(_) => {
                        return Err(Error::invalid(
                            "the Monte-Carlo model samples exponential or monodisperse \
                             distributions only; use mini-LISA for gamma (fog) distributions",
                        ))
                    }
                };
                (tail, law)
            }
        };
        Ok(Context {
            model,
            sampling,
            alpha: weather.alpha.per_meter(),
            p_min: min_detectable_power(sensor),
            r_min: sensor.r_min,
            range_accuracy: sensor.range_accuracy,
            tan_div: sensor.divergence.tan(),
            d_start: sensor.d_start,
            tail,
            particle_reflectivity: weather.particle_reflectivity,
            diameters,
        })
    }

    #[inline]
    fn draw_diameter(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.diameters {
            DiameterLaw::Exponential { lambda } => {
                psd::sample_diameter_unchecked(lambda, self.d_start, rng.random::<f64>())
            }
            DiameterLaw::Fixed(d) => d,
            DiameterLaw::None => self.d_start,
        }
    }

    #[inline]
    fn scatterer_power(&self, range: f64, diameter: f64) -> f64 {
        let occ = occlusion_factor(diameter, range * self.tan_div);
        self.particle_reflectivity * (-2.0 * self.alpha * range).exp() / (range * range) * occ
    }

    /// Strongest particle among `count` draws with ranges `window * u^(1/3)`.
    fn strongest(
        &self,
        count: u64,
        window: f64,
        rng: &mut ChaCha8Rng,
        stats: &mut AugmentStats,
    ) -> Option<ScattererDraw> {
        let mut best: Option<ScattererDraw> = None;
        for _ in 0..count {
            let frac = rng.random::<f64>().cbrt();
            let diameter = self.draw_diameter(rng);
            stats.range_hist.add(frac);
            stats.diameter_hist.add(diameter);
            let range = window * frac;
            if range <= self.r_min || range <= 0.0 {
                continue;
            }
            let power = self.scatterer_power(range, diameter);
            if best.is_none_or(|b| power > b.received_power) {
                best = Some(ScattererDraw {
                    range,
                    reflectivity: self.particle_reflectivity,
                    diameter,
                    received_power: power,
                });
            }
        }
        stats.scatterer_draws += count;
        best
    }

    fn augment_point(&self, p: &PointRecord, rng: &mut ChaCha8Rng, stats: &mut AugmentStats) -> AugmentedPoint {
        let (x, y, z) = (p.x as f64, p.y as f64, p.z as f64);
        let range = (x * x + y * y + z * z).sqrt();
        if range == 0.0 || !range.is_finite() {
            stats.origin_points += 1;
            return AugmentedPoint::LOST;
        }
        let rho = p.reflectivity as f64;
        let attenuation = (-2.0 * self.alpha * range).exp();
        let p0 = rho * attenuation / (range * range);

        let best = match self.model {
            Model::MiniLisa => None,
            Model::Lisa => {
                let nt = if range > self.r_min {
                    let radius = 0.5 * range * self.tan_div;
                    std::f64::consts::PI / 3.0 * range * radius * radius * self.tail
                } else {
                    0.0
                };
                let count = probabilistic_round(nt, rng.random::<f64>());
                match self.sampling {
                    ScattererSampling::Exhaustive => self.strongest(count, range, rng, stats),
                    ScattererSampling::Thinned => {
                        let threshold = p0.max(self.p_min);
                        let reach = (self.particle_reflectivity / threshold).sqrt();
                        if count == 0 || reach <= self.r_min {
                            None
                        } else if reach >= range {
                            self.strongest(count, range, rng, stats)
                        } else {
                            let q = (reach / range).powi(3);
                            let near = Binomial::new(count, q)
                                .expect("probability lies in [0, 1]")
                                .sample(rng);
                            self.strongest(near, reach, rng, stats)
                        }
                    }
                }
            }
        };

        let p_max = best.map_or(0.0, |b| b.received_power);
        if p0 < self.p_min && p_max < self.p_min {
            return AugmentedPoint::LOST;
        }
        if let Some(b) = best.filter(|b| b.received_power > p0) {
            let scale = b.range / range;
            let raw = self.particle_reflectivity
                * (-2.0 * self.alpha * b.range).exp()
                * occlusion_factor(b.diameter, b.range * self.tan_div);
            let reflectivity = raw.clamp(0.0, 1.0);
            if reflectivity != raw {
                stats.clamped_reflectivity += 1;
            }
            return AugmentedPoint {
                x: x * scale,
                y: y * scale,
                z: z * scale,
                reflectivity,
                label: Label::Scattered,
            };
        }

        // p0 >= p_min here, so the SNR is at least one.
        let snr = p0 / self.p_min;
        let sigma = self.range_accuracy / (2.0 * snr).sqrt();
        let noise: f64 = StandardNormal.sample(rng);
        let new_range = (range + sigma * noise).max(0.0);
        let scale = new_range / range;
        AugmentedPoint {
            x: x * scale,
            y: y * scale,
            z: z * scale,
            reflectivity: rho * attenuation,
            label: Label::Original,
        }
    }

    fn run(&self, scan: &[PointRecord], seed: u64, parallel: bool) -> Augmentation {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let chunk = |offset: usize, points: &[PointRecord]| {
            let mut stats = AugmentStats::default();
            let out: Vec<AugmentedPoint> = points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut rng = base.clone();
                    rng.set_stream((offset + i) as u64);
                    let a = self.augment_point(p, &mut rng, &mut stats);
                    stats.record(p, &a);
                    a
                })
                .collect();
            (out, stats)
        };

        if !parallel {
            let (points, stats) = chunk(0, scan);
            return Augmentation { points, stats };
        }
        const CHUNK: usize = 8192;
        let parts: Vec<_> = scan
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, pts)| chunk(c * CHUNK, pts))
            .collect();
        let mut points = Vec::with_capacity(scan.len());
        let mut stats = AugmentStats::default();
        for (p, s) in parts {
            points.extend(p);
            stats.merge(&s);
        }
        Augmentation { points, stats }
    }
}

/// Augment `scan` with `model` under `weather`.
pub fn augment(
    model: Model,
    scan: &[PointRecord],
    weather: &WeatherCondition,
    sensor: &SensorConfig,
    seed: u64,
    options: AugmentOptions,
) -> Result<Augmentation> {
    let ctx = Context::new(model, weather, sensor, options.sampling)?;
    Ok(ctx.run(scan, seed, options.parallel))
}

/// Hybrid Monte-Carlo augmentation for rain and snow.
pub fn lisa_augment(
    scan: &[PointRecord],
    weather: &WeatherCondition,
    sensor: &SensorConfig,
    seed: u64,
) -> Result<Augmentation> {
    augment(Model::Lisa, scan, weather, sensor, seed, AugmentOptions::default())
}

/// Attenuation-only augmentation for fog.
pub fn mini_lisa_augment(
    scan: &[PointRecord],
    weather: &WeatherCondition,
    sensor: &SensorConfig,
    seed: u64,
) -> Result<Augmentation> {
    augment(Model::MiniLisa, scan, weather, sensor, seed, AugmentOptions::default())
}

/// Fixed extinction with no particles, for tests and fog presets.
pub fn attenuation_only(alpha: f64) -> Result<WeatherCondition> {
    WeatherCondition::new(
        format!("alpha {alpha} m^-1"),
        Psd::from(psd::MonodispersePsd {
            diameter: 0.0,
            number_density: 0.0,
        }),
        crate::scattering::ComplexIndex::WATER_905NM,
        ExtinctionCoefficient::new(alpha)?,
    )
}
