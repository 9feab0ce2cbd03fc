//! Physics-based lidar weather augmentation.
//!
//! Converts clear-weather lidar scans into rain, snow and fog scans. Light
//! extinction comes from Mie theory integrated over particle size
//! distributions; strong individual scatterers (raindrops, snowflakes) are
//! placed by a per-point Monte-Carlo step and compete with the target
//! return for detection.
//!
//! ```no_run
//! use lisa_core::{lisa_augment, PointRecord, SensorConfig, WeatherCondition};
//!
//! let sensor = SensorConfig::default();
//! let rain = WeatherCondition::rain(25.0, sensor.wavelength)?;
//! let scan = vec![PointRecord::new(12.0, -3.0, -1.6, 0.4)];
//! let out = lisa_augment(&scan, &rain, &sensor, 42)?;
//! println!("{:?}", out.points[0].label);
//! # Ok::<(), lisa_core::Error>(())
//! ```

pub mod atmosphere;
pub mod augment;
pub mod batch;
pub mod config;
pub mod error;
pub mod histogram;
pub mod psd;
pub mod quadrature;
pub mod scan_io;
pub mod scattering;

pub use atmosphere::{
    asymptotic_rain_extinction, extinction_from_psd, sample_rain_rate, transmittance, ExtinctionCoefficient,
    RainRateSamplerConfig,
};
pub use augment::{
    augment, lisa_augment, mini_lisa_augment, AugmentOptions, AugmentStats, AugmentedPoint, Augmentation,
    ExtinctionMode, Label, Model, PointRecord, ScattererSampling, SensorConfig, WeatherCondition,
};
pub use batch::{emit_histograms, run_batch, RunConfig, RunReport, WeatherSelection};
pub use config::WeatherConfig;
pub use error::{Error, Result};
pub use histogram::Histogram;
pub use psd::{GammaPsd, MarshallPalmerPsd, MonodispersePsd, Psd};
pub use scan_io::{LabelBuffer, ScanBuffer};
pub use scattering::{fresnel_reflectivity, mie_efficiencies, ComplexIndex, MieEfficiencies, SizeParameter};
