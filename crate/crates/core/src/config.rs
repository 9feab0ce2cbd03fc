//! Weather preset configuration.
//!
//! Presets are read from a TOML file; see `presets/weather.toml` for the
//! shipped defaults and the README for the schema.

use std::path::Path;

use serde::Deserialize;

use crate::atmosphere::RainRateSamplerConfig;
use crate::augment::{ExtinctionMode, SensorConfig, WeatherCondition};
use crate::error::{Error, Result};
use crate::psd::{ExponentialPsdParams, GammaPsd, MarshallPalmerPsd, MonodispersePsd, Psd};
use crate::scattering::ComplexIndex;

/// The shipped preset file.
pub const DEFAULT_PRESETS: &str = include_str!("../presets/weather.toml");

/// Environment variable naming a preset file to use instead of the shipped one.
pub const CONFIG_ENV: &str = "LISA_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtinctionKind {
    Mie,
    Asymptotic,
    Fixed,
}

fn extinction_mode(kind: ExtinctionKind, alpha: Option<f64>, what: &str) -> Result<ExtinctionMode> {
    match (kind, alpha) {
        (ExtinctionKind::Mie, None) => Ok(ExtinctionMode::Mie),
        (ExtinctionKind::Asymptotic, None) => Ok(ExtinctionMode::Asymptotic),
        (ExtinctionKind::Fixed, Some(a)) => Ok(ExtinctionMode::Fixed(a)),
        (ExtinctionKind::Fixed, None) => Err(Error::Config(format!("{what}: extinction = \"fixed\" needs `alpha`"))),
        (_, Some(_)) => Err(Error::Config(format!("{what}: `alpha` is only valid with extinction = \"fixed\""))),
    }
}

/// Size distribution as written in the preset file. Diameters in mm.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsdSpec {
    MarshallPalmer {
        /// Precipitation rate, mm/hr.
        rate: f64,
        n0_coef: f64,
        #[serde(default)]
        n0_exp: f64,
        lambda_coef: f64,
        lambda_exp: f64,
    },
    Gamma {
        n0: f64,
        a: f64,
        gamma: f64,
        d_mode: f64,
    },
    Monodisperse {
        diameter: f64,
        number_density: f64,
    },
}

impl PsdSpec {
    pub fn build(&self) -> Result<Psd> {
        Ok(match *self {
            PsdSpec::MarshallPalmer {
                rate,
                n0_coef,
                n0_exp,
                lambda_coef,
                lambda_exp,
            } => {
                let params = ExponentialPsdParams {
                    n0_coef,
                    n0_exp,
                    lambda_coef,
                    lambda_exp,
                };
                MarshallPalmerPsd::from_rate(params, rate)?.into()
            }
            PsdSpec::Gamma { n0, a, gamma, d_mode } => GammaPsd::new(n0, a, gamma, d_mode)?.into(),
            PsdSpec::Monodisperse {
                diameter,
                number_density,
            } => MonodispersePsd {
                diameter,
                number_density,
            }
            .into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: String,
    pub psd: PsdSpec,
    pub refractive_index: ComplexIndex,
    pub extinction: ExtinctionKind,
    #[serde(default)]
    pub alpha: Option<f64>,
}

/// Parameters for rain given only a rain rate.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RainSpec {
    pub n0_coef: f64,
    #[serde(default)]
    pub n0_exp: f64,
    pub lambda_coef: f64,
    pub lambda_exp: f64,
    pub refractive_index: ComplexIndex,
    pub extinction: ExtinctionKind,
}

impl Default for RainSpec {
    fn default() -> Self {
        let p = ExponentialPsdParams::RAIN;
        RainSpec {
            n0_coef: p.n0_coef,
            n0_exp: p.n0_exp,
            lambda_coef: p.lambda_coef,
            lambda_exp: p.lambda_exp,
            refractive_index: ComplexIndex::WATER_905NM,
            extinction: ExtinctionKind::Mie,
        }
    }
}

impl RainSpec {
    pub fn params(&self) -> ExponentialPsdParams {
        ExponentialPsdParams {
            n0_coef: self.n0_coef,
            n0_exp: self.n0_exp,
            lambda_coef: self.lambda_coef,
            lambda_exp: self.lambda_exp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeatherConfig {
    #[serde(default)]
    pub sensor: Option<SensorConfig>,
    #[serde(default)]
    pub rain: RainSpec,
    #[serde(default)]
    pub rain_rate_sampler: RainRateSamplerConfig,
    #[serde(default, rename = "preset")]
    pub presets: Vec<PresetSpec>,
}

impl WeatherConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: WeatherConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The shipped presets.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_PRESETS).expect("shipped preset file is valid")
    }

    fn validate(&self) -> Result<()> {
        if let Some(s) = &self.sensor {
            s.validate()?;
        }
        RainRateSamplerConfig::new(self.rain_rate_sampler.rate)?;
        self.rain.refractive_index.validate()?;
        extinction_mode(self.rain.extinction, None, "rain")?;
        for (i, p) in self.presets.iter().enumerate() {
            if self.presets[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::Config(format!("duplicate preset {:?}", p.name)));
            }
            p.psd.build()?;
            p.refractive_index.validate()?;
            extinction_mode(p.extinction, p.alpha, &p.name)?;
        }
        Ok(())
    }

    pub fn preset_names(&self) -> impl Iterator<Item = &str> {
        self.presets.iter().map(|p| p.name.as_str())
    }

    pub fn preset(&self, name: &str, wavelength: f64) -> Result<WeatherCondition> {
        let p = self
            .presets
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| {
                let known: Vec<_> = self.preset_names().collect();
                Error::Config(format!("unknown weather preset {name:?} (known: {})", known.join(", ")))
            })?;
        WeatherCondition::with_extinction(
            p.name.clone(),
            p.psd.build()?,
            p.refractive_index,
            extinction_mode(p.extinction, p.alpha, &p.name)?,
            wavelength,
        )
    }

    pub fn rain(&self, rain_rate: f64, wavelength: f64) -> Result<WeatherCondition> {
        WeatherCondition::precipitation(
            format!("rain {rain_rate} mm/hr"),
            self.rain.params(),
            rain_rate,
            self.rain.refractive_index,
            extinction_mode(self.rain.extinction, None, "rain")?,
            wavelength,
        )
    }
}
