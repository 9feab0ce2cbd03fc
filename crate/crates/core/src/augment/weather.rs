use serde::{Deserialize, Serialize};

use crate::atmosphere::{asymptotic_rain_extinction, extinction_from_psd, ExtinctionCoefficient};
use crate::error::{Error, Result};
use crate::psd::{ExponentialPsdParams, MarshallPalmerPsd, Psd};
use crate::scattering::{fresnel_reflectivity, ComplexIndex};

/// How a weather condition obtains its extinction coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtinctionMode {
    /// Integrate Mie efficiencies against the size distribution.
    Mie,
    /// Empirical rain law (exponential distributions only).
    Asymptotic,
    /// Use a given coefficient, m^-1.
    Fixed(f64),
}

/// An atmospheric state: who scatters, how much light it removes and how
/// bright a single particle is.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherCondition {
    pub name: String,
    pub psd: Psd,
    pub refractive_index: ComplexIndex,
    pub alpha: ExtinctionCoefficient,
    /// Normal-incidence reflectivity of a single particle.
    pub particle_reflectivity: f64,
}

impl WeatherCondition {
    pub fn new(
        name: impl Into<String>,
        psd: Psd,
        refractive_index: ComplexIndex,
        alpha: ExtinctionCoefficient,
    ) -> Result<Self> {
        refractive_index.validate()?;
        Ok(WeatherCondition {
            name: name.into(),
            psd,
            refractive_index,
            alpha,
            particle_reflectivity: fresnel_reflectivity(refractive_index)?,
        })
    }

    pub fn with_extinction(
        name: impl Into<String>,
        psd: Psd,
        refractive_index: ComplexIndex,
        mode: ExtinctionMode,
        wavelength: f64,
    ) -> Result<Self> {
        let alpha = match mode {
            ExtinctionMode::Mie => extinction_from_psd(&psd, wavelength, refractive_index)?,
            ExtinctionMode::Asymptotic => match psd {
                Psd::MarshallPalmer(p) => asymptotic_rain_extinction(p.rain_rate)?,
                _ => {
                    return Err(Error::invalid(
                        "asymptotic extinction is only defined for rain (exponential PSD)",
                    ))
                }
            },
            ExtinctionMode::Fixed(a) => ExtinctionCoefficient::new(a)?,
        };
        Self::new(name, psd, refractive_index, alpha)
    }

    /// Marshall-Palmer rain at `rain_rate` mm/hr with Mie extinction.
    pub fn rain(rain_rate: f64, wavelength: f64) -> Result<Self> {
        Self::precipitation(
            format!("rain {rain_rate} mm/hr"),
            ExponentialPsdParams::RAIN,
            rain_rate,
            ComplexIndex::WATER_905NM,
            ExtinctionMode::Mie,
            wavelength,
        )
    }

    pub fn precipitation(
        name: impl Into<String>,
        params: ExponentialPsdParams,
        rate: f64,
        refractive_index: ComplexIndex,
        mode: ExtinctionMode,
        wavelength: f64,
    ) -> Result<Self> {
        let psd = Psd::from(MarshallPalmerPsd::from_rate(params, rate)?);
        Self::with_extinction(name, psd, refractive_index, mode, wavelength)
    }

    /// Rain rate (or melted precipitation rate) behind an exponential PSD.
    pub fn precipitation_rate(&self) -> Option<f64> {
        match self.psd {
            Psd::MarshallPalmer(p) => Some(p.rain_rate),
            _ => None,
        }
    }
}
