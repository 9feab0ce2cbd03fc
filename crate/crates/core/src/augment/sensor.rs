use serde::{Deserialize, Serialize};

use crate::atmosphere::ExtinctionCoefficient;
use crate::error::{ensure_finite, Error, Result};
use crate::psd::{self, Psd};

/// Lidar hardware parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorConfig {
    /// Maximum range, m.
    pub r_max: f64,
    /// Minimum range (bistatic blind zone), m.
    pub r_min: f64,
    /// Full beam divergence angle, rad.
    pub divergence: f64,
    /// Range accuracy, m.
    pub range_accuracy: f64,
    /// Laser wavelength, m.
    pub wavelength: f64,
    /// Smallest particle placed by the Monte-Carlo step, mm.
    pub d_start: f64,
}

impl Default for SensorConfig {
    /// Velodyne HDL-64E-like sensor.
    fn default() -> Self {
        SensorConfig {
            r_max: 120.0,
            r_min: 0.9,
            divergence: 3e-3,
            range_accuracy: 0.09,
            wavelength: 905e-9,
            d_start: 0.05,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_max", self.r_max),
            ("r_min", self.r_min),
            ("divergence", self.divergence),
            ("range_accuracy", self.range_accuracy),
            ("wavelength", self.wavelength),
            ("d_start", self.d_start),
        ] {
            ensure_finite(name, v)?;
        }
        if !(self.r_max > self.r_min && self.r_min >= 0.0) {
            return Err(Error::invalid(format!(
                "need r_max > r_min >= 0 (r_max={}, r_min={})",
                self.r_max, self.r_min
            )));
        }
        if self.divergence <= 0.0 || self.divergence >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::invalid(format!("divergence must lie in (0, pi/2), got {}", self.divergence)));
        }
        if self.range_accuracy < 0.0 {
            return Err(Error::invalid(format!("range_accuracy must be >= 0, got {}", self.range_accuracy)));
        }
        if self.wavelength <= 0.0 {
            return Err(Error::invalid(format!("wavelength must be > 0, got {}", self.wavelength)));
        }
        if self.d_start <= 0.0 {
            return Err(Error::invalid(format!("d_start must be > 0, got {}", self.d_start)));
        }
        Ok(())
    }
}

/// Minimum detectable range-corrected power: a 0.9-reflectivity target at
/// maximum range, in arbitrary units.
pub fn min_detectable_power(sensor: &SensorConfig) -> f64 {
    0.9 / (sensor.r_max * sensor.r_max)
}

/// Beam diameter at `range`, m.
pub fn beam_diameter(range: f64, sensor: &SensorConfig) -> f64 {
    range * sensor.divergence.tan()
}

/// Volume of the beam cone out to `range`, m^3.
pub fn beam_volume(range: f64, sensor: &SensorConfig) -> f64 {
    let radius = 0.5 * beam_diameter(range, sensor);
    std::f64::consts::PI / 3.0 * range * radius * radius
}

/// Mean number of particles larger than `sensor.d_start` inside the beam
/// cone up to `range`. Zero inside the blind zone.
pub fn expected_scatterer_count(range: f64, psd: &Psd, sensor: &SensorConfig) -> Result<f64> {
    if range <= sensor.r_min {
        return Ok(0.0);
    }
    Ok(beam_volume(range, sensor) * psd::tail_count(psd, sensor.d_start)?)
}

/// Stochastic rounding: `floor(n) + 1` with probability `frac(n)`.
#[inline]
pub fn probabilistic_round(n: f64, u: f64) -> u64 {
    let base = n.floor();
    let extra = u < n - base;
    base as u64 + extra as u64
}

/// Inverse-CDF draw of a scatterer range on `[0, target_range]` with
/// density proportional to `R^2`.
#[inline]
pub fn sample_scatterer_range(target_range: f64, u: f64) -> f64 {
    target_range * u.cbrt()
}

/// Fraction of the beam cross-section intercepted by a droplet:
/// `min{(D / Db)^2, 1}`, `diameter_mm` in mm and `beam_diameter_m` in m.
#[inline]
pub fn occlusion_factor(diameter_mm: f64, beam_diameter_m: f64) -> f64 {
    if beam_diameter_m <= 0.0 {
        return 1.0;
    }
    let ratio = diameter_mm * 1e-3 / beam_diameter_m;
    (ratio * ratio).min(1.0)
}

/// Power returned by a single droplet at `range` (m) with Fresnel
/// `reflectivity` and `diameter` (mm).
pub fn scatterer_received_power(
    range: f64,
    reflectivity: f64,
    diameter: f64,
    alpha: ExtinctionCoefficient,
    sensor: &SensorConfig,
) -> f64 {
    let occ = occlusion_factor(diameter, beam_diameter(range, sensor));
    reflectivity * (-2.0 * alpha.per_meter() * range).exp() / (range * range) * occ
}

/// Power returned by the original target.
pub fn target_received_power(reflectivity: f64, range: f64, alpha: ExtinctionCoefficient) -> Result<f64> {
    ensure_finite("range", range)?;
    if range <= 0.0 {
        return Err(Error::invalid(format!("target range must be > 0, got {range}")));
    }
    Ok(reflectivity * (-2.0 * alpha.per_meter() * range).exp() / (range * range))
}

/// Range noise standard deviation `dR / sqrt(2 snr)`.
pub fn range_sigma(snr: f64, sensor: &SensorConfig) -> Result<f64> {
    if snr.is_nan() || snr <= 0.0 {
        return Err(Error::invalid(format!("snr must be > 0, got {snr}")));
    }
    Ok(sensor.range_accuracy / (2.0 * snr).sqrt())
}
