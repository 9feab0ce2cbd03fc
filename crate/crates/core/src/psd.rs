//! Particle size distributions `N(D)`.
//!
//! Diameters are in millimetres and densities in m^-3 mm^-1 throughout this
//! module. Conversion to SI lengths happens in the callers that need it
//! (extinction integration and beam occlusion).

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature;

/// Power-law coefficients mapping a precipitation rate `R` (mm/hr) to
/// exponential size-distribution parameters:
/// `n0 = n0_coef * R^n0_exp`, `lambda = lambda_coef * R^lambda_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialPsdParams {
    pub n0_coef: f64,
    #[serde(default)]
    pub n0_exp: f64,
    pub lambda_coef: f64,
    pub lambda_exp: f64,
}

impl ExponentialPsdParams {
    /// Marshall-Palmer raindrops.
    pub const RAIN: ExponentialPsdParams = ExponentialPsdParams {
        n0_coef: 8000.0,
        n0_exp: 0.0,
        lambda_coef: 4.1,
        lambda_exp: -0.21,
    };

    /// Gunn-Marshall snow (melted-equivalent precipitation rate).
    pub const SNOW: ExponentialPsdParams = ExponentialPsdParams {
        n0_coef: 3800.0,
        n0_exp: -0.87,
        lambda_coef: 2.55,
        lambda_exp: -0.48,
    };
}

impl Default for ExponentialPsdParams {
    fn default() -> Self {
        Self::RAIN
    }
}

/// Exponential (Marshall-Palmer type) distribution `N(D) = n0 exp(-lambda D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarshallPalmerPsd {
    /// Intercept, m^-3 mm^-1. Zero for an empty distribution.
    pub n0: f64,
    /// Decay constant, mm^-1. Infinite for an empty distribution.
    pub lambda: f64,
    /// Precipitation rate the parameters were generated from, mm/hr.
    pub rain_rate: f64,
}

impl MarshallPalmerPsd {
    pub fn from_rain_rate(rain_rate: f64) -> Result<Self> {
        Self::from_rate(ExponentialPsdParams::RAIN, rain_rate)
    }

    pub fn from_rate(params: ExponentialPsdParams, rate: f64) -> Result<Self> {
        ensure_finite("precipitation rate", rate)?;
        if rate < 0.0 {
            return Err(Error::invalid(format!("precipitation rate must be >= 0, got {rate}")));
        }
        if rate == 0.0 {
            return Ok(MarshallPalmerPsd {
                n0: 0.0,
                lambda: f64::INFINITY,
                rain_rate: 0.0,
            });
        }
        let n0 = params.n0_coef * rate.powf(params.n0_exp);
        let lambda = params.lambda_coef * rate.powf(params.lambda_exp);
        Self::new(n0, lambda, rate)
    }

    pub fn new(n0: f64, lambda: f64, rain_rate: f64) -> Result<Self> {
        ensure_finite("n0", n0)?;
        ensure_finite("lambda", lambda)?;
        if n0 <= 0.0 || lambda <= 0.0 {
            return Err(Error::invalid(format!(
                "exponential PSD needs n0 > 0 and lambda > 0, got n0={n0}, lambda={lambda}"
            )));
        }
        Ok(MarshallPalmerPsd { n0, lambda, rain_rate })
    }

    pub fn is_empty(&self) -> bool {
        self.n0 == 0.0
    }

    pub fn density(&self, d: f64) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.n0 * (-self.lambda * d).exp()
        }
    }

    pub fn tail_count(&self, d_start: f64) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.n0 / self.lambda * (-self.lambda * d_start).exp()
        }
    }
}

/// Modified Gamma distribution
/// `N(D) = gamma n0 b^((a+1)/gamma) / Gamma((a+1)/gamma) (D/2)^a exp(-b (D/2)^gamma)`.
///
/// The normalisation is per unit radius, so `N(D)` integrated over diameter
/// equals `2 n0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPsd {
    pub n0: f64,
    pub a: f64,
    pub gamma: f64,
    /// Mode diameter, mm.
    pub d_mode: f64,
    /// Rate parameter, mm^-gamma; fixed by the mode diameter.
    pub b: f64,
    log_norm: f64,
}

impl GammaPsd {
    pub fn new(n0: f64, a: f64, gamma: f64, d_mode: f64) -> Result<Self> {
        for (name, v) in [("n0", n0), ("a", a), ("gamma", gamma), ("d_mode", d_mode)] {
            ensure_finite(name, v)?;
        }
        if n0 < 0.0 || a <= 0.0 || gamma <= 0.0 || d_mode <= 0.0 {
            return Err(Error::invalid(format!(
                "gamma PSD needs n0 >= 0 and a, gamma, d_mode > 0 \
                 (n0={n0}, a={a}, gamma={gamma}, d_mode={d_mode})"
            )));
        }
        let b = Self::rate_for_mode(a, gamma, d_mode);
        let k = (a + 1.0) / gamma;
        let log_norm = gamma.ln() + k * b.ln() - libm::lgamma(k);
        Ok(GammaPsd {
            n0,
            a,
            gamma,
            d_mode,
            b,
            log_norm,
        })
    }

    /// `b = a / (gamma (D_c / 2)^gamma)`.
    pub fn rate_for_mode(a: f64, gamma: f64, d_mode: f64) -> f64 {
        a / (gamma * (d_mode / 2.0).powf(gamma))
    }

    pub fn density(&self, d: f64) -> f64 {
        if d <= 0.0 || self.n0 == 0.0 {
            return 0.0;
        }
        let r = d / 2.0;
        self.n0 * (self.log_norm + self.a * r.ln() - self.b * r.powf(self.gamma)).exp()
    }

    /// Analytic total, `2 n0`.
    pub fn total(&self) -> f64 {
        2.0 * self.n0
    }

    pub fn tail_count(&self, d_start: f64) -> f64 {
        let total = self.total();
        if total == 0.0 {
            return 0.0;
        }
        let tol = 1e-9 * total;
        // Split at a few modes so the adaptive rule sees the peak.
        let split = d_start.max(0.0).max(4.0 * self.d_mode);
        let (head, _) = if split > d_start {
            quadrature::adaptive(|d| self.density(d), d_start.max(0.0), split, 0.5 * tol)
        } else {
            (0.0, 0.0)
        };
        let (tail, _) = quadrature::adaptive_to_infinity(|d| self.density(d), split, 0.5 * tol);
        (head + tail).max(0.0)
    }
}

/// A single-size particle population (Dirac measure at `diameter`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodispersePsd {
    /// mm
    pub diameter: f64,
    /// m^-3
    pub number_density: f64,
}

/// Any supported particle size distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psd {
    MarshallPalmer(MarshallPalmerPsd),
    Gamma(GammaPsd),
    Monodisperse(MonodispersePsd),
}

impl From<MarshallPalmerPsd> for Psd {
    fn from(p: MarshallPalmerPsd) -> Self {
        Psd::MarshallPalmer(p)
    }
}

impl From<GammaPsd> for Psd {
    fn from(p: GammaPsd) -> Self {
        Psd::Gamma(p)
    }
}

impl From<MonodispersePsd> for Psd {
    fn from(p: MonodispersePsd) -> Self {
        Psd::Monodisperse(p)
    }
}

impl Psd {
    pub fn is_empty(&self) -> bool {
        match self {
            Psd::MarshallPalmer(p) => p.is_empty(),
            Psd::Gamma(p) => p.n0 == 0.0,
            Psd::Monodisperse(p) => p.number_density == 0.0,
        }
    }
}

/// `N(d)` in m^-3 mm^-1 for `d` in mm. A monodisperse population has no
/// density function; it reports infinity at its diameter and zero elsewhere.
pub fn evaluate_density(psd: &Psd, d: f64) -> Result<f64> {
    ensure_finite("diameter", d)?;
    if d < 0.0 {
        return Err(Error::invalid(format!("diameter must be >= 0, got {d}")));
    }
    Ok(match psd {
        Psd::MarshallPalmer(p) => p.density(d),
        Psd::Gamma(p) => p.density(d),
        Psd::Monodisperse(p) => {
            if d == p.diameter && p.number_density > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
    })
}

/// Number of particles per m^3 with diameter at least `d_start` mm.
pub fn tail_count(psd: &Psd, d_start: f64) -> Result<f64> {
    ensure_finite("d_start", d_start)?;
    if d_start < 0.0 {
        return Err(Error::invalid(format!("d_start must be >= 0, got {d_start}")));
    }
    Ok(match psd {
        Psd::MarshallPalmer(p) => p.tail_count(d_start),
        Psd::Gamma(p) => p.tail_count(d_start),
        Psd::Monodisperse(p) => {
            if p.diameter >= d_start {
                p.number_density
            } else {
                0.0
            }
        }
    })
}

/// Truncated-exponential diameter draw above `d_start` for uniform `u` in [0, 1).
pub fn sample_diameter(psd: &MarshallPalmerPsd, d_start: f64, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::invalid(format!("uniform variate must lie in [0, 1), got {u}")));
    }
    Ok(sample_diameter_unchecked(psd.lambda, d_start, u))
}

#[inline]
pub(crate) fn sample_diameter_unchecked(lambda: f64, d_start: f64, u: f64) -> f64 {
    -(-u).ln_1p() / lambda + d_start
}
