//! Extinction coefficients, Beer-Lambert attenuation and rain-rate sampling.

use std::collections::HashMap;
use std::f64::consts::{LN_10, PI};
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::psd::Psd;
use crate::quadrature;
use crate::scattering::{mie_efficiencies, ComplexIndex, SizeParameter};

/// Smallest diameter included in the extinction integral, mm.
pub const EXTINCTION_D_MIN_MM: f64 = 1e-3;
/// Largest diameter included in the extinction integral, mm.
pub const EXTINCTION_D_MAX_MM: f64 = 8.0;
/// Interval count of the coarsest extinction grid.
pub const BASE_INTERVALS: usize = 512;
/// Relative change tolerated between successive grid refinements.
pub const REFINEMENT_TOLERANCE: f64 = 1e-3;
const MAX_REFINEMENTS: usize = 2;

/// dB/km to Napierian m^-1.
pub const DB_PER_KM_TO_NEPER_PER_M: f64 = LN_10 / 10.0 / 1000.0;

/// Napierian one-way intensity extinction coefficient, m^-1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct ExtinctionCoefficient(f64);

impl ExtinctionCoefficient {
    pub const ZERO: ExtinctionCoefficient = ExtinctionCoefficient(0.0);

    pub fn new(alpha: f64) -> Result<Self> {
        ensure_finite("extinction coefficient", alpha)?;
        if alpha < 0.0 {
            return Err(Error::invalid(format!("extinction coefficient must be >= 0, got {alpha}")));
        }
        Ok(ExtinctionCoefficient(alpha))
    }

    pub fn per_meter(self) -> f64 {
        self.0
    }

    pub fn db_per_km(self) -> f64 {
        self.0 / DB_PER_KM_TO_NEPER_PER_M
    }
}

/// Extinction efficiencies tabulated on nested log-spaced diameter grids
/// for one wavelength and refractive index. Level `k` has
/// `BASE_INTERVALS * 2^k` intervals; its even nodes are the nodes of level
/// `k - 1`.
struct ExtinctionTable {
    wavelength: f64,
    index: ComplexIndex,
    levels: [OnceLock<Vec<f64>>; MAX_REFINEMENTS + 1],
}

impl ExtinctionTable {
    fn new(wavelength: f64, index: ComplexIndex) -> Self {
        ExtinctionTable {
            wavelength,
            index,
            levels: Default::default(),
        }
    }

    fn q_ext_mm(&self, d_mm: f64) -> f64 {
        let x = SizeParameter::from_diameter(d_mm * 1e-3, self.wavelength)
            .expect("grid diameters are within the supported size range");
        mie_efficiencies(self.index, x)
            .expect("refractive index validated on entry")
            .q_ext
    }

    fn q_ext_level(&self, level: usize) -> &[f64] {
        self.levels[level].get_or_init(|| {
            let n = BASE_INTERVALS << level;
            let nodes = quadrature::log_nodes(EXTINCTION_D_MIN_MM, EXTINCTION_D_MAX_MM, n);
            if level == 0 {
                return nodes.par_iter().map(|&d| self.q_ext_mm(d)).collect();
            }
            let coarse = self.q_ext_level(level - 1);
            let odd: Vec<f64> = nodes
                .par_iter()
                .skip(1)
                .step_by(2)
                .map(|&d| self.q_ext_mm(d))
                .collect();
            (0..=n)
                .map(|i| if i % 2 == 0 { coarse[i / 2] } else { odd[i / 2] })
                .collect()
        })
    }

    /// `(pi/4) int D^2 Q_ext(D) N(D) dD` in m^-1 on grid `level`.
    fn integrate(&self, psd: &Psd, level: usize) -> f64 {
        let n = BASE_INTERVALS << level;
        let q = self.q_ext_level(level);
        let nodes = quadrature::log_nodes(EXTINCTION_D_MIN_MM, EXTINCTION_D_MAX_MM, n);
        let h = (EXTINCTION_D_MAX_MM / EXTINCTION_D_MIN_MM).ln() / n as f64;
        let weights = quadrature::simpson_weights(n, h);
        let density = |d: f64| match psd {
            Psd::MarshallPalmer(p) => p.density(d),
            Psd::Gamma(p) => p.density(d),
            Psd::Monodisperse(_) => 0.0,
        };
        // dD = D du on the log grid
        let sum: f64 = nodes
            .iter()
            .zip(&weights)
            .zip(q)
            .map(|((&d, &w), &q)| w * d * d * d * q * density(d))
            .sum();
        PI / 4.0 * sum * 1e-6
    }
}

type TableKey = (u64, u64, u64);

fn table_for(wavelength: f64, index: ComplexIndex) -> Arc<ExtinctionTable> {
    static CACHE: OnceLock<RwLock<HashMap<TableKey, Arc<ExtinctionTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (wavelength.to_bits(), index.re.to_bits(), index.im.to_bits());
    if let Some(t) = cache.read().expect("extinction cache poisoned").get(&key) {
        return Arc::clone(t);
    }
    let mut w = cache.write().expect("extinction cache poisoned");
    Arc::clone(
        w.entry(key)
            .or_insert_with(|| Arc::new(ExtinctionTable::new(wavelength, index))),
    )
}

/// Extinction coefficient of a particle population at `wavelength` (m).
///
/// The integral runs over diameters in
/// [`EXTINCTION_D_MIN_MM`, `EXTINCTION_D_MAX_MM`] with composite Simpson on a
/// log grid of 512 intervals, refined by doubling until successive estimates
/// agree to [`REFINEMENT_TOLERANCE`]. Efficiencies are cached per
/// (wavelength, index).
pub fn extinction_from_psd(
    psd: &Psd,
    wavelength: f64,
    refractive_index: ComplexIndex,
) -> Result<ExtinctionCoefficient> {
    ensure_finite("wavelength", wavelength)?;
    if wavelength <= 0.0 {
        return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
    }
    refractive_index.validate()?;
    if psd.is_empty() {
        return Ok(ExtinctionCoefficient::ZERO);
    }
    if let Psd::Monodisperse(p) = psd {
        let d_m = p.diameter * 1e-3;
        let q = mie_efficiencies(refractive_index, SizeParameter::from_diameter(d_m, wavelength)?)?;
        return ExtinctionCoefficient::new(PI / 4.0 * d_m * d_m * q.q_ext * p.number_density);
    }

    let table = table_for(wavelength, refractive_index);
    let mut prev = table.integrate(psd, 0);
    let mut change = f64::INFINITY;
    for level in 1..=MAX_REFINEMENTS {
        let next = table.integrate(psd, level);
        change = if next == 0.0 { 0.0 } else { ((next - prev) / next).abs() };
        if change <= REFINEMENT_TOLERANCE {
            return ExtinctionCoefficient::new(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        value: prev,
        relative_change: change,
        coarse_nodes: (BASE_INTERVALS << (MAX_REFINEMENTS - 1)) + 1,
        fine_nodes: (BASE_INTERVALS << MAX_REFINEMENTS) + 1,
    })
}

/// Empirical rain extinction `1.45 R^0.64` dB/km, converted to Napierian m^-1.
pub fn asymptotic_rain_extinction(rain_rate: f64) -> Result<ExtinctionCoefficient> {
    ensure_finite("rain rate", rain_rate)?;
    if rain_rate < 0.0 {
        return Err(Error::invalid(format!("rain rate must be >= 0, got {rain_rate}")));
    }
    ExtinctionCoefficient::new(1.45 * rain_rate.powf(0.64) * DB_PER_KM_TO_NEPER_PER_M)
}

/// One-way Beer-Lambert transmittance over `range` metres. Two-way
/// attenuation is `transmittance(alpha, 2 * range)`.
#[inline]
pub fn transmittance(alpha: ExtinctionCoefficient, range: f64) -> f64 {
    (-alpha.0 * range).exp()
}

/// Exponential rain-rate distribution used to pick per-scan weather.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainRateSamplerConfig {
    /// Rate parameter, (mm/hr)^-1.
    pub rate: f64,
}

impl Default for RainRateSamplerConfig {
    fn default() -> Self {
        RainRateSamplerConfig { rate: 0.05 }
    }
}

impl RainRateSamplerConfig {
    pub fn new(rate: f64) -> Result<Self> {
        ensure_finite("sampler rate", rate)?;
        if rate <= 0.0 {
            return Err(Error::invalid(format!("sampler rate must be > 0, got {rate}")));
        }
        Ok(RainRateSamplerConfig { rate })
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }
}

/// Inverse-CDF draw from the exponential rain-rate distribution.
pub fn sample_rain_rate(cfg: &RainRateSamplerConfig, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::invalid(format!("uniform variate must lie in [0, 1), got {u}")));
    }
    Ok(-(-u).ln_1p() / cfg.rate)
}
