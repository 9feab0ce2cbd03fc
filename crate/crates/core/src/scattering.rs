//! Mie efficiencies for homogeneous spheres and normal-incidence Fresnel
//! reflectivity.
//!
//! The Mie series follows the Bohren & Huffman formulation: the logarithmic
//! derivative `D_n(mx)` is obtained by downward recurrence seeded with a
//! continued-fraction value (Lentz), the Riccati-Bessel
//! functions `psi_n(x)` and `chi_n(x)` by upward recurrence, and the series is
//! truncated with Wiscombe's stopping rule.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Largest size parameter accepted by [`mie_efficiencies`].
pub const MAX_SIZE_PARAMETER: f64 = 1e5;

/// Extra orders used to seed the downward log-derivative recurrence.
const RECURRENCE_PAD: usize = 15;

/// `D_n(z)` from the continued fraction for `J_{n-1/2}(z) / J_{n+1/2}(z)`.
///
/// A zero seed is only accurate far above `|z|` for weakly absorbing
/// spheres; the exact seed makes the short pad sufficient.
fn log_derivative_seed(n: usize, z: Complex64) -> Complex64 {
    const FLOOR: f64 = 1e-300;
    let zi = z.inv();
    let nu = n as f64 + 0.5;
    let partial = |k: usize| {
        let s = if k.is_multiple_of(2) { -2.0 } else { 2.0 };
        zi * (s * (nu + k as f64 - 1.0))
    };
    let guard = |v: Complex64| if v.norm() < FLOOR { Complex64::new(FLOOR, 0.0) } else { v };
    let mut f = guard(partial(1));
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    let limit = 100 + 4 * (n + z.norm() as usize);
    for k in 2..limit {
        let a = partial(k);
        d = guard(a + d).inv();
        c = guard(a + c.inv());
        let step = c * d;
        f *= step;
        if (step - 1.0).norm() < 1e-15 {
            break;
        }
    }
    f - zi * n as f64
}

/// Complex refractive index of a scatterer relative to the surrounding medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexIndex {
    pub re: f64,
    pub im: f64,
}

impl ComplexIndex {
    /// Liquid water near 905 nm.
    pub const WATER_905NM: ComplexIndex = ComplexIndex { re: 1.328, im: 4.9e-7 };
    /// Ice near 905 nm.
    pub const ICE_905NM: ComplexIndex = ComplexIndex { re: 1.30, im: 2.9e-6 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        let m = ComplexIndex { re, im };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("refractive index (real)", self.re)?;
        ensure_finite("refractive index (imag)", self.im)?;
        if self.re < 1.0 {
            return Err(Error::invalid(format!(
                "refractive index real part must be >= 1, got {}",
                self.re
            )));
        }
        if self.im < 0.0 {
            return Err(Error::invalid(format!(
                "refractive index imaginary part must be >= 0, got {}",
                self.im
            )));
        }
        Ok(())
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Dimensionless size parameter `pi * D / lambda`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SizeParameter(f64);

impl SizeParameter {
    pub fn new(x: f64) -> Result<Self> {
        ensure_finite("size parameter", x)?;
        if x <= 0.0 {
            return Err(Error::invalid(format!("size parameter must be > 0, got {x}")));
        }
        if x > MAX_SIZE_PARAMETER {
            return Err(Error::OutOfRange(format!(
                "size parameter {x:.3e} exceeds {MAX_SIZE_PARAMETER:.0e}"
            )));
        }
        Ok(SizeParameter(x))
    }

    /// Size parameter of a sphere with `diameter` at `wavelength` (same length unit).
    pub fn from_diameter(diameter: f64, wavelength: f64) -> Result<Self> {
        ensure_finite("wavelength", wavelength)?;
        if wavelength <= 0.0 {
            return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
        }
        Self::new(std::f64::consts::PI * diameter / wavelength)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Extinction, scattering and backscattering efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieEfficiencies {
    pub q_ext: f64,
    pub q_sca: f64,
    pub q_back: f64,
}

impl MieEfficiencies {
    pub fn q_abs(&self) -> f64 {
        self.q_ext - self.q_sca
    }
}

/// Number of series terms for size parameter `x` (Wiscombe).
pub fn series_terms(x: f64) -> usize {
    (x + 4.0 * x.cbrt() + 2.0).ceil() as usize
}

/// Mie efficiencies of a homogeneous sphere.
pub fn mie_efficiencies(m: ComplexIndex, x: SizeParameter) -> Result<MieEfficiencies> {
    m.validate()?;
    let x = x.value();
    let mc = m.to_complex();
    let y = mc * x;
    let nstop = series_terms(x);

    // D_n(mx) for n = 0..=nstop, recurring down from above both the
    // truncation order and |mx|.
    let nmx = nstop.max(y.norm().ceil() as usize) + RECURRENCE_PAD;
    let mut log_deriv = vec![Complex64::new(0.0, 0.0); nstop + 1];
    let mut d = log_derivative_seed(nmx, y);
    for n in (1..=nmx).rev() {
        let rn = Complex64::new(n as f64, 0.0) / y;
        d = rn - (d + rn).inv();
        if n - 1 <= nstop {
            log_deriv[n - 1] = d;
        }
    }

    let (sin_x, cos_x) = x.sin_cos();
    let mut psi_prev = cos_x; // psi_{-1}
    let mut psi = sin_x; // psi_0
    let mut chi_prev = -sin_x; // chi_{-1}
    let mut chi = cos_x; // chi_0
    let mut xi = Complex64::new(psi, -chi);

    let mut ext_sum = 0.0;
    let mut sca_sum = 0.0;
    let mut back_sum = Complex64::new(0.0, 0.0);
    let mut sign = -1.0;

    for (n, &dn) in log_deriv.iter().enumerate().skip(1) {
        let nf = n as f64;
        let two_n1 = 2.0 * nf + 1.0;

        let psi_n = (2.0 * nf - 1.0) * psi / x - psi_prev;
        let chi_n = (2.0 * nf - 1.0) * chi / x - chi_prev;
        let xi_prev = xi;
        let xi_n = Complex64::new(psi_n, -chi_n);

        let ta = dn / mc + nf / x;
        let tb = dn * mc + nf / x;
        let an = (ta * psi_n - psi) / (ta * xi_n - xi_prev);
        let bn = (tb * psi_n - psi) / (tb * xi_n - xi_prev);

        ext_sum += two_n1 * (an.re + bn.re);
        sca_sum += two_n1 * (an.norm_sqr() + bn.norm_sqr());
        back_sum += two_n1 * sign * (an - bn);
        sign = -sign;

        psi_prev = psi;
        psi = psi_n;
        chi_prev = chi;
        chi = chi_n;
        xi = xi_n;
    }

    let x2 = x * x;
    let q_ext = (2.0 / x2 * ext_sum).max(0.0);
    // Absorption is never negative; rounding can push q_sca a hair above
    // q_ext for non-absorbing spheres.
    let q_sca = (2.0 / x2 * sca_sum).clamp(0.0, q_ext);
    let q_back = back_sum.norm_sqr() / x2;
    Ok(MieEfficiencies { q_ext, q_sca, q_back })
}

/// Normal-incidence Fresnel reflectivity `|(n - 1) / (n + 1)|^2`.
pub fn fresnel_reflectivity(m: ComplexIndex) -> Result<f64> {
    ensure_finite("refractive index (real)", m.re)?;
    ensure_finite("refractive index (imag)", m.im)?;
    let n = m.to_complex();
    let r = ((n - 1.0) / (n + 1.0)).norm_sqr();
    Ok(r.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(re: f64, im: f64) -> ComplexIndex {
        ComplexIndex::new(re, im).unwrap()
    }

    #[test]
    fn vanishing_particle() {
        let q = mie_efficiencies(idx(1.33, 0.0), SizeParameter::new(1e-4).unwrap()).unwrap();
        assert!(q.q_ext < 1e-6, "{q:?}");
        assert!(q.q_ext >= 0.0);
    }

    #[test]
    fn large_raindrop_near_extinction_paradox() {
        // 1 mm drop at 905 nm
        let x = SizeParameter::from_diameter(1e-3, 905e-9).unwrap();
        assert!((x.value() - 3471.3).abs() < 1.0);
        let q = mie_efficiencies(ComplexIndex::WATER_905NM, x).unwrap();
        assert!((q.q_ext - 2.0).abs() <= 0.2, "{q:?}");
    }

    #[test]
    fn rayleigh_limit() {
        let m = idx(1.33, 0.0);
        let mc = m.to_complex();
        let lorentz = ((mc * mc - 1.0) / (mc * mc + 2.0)).norm_sqr();
        for &x in &[0.005, 0.01, 0.02, 0.05] {
            let q = mie_efficiencies(m, SizeParameter::new(x).unwrap()).unwrap();
            let rayleigh = 8.0 / 3.0 * x.powi(4) * lorentz;
            assert!((q.q_sca / rayleigh - 1.0).abs() < 0.05, "x={x}: {} vs {rayleigh}", q.q_sca);
        }
    }

    #[test]
    fn non_absorbing_sca_equals_ext() {
        for &x in &[0.3, 1.0, 7.5, 42.0, 300.0] {
            let q = mie_efficiencies(idx(1.5, 0.0), SizeParameter::new(x).unwrap()).unwrap();
            assert!((q.q_sca - q.q_ext).abs() <= 1e-8 * q.q_ext, "x={x}: {q:?}");
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(SizeParameter::new(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(SizeParameter::new(0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(SizeParameter::new(2e5), Err(Error::OutOfRange(_))));
        assert!(ComplexIndex::new(0.9, 0.0).is_err());
        assert!(ComplexIndex::new(1.3, -0.1).is_err());
        assert!(fresnel_reflectivity(ComplexIndex { re: f64::INFINITY, im: 0.0 }).is_err());
    }

    #[test]
    fn fresnel_values() {
        assert_eq!(fresnel_reflectivity(idx(1.0, 0.0)).unwrap(), 0.0);
        assert!(fresnel_reflectivity(idx(1e6, 0.0)).unwrap() > 0.9999);
        let r = fresnel_reflectivity(idx(1.328, 0.0)).unwrap();
        assert!((r - 0.01986).abs() < 1e-5, "{r}");
    }

    #[test]
    fn fresnel_monotone_in_real_part() {
        let mut last = -1.0;
        for i in 1..=900 {
            let re = 1.0 + i as f64 * 0.01;
            let r = fresnel_reflectivity(idx(re, 0.0)).unwrap();
            assert!(r > last);
            last = r;
        }
    }
}
