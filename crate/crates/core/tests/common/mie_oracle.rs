//! Reference Mie series used to check the library.
//!
//! Log-derivatives come from a continued fraction evaluated separately for
//! every order, Riccati-Bessel functions of the first kind from ratio
//! (Miller) recurrence, and those of the second kind from forward
//! recurrence.

use num_complex::Complex64;

const TINY: f64 = 1e-300;

/// D_n(z) = psi_n'(z) / psi_n(z) from the continued fraction for
/// J_{n-1/2}(z) / J_{n+1/2}(z), modified Lentz method.
pub fn log_derivative(n: usize, z: Complex64) -> Complex64 {
    let inv = 1.0 / z;
    let term = |k: usize| {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        inv * (sign * (2 * n + 2 * k - 1) as f64)
    };
    let mut f = term(1);
    if f.norm() == 0.0 {
        f = Complex64::new(TINY, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 2..100_000 {
        let b = term(k);
        d = b + d;
        if d.norm() == 0.0 {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + 1.0 / c;
        if c.norm() == 0.0 {
            c = Complex64::new(TINY, 0.0);
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    f - inv * n as f64
}

/// psi_0..=psi_n(x) for real x: unnormalised downward recurrence, then
/// scaled to whichever of psi_0, psi_1 is larger in magnitude.
fn psi(n: usize, x: f64) -> Vec<f64> {
    let start = n + 30 + x.abs() as usize;
    let mut v = vec![0.0; start + 2];
    v[start] = 1e-30;
    for k in (1..=start).rev() {
        v[k - 1] = (2 * k + 1) as f64 / x * v[k] - v[k + 1];
        if v[k - 1].abs() > 1e200 {
            for w in &mut v[k - 1..] {
                *w *= 1e-200;
            }
        }
    }
    let (p0, p1) = (x.sin(), x.sin() / x - x.cos());
    let scale = if p0.abs() >= p1.abs() { p0 / v[0] } else { p1 / v[1] };
    v.truncate(n + 1);
    for w in &mut v {
        *w *= scale;
    }
    v
}

/// chi_0..=chi_n(x).
fn chi(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    out[0] = x.cos();
    if n >= 1 {
        out[1] = x.cos() / x + x.sin();
        for k in 1..n {
            out[k + 1] = (2 * k + 1) as f64 / x * out[k] - out[k - 1];
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub q_ext: f64,
    pub q_sca: f64,
    pub q_back: f64,
}

pub fn efficiencies(m: Complex64, x: f64) -> Reference {
    let nmax = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize + 10;
    let p = psi(nmax, x);
    let c = chi(nmax, x);
    let xi = |k: usize| Complex64::new(p[k], -c[k]);
    let mx = m * x;

    let mut terms = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let d = log_derivative(n, mx);
        let nx = n as f64 / x;
        let ta = d / m + nx;
        let tb = d * m + nx;
        let a = (ta * p[n] - p[n - 1]) / (ta * xi(n) - xi(n - 1));
        let b = (tb * p[n] - p[n - 1]) / (tb * xi(n) - xi(n - 1));
        terms.push((n, a, b));
    }
    // Sum smallest terms first.
    let (mut ext, mut sca) = (0.0, 0.0);
    let mut back = Complex64::new(0.0, 0.0);
    for &(n, a, b) in terms.iter().rev() {
        let w = (2 * n + 1) as f64;
        ext += w * (a + b).re;
        sca += w * (a.norm_sqr() + b.norm_sqr());
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        back += (a - b) * (w * sign);
    }
    let x2 = x * x;
    Reference {
        q_ext: 2.0 * ext / x2,
        q_sca: 2.0 * sca / x2,
        q_back: back.norm_sqr() / x2,
    }
}
