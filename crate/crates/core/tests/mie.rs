mod common;

use common::mie_oracle;
use lisa_core::{mie_efficiencies, ComplexIndex, SizeParameter};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn oracle_log_derivative_of_order_zero_is_cot() {
    for z in [Complex64::new(0.7, 0.0), Complex64::new(3.0, 0.2), Complex64::new(40.0, 5.0)] {
        let want = z.cos() / z.sin();
        assert!((mie_oracle::log_derivative(0, z) - want).norm() < 1e-12 * want.norm());
    }
}

#[test]
fn water_sphere_x10_matches_oracle() {
    let got = mie_efficiencies(ComplexIndex::new(1.33, 0.0).unwrap(), SizeParameter::new(10.0).unwrap()).unwrap();
    let want = mie_oracle::efficiencies(Complex64::new(1.33, 0.0), 10.0);
    assert!(rel(got.q_ext, want.q_ext) < 1e-6, "{got:?} {want:?}");
    assert!(rel(got.q_sca, want.q_sca) < 1e-6);
    assert!(rel(got.q_back, want.q_back) < 1e-6);
}

#[test]
fn backscatter_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let m = ComplexIndex::new(rng.random_range(1.1..2.0), rng.random_range(0.0..0.5)).unwrap();
        let x = 10f64.powf(rng.random_range(-1.0..2.0));
        let got = mie_efficiencies(m, SizeParameter::new(x).unwrap()).unwrap();
        let want = mie_oracle::efficiencies(Complex64::new(m.re, m.im), x);
        assert!(rel(got.q_back, want.q_back) < 1e-6, "m={m:?} x={x}: {got:?} {want:?}");
    }
}

#[test]
fn large_droplets_match_oracle() {
    for x in [500.0, 1734.0, 3471.3] {
        let got = mie_efficiencies(ComplexIndex::WATER_905NM, SizeParameter::new(x).unwrap()).unwrap();
        let want = mie_oracle::efficiencies(Complex64::new(1.328, 4.9e-7), x);
        assert!(rel(got.q_ext, want.q_ext) < 1e-6, "x={x}: {got:?} {want:?}");
    }
}

#[test]
fn scattering_never_exceeds_extinction() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let m = ComplexIndex::new(rng.random_range(1.1..2.0), rng.random_range(0.0..0.5)).unwrap();
        let x = rng.random_range(0.01..100.0);
        let q = mie_efficiencies(m, SizeParameter::new(x).unwrap()).unwrap();
        assert!(q.q_sca <= q.q_ext && q.q_sca >= 0.0 && q.q_back >= 0.0, "m={m:?} x={x}: {q:?}");
    }
}

#[test]
fn extinction_paradox_in_size_parameter() {
    let n = 600;
    let mean = (0..n)
        .map(|i| {
            let x = 1000.0 + 3000.0 * i as f64 / (n - 1) as f64;
            mie_efficiencies(ComplexIndex::WATER_905NM, SizeParameter::new(x).unwrap()).unwrap().q_ext
        })
        .sum::<f64>()
        / n as f64;
    assert!((1.9..=2.1).contains(&mean), "{mean}");
}
