//! Numerical integration helpers.

/// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
/// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&xk, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * xk;
        let s = f(c - dx) + f(c + dx);
        kronrod += wk * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `abs_tol`. Returns the estimate and the summed error bound.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> (f64, f64) {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= MAX_DEPTH || !err.is_finite() {
            return (val, err);
        }
        let mid = 0.5 * (a + b);
        let (l, le) = recurse(f, a, mid, 0.5 * tol, depth + 1);
        let (r, re) = recurse(f, mid, b, 0.5 * tol, depth + 1);
        (l + r, le + re)
    }
    if a == b {
        return (0.0, 0.0);
    }
    recurse(&f, a, b, abs_tol.max(f64::MIN_POSITIVE), 0)
}

/// Integral of `f` over `[a, inf)` via the substitution `x = a + t / (1 - t)`.
pub fn adaptive_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64) -> (f64, f64) {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let v = f(a + t / s) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    adaptive(g, 0.0, 1.0, abs_tol)
}

/// `n + 1` logarithmically spaced nodes from `lo` to `hi` inclusive.
pub fn log_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                (la + (lb - la) * i as f64 / n as f64).exp()
            }
        })
        .collect()
}

/// Composite Simpson weights for `n` (even) equal intervals of width `h`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2 && n.is_multiple_of(2), "Simpson's rule needs an even interval count");
    (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}
