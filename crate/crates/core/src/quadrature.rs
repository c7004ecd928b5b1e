//! Adaptive Kronrod quadrature and a brute-force oracle for the
//! difference of two independent exponentials.
//!
//! The oracle integrates the joint density `f1(x) f2(y)` over the region
//! `x - y >= z` numerically in both dimensions. It shares no algebra with
//! [`crate::analytics::ccdf_limit`], which makes it a fair check of that
//! closed form.

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
    0.209_482_141_084_727_8,
];

/// 15-point Kronrod estimate of `f` over `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = WGK[7] * f(c);
    for i in 0..7 {
        let dx = h * XGK[i];
        kronrod += WGK[i] * (f(c - dx) + f(c + dx));
    }
    kronrod * h
}

/// Bisects until the two halves agree with the parent estimate to within `tol`.
fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    if (left + right - whole).abs() <= tol || depth == 0 {
        return left + right;
    }
    adapt(f, a, m, 0.5 * tol, left, depth - 1) + adapt(f, m, b, 0.5 * tol, right, depth - 1)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gk15(&f, a, b);
    adapt(&f, a, b, tol, whole, 48)
}

/// Integrates `f` over `[a, inf)` via `x = a + t / (1 - t)`.
pub fn integrate_to_inf(f: impl Fn(f64) -> f64, a: f64, tol: f64) -> f64 {
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
    integrate(g, 0.0, 1.0, tol)
}

/// `Pr(E1 - E2 >= z)` for independent exponentials with means `mu1`, `mu2`,
/// by nested numeric integration of the joint density.
pub fn quadrature_ccdf_oracle(mu1: f64, mu2: f64, z: f64) -> f64 {
    let tol = 1e-13;
    let f1 = |x: f64| (-x / mu1).exp() / mu1;
    let f2 = |y: f64| (-y / mu2).exp() / mu2;
    // Inner integral over x in [max(0, z + y), inf); work in units of mu1.
    let inner = |y: f64| {
        let lo = (z + y).max(0.0);
        integrate_to_inf(f1, lo, tol)
    };
    let outer = |y: f64| f2(y) * inner(y);
    // Split where the inner lower limit stops being clamped at zero.
    let kink = (-z).max(0.0);
    integrate(outer, 0.0, kink, tol) + integrate_to_inf(outer, kink, tol)
}
