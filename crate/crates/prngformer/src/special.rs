//! Special functions: log-gamma, error functions, the regularized
//! incomplete gamma pair, the standard normal CDF, and GeLU.
//!
//! Everything here is hand-rolled on purpose. The statistical battery's
//! p-values and the transformer's nonlinearity both hinge on the exact
//! rounding behavior of these functions (GeLU saturation in particular),
//! so the crate owns the implementations rather than depending on a libm
//! extension crate. Accuracy is pinned by a checked-in grid of
//! high-precision reference values.

use std::f64::consts::PI;

/// Arguments at or beyond this magnitude make `gelu` saturate exactly:
/// `Phi(x)` rounds to exactly 1.0 (and the product `x * Phi(x)` underflows
/// to exactly 0.0 on the negative side), so `gelu(x) = x` or `0.0` with no
/// rounding residue. The interesting boundary is near 38.7, where the
/// upper-gamma prefactor `exp(-x^2/2 + ...)` underflows; 40 leaves margin.
pub const GELU_SATURATION: f64 = 40.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos approximation,
/// reflection below 1/2).
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "ln_gamma domain is (0, inf), got {x}");
    if x < 0.5 {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return PI.ln() - (PI * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn igam(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "igam domain: a > 0, x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        igam_series(a, x)
    } else {
        1.0 - igamc_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn igamc(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "igamc domain: a > 0, x >= 0");
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - igam_series(a, x)
    } else {
        igamc_cf(a, x)
    }
}

/// Power-series expansion of P(a, x), effective for x < a + 1.
fn igam_series(a: f64, x: f64) -> f64 {
    let ax = a * x.ln() - x - ln_gamma(a);
    if ax < -745.0 {
        return 0.0;
    }
    let ax = ax.exp();
    let mut r = a;
    let mut c = 1.0;
    let mut ans = 1.0;
    while c / ans > 1e-17 {
        r += 1.0;
        c *= x / r;
        ans += c;
    }
    ans * ax / a
}

/// Continued-fraction expansion of Q(a, x), effective for x >= a + 1.
fn igamc_cf(a: f64, x: f64) -> f64 {
    const BIG: f64 = 4.503_599_627_370_496e15;
    const BIG_INV: f64 = 2.220_446_049_250_313e-16;
    const MACHEP: f64 = 1.110_223_024_625_156_5e-16;

    let ax = a * x.ln() - x - ln_gamma(a);
    if ax < -745.0 {
        return 0.0;
    }
    let ax = ax.exp();

    let mut y = 1.0 - a;
    let mut z = x + y + 1.0;
    let mut c = 0.0;
    let mut pkm2 = 1.0;
    let mut qkm2 = x;
    let mut pkm1 = x + 1.0;
    let mut qkm1 = z * x;
    let mut ans = pkm1 / qkm1;
    loop {
        c += 1.0;
        y += 1.0;
        z += 2.0;
        let yc = y * c;
        let pk = pkm1 * z - pkm2 * yc;
        let qk = qkm1 * z - qkm2 * yc;
        let t = if qk != 0.0 {
            let r = pk / qk;
            let t = ((ans - r) / r).abs();
            ans = r;
            t
        } else {
            1.0
        };
        pkm2 = pkm1;
        pkm1 = pk;
        qkm2 = qkm1;
        qkm1 = qk;
        if pk.abs() > BIG {
            pkm2 *= BIG_INV;
            pkm1 *= BIG_INV;
            qkm2 *= BIG_INV;
            qkm1 *= BIG_INV;
        }
        if t <= MACHEP {
            break;
        }
    }
    ans * ax
}

/// Error function. Series for small arguments, upper-gamma elsewhere.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= 1.0 {
        erf_series(x)
    } else {
        1.0 - igamc(0.5, x * x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 1.0 {
        1.0 - erf_series(x)
    } else {
        igamc(0.5, x * x)
    }
}

/// Maclaurin series for erf, adequate on [0, 1].
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// GeLU nonlinearity, exact Gaussian-CDF form `x * Phi(x)`.
///
/// The saturation shortcut is bit-identical to the slow path (checked by a
/// unit test at the boundary): past the cutoff `Phi(x)` is exactly 1.0 and
/// `Phi(-x)` underflows to exactly 0.0, which is precisely what makes the
/// compiled ReLU and indicator gadgets exact on integer channels.
#[inline]
pub fn gelu(x: f64) -> f64 {
    if x >= GELU_SATURATION {
        return x;
    }
    if x <= -GELU_SATURATION {
        return 0.0;
    }
    x * normal_cdf(x)
}
