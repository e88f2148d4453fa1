//! Special functions: modified Bessel functions of the second kind, the
//! Matérn correlation, and the chi-square distribution used by the MCD
//! consistency factor.

use crate::{Error, Result};
use alloc::format;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const PI: f64 = core::f64::consts::PI;

/// Below this argument the power series is used, above it Steed's
/// continued fraction.
const SERIES_CUTOFF: f64 = 2.0;

/// `K₀(x)` and `K₁(x)` together; both branches produce the pair.
fn bessel_k01(x: f64) -> (f64, f64) {
    if x <= SERIES_CUTOFF {
        k01_series(x)
    } else {
        k01_continued_fraction(x)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = libm::log(0.5 * x);
    // term0 = y^k/(k!)^2, term1 = y^k/(k!(k+1)!), h = H_k
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut h = 0.0;
    let mut i0 = 0.0;
    let mut s0 = 0.0;
    let mut i1 = 0.0;
    let mut s1 = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            term0 *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
            h += 1.0 / kf;
        }
        i0 += term0;
        s0 += h * term0;
        i1 += term1;
        // psi(k+1) + psi(k+2) = -2γ + 2 H_k + 1/(k+1)
        s1 += (2.0 * h - 2.0 * EULER_GAMMA + 1.0 / (kf + 1.0)) * term1;
        if term0 < 1e-18 * i0 && term1 < 1e-18 * i1 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let big_i1 = 0.5 * x * i1;
    let k1 = 1.0 / x + log_half * big_i1 - 0.25 * x * s1;
    (k0, k1)
}

fn k01_continued_fraction(x: f64) -> (f64, f64) {
    // Steed's algorithm for CF2 (Temme's normalisation), order mu = 0.
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = libm::sqrt(PI / (2.0 * x)) * libm::exp(-x) / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Modified Bessel function of the second kind for orders 0, 1 and 2.
///
/// `K₂` comes from the recurrence `K₂ = K₀ + (2/x) K₁`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel K requires finite x > 0, got {x}")));
    }
    let (k0, k1) = bessel_k01(x);
    match order {
        0 => Ok(k0),
        1 => Ok(k1),
        2 => Ok(k0 + 2.0 / x * k1),
        _ => Err(Error::UnsupportedParameter(format!("Bessel K order {order}"))),
    }
}

/// Smoothness values with an implemented Matérn form.
pub const SUPPORTED_SMOOTHNESS: [f64; 3] = [0.5, 1.0, 2.0];

/// Matérn correlation `2^{1−ν} Γ(ν)^{−1} (α|h|)^ν K_ν(α|h|)`, equal to 1 at
/// `h = 0`.
pub fn matern(h: f64, nu: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(nu > 0.0) {
        return Err(Error::Domain(format!("Matérn needs nu > 0 and alpha > 0 (nu={nu}, alpha={alpha})")));
    }
    if !SUPPORTED_SMOOTHNESS.contains(&nu) {
        return Err(Error::UnsupportedParameter(format!("Matérn smoothness nu={nu}")));
    }
    let x = alpha * h.abs();
    if x == 0.0 {
        return Ok(1.0);
    }
    if nu == 0.5 {
        return Ok(libm::exp(-x));
    }
    if x > 700.0 {
        return Ok(0.0);
    }
    let (k0, k1) = bessel_k01(x);
    let value = if nu == 1.0 {
        // 2^0/Γ(1) x K₁(x)
        x * k1
    } else {
        // 2^{-1}/Γ(2) x² K₂(x) with K₂ = K₀ + 2K₁/x
        0.5 * x * x * k0 + x * k1
    };
    Ok(value.min(1.0))
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return libm::log(PI / libm::sin(PI * x).abs()) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * libm::log(2.0 * PI) + (x + 0.5) * libm::log(t) - t + libm::log(a)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let log_prefix = a * libm::log(x) - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..1000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum * libm::exp(log_prefix)).min(1.0)
    } else {
        // Lentz continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (1.0 - libm::exp(log_prefix) * h).max(0.0)
    }
}

pub fn chi_square_cdf(x: f64, dof: f64) -> f64 {
    regularized_gamma_p(0.5 * dof, 0.5 * x)
}

/// Inverse of [`chi_square_cdf`] by bracketed bisection. `p = 1` maps to
/// infinity.
pub fn chi_square_quantile(p: f64, dof: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut lo = 0.0;
    let mut hi = dof.max(1.0);
    while chi_square_cdf(hi, dof) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}
