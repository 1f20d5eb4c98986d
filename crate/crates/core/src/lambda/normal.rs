//! Standard normal distribution: CDF, survival function and quantile.
//!
//! `erf`/`erfc` use the Cephes rational approximations (relative error below
//! 4e-16). The quantile starts from Acklam's rational approximation
//! (relative error about 1e-9) and applies one Halley step, which brings it
//! to full double precision.

#![allow(clippy::excessive_precision, clippy::unreadable_literal)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Result, SlopeError};

const SQRT_2PI: f64 = 2.50662827463100050241576528481104525;

fn polevl(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Polynomial with an implicit leading coefficient of one.
fn p1evl(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(1.0, |acc, &c| acc * x + c)
}

/// `exp(-x²)` without the error amplification of forming `x²` directly.
fn exp_neg_sq(x: f64) -> f64 {
    const M: f64 = 128.0;
    let x = x.abs();
    let m = (M * x + 0.5).floor() / M;
    let f = x - m;
    let u = m * m;
    let u1 = 2.0 * m * f + f * f;
    if u + u1 > 709.78 {
        return 0.0;
    }
    (-u).exp() * (-u1).exp()
}

pub fn erf(x: f64) -> f64 {
    const T: [f64; 5] = [
        9.60497373987051638749e0,
        9.00260197203842689217e1,
        2.23200534594684319226e3,
        7.00332514112805075473e3,
        5.55923013010394962768e4,
    ];
    const U: [f64; 5] = [
        3.35617141647503099647e1,
        5.21357949780152679795e2,
        4.59432382970980127987e3,
        2.26290000613890934246e4,
        4.92673942608635921086e4,
    ];
    if x.abs() > 1.0 {
        return 1.0 - erfc(x);
    }
    let z = x * x;
    x * polevl(z, &T) / p1evl(z, &U)
}

pub fn erfc(a: f64) -> f64 {
    const P: [f64; 9] = [
        2.46196981473530512524e-10,
        5.64189564831068821977e-1,
        7.46321056442269912687e0,
        4.86371970985681366614e1,
        1.96520832956077098242e2,
        5.26445194995477358631e2,
        9.34528527171957607540e2,
        1.02755188689515710272e3,
        5.57535335369399327526e2,
    ];
    const Q: [f64; 8] = [
        1.32281951154744992508e1,
        8.67072140885989742329e1,
        3.54937778887819891062e2,
        9.75708501743205489753e2,
        1.82390916687909736289e3,
        2.24633760818710981792e3,
        1.65666309194161350182e3,
        5.57535340817727675546e2,
    ];
    const R: [f64; 6] = [
        5.64189583547755073984e-1,
        1.27536670759978104416e0,
        5.01905042251180477414e0,
        6.16021097993053585195e0,
        7.40974269950448939160e0,
        2.97886665372100240670e0,
    ];
    const S: [f64; 6] = [
        2.26052863220117276590e0,
        9.39603524938001434673e0,
        1.20489539808096656605e1,
        1.70814450747565897222e1,
        9.60896809063285878198e0,
        3.36907645100081516050e0,
    ];

    if a.is_nan() {
        return f64::NAN;
    }
    let x = a.abs();
    if x < 1.0 {
        return 1.0 - erf(a);
    }
    if a * a > 709.78 {
        return if a < 0.0 { 2.0 } else { 0.0 };
    }
    let z = exp_neg_sq(a);
    let y = if x < 8.0 {
        z * polevl(x, &P) / p1evl(x, &Q)
    } else {
        z * polevl(x, &R) / p1evl(x, &S)
    };
    if a < 0.0 {
        2.0 - y
    } else {
        y
    }
}

/// Φ(x).
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// 1 − Φ(x), accurate in the upper tail.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Acklam's rational approximation of Φ⁻¹ on (0, ½].
fn acklam_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    if p < CENTRAL_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        polevl(q, &C) / (polevl(q, &D) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        polevl(r, &A) * q / (polevl(r, &B) * r + 1.0)
    }
}

const CENTRAL_LOW: f64 = 0.02425;

/// Quantile function Φ⁻¹(α) of the standard normal distribution.
pub fn inv_norm_cdf(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SlopeError::Domain(format!(
            "normal quantile requires 0 < alpha < 1, got {alpha}"
        )));
    }
    if alpha == 0.5 {
        return Ok(0.0);
    }
    // 1 − α is exact for α ≥ ½.
    if alpha > 0.5 {
        return Ok(-lower_quantile(1.0 - alpha));
    }
    Ok(lower_quantile(alpha))
}

fn lower_quantile(p: f64) -> f64 {
    let z = acklam_lower(p);
    // Residual Φ(z) − p: with erf near the center (relative accuracy around
    // zero), with erfc in the tail.
    let err = if p < CENTRAL_LOW {
        norm_cdf(z) - p
    } else {
        0.5 * erf(z * FRAC_1_SQRT_2) - (p - 0.5)
    };
    let u = err * (2.0 * PI).sqrt() * (0.5 * z * z).exp();
    z - u / (1.0 + 0.5 * z * u)
}
