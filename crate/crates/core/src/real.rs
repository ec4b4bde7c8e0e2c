//! Scalar math on `f64` that works without `std`.

pub use core::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI, TAU};

use alloc::vec::Vec;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}

#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

/// `asin` with the argument clamped to `[-1, 1]`.
#[inline]
pub fn asin_clamped(x: f64) -> f64 {
    libm::asin(x.clamp(-1.0, 1.0))
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Modulus of a complex number.
#[inline]
pub fn abs(z: num_complex::Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Slope `b` of the Poisson log-linear model `counts[k] ~ Poisson(exp(a + b xs[k]))`,
/// fitted by maximum likelihood. Zero counts take part in the fit.
///
/// `None` unless at least two distinct `xs` carry positive counts.
pub fn poisson_log_slope(xs: &[f64], counts: &[f64]) -> Option<f64> {
    if xs.len() != counts.len() {
        return None;
    }
    let positive: Vec<usize> = (0..xs.len()).filter(|k| counts[*k] > 0.0).collect();
    if positive.iter().all(|k| xs[*k] == xs[positive[0]]) {
        return None;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let t: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let loglik = |a: f64, b: f64| -> f64 { t.iter().zip(counts).map(|(t, c)| c * (a + b * t) - exp(a + b * t)).sum() };
    let (px, py): (Vec<f64>, Vec<f64>) = positive.iter().map(|k| (t[*k], ln(counts[*k]))).unzip();
    let mut b = ls_slope(&px, &py)?;
    let total: f64 = counts.iter().sum();
    let mut a = ln(total / t.iter().map(|t| exp(b * t)).sum::<f64>());
    let mut current = loglik(a, b);
    for _ in 0..200 {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (t, c) in t.iter().zip(counts) {
            let mu = exp(a + b * t);
            g0 += c - mu;
            g1 += (c - mu) * t;
            h00 += mu;
            h01 += mu * t;
            h11 += mu * t * t;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det > 0.0) {
            break;
        }
        let da = (h11 * g0 - h01 * g1) / det;
        let db = (h00 * g1 - h01 * g0) / det;
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-10 {
            let trial = loglik(a + step * da, b + step * db);
            if trial >= current {
                a += step * da;
                b += step * db;
                current = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || (step * db).abs() <= 1e-13 * (1.0 + b.abs()) {
            break;
        }
    }
    b.is_finite().then_some(b)
}
