//! Power maps, exceptional and strongly exceptional maps.
//!
//! A map is exceptional when it carries a prime circle onto itself. Among
//! non-power maps at most one prime circle can be mapped into a prime circle,
//! so finding two distinct invariant radii for a non-power map is reported as
//! an inconsistency rather than silently picking one.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ergodic::{backward_orbit_sample, prime_circle_deviation, DEFAULT_BURN_IN};
use crate::error::{Error, Result};
use crate::map::{RationalMap, CIRCLE_TOL};
use crate::real;
use crate::sphere::{level_of_radius, SpherePoint};

/// Coefficient tolerance for recognizing `a z^d` and `a z^-d`.
pub const POWER_TOL: f64 = 1e-10;
/// Julia samples must lie this close (Fubini-Study) to the invariant circle.
pub const JULIA_CIRCLE_TOL: f64 = 1e-3;
const GRID_LOG10_MIN: f64 = -6.0;
const GRID_LOG10_MAX: f64 = 6.0;
const GRID_PER_DECADE: usize = 256;
const JULIA_SAMPLES: usize = 256;
const JULIA_SEED: u64 = 0x6a75_6c69_61;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExceptionalClass {
    /// `R(z) = a z^exponent` with `exponent = +-d`; every prime circle is
    /// mapped onto a prime circle and `radius` is the invariant one.
    PowerMap { a: Complex64, exponent: i32, radius: f64 },
    /// An invariant prime circle that contains the Julia set.
    StronglyExceptional { radius: f64 },
    /// An invariant prime circle.
    Exceptional { radius: f64 },
    NonExceptional,
}

impl ExceptionalClass {
    /// Radius of the invariant prime circle, if any.
    pub fn radius(&self) -> Option<f64> {
        match self {
            ExceptionalClass::PowerMap { radius, .. }
            | ExceptionalClass::StronglyExceptional { radius }
            | ExceptionalClass::Exceptional { radius } => Some(*radius),
            ExceptionalClass::NonExceptional => None,
        }
    }

    /// Power maps have their Julia set on the invariant circle.
    pub fn is_strongly_exceptional(&self) -> bool {
        matches!(self, ExceptionalClass::PowerMap { .. } | ExceptionalClass::StronglyExceptional { .. })
    }
}

/// Invariant radius of `a z^exponent`.
pub fn power_map_radius(a: Complex64, exponent: i32) -> f64 {
    let m = real::abs(a);
    if exponent > 0 {
        // |a| r^d = r
        real::powf(m, -1.0 / (exponent - 1) as f64)
    } else {
        // |a| r^-d = r
        real::powf(m, 1.0 / (1 - exponent) as f64)
    }
}

fn log_gap(map: &RationalMap, r: f64) -> f64 {
    real::ln(map.evaluate(&SpherePoint::real(r)).modulus()) - real::ln(r)
}

/// Radii `r` on the search grid with `|R(r)| = r`, from sign changes of
/// `log|R(r)| - log r` refined by bisection and from near-zero local minima of
/// its absolute value (tangential solutions).
pub fn candidate_radii(map: &RationalMap) -> Vec<f64> {
    let count = ((GRID_LOG10_MAX - GRID_LOG10_MIN) as usize) * GRID_PER_DECADE;
    let grid: Vec<f64> = (0..=count)
        .map(|k| real::powf(10.0, GRID_LOG10_MIN + k as f64 / GRID_PER_DECADE as f64))
        .collect();
    let values: Vec<f64> = grid.iter().map(|r| log_gap(map, *r)).collect();
    let mut out = Vec::new();
    for k in 0..count {
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            out.push(grid[k]);
        } else if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
            out.push(bisect(map, grid[k], grid[k + 1], fa));
        }
    }
    for k in 1..count {
        let (a, b, c) = (values[k - 1].abs(), values[k].abs(), values[k + 1].abs());
        if b <= a && b <= c && b < 1e-2 && values[k - 1] * values[k + 1] > 0.0 {
            out.push(golden_min(map, grid[k - 1], grid[k + 1]));
        }
    }
    out
}

fn bisect(map: &RationalMap, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = real::sqrt(lo * hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = log_gap(map, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    real::sqrt(lo * hi)
}

fn golden_min(map: &RationalMap, lo: f64, hi: f64) -> f64 {
    let g = 0.5 * (real::sqrt(5.0) - 1.0);
    let (mut a, mut b) = (real::ln(lo), real::ln(hi));
    let f = |t: f64| log_gap(map, real::exp(t)).abs();
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    real::exp(0.5 * (a + b))
}

/// Verified invariant radii of a non-power map, deduplicated.
///
/// A candidate whose circle residual falls in `(tol, 10 tol]` cannot be called
/// either way and raises [`Error::ClassificationUnstable`].
pub fn invariant_radii(map: &RationalMap) -> Result<Vec<f64>> {
    let mut verified: Vec<f64> = Vec::new();
    for r in candidate_radii(map) {
        let residual = map.circle_residual(r, r);
        if residual <= CIRCLE_TOL {
            if verified.iter().all(|v| (v - r).abs() > 1e-6 * r) {
                verified.push(r);
            }
        } else if residual <= 10.0 * CIRCLE_TOL {
            return Err(Error::ClassificationUnstable { radius: r, residual });
        }
    }
    Ok(verified)
}

/// Classifies with the default Julia sample (256 backward orbits).
pub fn classify(map: &RationalMap) -> Result<ExceptionalClass> {
    classify_with(map, |m| Ok(backward_orbit_sample(m, JULIA_SAMPLES, DEFAULT_BURN_IN, JULIA_SEED)?.points))
}

/// Classifies, drawing a Julia sample from `julia_sample` only when an
/// invariant circle of a non-power map is found.
pub fn classify_with<F>(map: &RationalMap, julia_sample: F) -> Result<ExceptionalClass>
where
    F: FnOnce(&RationalMap) -> Result<Vec<SpherePoint>>,
{
    if let Some((a, exponent)) = map.power_form(POWER_TOL) {
        return Ok(ExceptionalClass::PowerMap {
            a,
            exponent,
            radius: power_map_radius(a, exponent),
        });
    }
    let radii = invariant_radii(map)?;
    match radii.as_slice() {
        [] => Ok(ExceptionalClass::NonExceptional),
        [radius] => {
            let sample = julia_sample(map)?;
            let radius = *radius;
            if prime_circle_deviation(&sample, level_of_radius(radius)) <= JULIA_CIRCLE_TOL {
                Ok(ExceptionalClass::StronglyExceptional { radius })
            } else {
                Ok(ExceptionalClass::Exceptional { radius })
            }
        }
        [first, second, ..] => Err(Error::InconsistentClassification(*first, *second)),
    }
}
