//! The reduction `phi`, the induced map `Q` and exact fibers of `phi`.
//!
//! `phi(z) = (d_FS(0, z), d_FS(0, R z), ..., d_FS(0, R^N z))`. Two points
//! share a coordinate exactly when they lie on the same prime circle, so the
//! fiber of `z` is cut out of the circle `|w| = |z|` by the conditions
//! `|R^n w| = |R^n z|`. The first of those is a circle-into-circle problem with
//! at most `2d` solutions unless the whole circle is mapped into a circle.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::map::RationalMap;
use crate::real;
use crate::rng::stream;
use crate::sphere::{fs_distance, fs_distance_origin, SpherePoint};

/// Level agreement required of a mirror at every checked depth.
pub const MIRROR_TOL: f64 = 1e-8;
/// Circle hops allowed while resolving circle-into-circle configurations.
pub const MAX_CIRCLE_HOPS: usize = 3;
/// Floor for the default depth.
pub const MIN_DEFAULT_DEPTH: usize = 8;
/// Extra depths a stabilized pair must keep agreeing on.
pub const PERSISTENCE_WINDOW: usize = 10;
/// Level agreement required over the persistence window.
pub const PERSISTENCE_TOL: f64 = 1e-7;

/// A point of `[0, 1]^(N + 1)` in the image of `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    pub coords: Vec<f64>,
    pub n_index: usize,
}

impl ReducedPoint {
    /// Sup distance to another reduced point of the same depth.
    pub fn sup_distance(&self, other: &ReducedPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `phi` at depth `depth`.
pub fn phi(map: &RationalMap, z: &SpherePoint, depth: usize) -> ReducedPoint {
    ReducedPoint {
        coords: map.levels(z, depth),
        n_index: depth,
    }
}

/// `(phi(z), Q(phi(z)))`, read off a single orbit of length `depth + 2`.
pub fn induced_q(map: &RationalMap, z: &SpherePoint, depth: usize) -> (ReducedPoint, ReducedPoint) {
    let levels = map.levels(z, depth + 1);
    (
        ReducedPoint {
            coords: levels[..=depth].to_vec(),
            n_index: depth,
        },
        ReducedPoint {
            coords: levels[1..].to_vec(),
            n_index: depth,
        },
    )
}

/// `Q` on the first coordinate for `R = a z^(sign d)`:
/// `(2/pi) atan(|a| tan(pi x / 2)^(sign d))`.
pub fn q_power_closed_form(d: u32, sign: i32, a_modulus: f64, x: f64) -> f64 {
    let expanding = sign > 0;
    if x <= 0.0 {
        return if expanding { 0.0 } else { 1.0 };
    }
    if x >= 1.0 {
        return if expanding { 1.0 } else { 0.0 };
    }
    let t = real::tan(real::FRAC_PI_2 * x);
    let e = if expanding { d as i32 } else { -(d as i32) };
    real::FRAC_2_PI * real::atan(a_modulus * real::powi(t, e))
}

/// Outcome of [`stabilization_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizationResult {
    pub index: usize,
    /// `false` when no depth up to the cap stabilized and `index` is the cap.
    pub confirmed: bool,
}

/// Smallest depth `N <= n_max` at which sampled mirror candidates keep
/// agreeing for [`PERSISTENCE_WINDOW`] further steps.
///
/// Each trial draws a uniform point `z`. At depth 0 its candidates are random
/// points of its prime circle; at depth `N >= 1` they are the mirrors of `z` at
/// depth `N`, or again random circle points when that fiber is the whole
/// circle. Trials whose fiber computation fails are skipped.
pub fn stabilization_index(map: &RationalMap, n_max: usize, trials: usize, seed: u64) -> StabilizationResult {
    let bases: Vec<(SpherePoint, [f64; 3])> = (0..trials as u64)
        .map(|t| {
            let mut rng = stream(seed, t);
            let z = SpherePoint::sample_uniform(&mut rng);
            let angles = [rng.gen_range(0.0..real::TAU), rng.gen_range(0.0..real::TAU), rng.gen_range(0.0..real::TAU)];
            (z, angles)
        })
        .collect();
    for depth in 0..=n_max {
        let horizon = depth + PERSISTENCE_WINDOW;
        let stable = bases.iter().all(|(z, angles)| {
            let circle = || -> Vec<SpherePoint> {
                match z.to_complex() {
                    Some(c) => angles.iter().map(|a| SpherePoint::finite(c * num_complex::Complex64::from_polar(1.0, *a))).collect(),
                    None => Vec::new(),
                }
            };
            let candidates = if depth == 0 {
                circle()
            } else {
                match fiber(map, z, depth) {
                    Ok(report) if report.infinite => circle(),
                    Ok(report) => report.mirrors,
                    Err(_) => return true,
                }
            };
            let base = map.levels(z, horizon);
            candidates.iter().all(|w| {
                let lv = map.levels(w, horizon);
                lv[depth + 1..].iter().zip(&base[depth + 1..]).all(|(a, b)| (a - b).abs() <= PERSISTENCE_TOL)
            })
        });
        if stable {
            return StabilizationResult { index: depth, confirmed: true };
        }
    }
    StabilizationResult {
        index: n_max,
        confirmed: false,
    }
}

/// `max(N_emp, 8)`.
pub fn default_depth(stabilization: StabilizationResult) -> usize {
    stabilization.index.max(MIN_DEFAULT_DEPTH)
}

/// The mirrors of a point at a given depth.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberReport {
    pub base: SpherePoint,
    pub mirrors: Vec<SpherePoint>,
    /// The whole prime circle through `base` shares its reduced point.
    pub infinite: bool,
    pub checked_depth: usize,
}

impl FiberReport {
    /// Number of points of the fiber other than `base`; `None` if infinite.
    pub fn size(&self) -> Option<usize> {
        if self.infinite {
            None
        } else {
            Some(self.mirrors.len())
        }
    }
}

enum Candidates {
    Points(Vec<SpherePoint>),
    WholeCircle,
}

/// Points of `|w| = |z|` with `|R w| = |R z|` (and `z` among them), or the
/// whole circle when every point of it qualifies at depth `depth`.
fn circle_candidates(map: &RationalMap, z: &SpherePoint, depth: usize, hop: usize) -> Result<Candidates> {
    if depth == 0 {
        return Ok(Candidates::WholeCircle);
    }
    if hop >= MAX_CIRCLE_HOPS {
        return Err(Error::DepthExceeded(MAX_CIRCLE_HOPS));
    }
    let r0 = z.modulus();
    let image = map.evaluate(z);
    if image.is_zero() || image.is_infinity() {
        let pre = map.preimages(&image)?;
        return Ok(Candidates::Points(pre.into_iter().filter(|w| on_circle(w, r0)).collect()));
    }
    let r1 = image.modulus();
    if !map.circle_map_test(r0, r1) {
        return Ok(Candidates::Points(map.circle_crossings(r0, r1)?));
    }
    // the whole circle |w| = r0 lands on |w| = r1
    if map.power_form(1e-10).is_some() || (r0 - r1).abs() <= 1e-9 * r0 {
        return Ok(Candidates::WholeCircle);
    }
    match circle_candidates(map, &image, depth - 1, hop + 1)? {
        Candidates::WholeCircle => Ok(Candidates::WholeCircle),
        Candidates::Points(targets) => {
            let mut out = Vec::new();
            for t in targets.iter().chain(core::iter::once(&image)) {
                out.extend(map.preimages(t)?.into_iter().filter(|w| on_circle(w, r0)));
            }
            Ok(Candidates::Points(out))
        }
    }
}

fn on_circle(w: &SpherePoint, r: f64) -> bool {
    !w.is_infinity() && (w.modulus() - r).abs() <= 1e-8 * r
}

/// Mirrors of `z` at depth `depth`: points `w != z` with `phi(w) = phi(z)`.
///
/// `0` and infinity are alone on their prime circles and are never mirrored.
/// At depth 0 every point of the prime circle through `z` qualifies and the
/// fiber is reported as infinite.
pub fn fiber(map: &RationalMap, z: &SpherePoint, depth: usize) -> Result<FiberReport> {
    let mut report = FiberReport {
        base: *z,
        mirrors: Vec::new(),
        infinite: false,
        checked_depth: depth,
    };
    if z.is_zero() || z.is_infinity() {
        return Ok(report);
    }
    let candidates = match circle_candidates(map, z, depth, 0)? {
        Candidates::WholeCircle => {
            report.infinite = true;
            return Ok(report);
        }
        Candidates::Points(p) => p,
    };
    let base = map.levels(z, depth);
    for w in candidates {
        if fs_distance(&w, z) <= MIRROR_TOL {
            continue;
        }
        if report.mirrors.iter().any(|m| fs_distance(m, &w) <= MIRROR_TOL) {
            continue;
        }
        let lv = map.levels(&w, depth);
        if lv.iter().zip(&base).all(|(a, b)| (a - b).abs() <= MIRROR_TOL) {
            report.mirrors.push(w);
        }
    }
    Ok(report)
}

/// Summary of a fiber-size audit.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberAudit {
    pub samples: usize,
    /// Largest number of mirrors seen.
    pub max_mirrors: usize,
    /// `histogram[k]` counts samples with exactly `k` mirrors.
    pub histogram: Vec<usize>,
    /// The bound `2 d^2` on full fiber sizes.
    pub bound: usize,
}

/// Number of mirrors of sample `index`, checked against `#fiber <= 2 d^2`.
pub fn audit_sample(map: &RationalMap, depth: usize, seed: u64, index: u64) -> Result<usize> {
    let z = SpherePoint::sample_uniform(&mut stream(seed, index));
    let bound = 2 * map.degree() * map.degree();
    let report = fiber(map, &z, depth)?;
    match report.size() {
        Some(k) if k < bound => Ok(k),
        size => Err(Error::BoundViolation {
            witness: z,
            size: size.map_or(usize::MAX, |k| k + 1),
            bound,
        }),
    }
}

/// Folds per-sample mirror counts into an audit report.
pub fn audit_report(map: &RationalMap, counts: &[usize]) -> FiberAudit {
    let bound = 2 * map.degree() * map.degree();
    let max_mirrors = counts.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0usize; max_mirrors + 1];
    for k in counts {
        histogram[*k] += 1;
    }
    FiberAudit {
        samples: counts.len(),
        max_mirrors,
        histogram,
        bound,
    }
}

/// Audits `#fiber <= 2 d^2` on `samples` uniform points. Meant for maps
/// without an invariant prime circle; an infinite fiber is a violation.
pub fn fiber_bound_audit(map: &RationalMap, samples: usize, depth: usize, seed: u64) -> Result<FiberAudit> {
    if depth == 0 {
        return Err(Error::InvalidArgument("fiber audit needs depth >= 1".into()));
    }
    let counts = (0..samples as u64).map(|i| audit_sample(map, depth, seed, i)).collect::<Result<Vec<_>>>()?;
    Ok(audit_report(map, &counts))
}

/// Level of `z` as a convenience for callers comparing prime circles.
pub fn level(z: &SpherePoint) -> f64 {
    fs_distance_origin(z)
}
