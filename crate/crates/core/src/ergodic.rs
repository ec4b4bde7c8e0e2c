//! Sampling the measure of maximal entropy and estimating entropies.
//!
//! Samples come from backward orbits: every step replaces `z` by one of its
//! `d` preimages chosen uniformly, which is the pullback identity
//! `R* mu = d mu` read as a Markov chain. After a burn-in the chain sits on the
//! Julia set.
//!
//! Entropies are estimated on finite forward orbits of those samples, either
//! in the sphere metric or in the sup metric of the reduced system.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen4;
use crate::map::RationalMap;
use crate::real;
use crate::reduction::{phi, ReducedPoint};
use crate::rng::{run_rng, stream};
use crate::sphere::{fs_distance, fs_distance_origin, SpherePoint};

/// Default start of every backward orbit.
pub const DEFAULT_START: Complex64 = Complex64::new(2.0, 1.0);
/// Restarts allowed before the start point is declared degenerate.
pub const MAX_RESTARTS: usize = 10;
pub const DEFAULT_BURN_IN: usize = 50;

/// Points approximately distributed by the measure of maximal entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSample {
    pub points: Vec<SpherePoint>,
    pub burn_in: usize,
    pub seed: u64,
    pub map_digest: String,
}

/// The image of a [`MeasureSample`] under `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSample {
    pub points: Vec<ReducedPoint>,
    pub depth: usize,
}

/// Formats a map digest the way [`MeasureSample`] records it.
pub fn digest_string(map: &RationalMap) -> String {
    format!("{:016x}", map.digest())
}

/// Endpoint of backward orbit `index` of a run seeded with `seed`.
///
/// A start point whose preimages all coincide (a totally ramified value, such
/// as `0` for `z^d`) never leaves its finite backward orbit; the orbit is then
/// restarted from a perturbed start.
pub fn backward_orbit_point(map: &RationalMap, burn_in: usize, seed: u64, index: u64) -> Result<SpherePoint> {
    let mut rng = stream(seed, index);
    let mut start = DEFAULT_START;
    'restart: for attempt in 0..=MAX_RESTARTS {
        if attempt > 0 {
            let angle: f64 = rng.gen_range(0.0..real::TAU);
            start = DEFAULT_START + Complex64::from_polar(0.1 * attempt as f64, angle);
        }
        let mut z = SpherePoint::finite(start);
        for _ in 0..burn_in {
            let pre = match map.preimages(&z) {
                Ok(p) => p,
                Err(Error::RootSolve { .. }) => continue 'restart,
                Err(e) => return Err(e),
            };
            if pre.iter().all(|p| fs_distance(p, &pre[0]) <= 1e-12) {
                continue 'restart;
            }
            z = pre[rng.gen_range(0..pre.len())];
        }
        return Ok(z);
    }
    Err(Error::StartPointDegenerate(MAX_RESTARTS))
}

/// `count` independent backward-orbit endpoints.
pub fn backward_orbit_sample(map: &RationalMap, count: usize, burn_in: usize, seed: u64) -> Result<MeasureSample> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let points = (0..count as u64)
        .map(|i| backward_orbit_point(map, burn_in, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureSample {
        points,
        burn_in,
        seed,
        map_digest: digest_string(map),
    })
}

/// Elementwise `phi` at depth `depth`.
pub fn pushforward(sample: &MeasureSample, map: &RationalMap, depth: usize) -> ReducedSample {
    ReducedSample {
        points: sample.points.iter().map(|z| phi(map, z, depth)).collect(),
        depth,
    }
}

/// Metric in which Bowen balls are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Fubini-Study distance between orbit points of `R`.
    Sphere,
    /// Sup distance between reduced points of `Q`.
    Reduced,
}

/// A finite family of finite orbits with a Bowen distance.
pub trait BowenOrbits {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Longest `n` for which [`Self::bowen_distance`] is defined.
    fn max_steps(&self) -> usize;

    /// `max` over steps `0..n` of the distance between orbits `i` and `j`,
    /// stopping early once it reaches `stop`.
    fn bowen_distance(&self, i: usize, j: usize, n: usize, stop: f64) -> f64;

    /// Running Bowen distances at every `n` in the ascending list `ns`.
    fn bowen_profile(&self, i: usize, j: usize, ns: &[usize], out: &mut [f64]);
}

/// Forward orbits on the sphere, stored as unit vectors.
#[derive(Debug, Clone)]
pub struct SphereOrbits {
    vectors: Vec<Vec<[f64; 3]>>,
    steps: usize,
}

impl SphereOrbits {
    /// Orbits of length `steps` starting at every point.
    pub fn new(map: &RationalMap, starts: &[SpherePoint], steps: usize) -> Self {
        let vectors = starts
            .iter()
            .map(|z| map.iterate(z, steps.saturating_sub(1)).points.iter().map(|p| p.to_unit_vector()).collect())
            .collect();
        SphereOrbits { vectors, steps }
    }
}

// Fubini-Study distance is the central angle over pi; chord = 2 sin(angle / 2).
fn chord_to_fs(chord: f64) -> f64 {
    2.0 * real::asin_clamped(chord * 0.5) / real::PI
}

fn chord(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (x, y, z) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    real::sqrt(x * x + y * y + z * z)
}

impl BowenOrbits for SphereOrbits {
    fn len(&self) -> usize {
        self.vectors.len()
    }

    fn max_steps(&self) -> usize {
        self.steps
    }

    fn bowen_distance(&self, i: usize, j: usize, n: usize, stop: f64) -> f64 {
        let (a, b) = (&self.vectors[i], &self.vectors[j]);
        let mut best = 0.0f64;
        for t in 0..n {
            best = best.max(chord(&a[t], &b[t]));
            if chord_to_fs(best) >= stop {
                break;
            }
        }
        chord_to_fs(best)
    }

    fn bowen_profile(&self, i: usize, j: usize, ns: &[usize], out: &mut [f64]) {
        let (a, b) = (&self.vectors[i], &self.vectors[j]);
        let mut best = 0.0f64;
        let mut t = 0;
        for (k, &n) in ns.iter().enumerate() {
            while t < n {
                best = best.max(chord(&a[t], &b[t]));
                t += 1;
            }
            out[k] = chord_to_fs(best);
        }
    }
}

/// Orbits of the reduced system: the level sequence `d_FS(0, R^t z)` of each
/// start. The reduced point at step `t` is the window `t..=t + depth`.
#[derive(Debug, Clone)]
pub struct ReducedOrbits {
    levels: Vec<Vec<f64>>,
    depth: usize,
    steps: usize,
}

impl ReducedOrbits {
    pub fn new(map: &RationalMap, starts: &[SpherePoint], depth: usize, steps: usize) -> Self {
        let len = steps + depth;
        let levels = starts.iter().map(|z| map.levels(z, len.saturating_sub(1))).collect();
        ReducedOrbits { levels, depth, steps }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn levels(&self, i: usize) -> &[f64] {
        &self.levels[i]
    }

    fn horizon(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            n + self.depth
        }
    }
}

impl BowenOrbits for ReducedOrbits {
    fn len(&self) -> usize {
        self.levels.len()
    }

    fn max_steps(&self) -> usize {
        self.steps
    }

    fn bowen_distance(&self, i: usize, j: usize, n: usize, stop: f64) -> f64 {
        let (a, b) = (&self.levels[i], &self.levels[j]);
        let mut best = 0.0f64;
        for t in 0..self.horizon(n) {
            best = best.max((a[t] - b[t]).abs());
            if best >= stop {
                break;
            }
        }
        best
    }

    fn bowen_profile(&self, i: usize, j: usize, ns: &[usize], out: &mut [f64]) {
        let (a, b) = (&self.levels[i], &self.levels[j]);
        let mut best = 0.0f64;
        let mut t = 0;
        for (k, &n) in ns.iter().enumerate() {
            while t < self.horizon(n) {
                best = best.max((a[t] - b[t]).abs());
                t += 1;
            }
            out[k] = best;
        }
    }
}

/// One `(n, epsilon)` cell of an entropy table.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCell {
    pub n: usize,
    pub epsilon: f64,
    /// Size of a packing by disjoint `(n, epsilon)` Bowen balls.
    pub packing_count: usize,
    /// Number of orbit pairs at Bowen distance below `epsilon`.
    pub close_pairs: u64,
}

/// Fitted growth rates for one `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRate {
    pub epsilon: f64,
    /// Least-squares slope of `log N(n, epsilon)` against `n`.
    pub packing_rate: f64,
    /// Decay rate of the close-pair count `C(n, epsilon)`: minus the slope of a
    /// Poisson log-linear fit of `C` against `n`. `None` when fewer than two
    /// horizons have close pairs.
    pub correlation_rate: Option<f64>,
}

/// Estimator the verdict is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMethod {
    Packing,
    Correlation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub metric: Metric,
    pub method: EntropyMethod,
    pub orbit_count: usize,
    pub table: Vec<EntropyCell>,
    pub rates: Vec<EntropyRate>,
    /// Rate at the smallest `epsilon`.
    pub verdict: f64,
    /// Difference between the rates at the two smallest `epsilon`.
    pub spread: f64,
    /// The selected estimator ran out of data: packing kept every orbit at the
    /// largest `n`, or the correlation rate could not be fitted. The verdict is
    /// then a lower bound.
    pub saturated: bool,
}

impl EntropyEstimate {
    pub fn cell(&self, n: usize, epsilon: f64) -> Option<&EntropyCell> {
        self.table.iter().find(|c| c.n == n && c.epsilon == epsilon)
    }
}

/// Options for [`entropy_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyOptions {
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub method: EntropyMethod,
    /// Seeds the greedy packing order.
    pub seed: u64,
}

/// Checks that `n_list` ascends within `max_steps` and `eps_list` descends.
pub fn validate_lists(n_list: &[usize], eps_list: &[f64], max_steps: usize) -> Result<()> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidArgument("n_list must be strictly ascending and positive".into()));
    }
    if n_list[n_list.len() - 1] > max_steps {
        return Err(Error::InvalidArgument(format!(
            "orbits have {} steps, n_list needs {}",
            max_steps,
            n_list[n_list.len() - 1]
        )));
    }
    if eps_list.is_empty() || eps_list.windows(2).any(|w| !(w[0] > w[1])) || !(eps_list[eps_list.len() - 1] > 0.0) {
        return Err(Error::InvalidArgument("eps_list must be strictly descending and positive".into()));
    }
    Ok(())
}

/// Greedy packing count: orbits scanned in `order`, kept when their Bowen
/// distance to every kept orbit is at least `2 epsilon`.
pub fn greedy_packing<O: BowenOrbits + ?Sized>(orbits: &O, order: &[usize], n: usize, epsilon: f64) -> usize {
    let sep = 2.0 * epsilon;
    let mut kept: Vec<usize> = Vec::new();
    for &i in order {
        if kept.iter().all(|&j| orbits.bowen_distance(i, j, n, sep) >= sep) {
            kept.push(i);
        }
    }
    kept.len()
}

/// Close-pair counts `C(n, eps)` for every `n` in `n_list` (outer index) and
/// `eps` in `eps_list` (inner index).
pub fn close_pair_counts<O: BowenOrbits + ?Sized>(orbits: &O, n_list: &[usize], eps_list: &[f64]) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; eps_list.len()]; n_list.len()];
    let mut profile = vec![0.0; n_list.len()];
    let m = orbits.len();
    for i in 0..m {
        for j in (i + 1)..m {
            orbits.bowen_profile(i, j, n_list, &mut profile);
            for (k, d) in profile.iter().enumerate() {
                for (e, eps) in eps_list.iter().enumerate() {
                    if *d < *eps {
                        counts[k][e] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Packing counts `N(n, eps)` laid out like [`close_pair_counts`], before the
/// monotone envelope is taken.
pub fn packing_counts<O: BowenOrbits + ?Sized>(orbits: &O, n_list: &[usize], eps_list: &[f64], seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..orbits.len()).collect();
    order.shuffle(&mut run_rng(seed));
    n_list
        .iter()
        .map(|&n| eps_list.iter().map(|&eps| greedy_packing(orbits, &order, n, eps)).collect())
        .collect()
}

/// Assembles an estimate from raw counts; split out so that callers may
/// compute the counts in parallel.
pub fn assemble_estimate(
    metric: Metric,
    orbit_count: usize,
    options: &EntropyOptions,
    raw_packing: &[Vec<usize>],
    close_pairs: &[Vec<u64>],
) -> EntropyEstimate {
    let (n_list, eps_list) = (&options.n_list, &options.eps_list);
    // a packing valid at (n', eps') with n' <= n and eps' >= eps is valid at (n, eps)
    let mut packing = raw_packing.to_vec();
    for k in 0..n_list.len() {
        for e in 0..eps_list.len() {
            let mut best = packing[k][e];
            if k > 0 {
                best = best.max(packing[k - 1][e]);
            }
            if e > 0 {
                best = best.max(packing[k][e - 1]);
            }
            packing[k][e] = best;
        }
    }
    let ns: Vec<f64> = n_list.iter().map(|n| *n as f64).collect();
    let mut table = Vec::with_capacity(n_list.len() * eps_list.len());
    for (k, &n) in n_list.iter().enumerate() {
        for (e, &epsilon) in eps_list.iter().enumerate() {
            table.push(EntropyCell {
                n,
                epsilon,
                packing_count: packing[k][e],
                close_pairs: close_pairs[k][e],
            });
        }
    }
    let mut saturated = false;
    let last = n_list.len() - 1;
    let rates: Vec<EntropyRate> = eps_list
        .iter()
        .enumerate()
        .map(|(e, &epsilon)| {
            let logs: Vec<f64> = (0..n_list.len()).map(|k| real::ln(packing[k][e] as f64)).collect();
            let packing_rate = if n_list.len() >= 2 { real::ls_slope(&ns, &logs).unwrap_or(0.0) } else { 0.0 };
            let counts: Vec<f64> = (0..n_list.len()).map(|k| close_pairs[k][e] as f64).collect();
            let correlation_rate = real::poisson_log_slope(&ns, &counts).map(|s| -s);
            let limited = match options.method {
                EntropyMethod::Packing => packing[last][e] == orbit_count,
                EntropyMethod::Correlation => correlation_rate.is_none(),
            };
            if orbit_count > 1 && limited {
                saturated = true;
            }
            EntropyRate {
                epsilon,
                packing_rate,
                correlation_rate,
            }
        })
        .collect();
    let pick = |r: &EntropyRate| match options.method {
        EntropyMethod::Packing => r.packing_rate,
        EntropyMethod::Correlation => r.correlation_rate.unwrap_or(r.packing_rate),
    };
    // adding 0.0 maps -0.0 to 0.0
    let verdict = pick(&rates[rates.len() - 1]) + 0.0;
    let spread = if rates.len() >= 2 {
        (verdict - pick(&rates[rates.len() - 2])).abs()
    } else {
        0.0
    };
    EntropyEstimate {
        metric,
        method: options.method,
        orbit_count,
        table,
        rates,
        verdict,
        spread,
        saturated,
    }
}

/// Bowen-ball entropy estimate over `n_list` and `eps_list`.
///
/// Every cell records a greedy packing count and the number of orbit pairs
/// that stay `epsilon`-close for `n` steps. Per `epsilon`, the packing rate is
/// the slope of `log N` and the correlation rate is the decay rate of the
/// close-pair count. The verdict is the rate selected by
/// `options.method` at the smallest `epsilon`; the correlation method falls
/// back to the packing rate when no pair stays close.
pub fn entropy_estimate<O: BowenOrbits + ?Sized>(orbits: &O, metric: Metric, options: &EntropyOptions) -> Result<EntropyEstimate> {
    if orbits.is_empty() {
        return Err(Error::InvalidArgument("no orbits".into()));
    }
    validate_lists(&options.n_list, &options.eps_list, orbits.max_steps())?;
    let packing = packing_counts(orbits, &options.n_list, &options.eps_list, options.seed);
    let pairs = close_pair_counts(orbits, &options.n_list, &options.eps_list);
    Ok(assemble_estimate(metric, orbits.len(), options, &packing, &pairs))
}

/// Local entropy values along a witness orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEntropy {
    /// `(n, -log(fraction) / n)`, `None` when no orbit shadows the witness.
    pub values: Vec<(usize, Option<f64>)>,
    /// Minimum over the largest three `n` with a nonzero count.
    pub liminf: Option<f64>,
}

/// `-(1/n) log` of the fraction of sampled reduced orbits that stay within
/// `epsilon` of the witness for `n` steps.
pub fn local_entropy_estimate(orbits: &ReducedOrbits, witness: &[f64], epsilon: f64, n_list: &[usize]) -> Result<LocalEntropy> {
    validate_lists(n_list, &[epsilon], orbits.max_steps())?;
    let need = orbits.horizon(n_list[n_list.len() - 1]);
    if witness.len() < need {
        return Err(Error::InvalidArgument(format!("witness has {} levels, {} needed", witness.len(), need)));
    }
    let total = orbits.len() as f64;
    let mut values = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let h = orbits.horizon(n);
        let count = orbits
            .levels
            .iter()
            .filter(|lv| lv[..h].iter().zip(&witness[..h]).all(|(a, b)| (a - b).abs() <= epsilon))
            .count();
        if count == 0 && n == n_list[0] {
            return Err(Error::ZeroCount(n));
        }
        let value = if count == 0 {
            None
        } else {
            Some(-real::ln(count as f64 / total) / n as f64)
        };
        values.push((n, value));
    }
    let tail: Vec<f64> = values.iter().rev().filter_map(|(_, v)| *v).take(3).collect();
    let liminf = tail.iter().copied().reduce(f64::min);
    Ok(LocalEntropy { values, liminf })
}

/// A circle of the sphere, described in the affine chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedCircle {
    Circle { center: Complex64, radius: f64 },
    /// `{z : Re(conj(normal) z) = offset}` with `|normal| = 1`; contains infinity.
    Line { normal: Complex64, offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub circle: FittedCircle,
    /// Unit normal `m` and height `h` of the plane `m . p = h` cutting the
    /// circle out of the unit sphere.
    pub plane: ([f64; 3], f64),
    /// Largest Fubini-Study distance from an input point to the circle.
    pub max_deviation: f64,
}

/// Least-squares circle through points of the sphere.
///
/// In homogeneous form a circle is `A|u|^2 + 2 Re(conj(B) u conj(v)) + D|v|^2 = 0`,
/// which is a plane section of the unit sphere. Each point contributes its
/// normalized coefficient vector, and the fitted circle is the smallest
/// eigenvector of their scatter matrix.
pub fn circle_fit(points: &[SpherePoint]) -> Result<CircleFit> {
    if points.len() < 10 {
        return Err(Error::InvalidArgument("circle fit needs at least 10 points".into()));
    }
    let mut distinct: Vec<SpherePoint> = Vec::new();
    for p in points {
        if distinct.len() >= 3 {
            break;
        }
        if distinct.iter().all(|q| fs_distance(p, q) > 1e-9) {
            distinct.push(*p);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit);
    }
    let mut scatter = [[0.0; 4]; 4];
    let vectors: Vec<[f64; 3]> = points.iter().map(|p| p.to_unit_vector()).collect();
    for p in &vectors {
        let g = [1.0, p[0], p[1], p[2]];
        for i in 0..4 {
            for j in 0..4 {
                scatter[i][j] += g[i] * g[j];
            }
        }
    }
    let (_, vecs) = symmetric_eigen4(scatter);
    let c = vecs[0];
    let norm = real::sqrt(c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
    if norm == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let m = [c[1] / norm, c[2] / norm, c[3] / norm];
    let h = (-c[0] / norm).clamp(-1.0, 1.0);
    let cone = real::acos(h);
    let max_deviation = vectors
        .iter()
        .map(|p| {
            let dot = (m[0] * p[0] + m[1] * p[1] + m[2] * p[2]).clamp(-1.0, 1.0);
            (real::acos(dot) - cone).abs() / real::PI
        })
        .fold(0.0, f64::max);
    // multiply c0 + c1 x + c2 y + c3 t = 0 by 1 + |z|^2:
    // (c0 + c3)|z|^2 + 2 c1 Re z + 2 c2 Im z + (c0 - c3) = 0
    let alpha = c[0] + c[3];
    let beta = c[0] - c[3];
    let b = Complex64::new(c[1], c[2]);
    let circle = if alpha.abs() <= 1e-12 {
        let bn = real::abs(b);
        FittedCircle::Line {
            normal: b / bn,
            offset: -beta / (2.0 * bn),
        }
    } else {
        let center = -b / alpha;
        let r2 = center.norm_sqr() - beta / alpha;
        FittedCircle::Circle {
            center,
            radius: real::sqrt(r2.max(0.0)),
        }
    };
    Ok(CircleFit {
        circle,
        plane: (m, h),
        max_deviation,
    })
}

/// Largest Fubini-Study distance from a sample point to the prime circle of
/// the given level.
pub fn prime_circle_deviation(points: &[SpherePoint], level: f64) -> f64 {
    points.iter().map(|p| (fs_distance_origin(p) - level).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn map(num: &[f64], den: &[f64]) -> RationalMap {
        RationalMap::from_real(num, den).unwrap()
    }

    /// Escape-time oracle: `true` when the orbit of `z` under `z^2 + c` stays
    /// bounded for `iterations` steps.
    fn escape_time_bounded(z: Complex64, c: Complex64, iterations: usize) -> bool {
        let mut w = z;
        for _ in 0..iterations {
            if w.norm_sqr() > 16.0 {
                return false;
            }
            w = w * w + c;
        }
        true
    }

    /// Grid cells of side `h` that straddle the filled-Julia-set boundary
    /// according to the escape-time oracle.
    fn oracle_boundary(c: Complex64, h: f64, extent: f64) -> Vec<Complex64> {
        let n = (2.0 * extent / h) as i64;
        let inside = |i: i64, j: i64| {
            escape_time_bounded(Complex64::new(-extent + i as f64 * h, -extent + j as f64 * h), c, 400)
        };
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let a = inside(i, j);
                if a != inside(i + 1, j) || a != inside(i, j + 1) {
                    out.push(Complex64::new(-extent + (i as f64 + 0.5) * h, -extent + (j as f64 + 0.5) * h));
                }
            }
        }
        out
    }

    #[test]
    fn power_map_samples_lie_on_unit_circle() {
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&sq, 10_000, 50, 7).unwrap();
        assert!(s.points.iter().all(|p| (p.modulus() - 1.0).abs() <= 1e-6));
        let mut angles: Vec<f64> = s
            .points
            .iter()
            .map(|p| {
                let z = p.to_complex().unwrap();
                (real::atan2(z.im, z.re) + real::TAU) % real::TAU / real::TAU
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let n = angles.len() as f64;
        let ks = angles
            .iter()
            .enumerate()
            .map(|(i, a)| (a - i as f64 / n).abs().max((a - (i + 1) as f64 / n).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "KS distance {ks}");
    }

    #[test]
    fn chebyshev_samples_lie_on_segment() {
        let cheb = map(&[-2.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&cheb, 2000, 50, 3).unwrap();
        for p in &s.points {
            let z = p.to_complex().unwrap();
            assert!(z.im.abs() <= 1e-4 && z.re.abs() <= 2.0 + 1e-4, "{z}");
        }
    }

    #[test]
    fn basilica_samples_match_escape_time_oracle() {
        let c = Complex64::new(-1.0, 0.0);
        let basilica = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&basilica, 2000, 50, 11).unwrap();
        let h = 0.004;
        let boundary = oracle_boundary(c, h, 2.0);
        let dist = |z: Complex64, set: &[Complex64]| set.iter().map(|b| (z - b).norm()).fold(f64::INFINITY, f64::min);
        let pts: Vec<Complex64> = s.points.iter().map(|p| p.to_complex().unwrap()).collect();
        // sample -> oracle
        let forward = pts.iter().map(|z| dist(*z, &boundary)).fold(0.0, f64::max);
        // oracle -> sample, on a subsample of the boundary cells
        let backward = boundary.iter().step_by(25).map(|b| dist(*b, &pts)).fold(0.0, f64::max);
        assert!(forward <= 1e-2, "sample to oracle {forward}");
        assert!(backward <= 0.1, "oracle to sample {backward}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let a = backward_orbit_sample(&m, 50, 30, 5).unwrap();
        let b = backward_orbit_sample(&m, 50, 30, 5).unwrap();
        assert_eq!(a, b);
        let c = backward_orbit_sample(&m, 50, 30, 6).unwrap();
        assert_ne!(a.points, c.points);
        assert_eq!(a.map_digest, digest_string(&m));
    }

    #[test]
    fn degenerate_start_restarts() {
        // 0 is totally ramified for z^2; starting there would never move
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let z = backward_orbit_point(&sq, 20, 1, 0).unwrap();
        assert!((z.modulus() - 1.0).abs() < 1e-5);
        assert_eq!(backward_orbit_sample(&sq, 0, 20, 1), Err(Error::InvalidArgument("sample count must be at least 1".into())));
    }

    #[test]
    fn pushforward_of_power_map_collapses() {
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&sq, 200, 50, 1).unwrap();
        let r = pushforward(&s, &sq, 4);
        assert_eq!(r.depth, 4);
        for p in &r.points {
            assert!(p.coords.iter().all(|x| (x - 0.5).abs() < 1e-9));
        }
        let one = backward_orbit_sample(&sq, 1, 50, 1).unwrap();
        assert_eq!(pushforward(&one, &sq, 2).points.len(), 1);
    }

    #[test]
    fn chebyshev_pushforward_follows_arcsine_law() {
        let cheb = map(&[-2.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&cheb, 4000, 50, 9).unwrap();
        let r = pushforward(&s, &cheb, 0);
        let mut xs: Vec<f64> = r.points.iter().map(|p| p.coords[0]).collect();
        xs.sort_by(f64::total_cmp);
        // |x| for x arcsine on [-2, 2] has CDF (2/pi) asin(t/2); level = (2/pi) atan(|x|)
        let cdf = |level: f64| {
            let t = real::tan(real::FRAC_PI_2 * level);
            if t >= 2.0 {
                1.0
            } else {
                2.0 / real::PI * real::asin_clamped(t / 2.0)
            }
        };
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (cdf(*x) - i as f64 / n).abs().max((cdf(*x) - (i + 1) as f64 / n).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "KS distance {ks}");
    }

    #[test]
    fn invariance_audit() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&m, 10_000, 50, 21).unwrap();
        let mut a: Vec<f64> = s.points.iter().map(fs_distance_origin).collect();
        let mut b: Vec<f64> = s.points.iter().map(|p| fs_distance_origin(&m.evaluate(p))).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        // two-sample sup distance via merged scan
        let (mut i, mut j, mut sup) = (0usize, 0usize, 0.0f64);
        let n = a.len() as f64;
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            sup = sup.max((i as f64 - j as f64).abs() / n);
        }
        assert!(sup < 0.03, "invariance sup difference {sup}");
    }

    fn options(n_list: &[usize], eps_list: &[f64]) -> EntropyOptions {
        EntropyOptions {
            n_list: n_list.to_vec(),
            eps_list: eps_list.to_vec(),
            method: EntropyMethod::Correlation,
            seed: 1,
        }
    }

    #[test]
    fn single_orbit_has_zero_entropy() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&m, 1, 50, 1).unwrap();
        let orbits = ReducedOrbits::new(&m, &s.points, 2, 16);
        let est = entropy_estimate(&orbits, Metric::Reduced, &options(&[4, 8, 12, 16], &[0.05, 0.02])).unwrap();
        assert!(est.table.iter().all(|c| c.packing_count == 1 && c.close_pairs == 0));
        assert_eq!(est.verdict, 0.0);
        assert!(!est.saturated);
    }

    #[test]
    fn packing_table_is_monotone() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&m, 300, 50, 2).unwrap();
        let orbits = SphereOrbits::new(&m, &s.points, 12);
        let ns = [2, 4, 8, 12];
        let eps = [0.1, 0.05, 0.02];
        let est = entropy_estimate(&orbits, Metric::Sphere, &options(&ns, &eps)).unwrap();
        for n in ns {
            for w in eps.windows(2) {
                assert!(est.cell(n, w[0]).unwrap().packing_count <= est.cell(n, w[1]).unwrap().packing_count);
                assert!(est.cell(n, w[0]).unwrap().close_pairs >= est.cell(n, w[1]).unwrap().close_pairs);
            }
        }
        for e in eps {
            for w in ns.windows(2) {
                assert!(est.cell(w[0], e).unwrap().packing_count <= est.cell(w[1], e).unwrap().packing_count);
                assert!(est.cell(w[0], e).unwrap().close_pairs >= est.cell(w[1], e).unwrap().close_pairs);
            }
        }
        let again = entropy_estimate(&orbits, Metric::Sphere, &options(&ns, &eps)).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn bowen_distance_matches_profile() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&m, 20, 50, 4).unwrap();
        let sphere = SphereOrbits::new(&m, &s.points, 10);
        let reduced = ReducedOrbits::new(&m, &s.points, 3, 10);
        let ns = [1, 5, 10];
        let mut prof = [0.0; 3];
        for i in 0..5 {
            for j in 5..10 {
                sphere.bowen_profile(i, j, &ns, &mut prof);
                for (k, n) in ns.iter().enumerate() {
                    let direct = (0..*n)
                        .map(|t| fs_distance(&m.evaluate_n(&s.points[i], t), &m.evaluate_n(&s.points[j], t)))
                        .fold(0.0, f64::max);
                    assert!((prof[k] - direct).abs() < 1e-9);
                    assert!((sphere.bowen_distance(i, j, *n, f64::INFINITY) - prof[k]).abs() < 1e-15);
                }
                reduced.bowen_profile(i, j, &ns, &mut prof);
                for (k, n) in ns.iter().enumerate() {
                    assert_eq!(reduced.bowen_distance(i, j, *n, f64::INFINITY), prof[k]);
                }
            }
        }
    }

    #[test]
    fn list_validation() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let orbits = ReducedOrbits::new(&m, &[SpherePoint::real(0.3)], 0, 8);
        assert!(entropy_estimate(&orbits, Metric::Reduced, &options(&[4, 2], &[0.1, 0.05])).is_err());
        assert!(entropy_estimate(&orbits, Metric::Reduced, &options(&[4, 16], &[0.1, 0.05])).is_err());
        assert!(entropy_estimate(&orbits, Metric::Reduced, &options(&[4, 8], &[0.05, 0.1])).is_err());
    }

    #[test]
    fn local_entropy_of_collapsed_measure_is_zero() {
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&sq, 500, 50, 8).unwrap();
        let orbits = ReducedOrbits::new(&sq, &s.points, 2, 8);
        let witness = sq.levels(&SpherePoint::polar(1.0, 0.3), 12);
        let le = local_entropy_estimate(&orbits, &witness, 0.01, &[1, 2, 4, 8]).unwrap();
        assert!(le.values.iter().all(|(_, v)| *v == Some(0.0)));
        assert_eq!(le.liminf, Some(0.0));
        let far = sq.levels(&SpherePoint::real(0.2), 12);
        assert_eq!(local_entropy_estimate(&orbits, &far, 0.01, &[1, 2]), Err(Error::ZeroCount(1)));
    }

    #[test]
    fn local_entropy_first_value_bounded_by_log_count() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&m, 2000, 50, 8).unwrap();
        let orbits = ReducedOrbits::new(&m, &s.points, 2, 8);
        let witness = m.levels(&s.points[0], 12);
        let le = local_entropy_estimate(&orbits, &witness, 0.05, &[1, 2, 4, 8]).unwrap();
        assert!(le.values[0].1.unwrap() <= real::ln(2000.0));
    }

    #[test]
    fn circle_fit_examples() {
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&sq, 500, 50, 1).unwrap();
        let fit = circle_fit(&s.points).unwrap();
        assert!(fit.max_deviation < 1e-5);
        match fit.circle {
            FittedCircle::Circle { center, radius } => {
                assert!(center.norm() < 1e-6 && (radius - 1.0).abs() < 1e-6);
            }
            other => panic!("expected a circle, got {other:?}"),
        }
        let cheb = map(&[-2.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&cheb, 500, 50, 1).unwrap();
        let fit = circle_fit(&s.points).unwrap();
        assert!(fit.max_deviation < 1e-3);
        assert!(matches!(fit.circle, FittedCircle::Line { normal, offset } if normal.re.abs() < 1e-4 && offset.abs() < 1e-4));
        let basilica = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let s = backward_orbit_sample(&basilica, 500, 50, 1).unwrap();
        assert!(circle_fit(&s.points).unwrap().max_deviation > 0.05);
    }

    #[test]
    fn circle_fit_through_infinity_and_degenerate() {
        // the imaginary axis plus infinity
        let mut pts: Vec<SpherePoint> = (1..12).map(|k| SpherePoint::finite(Complex64::new(0.0, k as f64 - 6.5))).collect();
        pts.push(SpherePoint::INFINITY);
        let fit = circle_fit(&pts).unwrap();
        assert!(fit.max_deviation < 1e-12);
        let same = [SpherePoint::real(1.0); 12];
        assert_eq!(circle_fit(&same), Err(Error::DegenerateFit));
        assert!(circle_fit(&same[..3]).is_err());
    }
}
