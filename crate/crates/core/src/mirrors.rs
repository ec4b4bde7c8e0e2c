//! Mirror pairs near critical points and sampling of the mirrored set.
//!
//! Near a critical point `c` of local degree `k` the preimages of a small
//! circle `v + eps e^{i theta}` around `v = R(c)` form `k` branches that are
//! permuted as `theta` goes once around. Two branches therefore swap the sign
//! of their modulus difference somewhere on `[0, 2 pi]`, and at that angle they
//! are distinct points with equal modulus and equal image: a mirror pair.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::map::{RationalMap, CLUSTER_TOL};
use crate::real;
use crate::reduction::fiber;
use crate::rng::stream;
use crate::sphere::{fs_distance, fs_distance_origin, level_of_radius, SpherePoint};

/// Angles sampled on one sweep of the small circle.
pub const SWEEP_SAMPLES: usize = 720;
/// Modulus difference at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-10;
/// Times `eps` may be halved before giving up.
pub const MAX_HALVINGS: usize = 40;
/// Both defining residuals of a reported pair stay below this.
pub const PAIR_TOL: f64 = 1e-8;
/// Points this close to a circle with an infinite fiber count as mirrored.
pub const INFINITE_CIRCLE_TOL: f64 = 1e-6;
pub const DENSE_OPEN_THRESHOLD: f64 = 0.9;
pub const CURVE_THRESHOLD: f64 = 0.1;

/// Distinct points with equal modulus and equal image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorPair {
    pub z: SpherePoint,
    pub w: SpherePoint,
    /// Radius of the small circle the pair was found on.
    pub epsilon: f64,
    /// `d_FS(R z, R w)`.
    pub image_match: f64,
    /// `| |z| - |w| |`, measured in the reciprocal chart when `|c| > 1`.
    pub modulus_match: f64,
}

impl MirrorPair {
    pub fn swapped(&self) -> MirrorPair {
        MirrorPair {
            z: self.w,
            w: self.z,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    DenseOpen,
    Curve,
    Inconclusive,
}

impl Verdict {
    pub fn from_fraction(fraction: f64) -> Verdict {
        if fraction >= DENSE_OPEN_THRESHOLD {
            Verdict::DenseOpen
        } else if fraction <= CURVE_THRESHOLD {
            Verdict::Curve
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub mirrored_fraction: f64,
    pub sample_count: usize,
    pub depth: usize,
    pub verdict: Verdict,
    /// The sampled points found to be mirrored, in sample order.
    pub mirrored_points: Vec<SpherePoint>,
}

struct Branches<'a> {
    map: &'a RationalMap,
    c: SpherePoint,
    k: usize,
    /// Image of `c` in the chart used for the small circle.
    center: Complex64,
    reciprocal_target: bool,
    reciprocal_modulus: bool,
    /// Branches must stay within this distance of `c`.
    reach: f64,
}

impl Branches<'_> {
    fn target(&self, theta: f64, eps: f64) -> SpherePoint {
        let t = self.center + Complex64::from_polar(eps, theta);
        if self.reciprocal_target {
            SpherePoint::from_homogeneous(Complex64::new(1.0, 0.0), t).unwrap_or(SpherePoint::INFINITY)
        } else {
            SpherePoint::finite(t)
        }
    }

    fn modulus(&self, z: &SpherePoint) -> f64 {
        if self.reciprocal_modulus {
            z.inverse_modulus()
        } else {
            z.modulus()
        }
    }

    /// The `k` preimages nearest `c`, or `None` when they are not clearly
    /// separated from the other preimages or from other critical points.
    fn at(&self, theta: f64, eps: f64) -> Option<Vec<SpherePoint>> {
        let mut pre = self.map.preimages(&self.target(theta, eps)).ok()?;
        pre.sort_by(|a, b| fs_distance(a, &self.c).total_cmp(&fs_distance(b, &self.c)));
        let near = fs_distance(&pre[self.k - 1], &self.c);
        let far = pre.get(self.k).map_or(1.0, |p| fs_distance(p, &self.c));
        if near >= 0.5 * far || near >= self.reach {
            return None;
        }
        pre.truncate(self.k);
        Some(pre)
    }

    /// Branches at `theta` ordered to continue `previous`.
    fn tracked(&self, theta: f64, eps: f64, previous: &[SpherePoint]) -> Option<Vec<SpherePoint>> {
        let mut fresh = self.at(theta, eps)?;
        let mut out = Vec::with_capacity(self.k);
        for p in previous {
            let (idx, _) = fresh
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| fs_distance(a, p).total_cmp(&fs_distance(b, p)))?;
            out.push(fresh.swap_remove(idx));
        }
        Some(out)
    }

    fn gap(&self, br: &[SpherePoint], i: usize, j: usize) -> f64 {
        self.modulus(&br[i]) - self.modulus(&br[j])
    }

    fn pair(&self, z: SpherePoint, w: SpherePoint, eps: f64) -> Option<MirrorPair> {
        let pair = MirrorPair {
            z,
            w,
            epsilon: eps,
            image_match: fs_distance(&self.map.evaluate(&z), &self.map.evaluate(&w)),
            modulus_match: (self.modulus(&z) - self.modulus(&w)).abs(),
        };
        let ok = pair.image_match <= PAIR_TOL && pair.modulus_match <= PAIR_TOL && fs_distance(&z, &w) >= 1e-10;
        ok.then_some(pair)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, eps: f64, left: &[SpherePoint], i: usize, j: usize) -> Option<MirrorPair> {
        let mut left = left.to_vec();
        let mut h_lo = self.gap(&left, i, j);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let br = self.tracked(mid, eps, &left)?;
            let h = self.gap(&br, i, j);
            if h.abs() <= BISECTION_TOL || mid <= lo || mid >= hi {
                return self.pair(br[i], br[j], eps);
            }
            if (h < 0.0) == (h_lo < 0.0) {
                lo = mid;
                h_lo = h;
                left = br;
            } else {
                hi = mid;
            }
        }
        None
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let only_first = self.c.is_zero() || self.c.is_infinity();
        (0..self.k).flat_map(move |i| ((i + 1)..self.k).map(move |j| (i, j))).filter(move |(i, _)| !only_first || *i == 0)
    }

    /// All pairs found on one sweep at scale `eps`, or `None` if the branches
    /// could not be tracked.
    fn sweep(&self, eps: f64) -> Option<Vec<MirrorPair>> {
        let step = real::TAU / SWEEP_SAMPLES as f64;
        let mut prev = self.at(0.0, eps)?;
        let mut found = Vec::new();
        let mut was_zero: Vec<bool> = self.pairs().map(|(i, j)| self.gap(&prev, i, j).abs() <= BISECTION_TOL).collect();
        for (slot, (i, j)) in self.pairs().enumerate() {
            if was_zero[slot] {
                found.extend(self.pair(prev[i], prev[j], eps));
            }
        }
        for m in 1..=SWEEP_SAMPLES {
            let theta = step * m as f64;
            let cur = self.tracked(theta, eps, &prev)?;
            for (slot, (i, j)) in self.pairs().enumerate() {
                let (a, b) = (self.gap(&prev, i, j), self.gap(&cur, i, j));
                let zero = b.abs() <= BISECTION_TOL;
                if zero {
                    if !was_zero[slot] {
                        found.extend(self.pair(cur[i], cur[j], eps));
                    }
                } else if !was_zero[slot] && (a < 0.0) != (b < 0.0) {
                    found.extend(self.bisect(theta - step, theta, eps, &prev, i, j));
                }
                was_zero[slot] = zero;
            }
            prev = cur;
        }
        Some(found)
    }
}

/// Local degree of `R` at `c` (critical multiplicity plus one).
pub fn local_degree(map: &RationalMap, c: &SpherePoint) -> Result<usize> {
    let clusters = map.critical_clusters()?;
    clusters
        .iter()
        .find(|(p, _)| fs_distance(p, c) <= CLUSTER_TOL)
        .map(|(_, m)| m + 1)
        .ok_or(Error::NotCritical(*c))
}

fn branches<'a>(map: &'a RationalMap, c: &SpherePoint) -> Result<Branches<'a>> {
    let clusters = map.critical_clusters()?;
    let (_, mult) = clusters
        .iter()
        .find(|(p, _)| fs_distance(p, c) <= CLUSTER_TOL)
        .ok_or(Error::NotCritical(*c))?;
    let reach = clusters
        .iter()
        .filter(|(p, _)| fs_distance(p, c) > CLUSTER_TOL)
        .map(|(p, _)| 0.5 * fs_distance(p, c))
        .fold(1.0, f64::min);
    let v = map.evaluate(c);
    let reciprocal_target = v.modulus() > 1.0;
    let center = if reciprocal_target { v.v() } else { v.u() };
    Ok(Branches {
        map,
        c: *c,
        k: mult + 1,
        center,
        reciprocal_target,
        reciprocal_modulus: c.modulus() > 1.0,
        reach,
    })
}

/// Every mirror pair found on one sweep around `R(c)`, halving `eps` until the
/// branches are trackable and a pair appears.
pub fn critical_mirror_pairs(map: &RationalMap, c: &SpherePoint, eps: f64) -> Result<Vec<MirrorPair>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let b = branches(map, c)?;
    let mut eps = eps;
    for attempt in 0..=MAX_HALVINGS {
        if attempt > 0 {
            eps *= 0.5;
        }
        if let Some(found) = b.sweep(eps) {
            if !found.is_empty() {
                return Ok(found);
            }
        }
    }
    Err(Error::NoSignChange { epsilon: eps })
}

/// A mirror pair on the preimage of the circle of radius `eps` around `R(c)`.
pub fn critical_mirror_pair(map: &RationalMap, c: &SpherePoint, eps: f64) -> Result<MirrorPair> {
    Ok(critical_mirror_pairs(map, c, eps)?[0])
}

/// One mirror pair per scale, each chosen (and oriented) so that its `z` is
/// nearest the previous `z`.
pub fn mirror_curve_trace(map: &RationalMap, c: &SpherePoint, eps_list: &[f64]) -> Result<Vec<MirrorPair>> {
    if eps_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidArgument("eps_list must be strictly descending".into()));
    }
    let mut out: Vec<MirrorPair> = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let found = critical_mirror_pairs(map, c, eps)?;
        let next = match out.last() {
            None => found[0],
            Some(prev) => found
                .iter()
                .flat_map(|p| [*p, p.swapped()])
                .min_by(|a, b| fs_distance(&a.z, &prev.z).total_cmp(&fs_distance(&b.z, &prev.z)))
                .unwrap_or(found[0]),
        };
        out.push(next);
    }
    Ok(out)
}

/// Levels of prime circles whose fiber is the whole circle: the invariant
/// circle of an exceptional map. Empty when classification fails.
pub fn infinite_circle_levels(map: &RationalMap) -> Vec<f64> {
    match classify(map) {
        Ok(class) => class.radius().map(level_of_radius).into_iter().collect(),
        Err(_) => Vec::new(),
    }
}

/// Whether uniform sample `index` is mirrored at depth `depth`; returns the
/// sampled point in that case.
pub fn sample_mirrored(map: &RationalMap, depth: usize, seed: u64, index: u64, infinite_levels: &[f64]) -> Result<Option<SpherePoint>> {
    let z = SpherePoint::sample_uniform(&mut stream(seed, index));
    let level = fs_distance_origin(&z);
    if infinite_levels.iter().any(|l| (l - level).abs() <= INFINITE_CIRCLE_TOL) {
        return Ok(Some(z));
    }
    let report = fiber(map, &z, depth)?;
    Ok((report.infinite || !report.mirrors.is_empty()).then_some(z))
}

/// Folds per-sample results into a report.
pub fn dichotomy_report(depth: usize, results: &[Option<SpherePoint>]) -> DichotomyReport {
    let mirrored_points: Vec<SpherePoint> = results.iter().flatten().copied().collect();
    let sample_count = results.len();
    let mirrored_fraction = if sample_count == 0 {
        0.0
    } else {
        mirrored_points.len() as f64 / sample_count as f64
    };
    DichotomyReport {
        mirrored_fraction,
        sample_count,
        depth,
        verdict: Verdict::from_fraction(mirrored_fraction),
        mirrored_points,
    }
}

/// Fraction of uniformly sampled points with a nonempty fiber at `depth`.
pub fn mirrored_fraction(map: &RationalMap, samples: usize, depth: usize, seed: u64) -> Result<DichotomyReport> {
    let levels = infinite_circle_levels(map);
    let results = (0..samples as u64)
        .map(|i| sample_mirrored(map, depth, seed, i, &levels))
        .collect::<Result<Vec<_>>>()?;
    Ok(dichotomy_report(depth, &results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn map(num: &[f64], den: &[f64]) -> RationalMap {
        RationalMap::from_real(num, den).unwrap()
    }

    fn shifted() -> RationalMap {
        map(&[2.0, -2.0, 1.0], &[1.0])
    }

    /// `phi^-1 . (i z^2) . phi` with `phi(z) = 2(z - 1)/(z + 2)`.
    fn conjugated_power() -> RationalMap {
        let p = RationalMap::new(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)], &[c(1.0, 0.0)]).unwrap();
        p.conjugate_by_mobius([c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap()
    }

    fn check_depth(m: &RationalMap, p: &MirrorPair) {
        let (mut z, mut w) = (p.z, p.w);
        for _ in 0..=12 {
            let (a, b) = (z.modulus(), w.modulus());
            if a.is_finite() && b.is_finite() {
                assert!((a - b).abs() <= 1e-6 * (1.0 + a), "{a} vs {b}");
            }
            z = m.evaluate(&z);
            w = m.evaluate(&w);
        }
    }

    #[test]
    fn conjugate_symmetric_pair_at_real_critical_point() {
        let m = shifted();
        let p = critical_mirror_pair(&m, &SpherePoint::real(1.0), 0.01).unwrap();
        assert!(p.image_match <= 1e-8 && p.modulus_match <= 1e-8);
        assert!(p.z.approx_eq(&p.w.conj(), 1e-6));
        let z = p.z.to_complex().unwrap();
        assert!(((z - 1.0).norm() - 0.1).abs() < 1e-6);
        check_depth(&m, &p);
    }

    #[test]
    fn power_map_pairs_at_zero() {
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let p = critical_mirror_pair(&sq, &SpherePoint::ZERO, 0.04).unwrap();
        assert!(p.modulus_match <= 1e-12);
        assert!((p.z.modulus() - 0.2).abs() < 1e-12);
        let p = critical_mirror_pair(&sq, &SpherePoint::INFINITY, 0.04).unwrap();
        assert!(p.modulus_match <= 1e-12);
    }

    #[test]
    fn basilica_pair_residuals() {
        let m = map(&[-1.0, 0.0, 1.0], &[1.0]);
        let p = critical_mirror_pair(&m, &SpherePoint::ZERO, 0.01).unwrap();
        assert!(p.image_match <= 1e-8 && p.modulus_match <= 1e-8);
        check_depth(&m, &p);
    }

    #[test]
    fn non_critical_point_is_rejected() {
        assert_eq!(
            critical_mirror_pair(&shifted(), &SpherePoint::real(3.0), 0.01),
            Err(Error::NotCritical(SpherePoint::real(3.0)))
        );
        assert_eq!(local_degree(&map(&[0.0, 0.0, 0.0, 1.0], &[1.0]), &SpherePoint::ZERO), Ok(3));
    }

    #[test]
    fn traces_approach_the_critical_point() {
        let m = shifted();
        let eps: Vec<f64> = (0..7).map(|j| 0.1 * real::powi(0.5, j)).collect();
        let trace = mirror_curve_trace(&m, &SpherePoint::real(1.0), &eps).unwrap();
        assert_eq!(trace.len(), 7);
        let one = SpherePoint::real(1.0);
        for (k, w) in trace.windows(2).enumerate() {
            assert!(fs_distance(&w[1].z, &one) < fs_distance(&w[0].z, &one));
            let (a, b) = (w[0].z.to_complex().unwrap(), w[1].z.to_complex().unwrap());
            assert!((a - b).norm() <= 10.0 * eps[k]);
        }
        for (p, e) in trace.iter().zip(&eps) {
            let d = (p.z.to_complex().unwrap() - 1.0).norm();
            assert!((d - real::sqrt(*e)).abs() < 1e-6);
        }
        let sq = map(&[0.0, 0.0, 1.0], &[1.0]);
        let trace = mirror_curve_trace(&sq, &SpherePoint::ZERO, &[0.04, 0.01]).unwrap();
        assert!((trace[1].z.modulus() - 0.1).abs() < 1e-12);
        assert!(mirror_curve_trace(&m, &one, &[]).unwrap().is_empty());
    }

    #[test]
    fn conjugated_power_pairs_lie_on_the_mirror_circle() {
        let m = conjugated_power();
        let center = c(-0.5, 0.0);
        for cp in [SpherePoint::real(1.0), SpherePoint::real(-2.0)] {
            assert_eq!(local_degree(&m, &cp), Ok(2));
            let trace = mirror_curve_trace(&m, &cp, &[1e-2, 1e-3, 1e-4]).unwrap();
            for p in trace {
                for q in [p.z, p.w] {
                    let d = ((q.to_complex().unwrap() - center).norm() - 1.5).abs();
                    assert!(d < 1e-3, "distance {d}");
                }
            }
        }
    }

    #[test]
    fn dichotomy_examples() {
        let r = mirrored_fraction(&shifted(), 200, 8, 1).unwrap();
        assert!(r.mirrored_fraction >= 0.95);
        assert_eq!(r.verdict, Verdict::DenseOpen);
        let r = mirrored_fraction(&conjugated_power(), 200, 8, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Curve);
        let cube = map(&[0.0, 0.0, 0.0, 1.0], &[1.0]);
        let r = mirrored_fraction(&cube, 100, 8, 1).unwrap();
        assert_eq!(r.mirrored_fraction, 1.0);
        assert_eq!(r.sample_count, 100);
    }

    #[test]
    fn fraction_is_monotone_in_depth() {
        let m = map(&[0.3, -1.0, 1.0], &[1.0, 0.0, 0.4]);
        let mut last = 1.0;
        for depth in [1, 2, 4, 8] {
            let r = mirrored_fraction(&m, 150, depth, 5).unwrap();
            assert!(r.mirrored_fraction <= last);
            last = r.mirrored_fraction;
        }
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::from_fraction(0.9), Verdict::DenseOpen);
        assert_eq!(Verdict::from_fraction(0.1), Verdict::Curve);
        assert_eq!(Verdict::from_fraction(0.5), Verdict::Inconclusive);
        assert_eq!(dichotomy_report(3, &[]).mirrored_fraction, 0.0);
        let r = dichotomy_report(3, &[Some(SpherePoint::ZERO), None]);
        assert_eq!(r.mirrored_points, vec![SpherePoint::ZERO]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_quadratic_pairs(v in proptest::collection::vec(-2.0f64..2.0, 5)) {
            let num = [c(v[0], v[1]), c(v[2], 0.5), c(1.0, 0.0)];
            let den = [c(1.0, 0.0), c(0.0, 0.0), c(v[3], v[4])];
            let m = RationalMap::new(&num, &den);
            prop_assume!(m.is_ok());
            let m = m.unwrap();
            for (cp, _) in m.critical_clusters().unwrap() {
                prop_assume!(!cp.is_infinity());
                let p = critical_mirror_pair(&m, &cp, 1e-3).unwrap();
                prop_assert!(p.image_match <= 1e-8 && p.modulus_match <= 1e-8);
                check_depth(&m, &p);
            }
        }
    }
}
