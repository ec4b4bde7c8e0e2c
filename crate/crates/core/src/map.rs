//! Rational maps of the Riemann sphere.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Complex, Error, Result};
use crate::poly::{self, RootCluster};
use crate::real;
use crate::sphere::{fs_distance_origin, SpherePoint};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Top coefficients below this fraction of the largest coefficient are dropped.
pub const TRIM_TOL: f64 = 1e-14;
/// Relative residual under which two polynomials count as sharing a root.
pub const COPRIME_TOL: f64 = 1e-8;
/// Relative coefficient size under which the circle numerator vanishes.
pub const CIRCLE_TOL: f64 = 1e-9;
/// Relative distance from the unit circle accepted for a crossing.
pub const CROSSING_TOL: f64 = 1e-8;
/// Roots closer than this (relative) are one root with multiplicity.
pub const CLUSTER_TOL: f64 = 1e-7;

/// `R = P / Q` with `P`, `Q` coprime and `d = max(deg P, deg Q) >= 2`.
#[derive(Clone, PartialEq)]
pub struct RationalMap {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    degree: usize,
    // coefficient of v^j in P_h(1, v) is num[d - j]
    num_rev: Vec<Complex64>,
    den_rev: Vec<Complex64>,
}

impl core::fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RationalMap")
            .field("num", &self.num)
            .field("den", &self.den)
            .field("degree", &self.degree)
            .finish()
    }
}

impl RationalMap {
    /// Builds `P / Q` from ascending coefficient lists.
    pub fn new(num: &[Complex64], den: &[Complex64]) -> Result<Self> {
        let scale = poly::max_abs(num).max(poly::max_abs(den));
        if num.iter().chain(den).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidMap("non-finite coefficient"));
        }
        let tol = TRIM_TOL * scale;
        let m = poly::effective_degree(num, tol).ok_or(Error::InvalidMap("numerator is the zero polynomial"))?;
        let k = poly::effective_degree(den, tol).ok_or(Error::InvalidMap("denominator is the zero polynomial"))?;
        let num = num[..=m].to_vec();
        let den = den[..=k].to_vec();
        let degree = m.max(k);
        if degree < 2 {
            return Err(Error::Degree(degree));
        }
        check_coprime(&num, &den)?;
        check_coprime(&den, &num)?;
        Ok(Self::from_parts(num, den, degree))
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        let n: Vec<Complex64> = num.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let d: Vec<Complex64> = den.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        Self::new(&n, &d)
    }

    fn from_parts(num: Vec<Complex64>, den: Vec<Complex64>, degree: usize) -> Self {
        let rev = |p: &[Complex64]| -> Vec<Complex64> {
            (0..=degree).map(|j| p.get(degree - j).copied().unwrap_or(ZERO)).collect()
        };
        let num_rev = rev(&num);
        let den_rev = rev(&den);
        RationalMap {
            num,
            den,
            degree,
            num_rev,
            den_rev,
        }
    }

    pub fn num(&self) -> &[Complex64] {
        &self.num
    }

    pub fn den(&self) -> &[Complex64] {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// FNV-1a hash of the coefficient bit patterns; a stable identifier for
    /// reproducibility records.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        feed(self.num.len() as u64);
        for c in &self.num {
            feed(c.re.to_bits());
            feed(c.im.to_bits());
        }
        feed(self.den.len() as u64);
        for c in &self.den {
            feed(c.re.to_bits());
            feed(c.im.to_bits());
        }
        h
    }

    /// True when every coefficient has zero imaginary part.
    pub fn has_real_coefficients(&self) -> bool {
        self.num.iter().chain(&self.den).all(|c| c.im == 0.0)
    }

    /// `[P_h(u, v) : Q_h(u, v)]` with `P_h`, `Q_h` the degree-`d`
    /// homogenizations.
    pub fn homogeneous(&self, z: &SpherePoint) -> (Complex64, Complex64) {
        if z.v() == Complex64::new(1.0, 0.0) {
            (poly::eval(&self.num, z.u()), poly::eval(&self.den, z.u()))
        } else {
            (poly::eval(&self.num_rev, z.v()), poly::eval(&self.den_rev, z.v()))
        }
    }

    pub fn evaluate(&self, z: &SpherePoint) -> SpherePoint {
        let (p, q) = self.homogeneous(z);
        // (0, 0) only occurs at a numerically common root of P and Q
        SpherePoint::from_homogeneous(p, q).unwrap_or(SpherePoint::INFINITY)
    }

    pub fn evaluate_complex(&self, z: Complex64) -> SpherePoint {
        self.evaluate(&SpherePoint::finite(z))
    }

    /// `R^n(z)`.
    pub fn evaluate_n(&self, z: &SpherePoint, n: usize) -> SpherePoint {
        (0..n).fold(*z, |acc, _| self.evaluate(&acc))
    }

    pub fn iterate(&self, z0: &SpherePoint, n: usize) -> OrbitTrace {
        let mut points = Vec::with_capacity(n + 1);
        let mut z = *z0;
        points.push(z);
        for _ in 0..n {
            z = self.evaluate(&z);
            points.push(z);
        }
        let reduced = points.iter().map(fs_distance_origin).collect();
        OrbitTrace { points, reduced }
    }

    /// Fubini-Study levels `d_FS(0, R^i z)` for `i = 0..=n`.
    pub fn levels(&self, z0: &SpherePoint, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut z = *z0;
        out.push(fs_distance_origin(&z));
        for _ in 0..n {
            z = self.evaluate(&z);
            out.push(fs_distance_origin(&z));
        }
        out
    }

    /// The `d` solutions of `R(z) = w`, with multiplicity. Infinity is reported
    /// once for every power of `z` that cancels between `P` and `w Q`.
    pub fn preimages(&self, w: &SpherePoint) -> Result<Vec<SpherePoint>> {
        let d = self.degree;
        // b P(z) - a Q(z) for w = [a : b]
        let h: Vec<Complex64> = (0..=d)
            .map(|i| {
                let p = self.num.get(i).copied().unwrap_or(ZERO);
                let q = self.den.get(i).copied().unwrap_or(ZERO);
                w.v() * p - w.u() * q
            })
            .collect();
        let h = poly::trim(&h, 1e-13);
        if h.is_empty() {
            return Err(Error::InvalidMap("preimage equation vanishes identically"));
        }
        let finite_degree = h.len() - 1;
        let mut out: Vec<SpherePoint> = poly::roots(&h)?.into_iter().map(SpherePoint::finite).collect();
        out.extend(core::iter::repeat(SpherePoint::INFINITY).take(d - finite_degree));
        Ok(out)
    }

    /// Critical points with multiplicity (`2d - 2` in total): zeros of
    /// `P'Q - PQ'`, plus infinity for the degree lost to cancellation.
    pub fn critical_points(&self) -> Result<Vec<SpherePoint>> {
        let a = poly::mul(&poly::derivative(&self.num), &self.den);
        let b = poly::mul(&self.num, &poly::derivative(&self.den));
        let scale = poly::max_abs(&a).max(poly::max_abs(&b));
        let w = poly::sub(&a, &b);
        let tol = 1e-12 * scale;
        let top = poly::effective_degree(&w, tol).unwrap_or(0);
        let w = &w[..=top];
        let total = 2 * self.degree - 2;
        let mut out: Vec<SpherePoint> = poly::roots(w)?.into_iter().map(SpherePoint::finite).collect();
        out.extend(core::iter::repeat(SpherePoint::INFINITY).take(total.saturating_sub(top)));
        Ok(out)
    }

    /// Distinct critical points with their multiplicities (local degree minus
    /// one), clustered at `CLUSTER_TOL`.
    pub fn critical_clusters(&self) -> Result<Vec<(SpherePoint, usize)>> {
        let pts = self.critical_points()?;
        let mut out: Vec<(SpherePoint, usize)> = Vec::new();
        for p in pts {
            match out.iter_mut().find(|(q, _)| crate::sphere::fs_distance(q, &p) <= CLUSTER_TOL) {
                Some(entry) => entry.1 += 1,
                None => out.push((p, 1)),
            }
        }
        Ok(out)
    }

    /// `R` with every coefficient conjugated, so that `conj(R)(conj z) = conj(R(z))`.
    pub fn conjugate_map(&self) -> RationalMap {
        let num = self.num.iter().map(|c| c.conj()).collect();
        let den = self.den.iter().map(|c| c.conj()).collect();
        Self::from_parts(num, den, self.degree)
    }

    /// Power-map shape `a z^d` or `a z^-d`, judged on coefficients relative to
    /// `rel_tol` times the largest one.
    pub fn power_form(&self, rel_tol: f64) -> Option<(Complex64, i32)> {
        let scale = poly::max_abs(&self.num).max(poly::max_abs(&self.den));
        let tol = rel_tol * scale;
        let support = |p: &[Complex64]| -> Vec<usize> {
            p.iter().enumerate().filter(|(_, c)| real::abs(**c) > tol).map(|(i, _)| i).collect()
        };
        let (sn, sd) = (support(&self.num), support(&self.den));
        let d = self.degree;
        match (sn.as_slice(), sd.as_slice()) {
            ([i], [0]) if *i == d => Some((self.num[d] / self.den[0], d as i32)),
            ([0], [j]) if *j == d => Some((self.num[0] / self.den[d], -(d as i32))),
            _ => None,
        }
    }

    /// Numerator of `R(r1 t) conj(R)(r1 / t) - r2^2` in the rescaled variable
    /// `t = z / r1`, together with the coefficient scale of its two terms.
    ///
    /// On `|t| = 1` this is `t^d Q(r1 t) conj(Q)(r1 / t) (|R(z)|^2 - r2^2)`.
    pub fn circle_numerator(&self, r1: f64, r2: f64) -> (Vec<Complex64>, f64) {
        let d = self.degree;
        let scaled = |p: &[Complex64]| -> Vec<Complex64> {
            let mut s = 1.0;
            p.iter()
                .map(|c| {
                    let out = c * s;
                    s *= r1;
                    out
                })
                .collect()
        };
        // t^d conj(p)(1/t): coefficient of t^(d - i) is conj(p_i)
        let reflected = |p: &[Complex64]| -> Vec<Complex64> {
            (0..=d).map(|j| p.get(d - j).map(|c| c.conj()).unwrap_or(ZERO)).collect()
        };
        let ps = scaled(&self.num);
        let qs = scaled(&self.den);
        let pp = poly::mul(&ps, &reflected(&ps));
        let qq = poly::scale(&poly::mul(&qs, &reflected(&qs)), Complex64::new(r2 * r2, 0.0));
        let scale = poly::max_abs(&pp).max(poly::max_abs(&qq));
        (poly::sub(&pp, &qq), scale)
    }

    /// Largest circle-numerator coefficient relative to the scale of its terms.
    /// Zero exactly when `R` maps `|z| = r1` into `|z| = r2`.
    pub fn circle_residual(&self, r1: f64, r2: f64) -> f64 {
        let (n, scale) = self.circle_numerator(r1, r2);
        if scale == 0.0 {
            return 0.0;
        }
        poly::max_abs(&n) / scale
    }

    /// Whether `R(|z| = r1)` lies inside `|z| = r2`, decided on the coefficients
    /// of the circle numerator.
    pub fn circle_map_test(&self, r1: f64, r2: f64) -> bool {
        self.circle_residual(r1, r2) <= CIRCLE_TOL
    }

    /// Largest `| |R(r1 e^{i theta})| - r2 |` over `samples` equally spaced
    /// angles, relative to `max(1, r2)`.
    pub fn circle_sampled_deviation(&self, r1: f64, r2: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let theta = real::TAU * k as f64 / samples as f64;
                let w = self.evaluate(&SpherePoint::polar(r1, theta));
                (w.modulus() - r2).abs() / r2.max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Points of `|z| = r1` that `R` maps into `|z| = r2` (at most `2d`).
    pub fn circle_crossings(&self, r1: f64, r2: f64) -> Result<Vec<SpherePoint>> {
        let (n, scale) = self.circle_numerator(r1, r2);
        if scale == 0.0 || poly::max_abs(&n) <= CIRCLE_TOL * scale {
            return Err(Error::DegenerateCircle { r1, r2 });
        }
        let tol = 1e-15 * scale;
        let top = match poly::effective_degree(&n, tol) {
            Some(t) => t,
            None => return Err(Error::DegenerateCircle { r1, r2 }),
        };
        let low = n.iter().position(|c| real::abs(*c) > tol).unwrap_or(0);
        let core_poly = &n[low..=top];
        let rts = poly::roots(core_poly)?;
        let mut out = Vec::new();
        for RootCluster { value, multiplicity } in poly::cluster(&rts, CLUSTER_TOL) {
            let t = if multiplicity > 1 {
                poly::refine_multiple(core_poly, value, multiplicity)
            } else {
                value
            };
            if (real::abs(t) - 1.0).abs() <= CROSSING_TOL {
                out.push(SpherePoint::finite(t * r1));
            }
        }
        Ok(out)
    }
}

fn check_coprime(a: &[Complex64], b: &[Complex64]) -> Result<()> {
    if b.len() < 2 {
        return Ok(());
    }
    for zeta in poly::roots(b)? {
        let scale = poly::eval_scale(a, zeta);
        if scale > 0.0 && real::abs(poly::eval(a, zeta)) <= COPRIME_TOL * scale {
            return Err(Error::NotCoprime(Complex(zeta)));
        }
    }
    Ok(())
}

/// An orbit `z_0, ..., z_n` with the Fubini-Study level of every point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub points: Vec<SpherePoint>,
    pub reduced: Vec<f64>,
}

/// Coefficients of `(a z + b) / (c z + d)` applied to polynomials: returns
/// `(num, den)` of `mobius . (p / q)`.
fn mobius_after(m: [Complex64; 4], p: &[Complex64], q: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let [a, b, c, d] = m;
    (
        poly::add(&poly::scale(p, a), &poly::scale(q, b)),
        poly::add(&poly::scale(p, c), &poly::scale(q, d)),
    )
}

/// Substitutes `z -> (a z + b) / (c z + d)` into `p` of formal degree `deg`,
/// clearing the denominator `(c z + d)^deg`.
fn substitute_mobius(p: &[Complex64], deg: usize, m: [Complex64; 4]) -> Vec<Complex64> {
    let [a, b, c, d] = m;
    let lin_num = [b, a];
    let lin_den = [d, c];
    let mut out = vec![ZERO];
    for i in 0..=deg {
        let coef = p.get(i).copied().unwrap_or(ZERO);
        if coef == ZERO {
            continue;
        }
        let mut term = vec![coef];
        for _ in 0..i {
            term = poly::mul(&term, &lin_num);
        }
        for _ in i..deg {
            term = poly::mul(&term, &lin_den);
        }
        out = poly::add(&out, &term);
    }
    out
}

impl RationalMap {
    /// `phi^-1 . self . phi` for the Moebius map `phi(z) = (a z + b) / (c z + d)`.
    pub fn conjugate_by_mobius(&self, phi: [Complex64; 4]) -> Result<RationalMap> {
        let d = self.degree;
        let p = substitute_mobius(&self.num, d, phi);
        let q = substitute_mobius(&self.den, d, phi);
        let [a, b, c, dd] = phi;
        // phi^-1(w) = (dd w - b) / (-c w + a)
        let (num, den) = mobius_after([dd, -b, -c, a], &p, &q);
        RationalMap::new(&num, &den)
    }
}
