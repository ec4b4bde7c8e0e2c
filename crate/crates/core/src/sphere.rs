//! Points of the Riemann sphere and the Fubini-Study metric.
//!
//! Points are stored as homogeneous pairs `[u : v]` scaled so that the larger
//! coordinate is exactly `1`. Finite points with `|z| <= 1` are `[z : 1]`, all
//! others are `[1 : 1/z]`, and infinity is `[1 : 0]`.

use core::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::real;

#[derive(Clone, Copy, PartialEq)]
pub struct SpherePoint {
    u: Complex64,
    v: Complex64,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint {
        u: Complex64::new(0.0, 0.0),
        v: Complex64::new(1.0, 0.0),
    };
    pub const INFINITY: SpherePoint = SpherePoint {
        u: Complex64::new(1.0, 0.0),
        v: Complex64::new(0.0, 0.0),
    };

    /// Normalizes a homogeneous pair. Returns `None` for `(0, 0)` or non-finite
    /// input.
    pub fn from_homogeneous(u: Complex64, v: Complex64) -> Option<Self> {
        let (au, av) = (real::abs(u), real::abs(v));
        if !(au.is_finite() && av.is_finite()) || (au == 0.0 && av == 0.0) {
            return None;
        }
        if au > av {
            Some(SpherePoint {
                u: Complex64::new(1.0, 0.0),
                v: v / u,
            })
        } else {
            Some(SpherePoint {
                u: u / v,
                v: Complex64::new(1.0, 0.0),
            })
        }
    }

    /// The affine point `z`. Infinite or NaN input maps to infinity.
    pub fn finite(z: Complex64) -> Self {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Self::INFINITY;
        }
        if real::abs(z) <= 1.0 {
            SpherePoint {
                u: z,
                v: Complex64::new(1.0, 0.0),
            }
        } else {
            SpherePoint {
                u: Complex64::new(1.0, 0.0),
                v: Complex64::new(1.0, 0.0) / z,
            }
        }
    }

    pub fn real(x: f64) -> Self {
        Self::finite(Complex64::new(x, 0.0))
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn is_infinity(&self) -> bool {
        self.v == Complex64::new(0.0, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.u == Complex64::new(0.0, 0.0)
    }

    /// Affine coordinate `u / v`, or `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_infinity() {
            None
        } else if self.v == Complex64::new(1.0, 0.0) {
            Some(self.u)
        } else {
            Some(self.u / self.v)
        }
    }

    /// `|z|`, with `f64::INFINITY` at infinity.
    pub fn modulus(&self) -> f64 {
        if self.is_infinity() {
            f64::INFINITY
        } else {
            real::abs(self.u) / real::abs(self.v)
        }
    }

    /// `1 / |z|`, with `f64::INFINITY` at zero.
    pub fn inverse_modulus(&self) -> f64 {
        if self.is_zero() {
            f64::INFINITY
        } else {
            real::abs(self.v) / real::abs(self.u)
        }
    }

    pub fn conj(&self) -> Self {
        SpherePoint {
            u: self.u.conj(),
            v: self.v.conj(),
        }
    }

    /// Unit vector in R^3 under the inverse stereographic projection, with
    /// infinity at the north pole `(0, 0, 1)`.
    pub fn to_unit_vector(&self) -> [f64; 3] {
        let nu = self.u.norm_sqr();
        let nv = self.v.norm_sqr();
        let s = nu + nv;
        let w = self.u * self.v.conj();
        [2.0 * w.re / s, 2.0 * w.im / s, (nu - nv) / s]
    }

    pub fn from_unit_vector(p: [f64; 3]) -> Self {
        // [u : v] = [x + iy : 1 - t] = [1 + t : x - iy]
        let (x, y, t) = (p[0], p[1], p[2]);
        if t <= 0.0 {
            Self::from_homogeneous(Complex64::new(x, y), Complex64::new(1.0 - t, 0.0))
        } else {
            Self::from_homogeneous(Complex64::new(1.0 + t, 0.0), Complex64::new(x, -y))
        }
        .unwrap_or(Self::INFINITY)
    }

    /// Point drawn from the rotation-invariant area measure of the sphere.
    pub fn sample_uniform<G: Rng + ?Sized>(rng: &mut G) -> Self {
        let t: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..real::TAU);
        let s = real::sqrt((1.0 - t * t).max(0.0));
        Self::from_unit_vector([s * real::cos(phi), s * real::sin(phi), t])
    }

    /// Point with modulus `radius` and argument `theta`.
    pub fn polar(radius: f64, theta: f64) -> Self {
        if radius.is_infinite() {
            return Self::INFINITY;
        }
        Self::finite(Complex64::from_polar(radius, theta))
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        fs_distance(self, other) <= tol
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_complex() {
            Some(z) => write!(f, "{}{:+}i", z.re, z.im),
            None => f.write_str("inf"),
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::finite(z)
    }
}

/// Fubini-Study distance from the origin, `(2/pi) arccos(|v| / |(u, v)|)`.
///
/// Evaluated as `(2/pi) atan2(|u|, |v|)`, which is the same angle without the
/// loss of precision of `arccos` near `1`.
pub fn fs_distance_origin(z: &SpherePoint) -> f64 {
    if z.is_zero() {
        return 0.0;
    }
    if z.is_infinity() {
        return 1.0;
    }
    let d = real::FRAC_2_PI * real::atan2(real::abs(z.u), real::abs(z.v));
    d.clamp(0.0, 1.0)
}

/// Fubini-Study distance `(2/pi) arccos(|<z, w>| / (|z| |w|))`.
///
/// The angle is recovered from both its cosine (the Hermitian product) and its
/// sine (the determinant), so that `fs_distance(z, z) == 0` exactly.
pub fn fs_distance(z: &SpherePoint, w: &SpherePoint) -> f64 {
    let inner = z.u * w.u.conj() + z.v * w.v.conj();
    let det = z.u * w.v - z.v * w.u;
    let d = real::FRAC_2_PI * real::atan2(real::abs(det), real::abs(inner));
    d.clamp(0.0, 1.0)
}

/// Radius of the prime circle at Fubini-Study level `level`.
pub fn radius_of_level(level: f64) -> f64 {
    if level >= 1.0 {
        f64::INFINITY
    } else {
        real::tan(real::FRAC_PI_2 * level)
    }
}

/// Fubini-Study level of the prime circle of radius `radius`.
pub fn level_of_radius(radius: f64) -> f64 {
    if radius.is_infinite() {
        1.0
    } else {
        real::FRAC_2_PI * real::atan(radius)
    }
}

/// A level set of `z -> d_FS(0, z)`: the origin-centered circle
/// `|z| = tan(pi * level / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeCircle {
    radius: f64,
    level: f64,
}

impl PrimeCircle {
    pub fn from_level(level: f64) -> Result<Self> {
        if !(level > 0.0) {
            return Err(Error::DegenerateLevel(level, "{0}"));
        }
        if !(level < 1.0) {
            return Err(Error::DegenerateLevel(level, "{inf}"));
        }
        Ok(PrimeCircle {
            radius: radius_of_level(level),
            level,
        })
    }

    pub fn from_radius(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::DegenerateLevel(0.0, "{0}"));
        }
        if !radius.is_finite() {
            return Err(Error::DegenerateLevel(1.0, "{inf}"));
        }
        Ok(PrimeCircle {
            radius,
            level: level_of_radius(radius),
        })
    }

    /// The prime circle through `z`, if `z` is neither `0` nor infinity.
    pub fn through(z: &SpherePoint) -> Result<Self> {
        let level = fs_distance_origin(z);
        let radius = z.modulus();
        if z.is_zero() {
            return Err(Error::DegenerateLevel(0.0, "{0}"));
        }
        if z.is_infinity() {
            return Err(Error::DegenerateLevel(1.0, "{inf}"));
        }
        Ok(PrimeCircle { radius, level })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn point(&self, theta: f64) -> SpherePoint {
        SpherePoint::polar(self.radius, theta)
    }

    /// Fubini-Study distance from `z` to the circle; the nearest point of the
    /// circle lies on the meridian through `z`.
    pub fn distance(&self, z: &SpherePoint) -> f64 {
        (fs_distance_origin(z) - self.level).abs()
    }
}
