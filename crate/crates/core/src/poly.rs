//! Dense complex polynomials, coefficients ascending in degree.
//!
//! [`roots`] is the kernel behind preimages, circle crossings and critical
//! points: Aberth-Ehrlich simultaneous iteration followed by a guarded Newton
//! polish and a residual check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::real;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const MAX_ABERTH_ITERATIONS: usize = 800;
/// Residual bound: `|p(z)| <= RESIDUAL_TOL * (1 + |z|)^deg * max|coeff|`.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn max_abs(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| real::abs(*c)).fold(0.0, f64::max)
}

/// Index of the highest coefficient whose modulus exceeds `tol`, or `None`
/// if every coefficient is below it.
pub fn effective_degree(coeffs: &[Complex64], tol: f64) -> Option<usize> {
    coeffs.iter().rposition(|c| real::abs(*c) > tol)
}

/// Drops top coefficients with modulus `<= rel_tol * max|coeff|`.
pub fn trim(coeffs: &[Complex64], rel_tol: f64) -> Vec<Complex64> {
    let tol = rel_tol * max_abs(coeffs);
    match effective_degree(coeffs, tol) {
        Some(d) => coeffs[..=d].to_vec(),
        None => Vec::new(),
    }
}

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

/// `(p(z), p'(z))` by Horner.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `sum |c_i| |z|^i`, the natural scale for the rounding error of `eval`.
pub fn eval_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = real::abs(z);
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + real::abs(*c))
}

pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(ZERO) + b.get(i).copied().unwrap_or(ZERO))
        .collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(ZERO) - b.get(i).copied().unwrap_or(ZERO))
        .collect()
}

pub fn scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|c| c * s).collect()
}

/// Pads with zeros up to `len` coefficients.
pub fn padded(a: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = a.to_vec();
    if out.len() < len {
        out.resize(len, ZERO);
    }
    out
}

/// `p(z)` evaluated through the reversed polynomial when `|z| > 1`, returning
/// the Newton correction `p(z) / p'(z)`.
fn newton_ratio(coeffs: &[Complex64], rev: &[Complex64], z: Complex64) -> Complex64 {
    if real::abs(z) <= 1.0 {
        let (p, dp) = eval_with_derivative(coeffs, z);
        p / dp
    } else {
        // p(z) = z^n q(1/z)  =>  p/p' = z / (n - q'(1/z) / (z q(1/z)))
        let n = (coeffs.len() - 1) as f64;
        let y = ONE / z;
        let (q, dq) = eval_with_derivative(rev, y);
        z / (n - dq * y / q)
    }
}

/// All roots of `coeffs` with multiplicity.
///
/// Exact zero low-order coefficients are split off as exact zero roots. Top
/// coefficients that are exactly zero are ignored. A nonzero constant has no
/// roots; the zero polynomial is an error.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let top = match coeffs.iter().rposition(|c| *c != ZERO) {
        Some(t) => t,
        None => return Err(Error::ZeroPolynomial),
    };
    let low = coeffs.iter().position(|c| *c != ZERO).unwrap_or(0);
    let mut out = vec![ZERO; low];
    let p = &coeffs[low..=top];
    let degree = p.len() - 1;
    match degree {
        0 => {}
        1 => out.push(-p[0] / p[1]),
        2 => {
            let pair = quadratic(p[0], p[1], p[2]);
            out.extend(pair.iter().map(|z| polish(p, *z)));
        }
        _ => out.extend(aberth(p)),
    }
    check_residuals(coeffs, &out)?;
    Ok(out)
}

/// Roots of `a + b z + c z^2` by the cancellation-free formula.
fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    // choose the sign that avoids cancellation in b + sqrt(disc)
    let s = if (b.conj() * disc).re >= 0.0 { b + disc } else { b - disc };
    if s == ZERO {
        // b = 0 and disc = 0: double root at 0 only when a = 0 too
        let r = (-a / c).sqrt();
        return [r, -r];
    }
    let q = -s * 0.5;
    [q / c, a / q]
}

fn initial_guesses(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lead = real::abs(p[n]);
    // geometric mean of the root moduli, pulled toward the Cauchy-type bound
    let r = real::powf(real::abs(p[0]) / lead, 1.0 / n as f64);
    let radius = if r.is_finite() && r > 0.0 { r } else { 1.0 };
    (0..n)
        .map(|k| {
            let theta = real::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let rev: Vec<Complex64> = p.iter().rev().copied().collect();
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];
    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut moved = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let ratio = newton_ratio(p, &rev, z[i]);
            if !(ratio.re.is_finite() && ratio.im.is_finite()) {
                done[i] = true;
                continue;
            }
            let mut sum = ZERO;
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff != ZERO {
                        sum += ONE / diff;
                    }
                }
            }
            let step = ratio / (ONE - ratio * sum);
            if !(step.re.is_finite() && step.im.is_finite()) {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            if real::abs(step) <= 4.0 * f64::EPSILON * real::abs(z[i]).max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z.into_iter().map(|r| polish(p, r)).collect()
}

/// A few Newton steps, each kept only if it lowers the residual.
fn polish(p: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = real::abs(eval(p, z));
    for _ in 0..3 {
        if best == 0.0 {
            break;
        }
        let (v, dv) = eval_with_derivative(p, z);
        if dv == ZERO {
            break;
        }
        let cand = z - v / dv;
        let r = real::abs(eval(p, cand));
        if r < best {
            best = r;
            z = cand;
        } else {
            break;
        }
    }
    z
}

fn check_residuals(p: &[Complex64], rts: &[Complex64]) -> Result<()> {
    let deg = p.iter().rposition(|c| *c != ZERO).unwrap_or(0) as i32;
    let m = max_abs(p);
    let mut residuals = Vec::with_capacity(rts.len());
    let mut worst = 0.0f64;
    let mut failed = false;
    for r in rts {
        let res = real::abs(eval(p, *r));
        let bound = RESIDUAL_TOL * real::powi(1.0 + real::abs(*r), deg) * m;
        let rel = res / bound;
        if !(rel <= 1.0) {
            failed = true;
        }
        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
        residuals.push(res);
    }
    if failed {
        Err(Error::RootSolve { residuals, worst })
    } else {
        Ok(())
    }
}

/// A root together with how many computed roots collapsed onto it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Groups roots lying within `tol * (1 + |z|)` of each other (single linkage)
/// and represents every group by its mean.
pub fn cluster(rts: &[Complex64], tol: f64) -> Vec<RootCluster> {
    let n = rts.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0 + real::abs(rts[i]).min(real::abs(rts[j]));
            if real::abs(rts[i] - rts[j]) <= tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut out: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match out.iter_mut().find(|(r, _, _)| *r == root) {
            Some(entry) => {
                entry.1 += rts[i];
                entry.2 += 1;
            }
            None => out.push((root, rts[i], 1)),
        }
    }
    out.into_iter()
        .map(|(_, sum, m)| RootCluster {
            value: sum / m as f64,
            multiplicity: m,
        })
        .collect()
}

/// Refines a root of multiplicity `m` as a simple root of `p^(m-1)`.
pub fn refine_multiple(p: &[Complex64], z: Complex64, m: usize) -> Complex64 {
    let mut q = p.to_vec();
    for _ in 1..m {
        q = derivative(&q);
    }
    if q.len() < 2 {
        return z;
    }
    let mut z = z;
    let mut last = f64::INFINITY;
    for _ in 0..8 {
        let (v, dv) = eval_with_derivative(&q, z);
        if dv == ZERO {
            break;
        }
        let step = v / dv;
        let size = real::abs(step);
        if !(size < last) {
            break;
        }
        z -= step;
        last = size;
        if size <= 4.0 * f64::EPSILON * (1.0 + real::abs(z)) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(rts: &[Complex64], z: Complex64, tol: f64) -> bool {
        rts.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn z_squared_minus_one() {
        let r = roots(&[c(-1.0, 0.0), ZERO, ONE]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(contains(&r, c(1.0, 0.0), 1e-14));
        assert!(contains(&r, c(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn cube_roots_of_minus_one() {
        let r = roots(&[ONE, ZERO, ZERO, ONE]).unwrap();
        assert_eq!(r.len(), 3);
        for k in 0..3 {
            let theta = real::PI / 3.0 + 2.0 * real::PI * k as f64 / 3.0;
            assert!(contains(&r, Complex64::from_polar(1.0, theta), 1e-12));
        }
    }

    #[test]
    fn factored_quadratic_by_substitution() {
        let p = [c(6.0, 0.0), c(-5.0, 0.0), ONE];
        let r = roots(&p).unwrap();
        for z in [c(2.0, 0.0), c(3.0, 0.0)] {
            assert_eq!(eval(&p, z), ZERO);
            assert!(contains(&r, z, 1e-13));
        }
    }

    #[test]
    fn zero_roots_are_exact() {
        let r = roots(&[ZERO, ZERO, c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.iter().filter(|z| **z == ZERO).count(), 2);
        assert!(contains(&r, c(-2.0, 0.0), 1e-14));
    }

    #[test]
    fn constants_and_zero() {
        assert_eq!(roots(&[c(3.0, 0.0)]).unwrap(), Vec::<Complex64>::new());
        assert_eq!(roots(&[ZERO, ZERO]), Err(Error::ZeroPolynomial));
        assert_eq!(roots(&[]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn multiple_roots_cluster() {
        // (z - 1)^3 (z + 2)
        let p = mul(&mul(&[c(-1.0, 0.0), ONE], &[c(-1.0, 0.0), ONE]), &mul(&[c(-1.0, 0.0), ONE], &[c(2.0, 0.0), ONE]));
        let r = roots(&p).unwrap();
        let cl = cluster(&r, 1e-4);
        assert_eq!(cl.len(), 2);
        let triple = cl.iter().find(|k| k.multiplicity == 3).unwrap();
        assert!((refine_multiple(&p, triple.value, 3) - ONE).norm() < 1e-8);
    }

    #[test]
    fn degree_six_wilkinson_like() {
        let mut p = vec![ONE];
        for k in 1..=6 {
            p = mul(&p, &[c(-(k as f64), 0.0), ONE]);
        }
        let r = roots(&p).unwrap();
        for k in 1..=6 {
            assert!(contains(&r, c(k as f64, 0.0), 1e-8));
        }
    }

    fn coeff() -> impl Strategy<Value = Complex64> {
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn residual_bound_holds(cs in proptest::collection::vec(coeff(), 2..9)) {
            prop_assume!(cs.last().unwrap().norm() > 1e-3);
            let r = roots(&cs).unwrap();
            prop_assert_eq!(r.len(), cs.len() - 1);
            let m = max_abs(&cs);
            let deg = (cs.len() - 1) as i32;
            for z in r {
                let bound = RESIDUAL_TOL * (1.0 + z.norm()).powi(deg) * m;
                prop_assert!(eval(&cs, z).norm() <= bound);
            }
        }

        #[test]
        fn roots_reconstruct_polynomial(rs in proptest::collection::vec(coeff(), 1..6)) {
            let mut p = vec![ONE];
            for r in &rs {
                p = mul(&p, &[-r, ONE]);
            }
            let found = roots(&p).unwrap();
            let mut q = vec![ONE];
            for r in &found {
                q = mul(&q, &[-r, ONE]);
            }
            for (a, b) in p.iter().zip(q.iter()) {
                prop_assert!((a - b).norm() < 1e-6);
            }
        }
    }
}
