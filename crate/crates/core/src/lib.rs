//! Orbit reduction of complex rational dynamics.
//!
//! A rational map `R` of degree `d >= 2` acts on the Riemann sphere. Replacing
//! every orbit point by its Fubini-Study distance to the origin turns an orbit
//! into a sequence in `[0, 1]`; keeping the first `N + 1` values gives the
//! reduction `phi: C^ -> [0, 1]^(N+1)` and an induced map `Q` with
//! `Q . phi = phi . R`.
//!
//! The crate is split along the objects involved:
//!
//! * [`sphere`]: homogeneous points, Fubini-Study distances, prime circles.
//! * [`poly`]: coefficient arithmetic and the root finder every other module
//!   leans on.
//! * [`map`]: rational maps, evaluation, preimages, critical points and the
//!   circle-into-circle test.
//! * [`classify`]: power maps, exceptional and strongly exceptional maps.
//! * [`reduction`]: `phi`, `Q`, the empirical stabilization index and exact
//!   fibers.
//! * [`mirrors`]: mirror pairs near critical points and mirrored-set sampling.
//! * [`ergodic`]: backward-orbit sampling of the measure of maximal entropy,
//!   Bowen-ball entropy estimators and the circle fit.
//!
//! Everything here is `no_std` with `alloc`; IO, the CLI and file formats live
//! in the `primecircle` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod ergodic;
mod error;
pub mod linalg;
pub mod map;
pub mod mirrors;
pub mod poly;
pub mod real;
pub mod reduction;
pub mod rng;
pub mod sphere;

pub use classify::{classify, ExceptionalClass};
pub use error::{Complex, Error, Result};
pub use map::{OrbitTrace, RationalMap};
pub use num_complex::Complex64;
pub use reduction::{FiberReport, ReducedPoint};
pub use sphere::{PrimeCircle, SpherePoint};
