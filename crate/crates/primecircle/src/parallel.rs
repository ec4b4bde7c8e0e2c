//! Rayon-backed versions of the sampling-heavy core routines.
//!
//! Every item draws from its own counter-derived stream and results are
//! collected in index order, so outputs match the sequential routines exactly.

use rayon::prelude::*;

use primecircle_core::ergodic::{
    self, assemble_estimate, greedy_packing, BowenOrbits, EntropyEstimate, EntropyOptions, MeasureSample, Metric,
};
use primecircle_core::mirrors::{self, DichotomyReport};
use primecircle_core::reduction::{self, FiberAudit};
use primecircle_core::rng::run_rng;
use primecircle_core::{Error, RationalMap, Result};
use rand::seq::SliceRandom;

pub fn backward_orbit_sample(map: &RationalMap, count: usize, burn_in: usize, seed: u64) -> Result<MeasureSample> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let points = (0..count as u64)
        .into_par_iter()
        .map(|i| ergodic::backward_orbit_point(map, burn_in, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureSample {
        points,
        burn_in,
        seed,
        map_digest: ergodic::digest_string(map),
    })
}

pub fn fiber_bound_audit(map: &RationalMap, samples: usize, depth: usize, seed: u64) -> Result<FiberAudit> {
    if depth == 0 {
        return Err(Error::InvalidArgument("fiber audit needs depth >= 1".into()));
    }
    let counts = (0..samples as u64)
        .into_par_iter()
        .map(|i| reduction::audit_sample(map, depth, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduction::audit_report(map, &counts))
}

pub fn mirrored_fraction(map: &RationalMap, samples: usize, depth: usize, seed: u64) -> Result<DichotomyReport> {
    let levels = mirrors::infinite_circle_levels(map);
    let results = (0..samples as u64)
        .into_par_iter()
        .map(|i| mirrors::sample_mirrored(map, depth, seed, i, &levels))
        .collect::<Result<Vec<_>>>()?;
    Ok(mirrors::dichotomy_report(depth, &results))
}

/// Entropy estimate with packing cells computed concurrently and close pairs
/// counted by rows in parallel.
pub fn entropy_estimate<O>(orbits: &O, metric: Metric, options: &EntropyOptions) -> Result<EntropyEstimate>
where
    O: BowenOrbits + Sync + ?Sized,
{
    if orbits.is_empty() {
        return Err(Error::InvalidArgument("no orbits".into()));
    }
    let (n_list, eps_list) = (&options.n_list, &options.eps_list);
    ergodic::validate_lists(n_list, eps_list, orbits.max_steps())?;
    let mut order: Vec<usize> = (0..orbits.len()).collect();
    order.shuffle(&mut run_rng(options.seed));
    let cells: Vec<(usize, usize)> = (0..n_list.len()).flat_map(|k| (0..eps_list.len()).map(move |e| (k, e))).collect();
    let flat: Vec<usize> = cells
        .par_iter()
        .map(|&(k, e)| greedy_packing(orbits, &order, n_list[k], eps_list[e]))
        .collect();
    let packing: Vec<Vec<usize>> = flat.chunks(eps_list.len()).map(|c| c.to_vec()).collect();
    let m = orbits.len();
    let zero = || vec![vec![0u64; eps_list.len()]; n_list.len()];
    let pairs = (0..m)
        .into_par_iter()
        .fold(zero, |mut acc, i| {
            let mut profile = vec![0.0; n_list.len()];
            for j in (i + 1)..m {
                orbits.bowen_profile(i, j, n_list, &mut profile);
                for (k, d) in profile.iter().enumerate() {
                    for (e, eps) in eps_list.iter().enumerate() {
                        if d < eps {
                            acc[k][e] += 1;
                        }
                    }
                }
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        });
    Ok(assemble_estimate(metric, m, options, &packing, &pairs))
}
