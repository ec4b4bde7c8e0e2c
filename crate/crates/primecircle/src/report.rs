//! JSON and CSV renderings of core results.
//!
//! Every JSON document carries the [`RunConfig`] that produced it. Complex
//! numbers and sphere points are strings in the map text format.

use serde::Serialize;

use primecircle_core::ergodic::{EntropyEstimate, EntropyMethod, Metric};
use primecircle_core::mirrors::{DichotomyReport, MirrorPair, Verdict};
use primecircle_core::{ExceptionalClass, FiberReport};

use crate::config::RunConfig;
use crate::format::{format_complex, format_point};

pub const FIBER_NOTE: &str = "0 and ∞ are never mirrored";

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOutput {
    pub kind: &'static str,
    pub a: Option<String>,
    pub exp: Option<i32>,
    pub radius: Option<f64>,
    /// Invariant prime circle certifying the class, absent for non-exceptional maps.
    pub witness: Option<Witness>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub radius: f64,
    pub julia_on_circle: bool,
}

impl ClassifyOutput {
    pub fn new(class: &ExceptionalClass, config: RunConfig) -> Self {
        let (kind, a, exp) = match class {
            ExceptionalClass::PowerMap { a, exponent, .. } => ("PowerMap", Some(format_complex(*a)), Some(*exponent)),
            ExceptionalClass::StronglyExceptional { .. } => ("StronglyExceptional", None, None),
            ExceptionalClass::Exceptional { .. } => ("Exceptional", None, None),
            ExceptionalClass::NonExceptional => ("NonExceptional", None, None),
        };
        let radius = class.radius();
        ClassifyOutput {
            kind,
            a,
            exp,
            radius,
            witness: radius.map(|radius| Witness {
                radius,
                julia_on_circle: class.is_strongly_exceptional(),
            }),
            config,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberOutput {
    pub point: String,
    pub depth: usize,
    pub mirrors: Vec<String>,
    pub infinite: bool,
    pub note: Option<&'static str>,
    pub config: RunConfig,
}

impl FiberOutput {
    pub fn new(report: &FiberReport, config: RunConfig) -> Self {
        let trivial = report.base.is_zero() || report.base.is_infinity();
        FiberOutput {
            point: format_point(&report.base),
            depth: report.checked_depth,
            mirrors: report.mirrors.iter().map(format_point).collect(),
            infinite: report.infinite,
            note: trivial.then_some(FIBER_NOTE),
            config,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyCellOutput {
    pub n: usize,
    pub epsilon: f64,
    pub packing_count: usize,
    #[serde(rename = "H_eps")]
    pub h_eps: f64,
    pub close_pairs: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyRateOutput {
    pub epsilon: f64,
    pub packing_rate: f64,
    pub correlation_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyOutput {
    pub metric: &'static str,
    pub method: &'static str,
    pub depth: Option<usize>,
    pub orbit_count: usize,
    pub verdict: f64,
    pub spread: f64,
    pub saturated: bool,
    pub table: Vec<EntropyCellOutput>,
    pub rates: Vec<EntropyRateOutput>,
    pub config: RunConfig,
}

/// `log N(n, eps) / n`.
pub fn h_eps(packing_count: usize, n: usize) -> f64 {
    (packing_count as f64).ln() / n as f64
}

impl EntropyOutput {
    pub fn new(estimate: &EntropyEstimate, depth: Option<usize>, config: RunConfig) -> Self {
        EntropyOutput {
            metric: match estimate.metric {
                Metric::Sphere => "sphere",
                Metric::Reduced => "reduced",
            },
            method: match estimate.method {
                EntropyMethod::Packing => "packing",
                EntropyMethod::Correlation => "correlation",
            },
            depth,
            orbit_count: estimate.orbit_count,
            verdict: estimate.verdict,
            spread: estimate.spread,
            saturated: estimate.saturated,
            table: estimate
                .table
                .iter()
                .map(|c| EntropyCellOutput {
                    n: c.n,
                    epsilon: c.epsilon,
                    packing_count: c.packing_count,
                    h_eps: h_eps(c.packing_count, c.n),
                    close_pairs: c.close_pairs,
                })
                .collect(),
            rates: estimate
                .rates
                .iter()
                .map(|r| EntropyRateOutput {
                    epsilon: r.epsilon,
                    packing_rate: r.packing_rate,
                    correlation_rate: r.correlation_rate,
                })
                .collect(),
            config,
        }
    }

    /// Table as CSV with columns `n, epsilon, packing_count, H_eps, close_pairs`.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for cell in &self.table {
            w.serialize(cell).expect("in-memory csv write");
        }
        w.into_inner().expect("in-memory csv flush")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MirrorPairOutput {
    pub critical_point: String,
    pub epsilon: f64,
    pub z: String,
    pub w: String,
    pub image_match: f64,
    pub modulus_match: f64,
}

impl MirrorPairOutput {
    pub fn new(c: &str, pair: &MirrorPair) -> Self {
        MirrorPairOutput {
            critical_point: c.to_string(),
            epsilon: pair.epsilon,
            z: format_point(&pair.z),
            w: format_point(&pair.w),
            image_match: pair.image_match,
            modulus_match: pair.modulus_match,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MirrorsOutput {
    pub depth: usize,
    pub sample_count: usize,
    pub mirrored_fraction: f64,
    pub verdict: &'static str,
    pub mirrored_points: Vec<String>,
    /// Constructed pairs near each finite critical point, at shrinking scales.
    pub critical_pairs: Vec<MirrorPairOutput>,
    pub config: RunConfig,
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::DenseOpen => "DenseOpen",
        Verdict::Curve => "Curve",
        Verdict::Inconclusive => "Inconclusive",
    }
}

impl MirrorsOutput {
    pub fn new(report: &DichotomyReport, critical_pairs: Vec<MirrorPairOutput>, config: RunConfig) -> Self {
        MirrorsOutput {
            depth: report.depth,
            sample_count: report.sample_count,
            mirrored_fraction: report.mirrored_fraction,
            verdict: verdict_name(report.verdict),
            mirrored_points: report.mirrored_points.iter().map(format_point).collect(),
            critical_pairs,
            config,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use primecircle_core::ergodic::{EntropyCell, EntropyRate};
    use primecircle_core::{Complex64, SpherePoint};

    #[test]
    fn h_eps_is_log_count_per_step() {
        assert_eq!(h_eps(1, 4), 0.0);
        assert!((h_eps(16, 4) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn csv_header_and_rows() {
        let estimate = EntropyEstimate {
            metric: Metric::Reduced,
            method: EntropyMethod::Correlation,
            orbit_count: 10,
            table: vec![
                EntropyCell { n: 4, epsilon: 0.05, packing_count: 3, close_pairs: 7 },
                EntropyCell { n: 8, epsilon: 0.05, packing_count: 5, close_pairs: 2 },
            ],
            rates: vec![EntropyRate { epsilon: 0.05, packing_rate: 0.1, correlation_rate: Some(0.3) }],
            verdict: 0.3,
            spread: 0.0,
            saturated: false,
        };
        let out = EntropyOutput::new(&estimate, Some(8), crate::commands::tests::config());
        let text = String::from_utf8(out.to_csv()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,epsilon,packing_count,H_eps,close_pairs");
        assert!(lines[1].starts_with("4,0.05,3,0.27465307"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn trivial_fibers_carry_the_note() {
        let report = FiberReport { base: SpherePoint::finite(Complex64::new(0.0, 0.0)), mirrors: vec![], infinite: false, checked_depth: 8 };
        let out = FiberOutput::new(&report, crate::commands::tests::config());
        assert_eq!(out.note, Some(FIBER_NOTE));
        assert_eq!(out.point, "0+0i");
    }
}
