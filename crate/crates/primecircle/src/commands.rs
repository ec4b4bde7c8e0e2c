//! Command implementations. Each command turns a [`RunConfig`] into the bytes
//! of its output file and an exit code.

use primecircle_core::classify::classify;
use primecircle_core::ergodic::{EntropyMethod, EntropyOptions, Metric, ReducedOrbits, SphereOrbits};
use primecircle_core::mirrors::{self, critical_mirror_pair, critical_mirror_pairs};
use primecircle_core::reduction::{default_depth, fiber, stabilization_index};
use primecircle_core::sphere::radius_of_level;
use primecircle_core::{Error, RationalMap, SpherePoint};

use crate::config::{Command, Format, MethodArg, MetricArg, PlotKind, RunConfig};
use crate::format::{format_point, parse_map, parse_point, ParseError};
use crate::parallel;
use crate::ppm::{Canvas, BLACK, BLUE, RED};
use crate::report::{to_json, ClassifyOutput, EntropyOutput, FiberOutput, MirrorPairOutput, MirrorsOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_SATURATED: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Stabilization search used when no depth is given.
pub const STABILIZATION_MAX: usize = 12;
pub const STABILIZATION_TRIALS: usize = 20;

/// Scales at which mirror pairs are constructed near each critical point.
pub const CRITICAL_SCALES: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Unstable(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Unstable(_) => EXIT_UNSTABLE,
            CliError::Io(_) => EXIT_IO,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Map(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let text = e.to_string();
        match e {
            Error::Degree(_)
            | Error::NotCoprime(_)
            | Error::InvalidMap(_)
            | Error::ZeroPolynomial
            | Error::DegenerateLevel(..)
            | Error::NotCritical(_)
            | Error::InvalidArgument(_) => CliError::Input(text),
            Error::ClassificationUnstable { .. } | Error::InconsistentClassification(..) => CliError::Unstable(text),
            _ => CliError::Other(text),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Output of a successful command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    /// [`EXIT_OK`], or [`EXIT_SATURATED`] when an estimate is only a lower bound.
    pub exit: i32,
    pub warning: Option<String>,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Outcome { bytes, exit: EXIT_OK, warning: None }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let map = parse_map(&config.map_spec)?;
    match config.command {
        Command::Classify => cmd_classify(&map, config),
        Command::Fiber => cmd_fiber(&map, config),
        Command::Entropy => cmd_entropy(&map, config),
        Command::Mirrors => cmd_mirrors(&map, config),
        Command::Plot => cmd_plot(&map, config),
    }
}

fn require_format(config: &RunConfig, allowed: &[Format]) -> Result<(), CliError> {
    if allowed.contains(&config.format) {
        Ok(())
    } else {
        Err(CliError::Input(format!("format {:?} is not available for {:?}", config.format, config.command).to_lowercase()))
    }
}

/// The configured depth, or `max(N_emp, 8)` from the empirical stabilization index.
pub fn resolve_depth(map: &RationalMap, config: &RunConfig) -> usize {
    config
        .depth
        .unwrap_or_else(|| default_depth(stabilization_index(map, STABILIZATION_MAX, STABILIZATION_TRIALS, config.seed)))
}

pub fn cmd_classify(map: &RationalMap, config: &RunConfig) -> Result<Outcome, CliError> {
    require_format(config, &[Format::Json])?;
    let class = classify(map)?;
    Ok(Outcome::ok(to_json(&ClassifyOutput::new(&class, config.clone()))))
}

pub fn cmd_fiber(map: &RationalMap, config: &RunConfig) -> Result<Outcome, CliError> {
    require_format(config, &[Format::Json])?;
    let token = config.point.as_deref().ok_or_else(|| CliError::Input("fiber needs --point".into()))?;
    let z = parse_point(token)?;
    let depth = resolve_depth(map, config);
    let report = fiber(map, &z, depth)?;
    Ok(Outcome::ok(to_json(&FiberOutput::new(&report, config.clone()))))
}

pub fn cmd_entropy(map: &RationalMap, config: &RunConfig) -> Result<Outcome, CliError> {
    require_format(config, &[Format::Json, Format::Csv])?;
    let sample = parallel::backward_orbit_sample(map, config.samples, config.burn_in, config.seed)?;
    let steps = config.n_list.iter().copied().max().unwrap_or(0);
    let options = EntropyOptions {
        n_list: config.n_list.clone(),
        eps_list: config.eps_list.clone(),
        method: match config.method {
            MethodArg::Correlation => EntropyMethod::Correlation,
            MethodArg::Packing => EntropyMethod::Packing,
        },
        seed: config.seed,
    };
    let (estimate, depth) = match config.metric {
        MetricArg::Reduced => {
            let depth = resolve_depth(map, config);
            let orbits = ReducedOrbits::new(map, &sample.points, depth, steps);
            (parallel::entropy_estimate(&orbits, Metric::Reduced, &options)?, Some(depth))
        }
        MetricArg::Sphere => {
            let orbits = SphereOrbits::new(map, &sample.points, steps);
            (parallel::entropy_estimate(&orbits, Metric::Sphere, &options)?, None)
        }
    };
    let output = EntropyOutput::new(&estimate, depth, config.clone());
    let bytes = match config.format {
        Format::Csv => output.to_csv(),
        _ => to_json(&output),
    };
    if estimate.saturated {
        return Ok(Outcome {
            bytes,
            exit: EXIT_SATURATED,
            warning: Some(format!("estimate saturated; verdict {} is a lower bound", estimate.verdict)),
        });
    }
    Ok(Outcome::ok(bytes))
}

fn finite_critical_points(map: &RationalMap) -> Result<Vec<SpherePoint>, CliError> {
    Ok(map
        .critical_clusters()?
        .into_iter()
        .map(|(c, _)| c)
        .filter(|c| !c.is_infinity())
        .collect())
}

pub fn cmd_mirrors(map: &RationalMap, config: &RunConfig) -> Result<Outcome, CliError> {
    require_format(config, &[Format::Json])?;
    let depth = resolve_depth(map, config);
    let report = parallel::mirrored_fraction(map, config.samples, depth, config.seed)?;
    let mut pairs = Vec::new();
    for c in finite_critical_points(map)? {
        let name = format_point(&c);
        for eps in CRITICAL_SCALES {
            // a pair may fail to exist at some scale; the remaining scales are still reported
            if let Ok(pair) = critical_mirror_pair(map, &c, eps) {
                pairs.push(MirrorPairOutput::new(&name, &pair));
            }
        }
    }
    Ok(Outcome::ok(to_json(&MirrorsOutput::new(&report, pairs, config.clone()))))
}

/// Number of scales `0.5 * 0.8^j` swept when drawing mirror curves.
pub const TRACE_SCALES: usize = 40;

pub fn cmd_plot(map: &RationalMap, config: &RunConfig) -> Result<Outcome, CliError> {
    require_format(config, &[Format::Ppm])?;
    let kind = config.plot.ok_or_else(|| CliError::Input("plot needs a kind (julia or mirrors)".into()))?;
    let mut canvas = Canvas::new(config.width, config.height, config.extent).ok_or_else(|| {
        CliError::Input(format!(
            "invalid canvas {}x{} with extent {}; width and height must be positive",
            config.width, config.height, config.extent
        ))
    })?;
    match kind {
        PlotKind::Julia => {
            let sample = parallel::backward_orbit_sample(map, config.samples, config.burn_in, config.seed)?;
            for p in &sample.points {
                canvas.plot(p, BLACK);
            }
        }
        PlotKind::Mirrors => {
            let levels = mirrors::infinite_circle_levels(map);
            let steps = 4 * (config.width + config.height);
            for level in &levels {
                let r = radius_of_level(*level);
                for k in 0..steps {
                    let theta = std::f64::consts::TAU * k as f64 / steps as f64;
                    canvas.plot(&SpherePoint::polar(r, theta), BLUE);
                }
            }
            let depth = resolve_depth(map, config);
            let report = parallel::mirrored_fraction(map, config.samples, depth, config.seed)?;
            for p in &report.mirrored_points {
                canvas.plot(p, RED);
            }
            for c in finite_critical_points(map)? {
                for j in 0..TRACE_SCALES {
                    let eps = 0.5 * 0.8f64.powi(j as i32);
                    for pair in critical_mirror_pairs(map, &c, eps).unwrap_or_default() {
                        canvas.plot(&pair.z, RED);
                        canvas.plot(&pair.w, RED);
                    }
                }
            }
        }
    }
    Ok(Outcome::ok(canvas.to_ppm()))
}
