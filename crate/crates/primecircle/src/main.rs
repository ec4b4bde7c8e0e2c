use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use primecircle::commands::{self, CliError, EXIT_INPUT};
use primecircle::config::{Command, Format, MethodArg, MetricArg, PlotKind, RunConfig};
use primecircle::format::{parse_f64_list, parse_usize_list};

/// Orbit reduction of rational maps of the Riemann sphere.
///
/// Maps are written `num=c0,c1,...;den=c0,c1,...` with ascending complex
/// coefficients, e.g. `num=-1,0,1;den=1` for z^2 - 1.
#[derive(Parser, Debug)]
#[command(name = "primecircle", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Classify a map as power map, (strongly) exceptional or non-exceptional.
    Classify(Common),
    /// Mirrors of a point: other points with the same reduced orbit.
    Fiber(Common),
    /// Bowen-ball entropy of the measure of maximal entropy.
    Entropy(Common),
    /// Fraction of mirrored points and mirror pairs near critical points.
    Mirrors(Common),
    /// Render a PPM image of the Julia set or the mirrored set.
    Plot {
        #[arg(value_enum)]
        kind: PlotKind,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a run from the `config` object of an earlier JSON output.
    Run {
        /// JSON file holding a run configuration.
        config: String,
        /// Overrides the output path of the stored configuration.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Map spec; may also be given with --map.
    #[arg(value_name = "MAP")]
    map_positional: Option<String>,
    #[arg(long)]
    map: Option<String>,
    /// Point as `a+bi` or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Reduction depth N; defaults to max(N_emp, 8) from the stabilization index.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    burn_in: usize,
    /// Ascending Bowen horizons.
    #[arg(long, default_value = "4,8,12,16")]
    n_list: String,
    /// Descending ball radii.
    #[arg(long, default_value = "0.05,0.02")]
    eps_list: String,
    #[arg(long, value_enum, default_value_t = MetricArg::Reduced)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Correlation)]
    method: MethodArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    /// Half-width of the square viewport centred at 0.
    #[arg(long, default_value_t = 2.5)]
    extent: f64,
}

fn default_samples(command: Command) -> usize {
    match command {
        Command::Entropy => 2000,
        Command::Plot => 20000,
        _ => 500,
    }
}

impl Common {
    fn into_config(self, command: Command, plot: Option<PlotKind>) -> Result<RunConfig, CliError> {
        let map_spec = match (self.map, self.map_positional) {
            (Some(_), Some(_)) => return Err(CliError::Input("give the map either positionally or with --map".into())),
            (Some(m), None) | (None, Some(m)) => m,
            (None, None) => return Err(CliError::Input("missing map spec".into())),
        };
        let format = self.format.unwrap_or(if command == Command::Plot { Format::Ppm } else { Format::Json });
        Ok(RunConfig {
            command,
            map_spec,
            seed: self.seed,
            depth: self.depth,
            samples: self.samples.unwrap_or(default_samples(command)),
            output_path: self.out,
            format,
            point: self.point,
            burn_in: self.burn_in,
            n_list: parse_usize_list(&self.n_list)?,
            eps_list: parse_f64_list(&self.eps_list)?,
            metric: self.metric,
            method: self.method,
            plot,
            width: self.width,
            height: self.height,
            extent: self.extent,
        })
    }
}

fn load_config(path: &str, out: Option<String>) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    // accept a bare config or a full output document that embeds one
    let inner = value.get("config").cloned().unwrap_or(value);
    let mut config: RunConfig = serde_json::from_value(inner).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    if out.is_some() {
        config.output_path = out;
    }
    Ok(config)
}

fn emit(config: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(CliError::from)
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let config = match cli.command {
        Sub::Classify(c) => c.into_config(Command::Classify, None)?,
        Sub::Fiber(c) => c.into_config(Command::Fiber, None)?,
        Sub::Entropy(c) => c.into_config(Command::Entropy, None)?,
        Sub::Mirrors(c) => c.into_config(Command::Mirrors, None)?,
        Sub::Plot { kind, common } => common.into_config(Command::Plot, Some(kind))?,
        Sub::Run { config, out } => load_config(&config, out)?,
    };
    let outcome = commands::run(&config)?;
    emit(&config, &outcome.bytes)?;
    if let Some(w) = &outcome.warning {
        eprintln!("warning: {w}");
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
