//! Run configuration, echoed into every JSON output as a reproduction recipe.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Classify,
    Fiber,
    Entropy,
    Mirrors,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Ppm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Reduced,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Correlation,
    Packing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Julia,
    Mirrors,
}

/// Everything that determines the output of a run.
///
/// Field order is the canonical JSON order. `depth: None` means the depth is
/// derived from the empirical stabilization index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub map_spec: String,
    pub seed: u64,
    pub depth: Option<usize>,
    pub samples: usize,
    pub output_path: Option<String>,
    pub format: Format,
    pub point: Option<String>,
    pub burn_in: usize,
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub metric: MetricArg,
    pub method: MethodArg,
    pub plot: Option<PlotKind>,
    pub width: usize,
    pub height: usize,
    /// Half-width of the square viewport centred at the origin.
    pub extent: f64,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run config serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunConfig> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            command: Command::Entropy,
            map_spec: "num=-1+0i,0+0i,1+0i;den=1+0i".into(),
            seed: 7,
            depth: None,
            samples: 2000,
            output_path: Some("out.json".into()),
            format: Format::Json,
            point: None,
            burn_in: 50,
            n_list: vec![4, 8, 12, 16],
            eps_list: vec![0.05, 0.02],
            metric: MetricArg::Reduced,
            method: MethodArg::Correlation,
            plot: None,
            width: 512,
            height: 512,
            extent: 2.5,
        }
    }

    #[test]
    fn json_round_trip_is_stable() {
        let c = sample();
        let text = c.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        let with_depth = RunConfig { depth: Some(9), plot: Some(PlotKind::Julia), ..c };
        assert_eq!(RunConfig::from_json(&with_depth.to_json()).unwrap(), with_depth);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        v["surprise"] = serde_json::json!(1);
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }
}
