use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use icausal::qcore::io::StateFile;
use icausal::spacetime::MicsScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exhaustive,
    Sample,
}

/// Where the protocol input comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputSpec {
    /// `random`, `B1`..`B4`, `smolin`, `nlwe-default`, `swap`, ...
    Preset(String),
    File { file: PathBuf },
    Inline(StateFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeBlock {
    #[serde(rename = "G", default = "default_g")]
    pub g: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_star: Option<f64>,
    /// Per-order geometries; used instead of M, R, h for m = 3 or 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<MicsScenario>,
}

fn default_g() -> f64 {
    icausal::spacetime::CODATA_G
}

fn default_c() -> f64 {
    icausal::spacetime::SPEED_OF_LIGHT
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSpec>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Dimension of the party that is not teleported, for random inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Channel file for the `channel` protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacetime: Option<SpacetimeBlock>,
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub m: Option<usize>,
    pub dim: Option<usize>,
    pub preset: Option<String>,
    pub input: Option<PathBuf>,
    pub channel: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn merge(mut self, protocol: &str, o: Overrides) -> Result<Self, String> {
        if let Some(p) = &self.protocol {
            if p != protocol {
                return Err(format!("config is for protocol '{p}' but the command is '{protocol}'"));
            }
        }
        self.protocol = Some(protocol.to_string());
        match (o.preset, o.input) {
            (Some(_), Some(_)) => return Err("give either --preset or --input, not both".into()),
            (Some(p), None) => self.input = Some(InputSpec::Preset(p)),
            (None, Some(f)) => self.input = Some(InputSpec::File { file: f }),
            (None, None) => {}
        }
        self.seed = o.seed.or(self.seed);
        self.mode = o.mode.unwrap_or(self.mode);
        self.m = o.m.or(self.m);
        self.dim = o.dim.or(self.dim);
        self.channel = o.channel.or(self.channel);
        if self.mode == Mode::Sample && self.seed.is_none() {
            return Err("mode 'sample' requires a seed".into());
        }
        if let Some(m) = self.m {
            if !(2..=4).contains(&m) {
                return Err(format!("m must be 2, 3 or 4 (got {m})"));
            }
        }
        if let Some(d) = self.dim {
            if !(2..=64).contains(&d) {
                return Err(format!("dim must be between 2 and 64 (got {d})"));
            }
        }
        Ok(self)
    }
}
