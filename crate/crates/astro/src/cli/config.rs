//! Effective settings and the `key = value` defaults file.
//!
//! Every invocation resolves its knobs in three layers, later layers
//! winning: built-in defaults, then the `--config FILE` defaults file, then
//! explicit command-line flags. The file format is one `key = value` pair
//! per line; blank lines and lines starting with `#` are ignored.
//!
//! Recognized keys:
//!
//! | key                  | meaning                                    |
//! |----------------------|--------------------------------------------|
//! | `seed`               | seed for every stochastic component        |
//! | `jobs`               | worker threads for `run --all-policies`    |
//! | `format`             | `json` or `csv` machine output             |
//! | `switch_time_s`      | seconds charged per configuration switch   |
//! | `switch_energy_j`    | joules charged per configuration switch    |
//! | `episodes`           | training episodes for the learning policy  |
//! | `gamma`              | reward exponent on MIPS                    |
//! | `watt_floor`         | minimum wattage in the reward denominator  |
//! | `learning_rate`      | gradient step size                         |
//! | `discount`           | future-reward discount                     |
//! | `epsilon_init`       | initial exploration rate                   |
//! | `epsilon_decay`      | per-checkpoint multiplicative ε decay      |
//! | `epsilon_floor`      | smallest ε reached                         |
//! | `replay_capacity`    | experience buffer size                     |
//! | `batch_size`         | transitions per gradient step              |
//! | `hidden_layers`      | comma-separated layer widths, e.g. `32,16` |
//! | `energy_threshold`   | Compare: required energy saving, percent   |
//! | `slowdown_threshold` | Compare: allowed slowdown, percent         |
//! | `baseline`           | Compare: policy anchoring energy savings   |

use std::path::Path;

use crate::qlearn::AgentParams;
use crate::sim::SimParams;
use crate::{Error, Result};

/// Shape of machine-readable output on stdout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Everything a command might need, after all three layers are folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Explicit seed override, already threaded into `sim` and `agent`.
    pub seed: Option<u64>,
    pub jobs: usize,
    pub format: OutputFormat,
    pub sim: SimParams,
    pub agent: AgentParams,
    pub energy_threshold: f64,
    pub slowdown_threshold: f64,
    pub baseline: String,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: None,
            jobs: 1,
            format: OutputFormat::Json,
            sim: SimParams::default(),
            agent: AgentParams::default(),
            energy_threshold: 10.0,
            slowdown_threshold: 15.0,
            baseline: "best-fixed-time".to_string(),
        }
    }
}

impl Settings {
    /// Fixes every stochastic component to one seed: the simulator's, the
    /// agent's, and (through them) the random policy's.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
        self.sim.seed = seed;
        self.agent.seed = seed;
    }

    /// Folds a defaults file into these settings.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.apply_line(line, index + 1)?;
        }
        Ok(())
    }

    fn apply_line(&mut self, line: &str, lineno: usize) -> Result<()> {
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());

        fn parse<T: std::str::FromStr>(key: &str, value: &str, lineno: usize) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("{key}: {e}"),
            })
        }

        match key {
            "seed" => {
                let seed = parse(key, value, lineno)?;
                self.set_seed(seed);
            }
            "jobs" => {
                self.jobs = parse(key, value, lineno)?;
                if self.jobs == 0 {
                    return Err(err("jobs: must be at least 1".into()));
                }
            }
            "format" => {
                self.format = match value {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    other => return Err(err(format!("format: expected json or csv, found {other:?}"))),
                }
            }
            "switch_time_s" => self.sim.switch_time_s = parse(key, value, lineno)?,
            "switch_energy_j" => self.sim.switch_energy_j = parse(key, value, lineno)?,
            "episodes" => self.sim.episodes = parse(key, value, lineno)?,
            "gamma" => self.sim.reward.gamma = parse(key, value, lineno)?,
            "watt_floor" => self.sim.reward.watt_floor = parse(key, value, lineno)?,
            "learning_rate" => self.agent.learning_rate = parse(key, value, lineno)?,
            "discount" => self.agent.discount = parse(key, value, lineno)?,
            "epsilon_init" => self.agent.epsilon_init = parse(key, value, lineno)?,
            "epsilon_decay" => self.agent.epsilon_decay = parse(key, value, lineno)?,
            "epsilon_floor" => self.agent.epsilon_floor = parse(key, value, lineno)?,
            "replay_capacity" => self.agent.replay_capacity = parse(key, value, lineno)?,
            "batch_size" => self.agent.batch_size = parse(key, value, lineno)?,
            "hidden_layers" => {
                self.agent.hidden_layers = value
                    .split(',')
                    .map(|part| parse("hidden_layers", part.trim(), lineno))
                    .collect::<Result<_>>()?;
            }
            "energy_threshold" => self.energy_threshold = parse(key, value, lineno)?,
            "slowdown_threshold" => self.slowdown_threshold = parse(key, value, lineno)?,
            "baseline" => self.baseline = value.to_string(),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
        Ok(())
    }
}
