// Copyright 2026 The ecp Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! `ecp run`: one protocol configuration, enumerated or sampled, as a JSON report.

use ecp_core::analytic;
use ecp_core::sim::{self, Mode, ProtocolConfig, Variant};
use serde::Serialize;

use crate::args::{ModeArg, RunArgs, VariantArg};
use crate::config::ConfigFile;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub alpha_sq: f64,
    pub parties: usize,
    pub rounds: usize,
    pub variant: VariantArg,
    pub mode: ModeArg,
    pub trials: u64,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for RunRequest {
    fn default() -> Self {
        Self {
            alpha_sq: 0.2,
            parties: 2,
            rounds: 3,
            variant: VariantArg::Pcg,
            mode: ModeArg::Enumerate,
            trials: 100_000,
            seed: 0,
            threads: None,
        }
    }
}

impl RunRequest {
    pub fn resolve(args: &RunArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let d = Self::default();
        let threads = match args.threads {
            Some(t) => Some(t),
            None => cfg.get("threads")?,
        };
        let req = Self {
            alpha_sq: cfg.resolve(args.alpha_sq, "alpha-sq", d.alpha_sq)?,
            parties: cfg.resolve(args.parties, "parties", d.parties)?,
            rounds: cfg.resolve(args.rounds, "rounds", d.rounds)?,
            variant: cfg.resolve(args.variant, "variant", d.variant)?,
            mode: cfg.resolve(args.mode, "mode", d.mode)?,
            trials: cfg.resolve(args.trials, "trials", d.trials)?,
            seed: cfg.resolve(args.seed, "seed", d.seed)?,
            threads,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha_sq > 0.0 && self.alpha_sq < 1.0) {
            return Err(CliError::Usage(format!("alpha-sq must be in (0, 1), got {}", self.alpha_sq)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        self.protocol_config()
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        let variant = match self.variant {
            VariantArg::Pcg => Variant::Pcg,
            VariantArg::Cnot => Variant::Cnot,
        };
        let alpha = self.alpha_sq.sqrt();
        match self.mode {
            ModeArg::Enumerate => ProtocolConfig::enumerate(alpha, self.parties, self.rounds, variant),
            ModeArg::Sample => ProtocolConfig::sample(alpha, self.parties, self.rounds, variant, self.trials, self.seed),
        }
    }
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    alpha_sq: f64,
    parties: usize,
    rounds: usize,
    variant: &'static str,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct SampleSection {
    trials: u64,
    successes_by_round: Vec<u64>,
    #[serde(rename = "empirical_P")]
    empirical_p: f64,
    stderr: f64,
}

/// Report layout, version [`crate::SCHEMA_VERSION`].
#[derive(Debug, Serialize)]
struct RunReport {
    schema_version: u32,
    config: ConfigEcho,
    per_round_success: Vec<f64>,
    cumulative: f64,
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pruned: Option<f64>,
    exact_cumulative: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample: Option<SampleSection>,
}

pub fn cmd_run(req: &RunRequest) -> Result<String, CliError> {
    let cfg = req.protocol_config();
    let exact_cumulative = analytic::cumulative_success(&cfg.ghz_class()?, cfg.max_rounds)?;
    let sampled = cfg.mode == Mode::Sample;
    let config = ConfigEcho {
        alpha_sq: req.alpha_sq,
        parties: req.parties,
        rounds: req.rounds,
        variant: match req.variant {
            VariantArg::Pcg => "pcg",
            VariantArg::Cnot => "cnot",
        },
        mode: if sampled { "sample" } else { "enumerate" },
        trials: sampled.then_some(req.trials),
        seed: sampled.then_some(req.seed),
    };
    let report = match cfg.mode {
        Mode::Enumerate => {
            let r = sim::enumerate(&cfg)?;
            RunReport {
                schema_version: crate::SCHEMA_VERSION,
                config,
                per_round_success: r.per_round_success,
                cumulative: r.cumulative_success,
                residual: r.residual_probability,
                pruned: Some(r.pruned_probability),
                exact_cumulative,
                sample: None,
            }
        }
        Mode::Sample => {
            let stats = match req.threads {
                Some(t) => sim::sample_with_threads(&cfg, t)?,
                None => sim::sample(&cfg)?,
            };
            let trials = stats.trials as f64;
            RunReport {
                schema_version: crate::SCHEMA_VERSION,
                config,
                per_round_success: stats.successes_by_round.iter().map(|&s| s as f64 / trials).collect(),
                cumulative: stats.empirical_p,
                residual: 1.0 - stats.empirical_p,
                pruned: None,
                exact_cumulative,
                sample: Some(SampleSection {
                    trials: stats.trials,
                    successes_by_round: stats.successes_by_round,
                    empirical_p: stats.empirical_p,
                    stderr: stats.stderr,
                }),
            }
        }
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
