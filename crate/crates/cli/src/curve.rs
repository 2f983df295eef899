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

//! `ecp curve`: `P_n` against `E` over a grid.

use ecp_core::analytic;
use serde::Serialize;

use crate::args::{CurveArgs, Format};
use crate::config::ConfigFile;
use crate::error::CliError;
use crate::render::{format_float, round_displayed};

pub const CSV_HEADER: &str = "E,n,P_n,P_over_E";

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub e_min: f64,
    pub e_max: f64,
    pub e_step: f64,
    pub rounds: Vec<usize>,
    pub format: Format,
}

impl Default for CurveRequest {
    fn default() -> Self {
        Self {
            e_min: 0.02,
            e_max: 1.0,
            e_step: 0.02,
            rounds: vec![1, 2, 3, 4, 5],
            format: Format::Csv,
        }
    }
}

impl CurveRequest {
    pub fn resolve(args: &CurveArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let d = Self::default();
        let rounds = match &args.rounds {
            Some(r) => r.clone(),
            None => cfg.get_list("rounds")?.unwrap_or(d.rounds),
        };
        let req = Self {
            e_min: cfg.resolve(args.e_min, "e-min", d.e_min)?,
            e_max: cfg.resolve(args.e_max, "e-max", d.e_max)?,
            e_step: cfg.resolve(args.e_step, "e-step", d.e_step)?,
            rounds,
            format: cfg.resolve(args.format, "format", d.format)?,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let ok_range = self.e_min > 0.0 && self.e_min <= self.e_max && self.e_max <= 1.0;
        if !ok_range {
            return Err(CliError::Usage(format!(
                "need 0 < e-min ≤ e-max ≤ 1, got e-min={} e-max={}",
                self.e_min, self.e_max
            )));
        }
        if !(self.e_step > 0.0 && self.e_step.is_finite()) {
            return Err(CliError::Usage(format!("e-step must be positive, got {}", self.e_step)));
        }
        if self.rounds.is_empty() || self.rounds.contains(&0) {
            return Err(CliError::Usage("rounds must be a nonempty list of integers ≥ 1".into()));
        }
        Ok(())
    }

    /// Grid points `e_min + i·e_step ≤ e_max`, each rounded to its rendered value.
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.e_max - self.e_min) / self.e_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| round_displayed(self.e_min + i as f64 * self.e_step).min(1.0))
            .collect()
    }
}

#[derive(Serialize)]
struct JsonRow {
    #[serde(rename = "E")]
    e: f64,
    n: usize,
    #[serde(rename = "P_n")]
    p_n: f64,
    #[serde(rename = "P_over_E")]
    p_over_e: f64,
}

#[derive(Serialize)]
struct JsonCurve {
    schema_version: u32,
    rows: Vec<JsonRow>,
}

pub fn cmd_curve(req: &CurveRequest) -> Result<String, CliError> {
    let table = analytic::curve(&req.grid(), &req.rounds)?;
    match req.format {
        Format::Csv => {
            let mut out = String::with_capacity(32 * (table.rows.len() + 1));
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in &table.rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    format_float(row.entanglement),
                    row.rounds,
                    format_float(row.success),
                    format_float(row.ratio())
                ));
            }
            Ok(out)
        }
        Format::Json => {
            let doc = JsonCurve {
                schema_version: crate::SCHEMA_VERSION,
                rows: table
                    .rows
                    .iter()
                    .map(|r| JsonRow {
                        e: r.entanglement,
                        n: r.rounds,
                        p_n: r.success,
                        p_over_e: r.ratio(),
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}
