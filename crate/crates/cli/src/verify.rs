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

//! `ecp verify`: closed form against enumeration, variant and party-count checks, and
//! convergence to the entanglement.

use ecp_core::analytic::{self, GhzClassState};
use ecp_core::sim::{self, ProtocolConfig, Variant};
use serde::Serialize;

use crate::args::{Format, Grid, VerifyArgs};
use crate::config::ConfigFile;
use crate::error::CliError;
use crate::render::format_float;

/// Rounds enumerated per grid point.
pub const VERIFY_ROUNDS: usize = 5;

/// Series truncation used by the convergence check.
pub const CONVERGENCE_INCREMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub oracle: f64,
    pub variant: f64,
    pub convergence: f64,
    pub n_independence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle: 1e-10,
            variant: 1e-12,
            convergence: 1e-9,
            n_independence: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRequest {
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub format: Format,
}

impl VerifyRequest {
    pub fn resolve(args: &VerifyArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let d = Tolerances::default();
        let all = match args.tolerance {
            Some(t) => Some(t),
            None => cfg.get("tolerance")?,
        };
        let pick = |specific: Option<f64>, default: f64| specific.or(all).unwrap_or(default);
        let tolerances = Tolerances {
            oracle: pick(args.tol_oracle, d.oracle),
            variant: pick(args.tol_variant, d.variant),
            convergence: pick(args.tol_convergence, d.convergence),
            n_independence: pick(args.tol_n_independence, d.n_independence),
        };
        for t in [tolerances.oracle, tolerances.variant, tolerances.convergence, tolerances.n_independence] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("tolerances must be positive, got {t}")));
            }
        }
        Ok(Self {
            grid: cfg.resolve(args.grid, "grid", Grid::Full)?,
            tolerances,
            format: cfg.resolve(args.format, "format", Format::Csv)?,
        })
    }
}

/// Entanglement values checked on each grid.
pub fn entanglement_grid(grid: Grid) -> Vec<f64> {
    match grid {
        Grid::Full => (1..=50).map(|i| i as f64 / 50.0).collect(),
        Grid::Coarse => vec![0.2, 0.4, 0.6, 0.8, 1.0],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self {
            check,
            deviation,
            tolerance,
            pass: deviation.is_finite() && deviation < tolerance,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn config_for(e: f64, parties: usize, variant: Variant) -> ProtocolConfig {
    ProtocolConfig::enumerate((e / 2.0).sqrt(), parties, VERIFY_ROUNDS, variant)
}

pub fn run_checks(grid: Grid, tol: &Tolerances) -> Result<Vec<CheckRow>, CliError> {
    let es = entanglement_grid(grid);
    let (mut oracle, mut variant, mut convergence, mut n_independence) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &e in &es {
        let state = GhzClassState::from_alpha_sq(e / 2.0, 2)?;
        let closed: Vec<f64> = analytic::round_plan(&state, VERIFY_ROUNDS)?
            .iter()
            .map(|p| p.p_success_uncond)
            .collect();
        for parties in [2, 3] {
            for v in [Variant::Pcg, Variant::Cnot] {
                let enumerated = sim::enumerate(&config_for(e, parties, v))?;
                oracle = oracle.max(max_abs_diff(&closed, &enumerated.per_round_success));
            }
        }
        variant = variant.max(sim::variant_equivalence(&config_for(e, 2, Variant::Pcg))?);

        let (limit, _) = analytic::asymptotic_limit(&state, CONVERGENCE_INCREMENT)?;
        convergence = convergence.max((limit - analytic::entanglement(&state)).abs());

        let reference = sim::enumerate(&config_for(e, 2, Variant::Pcg))?.per_round_success;
        for parties in 3..=6 {
            let other = sim::enumerate(&config_for(e, parties, Variant::Pcg))?.per_round_success;
            n_independence = n_independence.max(max_abs_diff(&reference, &other));
        }
    }
    Ok(vec![
        CheckRow::new("analytic_vs_enumeration", oracle, tol.oracle),
        CheckRow::new("variant_equivalence", variant, tol.variant),
        CheckRow::new("convergence_to_E", convergence, tol.convergence),
        CheckRow::new("n_independence", n_independence, tol.n_independence),
    ])
}

#[derive(Serialize)]
struct JsonVerify<'a> {
    schema_version: u32,
    pass: bool,
    checks: &'a [CheckRow],
}

/// Rendered table and whether every check passed.
pub fn cmd_verify(req: &VerifyRequest) -> Result<(String, bool), CliError> {
    let rows = run_checks(req.grid, &req.tolerances)?;
    let all_pass = rows.iter().all(|r| r.pass);
    let text = match req.format {
        Format::Csv => {
            let mut out = String::from("check,deviation,tolerance,status\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.check,
                    format_float(r.deviation),
                    format_float(r.tolerance),
                    if r.pass { "pass" } else { "fail" }
                ));
            }
            out
        }
        Format::Json => {
            let doc = JsonVerify {
                schema_version: crate::SCHEMA_VERSION,
                pass: all_pass,
                checks: &rows,
            };
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
            text.push('\n');
            text
        }
    };
    Ok((text, all_pass))
}
