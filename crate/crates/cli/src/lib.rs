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

//! Command implementations behind the `ecp` binary.

pub mod args;
pub mod config;
pub mod curve;
pub mod error;
pub mod render;
pub mod run;
pub mod verify;

use std::io::Write;

use args::{Cli, Command};
use config::ConfigFile;
use error::CliError;

/// Version tag carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Runs a parsed command line; returns the process exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (text, code) = match &cli.command {
        Command::Curve(a) => (curve::cmd_curve(&curve::CurveRequest::resolve(a, &cfg)?)?, 0),
        Command::Run(a) => (run::cmd_run(&run::RunRequest::resolve(a, &cfg)?)?, 0),
        Command::Verify(a) => {
            let (text, pass) = verify::cmd_verify(&verify::VerifyRequest::resolve(a, &cfg)?)?;
            (text, if pass { 0 } else { 1 })
        }
    };
    let output = match &cli.output {
        Some(p) => Some(p.clone()),
        None => cfg.get::<std::path::PathBuf>("output")?,
    };
    match output {
        Some(path) => std::fs::write(&path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(code)
}
