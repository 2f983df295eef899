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


use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<ecp_core::sim::SimError> for CliError {
    fn from(e: ecp_core::sim::SimError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<ecp_core::analytic::AnalyticError> for CliError {
    fn from(e: ecp_core::analytic::AnalyticError) -> Self {
        CliError::Runtime(e.to_string())
    }
}
