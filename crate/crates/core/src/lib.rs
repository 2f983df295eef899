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

//! Iterated entanglement concentration on GHZ-class spin states.
//!
//! - [`qstate`]: dense pure-state register with the parity check and rotated projection.
//! - [`analytic`]: closed-form round plans and success series.
//! - [`sim`]: protocol executor (branch enumeration and seeded Monte Carlo).

pub mod analytic;
pub mod qstate;
pub mod sim;

pub use analytic::{GhzClassState, RelativePhase, RoundPlan};
pub use qstate::{Parity, Projection, PureState};
pub use sim::{ProtocolConfig, Variant};
