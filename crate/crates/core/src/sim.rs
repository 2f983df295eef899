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

//! Protocol executor on the dense simulator.
//!
//! Register layout during a round: qubits `0..N` are the parties' qubits with qubit 0 held by
//! the party doing the local operations, qubit `N` is the ancilla slot. Between rounds the
//! ancilla is detached and a fresh one appended, so the register never exceeds `N + 1` qubits.
//!
//! Two entangling variants:
//! - [`Variant::Pcg`]: fresh `|+⟩` ancilla, parity check on `(0, N)`, `σx` on the ancilla
//!   after an odd outcome.
//! - [`Variant::Cnot`]: `|↑⟩` ancilla, CNOT from qubit 0. After a `Phi` outcome the ancilla is
//!   rotated back to `|↑⟩` and reused.
//!
//! Both then project the ancilla onto the round's rotated basis. `PhiPerp` leaves the parties
//! in `(|↑…↑⟩ + |↓…↓⟩)/√2`. `Phi` leaves `α²|↑…↑⟩ − β²|↓…↓⟩` (normalized), and `σz` on qubit 0
//! restores the `+` form before the next round.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{self, AnalyticError, GhzClassState, RoundPlan};
use crate::qstate::{
    self, Parity, ParityOutcome, Pick, Projection, ProjectionOutcome, PureState, StateError,
    PLUS, UP, ZERO_BRANCH_PROBABILITY,
};

/// Largest off-support weight accepted as GHZ-class.
pub const GHZ_SUPPORT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("state is not GHZ-class: weight {0:e} outside |↑…↑⟩, |↓…↓⟩")]
    NotGhzClass(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Pcg,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Enumerate,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub alpha: f64,
    pub num_parties: usize,
    pub max_rounds: usize,
    pub variant: Variant,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn enumerate(alpha: f64, num_parties: usize, max_rounds: usize, variant: Variant) -> Self {
        Self {
            alpha,
            num_parties,
            max_rounds,
            variant,
            mode: Mode::Enumerate,
            trials: 1,
            seed: 0,
        }
    }

    pub fn sample(
        alpha: f64,
        num_parties: usize,
        max_rounds: usize,
        variant: Variant,
        trials: u64,
        seed: u64,
    ) -> Self {
        Self {
            mode: Mode::Sample,
            trials,
            seed,
            ..Self::enumerate(alpha, num_parties, max_rounds, variant)
        }
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        Self { variant, ..self }
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SimError::InvalidConfig(format!("alpha {} is outside [0, 1]", self.alpha)));
        }
        if self.num_parties < 2 || self.num_parties >= qstate::MAX_QUBITS {
            return Err(SimError::InvalidConfig(format!(
                "parties must be in 2..{}, got {}",
                qstate::MAX_QUBITS,
                self.num_parties
            )));
        }
        if self.max_rounds == 0 {
            return Err(SimError::InvalidConfig("max_rounds must be at least 1".into()));
        }
        if self.mode == Mode::Sample && self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn ghz_class(&self) -> Result<GhzClassState> {
        Ok(GhzClassState::from_alpha_sq(self.alpha * self.alpha, self.num_parties)?)
    }
}

/// `α|↑…↑⟩ + β|↓…↓⟩` on the configured number of parties.
pub fn build_initial(cfg: &ProtocolConfig) -> Result<PureState> {
    cfg.validate()?;
    let s = cfg.ghz_class()?;
    let all_down = (1usize << cfg.num_parties) - 1;
    Ok(PureState::new(
        cfg.num_parties,
        &[(0, s.alpha().into()), (all_down, s.beta().into())],
    )?)
}

/// Outcome selectors for one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundPick {
    pub parity: Pick<Parity>,
    pub projection: Pick<Projection>,
}

impl RoundPick {
    pub fn force(parity: Parity, projection: Projection) -> Self {
        Self {
            parity: Pick::Force(parity),
            projection: Pick::Force(projection),
        }
    }

    pub fn draw(u_parity: f64, u_projection: f64) -> Self {
        Self {
            parity: Pick::Draw(u_parity),
            projection: Pick::Draw(u_projection),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round_index: usize,
    /// Absent for the CNOT variant.
    pub parity: Option<ParityOutcome>,
    pub correction_x: bool,
    pub correction_z: bool,
    pub projection: ProjectionOutcome,
    /// Probability of this round's outcomes given the round was entered.
    pub branch_probability: f64,
    /// Weight of the ancilla on the ket it was detached against.
    pub ancilla_fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Success { round: usize },
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTrace {
    pub rounds: Vec<RoundRecord>,
    pub terminal: Terminal,
    pub path_probability: f64,
    pub final_state: PureState,
    /// Fidelity of `final_state` with `(|↑…↑⟩ + |↓…↓⟩)/√2`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    /// Unconditional success probability of each round.
    pub per_round_success: Vec<f64>,
    pub cumulative_success: f64,
    /// Mass on exhausted leaves.
    pub residual_probability: f64,
    /// Mass on branches dropped below the zero-branch threshold.
    pub pruned_probability: f64,
    pub traces: Vec<ProtocolTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub trials: u64,
    pub successes_by_round: Vec<u64>,
    pub empirical_p: f64,
    pub stderr: f64,
}

fn check_ghz_class(state: &PureState) -> Result<()> {
    let last = state.amplitudes().len() - 1;
    let on_support = state.amplitude(0).norm_sqr() + state.amplitude(last).norm_sqr();
    let off = (1.0 - on_support).max(0.0);
    if off > GHZ_SUPPORT_TOLERANCE {
        return Err(SimError::NotGhzClass(off));
    }
    Ok(())
}

fn finish_round(
    register: &PureState,
    ancilla: usize,
    ancilla_ket: qstate::Ket,
    projection: ProjectionOutcome,
) -> Result<(PureState, f64, bool)> {
    let ancilla_fidelity = register.overlap_probability(ancilla, ancilla_ket)?;
    let mut parties = register.detach_qubit(ancilla, ancilla_ket)?;
    let correction_z = projection.branch == Projection::Phi;
    if correction_z {
        parties.apply_z(0)?;
    }
    Ok((parties, ancilla_fidelity, correction_z))
}

/// One round with a parity-check gate and a fresh `|+⟩` ancilla.
pub fn run_round_pcg(
    state: &PureState,
    plan: &RoundPlan,
    pick: RoundPick,
) -> Result<(RoundRecord, PureState)> {
    check_ghz_class(state)?;
    let ancilla = state.num_qubits();
    let mut register = state.tensor(&PureState::from_ket(PLUS)?)?;
    let parity = register.measure_parity(0, ancilla, pick.parity)?;
    let correction_x = parity.parity == Parity::Odd;
    if correction_x {
        register.apply_x(ancilla)?;
    }
    let projection = register.measure_rotated(ancilla, plan.theta, pick.projection)?;
    let (phi, perp) = qstate::rotated_basis(plan.theta);
    let ket = match projection.branch {
        Projection::Phi => phi,
        Projection::PhiPerp => perp,
    };
    let (parties, ancilla_fidelity, correction_z) =
        finish_round(&register, ancilla, ket, projection)?;
    let record = RoundRecord {
        round_index: plan.round_index,
        parity: Some(parity),
        correction_x,
        correction_z,
        projection,
        branch_probability: parity.probability * projection.probability,
        ancilla_fidelity,
    };
    Ok((record, parties))
}

/// One round with a CNOT onto a `|↑⟩` ancilla. `pick.parity` is ignored.
pub fn run_round_cnot(
    state: &PureState,
    plan: &RoundPlan,
    pick: RoundPick,
) -> Result<(RoundRecord, PureState)> {
    check_ghz_class(state)?;
    let ancilla = state.num_qubits();
    let mut register = state.tensor(&PureState::from_ket(UP)?)?;
    register.apply_cnot(0, ancilla)?;
    let projection = register.measure_rotated(ancilla, plan.theta, pick.projection)?;
    let ket = match projection.branch {
        Projection::Phi => {
            // Undo the basis rotation so the ancilla re-enters as |↑⟩.
            register.apply_rotation(ancilla, -plan.theta)?;
            UP
        }
        Projection::PhiPerp => qstate::rotated_basis(plan.theta).1,
    };
    let (parties, ancilla_fidelity, correction_z) =
        finish_round(&register, ancilla, ket, projection)?;
    let record = RoundRecord {
        round_index: plan.round_index,
        parity: None,
        correction_x: false,
        correction_z,
        projection,
        branch_probability: projection.probability,
        ancilla_fidelity,
    };
    Ok((record, parties))
}

pub fn run_round(
    variant: Variant,
    state: &PureState,
    plan: &RoundPlan,
    pick: RoundPick,
) -> Result<(RoundRecord, PureState)> {
    match variant {
        Variant::Pcg => run_round_pcg(state, plan, pick),
        Variant::Cnot => run_round_cnot(state, plan, pick),
    }
}

fn push_projections(
    register: &PureState,
    ancilla: usize,
    theta: f64,
    parity: Parity,
    weight: f64,
    live: &mut Vec<(RoundPick, f64)>,
    pruned: &mut f64,
) -> Result<()> {
    let (p_phi, p_perp) = register.rotated_probabilities(ancilla, theta)?;
    for (branch, p) in [(Projection::Phi, p_phi), (Projection::PhiPerp, p_perp)] {
        let joint = weight * p;
        if p < ZERO_BRANCH_PROBABILITY || joint < ZERO_BRANCH_PROBABILITY {
            *pruned += joint;
        } else {
            live.push((RoundPick::force(parity, branch), joint));
        }
    }
    Ok(())
}

/// Outcome branches of a round with their Born weights, computed on the register. Branches
/// below the zero-branch threshold are summed into the second return value.
fn round_branches(
    variant: Variant,
    state: &PureState,
    theta: f64,
) -> Result<(Vec<(RoundPick, f64)>, f64)> {
    let ancilla = state.num_qubits();
    let mut live = Vec::with_capacity(4);
    let mut pruned = 0.0;
    match variant {
        Variant::Pcg => {
            let register = state.tensor(&PureState::from_ket(PLUS)?)?;
            let (p_even, p_odd) = register.parity_probabilities(0, ancilla)?;
            for (parity, p) in [(Parity::Even, p_even), (Parity::Odd, p_odd)] {
                if p < ZERO_BRANCH_PROBABILITY {
                    pruned += p;
                    continue;
                }
                let mut collapsed = register.clone();
                collapsed.measure_parity(0, ancilla, Pick::Force(parity))?;
                if parity == Parity::Odd {
                    collapsed.apply_x(ancilla)?;
                }
                push_projections(&collapsed, ancilla, theta, parity, p, &mut live, &mut pruned)?;
            }
        }
        Variant::Cnot => {
            let mut register = state.tensor(&PureState::from_ket(UP)?)?;
            register.apply_cnot(0, ancilla)?;
            push_projections(&register, ancilla, theta, Parity::Even, 1.0, &mut live, &mut pruned)?;
        }
    }
    Ok((live, pruned))
}

struct Expansion<'a> {
    variant: Variant,
    plans: &'a [RoundPlan],
    target: PureState,
    result: EnumerationResult,
}

impl Expansion<'_> {
    fn expand(&mut self, state: PureState, depth: usize, path: f64, rounds: Vec<RoundRecord>) -> Result<()> {
        let Some(plan) = self.plans.get(depth) else {
            self.result.residual_probability += path;
            let fidelity = state.fidelity(&self.target)?;
            self.result.traces.push(ProtocolTrace {
                rounds,
                terminal: Terminal::Exhausted,
                path_probability: path,
                final_state: state,
                fidelity,
            });
            return Ok(());
        };
        let (branches, pruned) = round_branches(self.variant, &state, plan.theta)?;
        self.result.pruned_probability += path * pruned;
        for (pick, _) in branches {
            let (record, next) = run_round(self.variant, &state, plan, pick)?;
            let path = path * record.branch_probability;
            let mut rounds = rounds.clone();
            rounds.push(record);
            if record.projection.branch == Projection::PhiPerp {
                self.result.per_round_success[depth] += path;
                let fidelity = next.fidelity(&self.target)?;
                self.result.traces.push(ProtocolTrace {
                    rounds,
                    terminal: Terminal::Success { round: plan.round_index },
                    path_probability: path,
                    final_state: next,
                    fidelity,
                });
            } else {
                self.expand(next, depth + 1, path, rounds)?;
            }
        }
        Ok(())
    }
}

/// Exhaustive depth-first expansion of every outcome sequence up to `max_rounds`.
pub fn enumerate(cfg: &ProtocolConfig) -> Result<EnumerationResult> {
    let initial = build_initial(cfg)?;
    let plans = analytic::round_plan(&cfg.ghz_class()?, cfg.max_rounds)?;
    let mut expansion = Expansion {
        variant: cfg.variant,
        plans: &plans,
        target: PureState::ghz(cfg.num_parties)?,
        result: EnumerationResult {
            per_round_success: vec![0.0; cfg.max_rounds],
            cumulative_success: 0.0,
            residual_probability: 0.0,
            pruned_probability: 0.0,
            traces: Vec::new(),
        },
    };
    expansion.expand(initial, 0, 1.0, Vec::new())?;
    let mut result = expansion.result;
    result.cumulative_success = result.per_round_success.iter().sum();
    Ok(result)
}

/// Random source of trial `index`: ChaCha8 keyed by `seed`, stream `index`. Depends only on
/// `(seed, index)`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs one trial; returns the 1-based success round, if any. Each round consumes exactly two
/// uniforms (parity, projection) for both variants.
fn run_trial(
    variant: Variant,
    plans: &[RoundPlan],
    initial: &PureState,
    rng: &mut ChaCha8Rng,
) -> Result<Option<usize>> {
    let mut state = initial.clone();
    for plan in plans {
        let u_parity: f64 = rng.random();
        let u_projection: f64 = rng.random();
        let (record, next) = run_round(variant, &state, plan, RoundPick::draw(u_parity, u_projection))?;
        if record.projection.branch == Projection::PhiPerp {
            return Ok(Some(plan.round_index));
        }
        state = next;
    }
    Ok(None)
}

/// Monte Carlo estimate on the current rayon pool. Bit-identical for a given config regardless
/// of thread count.
pub fn sample(cfg: &ProtocolConfig) -> Result<SampleStats> {
    if cfg.trials == 0 {
        return Err(SimError::InvalidConfig("trials must be at least 1".into()));
    }
    let initial = build_initial(cfg)?;
    let plans = analytic::round_plan(&cfg.ghz_class()?, cfg.max_rounds)?;
    let rounds = cfg.max_rounds;
    let successes_by_round = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg.variant, &plans, &initial, &mut trial_rng(cfg.seed, i)))
        .try_fold(
            || vec![0u64; rounds],
            |mut counts, outcome| {
                if let Some(round) = outcome? {
                    counts[round - 1] += 1;
                }
                Ok::<_, SimError>(counts)
            },
        )
        .try_reduce(
            || vec![0u64; rounds],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let successes: u64 = successes_by_round.iter().sum();
    let p = successes as f64 / cfg.trials as f64;
    Ok(SampleStats {
        trials: cfg.trials,
        successes_by_round,
        empirical_p: p,
        stderr: (p * (1.0 - p) / cfg.trials as f64).sqrt(),
    })
}

/// [`sample`] on a dedicated pool of `threads` workers.
pub fn sample_with_threads(cfg: &ProtocolConfig, threads: usize) -> Result<SampleStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| sample(cfg))
}

/// Largest per-round difference between the PCG and CNOT enumerations.
pub fn variant_equivalence(cfg: &ProtocolConfig) -> Result<f64> {
    let pcg = enumerate(&cfg.with_variant(Variant::Pcg))?;
    let cnot = enumerate(&cfg.with_variant(Variant::Cnot))?;
    Ok(pcg
        .per_round_success
        .iter()
        .zip(&cnot.per_round_success)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
