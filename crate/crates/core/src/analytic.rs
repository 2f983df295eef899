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

//! Closed-form success probabilities of iterated concentration on GHZ-class states.
//!
//! A round on `α|↑…↑⟩ + β|↓…↓⟩` succeeds with conditional probability `2α²β²`; on failure the
//! state becomes the same form with `(α², β²)/√(α⁴+β⁴)`. The k-th unconditional term of the
//! success series is `2α^{2^k}β^{2^k} / ∏_{j=2..k}(α^{2^j}+β^{2^j})`. Powers of that size
//! underflow quickly, so the engine carries the coefficients and the failure mass entering each
//! round instead and never forms them.

use thiserror::Error;

/// Tolerance on `α² + β² = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Round cap for [`asymptotic_limit`].
pub const MAX_ROUNDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("coefficients ({alpha}, {beta}) do not satisfy α² + β² = 1")]
    NotNormalized { alpha: f64, beta: f64 },
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("a GHZ-class state needs at least 2 parties, got {0}")]
    TooFewParties(usize),
    #[error("round count must be at least 1")]
    NoRounds,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("series did not converge within {0} rounds")]
    IterationLimit(usize),
    #[error("entanglement {0} is outside (0, 1]")]
    EntanglementOutOfRange(f64),
    #[error("α² = {0} is outside [0, 1]")]
    AlphaSqOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, AnalyticError>;

/// Relative phase between the all-up and all-down branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelativePhase {
    Plus,
    Minus,
}

/// `α|↑…↑⟩ ± β|↓…↓⟩` on `num_parties` qubits, stored with `α, β ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzClassState {
    alpha: f64,
    beta: f64,
    sign: RelativePhase,
    num_parties: usize,
}

impl GhzClassState {
    /// Accepts signed real coefficients and canonicalizes them to magnitudes plus a phase flag.
    pub fn new(alpha: f64, beta: f64, num_parties: usize) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(AnalyticError::NonFinite);
        }
        if num_parties < 2 {
            return Err(AnalyticError::TooFewParties(num_parties));
        }
        if (alpha * alpha + beta * beta - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(AnalyticError::NotNormalized { alpha, beta });
        }
        let sign = if (alpha < 0.0) != (beta < 0.0) && alpha != 0.0 && beta != 0.0 {
            RelativePhase::Minus
        } else {
            RelativePhase::Plus
        };
        Ok(Self {
            alpha: alpha.abs(),
            beta: beta.abs(),
            sign,
            num_parties,
        })
    }

    /// `√a2 |↑…↑⟩ + √(1−a2) |↓…↓⟩`.
    pub fn from_alpha_sq(alpha_sq: f64, num_parties: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(AnalyticError::AlphaSqOutOfRange(alpha_sq));
        }
        let mut s = Self::new(alpha_sq.sqrt(), (1.0 - alpha_sq).sqrt(), num_parties)?;
        // sqrt rounding can push α² + β² off 1 by an ulp; renormalize.
        let norm = s.alpha.hypot(s.beta);
        s.alpha /= norm;
        s.beta /= norm;
        Ok(s)
    }

    pub fn with_sign(mut self, sign: RelativePhase) -> Self {
        self.sign = sign;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sign(&self) -> RelativePhase {
        self.sign
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    /// The same state with the roles of `α` and `β` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
            ..*self
        }
    }
}

/// `E = 2·min(α², β²)`.
pub fn entanglement(state: &GhzClassState) -> f64 {
    (2.0 * (state.alpha * state.alpha).min(state.beta * state.beta)).clamp(0.0, 1.0)
}

/// Coefficients after a failed round: `(α², β²)/√(α⁴+β⁴)`.
pub fn residual_coeffs(alpha: f64, beta: f64) -> (f64, f64) {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let norm = a2.hypot(b2);
    (a2 / norm, b2 / norm)
}

/// One round of the iterated protocol, as entered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundPlan {
    /// 1-based.
    pub round_index: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Projection angle with `cosθ = α_k`, `sinθ = −β_k`.
    pub theta: f64,
    /// Probability of reaching this round.
    pub p_reach: f64,
    /// `2α_k²β_k²`.
    pub p_success_cond: f64,
    /// `p_reach · p_success_cond`.
    pub p_success_uncond: f64,
}

/// Projection angle for a round entered with coefficients `(alpha, beta)`.
pub fn projection_angle(alpha: f64, beta: f64) -> f64 {
    (-beta).atan2(alpha)
}

fn plan_iter(state: &GhzClassState) -> impl Iterator<Item = RoundPlan> {
    let mut alpha = state.alpha;
    let mut beta = state.beta;
    let mut p_reach = 1.0f64;
    (1..).map(move |round_index| {
        let p_success_cond = (2.0 * alpha * alpha * beta * beta).clamp(0.0, 1.0);
        let plan = RoundPlan {
            round_index,
            alpha,
            beta,
            theta: projection_angle(alpha, beta),
            p_reach,
            p_success_cond,
            p_success_uncond: p_reach * p_success_cond,
        };
        p_reach *= 1.0 - p_success_cond;
        (alpha, beta) = residual_coeffs(alpha, beta);
        plan
    })
}

/// Plans for the first `max_rounds` rounds.
pub fn round_plan(state: &GhzClassState, max_rounds: usize) -> Result<Vec<RoundPlan>> {
    if max_rounds == 0 {
        return Err(AnalyticError::NoRounds);
    }
    Ok(plan_iter(state).take(max_rounds).collect())
}

/// `P_n`, the probability of success within `rounds` rounds.
pub fn cumulative_success(state: &GhzClassState, rounds: usize) -> Result<f64> {
    let total: f64 = round_plan(state, rounds)?
        .iter()
        .map(|p| p.p_success_uncond)
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// `E − P_n`, evaluated without cancellation.
///
/// The series from any GHZ-class state sums to that state's entanglement, so the shortfall
/// after `rounds` rounds is the probability of reaching round `rounds + 1` times the
/// entanglement of the state entering it. `P_n` itself rounds to `E` within a few rounds for
/// small `E`; this stays strictly positive as long as the residual coefficient is representable.
pub fn success_gap(state: &GhzClassState, rounds: usize) -> Result<f64> {
    if rounds == 0 {
        return Err(AnalyticError::NoRounds);
    }
    let next = plan_iter(state)
        .nth(rounds)
        .expect("plan iterator is unbounded");
    Ok(next.p_reach * 2.0 * (next.alpha * next.alpha).min(next.beta * next.beta))
}

/// Sums the series until a term falls below `tol`; returns `(P_n, n)` at that round.
pub fn asymptotic_limit(state: &GhzClassState, tol: f64) -> Result<(f64, usize)> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(AnalyticError::InvalidTolerance(tol));
    }
    let mut total = 0.0;
    for plan in plan_iter(state).take(MAX_ROUNDS) {
        total += plan.p_success_uncond;
        if plan.p_success_uncond < tol {
            return Ok((total.clamp(0.0, 1.0), plan.round_index));
        }
    }
    Err(AnalyticError::IterationLimit(MAX_ROUNDS))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub entanglement: f64,
    pub rounds: usize,
    pub success: f64,
}

impl CurveRow {
    pub fn ratio(&self) -> f64 {
        self.success / self.entanglement
    }
}

/// Success probability against entanglement, one row per `(E, n)` in grid order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConcentrationCurve {
    pub rows: Vec<CurveRow>,
}

/// Tabulates `P_n(E)` with `α² = E/2`.
pub fn curve(e_grid: &[f64], n_values: &[usize]) -> Result<ConcentrationCurve> {
    let mut rows = Vec::with_capacity(e_grid.len() * n_values.len());
    for &e in e_grid {
        if !(e > 0.0 && e <= 1.0) {
            return Err(AnalyticError::EntanglementOutOfRange(e));
        }
        let state = GhzClassState::from_alpha_sq(e / 2.0, 2)?;
        for &n in n_values {
            rows.push(CurveRow {
                entanglement: e,
                rounds: n,
                success: cumulative_success(&state, n)?,
            });
        }
    }
    Ok(ConcentrationCurve { rows })
}
