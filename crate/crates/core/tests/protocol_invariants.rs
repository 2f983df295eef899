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

//! Enumeration on the dense simulator against the closed-form engine.

use ecp_core::analytic::{self, residual_coeffs, GhzClassState};
use ecp_core::qstate::PureState;
use ecp_core::sim::{self, ProtocolConfig, Terminal, Variant};
use proptest::prelude::*;

const VARIANTS: [Variant; 2] = [Variant::Pcg, Variant::Cnot];

fn alpha_sq_grid() -> impl Iterator<Item = f64> {
    (1..20).map(|i| i as f64 * 0.05)
}

fn config(alpha_sq: f64, parties: usize, rounds: usize, variant: Variant) -> ProtocolConfig {
    ProtocolConfig::enumerate(alpha_sq.sqrt(), parties, rounds, variant)
}

#[test]
fn enumeration_matches_round_plan() {
    for a2 in alpha_sq_grid() {
        for parties in [2, 3] {
            for variant in VARIANTS {
                let cfg = config(a2, parties, 5, variant);
                let enumerated = sim::enumerate(&cfg).unwrap();
                let plans = analytic::round_plan(&cfg.ghz_class().unwrap(), 5).unwrap();
                for (got, plan) in enumerated.per_round_success.iter().zip(&plans) {
                    assert!(
                        (got - plan.p_success_uncond).abs() < 1e-10,
                        "α²={a2} N={parties} {variant:?} round {}",
                        plan.round_index
                    );
                }
            }
        }
    }
}

#[test]
fn success_leaves_are_ghz() {
    for parties in 2..=6 {
        let target = PureState::ghz(parties).unwrap();
        for variant in VARIANTS {
            for a2 in [0.05, 0.3, 0.5, 0.85] {
                let result = sim::enumerate(&config(a2, parties, 6, variant)).unwrap();
                for trace in &result.traces {
                    if let Terminal::Success { round } = trace.terminal {
                        assert_eq!(round, trace.rounds.len());
                        let f = trace.final_state.fidelity(&target).unwrap();
                        assert!((f - 1.0).abs() < 1e-12, "N={parties} {variant:?} α²={a2}: {f}");
                        assert!((trace.fidelity - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn exhausted_leaves_carry_iterated_residual() {
    for parties in [2, 4] {
        for variant in VARIANTS {
            for a2 in [0.1, 0.4, 0.7] {
                let rounds = 4;
                let result = sim::enumerate(&config(a2, parties, rounds, variant)).unwrap();
                let (mut alpha, mut beta) = (a2.sqrt(), (1.0 - a2).sqrt());
                for _ in 0..rounds {
                    (alpha, beta) = residual_coeffs(alpha, beta);
                }
                let expected = PureState::new(
                    parties,
                    &[(0, alpha.into()), ((1 << parties) - 1, beta.into())],
                )
                .unwrap();
                let exhausted: Vec<_> = result
                    .traces
                    .iter()
                    .filter(|t| t.terminal == Terminal::Exhausted)
                    .collect();
                assert!(!exhausted.is_empty());
                for trace in exhausted {
                    assert!(trace.rounds.iter().all(|r| r.correction_z));
                    let f = trace.final_state.fidelity(&expected).unwrap();
                    assert!((f - 1.0).abs() < 1e-12);
                    // Sign check: fidelity alone would accept the "−" form only if β = 0.
                    let amp = trace.final_state.amplitude((1 << parties) - 1);
                    assert!(amp.re >= 0.0);
                }
            }
        }
    }
}

#[test]
fn probability_mass_is_conserved() {
    for a2 in alpha_sq_grid().chain([0.0, 1.0]) {
        for variant in VARIANTS {
            let r = sim::enumerate(&config(a2, 3, 6, variant)).unwrap();
            let leaves: f64 = r.traces.iter().map(|t| t.path_probability).sum();
            assert!((leaves + r.pruned_probability - 1.0).abs() < 1e-10);
            assert!((r.cumulative_success + r.residual_probability + r.pruned_probability - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn round_probabilities_do_not_depend_on_parties() {
    for a2 in [0.05, 0.25, 0.5, 0.75] {
        for variant in VARIANTS {
            let reference = sim::enumerate(&config(a2, 2, 5, variant)).unwrap().per_round_success;
            for parties in 3..=6 {
                let other = sim::enumerate(&config(a2, parties, 5, variant)).unwrap().per_round_success;
                for (a, b) in reference.iter().zip(&other) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn pruning_handles_product_states() {
    for variant in VARIANTS {
        for alpha in [0.0, 1.0] {
            let r = sim::enumerate(&ProtocolConfig::enumerate(alpha, 3, 3, variant)).unwrap();
            assert_eq!(r.cumulative_success, 0.0);
            assert!((r.residual_probability - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn sample_is_thread_count_independent() {
    let cfg = ProtocolConfig::sample(0.3f64.sqrt(), 3, 3, Variant::Pcg, 20_000, 42);
    let one = sim::sample_with_threads(&cfg, 1).unwrap();
    let many = sim::sample_with_threads(&cfg, 4).unwrap();
    assert_eq!(one, many);
    let cnot = sim::sample_with_threads(&cfg.with_variant(Variant::Cnot), 3).unwrap();
    assert_eq!(cnot.trials, 20_000);
}

#[test]
fn sample_agrees_with_closed_form() {
    let state = GhzClassState::from_alpha_sq(0.3, 2).unwrap();
    let exact = analytic::cumulative_success(&state, 3).unwrap();
    let mut passes = 0;
    for seed in 0..10 {
        let cfg = ProtocolConfig::sample(0.3f64.sqrt(), 2, 3, Variant::Pcg, 20_000, seed);
        let stats = sim::sample(&cfg).unwrap();
        assert!(stats.successes_by_round.iter().sum::<u64>() <= stats.trials);
        if (stats.empirical_p - exact).abs() <= 4.0 * stats.stderr {
            passes += 1;
        }
    }
    assert!(passes >= 9, "{passes}/10 seeds within 4σ");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enumeration_tracks_closed_form(a2 in 0.0f64..=1.0, parties in 2usize..5, rounds in 1usize..6) {
        for variant in VARIANTS {
            let cfg = config(a2, parties, rounds, variant);
            let r = sim::enumerate(&cfg).unwrap();
            let exact = analytic::cumulative_success(&cfg.ghz_class().unwrap(), rounds).unwrap();
            prop_assert!((r.cumulative_success - exact).abs() < 1e-10);
        }
        prop_assert!(sim::variant_equivalence(&config(a2, parties, rounds, Variant::Pcg)).unwrap() < 1e-12);
    }
}
