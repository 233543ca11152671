//! Shared workloads for the benchmarks.

use faircheck_core::lts::{parse_aut, ActionSet, Lts};
use faircheck_core::oracle::{generate_corpus, HarnessConfig, HarnessInstance, RandomLtsParams};
use faircheck_core::templates::{instantiate_pattern, Behaviour, PatternSpec, Scope, ViolationTemplate};

pub fn coffee() -> Lts {
    parse_aut(include_str!("../../core/fixtures/coffee.aut")).expect("bundled fixture parses")
}

/// Every `order` is eventually followed by `deliver`.
pub fn delivery(lts: &Lts) -> Vec<ViolationTemplate> {
    let spec = PatternSpec {
        scope: Scope::Global,
        behaviour: Behaviour::Response {
            sq: ActionSet::singleton("order"),
            sr: ActionSet::singleton("deliver"),
        },
    };
    instantiate_pattern(&spec, lts.alphabet()).expect("response pattern instantiates")
}

/// Seeded random models with up to `states` states.
pub fn random_models(states: usize, count: usize) -> Vec<HarnessInstance> {
    let config = HarnessConfig {
        seed: 7,
        instances: count,
        params: RandomLtsParams {
            max_states: states,
            max_actions: 4,
            max_transitions: states * 3,
        },
        ..HarnessConfig::default()
    };
    generate_corpus(&config).expect("random corpus")
}
