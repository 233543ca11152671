use rand::seq::SliceRandom;
use rand::Rng;

use crate::lts::{restrict_to_valid, ActionSet, ConcurrencyRelation, Lts, Transition};
use crate::templates::{Behaviour, PatternSpec, Scope};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomLtsParams {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_transitions: usize,
}

impl Default for RandomLtsParams {
    fn default() -> Self {
        RandomLtsParams {
            max_states: 5,
            max_actions: 4,
            max_transitions: 10,
        }
    }
}

/// An LTS whose states are all reachable from state 0.
///
/// Actions are named `a`, `b`, ... and all of them are declared, used or not.
pub fn random_lts(rng: &mut impl Rng, params: &RandomLtsParams) -> Lts {
    let n = rng.gen_range(1..=params.max_states.max(1));
    let k = rng.gen_range(1..=params.max_actions.clamp(1, 26));
    let alphabet: Vec<String> = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let lower = n - 1;
    let m = rng.gen_range(lower..=params.max_transitions.max(lower));
    let mut transitions: Vec<Transition> = (1..n)
        .map(|s| Transition {
            source: rng.gen_range(0..s),
            action: rng.gen_range(0..k),
            target: s,
        })
        .collect();
    // A fixed number of draws keeps generation deterministic and bounded.
    for _ in 0..4 * (m - lower) {
        if transitions.len() >= m {
            break;
        }
        let t = Transition {
            source: rng.gen_range(0..n),
            action: rng.gen_range(0..k),
            target: rng.gen_range(0..n),
        };
        if !transitions.contains(&t) {
            transitions.push(t);
        }
    }
    Lts::from_parts(n, 0, alphabet, transitions).expect("states and actions in range")
}

/// One to `max` distinct labels of `alphabet`.
fn random_set(rng: &mut impl Rng, alphabet: &[String], max: usize) -> ActionSet {
    let size = rng.gen_range(1..=max.min(alphabet.len()));
    ActionSet::of(alphabet.choose_multiple(rng, size).cloned())
}

/// A nonempty blocking set.
pub fn random_blocking(rng: &mut impl Rng, alphabet: &[String]) -> ActionSet {
    random_set(rng, alphabet, alphabet.len())
}

/// A pattern over `alphabet` with a random scope and behaviour.
pub fn random_pattern(rng: &mut impl Rng, alphabet: &[String]) -> PatternSpec {
    let set = |rng: &mut _| random_set(rng, alphabet, 2);
    let scope = match rng.gen_range(0..4) {
        0 => Scope::Global,
        1 => Scope::Until { sb: set(rng) },
        2 => Scope::After { sa: set(rng) },
        _ => Scope::AfterUntil {
            sa: set(rng),
            sb: set(rng),
        },
    };
    let behaviour = match rng.gen_range(0..4) {
        0 => Behaviour::Existence { sr: set(rng) },
        1 => Behaviour::AtLeast {
            k: rng.gen_range(1..=2),
            sr: set(rng),
        },
        2 => Behaviour::Response {
            sq: set(rng),
            sr: set(rng),
        },
        _ => {
            let q = (0..rng.gen_range(1..=2)).map(|_| set(rng)).collect();
            let r = (0..rng.gen_range(1..=2)).map(|_| set(rng)).collect();
            Behaviour::ChainResponse { q, r }
        }
    };
    PatternSpec { scope, behaviour }
}

/// A random relation cut down to a valid one.
pub fn random_relation(rng: &mut impl Rng, lts: &Lts) -> ConcurrencyRelation {
    let mut conc = ConcurrencyRelation::empty();
    for a in lts.alphabet() {
        for b in lts.alphabet() {
            if a != b && rng.gen_bool(0.5) {
                conc.insert(a.clone(), b.clone());
            }
        }
    }
    restrict_to_valid(lts, &conc)
}
