//! Finite labelled transition systems.
//!
//! States are dense indices `0..n`. The alphabet is kept sorted, so action ids
//! follow label order and every iteration over actions is canonical.

pub(crate) mod actions;
mod aut;
mod concurrency;
mod path;

pub use actions::{is_plain_label, write_label, write_quoted, ActionSet};
pub use aut::parse_aut;
pub use concurrency::{
    parse_interference_list, restrict_to_valid, validate_concurrency_relation,
    ConcurrencyRelation, ConcurrencyReport, ConcurrencyViolation,
};
pub use path::{append_paths, Lasso, Path, Run};

use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type StateId = usize;
pub type ActionId = usize;
pub type TransitionId = usize;

/// Bit set over action ids.
pub type ActionMask = FixedBitSet;
/// Bit set over state ids.
pub type StateSet = FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: StateId,
    pub action: ActionId,
    pub target: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    num_states: usize,
    initial: StateId,
    alphabet: Vec<String>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<TransitionId>>,
    enabled: Vec<ActionMask>,
}

impl Lts {
    /// Builds an LTS from labelled triples. The alphabet is the union of the
    /// labels used by `transitions` and the extra `declared` labels.
    pub fn new<S: AsRef<str>>(
        num_states: usize,
        initial: StateId,
        declared: impl IntoIterator<Item = S>,
        transitions: &[(StateId, &str, StateId)],
    ) -> Result<Lts> {
        let mut labels: BTreeSet<String> =
            declared.into_iter().map(|s| s.as_ref().to_string()).collect();
        labels.extend(transitions.iter().map(|(_, l, _)| l.to_string()));
        let alphabet: Vec<String> = labels.into_iter().collect();
        let mut resolved = Vec::with_capacity(transitions.len());
        for &(source, label, target) in transitions {
            let action = alphabet.binary_search_by(|a| a.as_str().cmp(label)).unwrap();
            resolved.push(Transition { source, action, target });
        }
        Lts::from_parts(num_states, initial, alphabet, resolved)
    }

    /// Builds an LTS over an already sorted, duplicate-free alphabet.
    pub fn from_parts(
        num_states: usize,
        initial: StateId,
        alphabet: Vec<String>,
        transitions: Vec<Transition>,
    ) -> Result<Lts> {
        if initial >= num_states {
            return Err(Error::UnknownState(initial));
        }
        if alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DomainMismatch(
                "alphabet must be sorted and duplicate-free".into(),
            ));
        }
        let mut outgoing = vec![Vec::new(); num_states];
        let mut enabled = vec![FixedBitSet::with_capacity(alphabet.len()); num_states];
        for (id, t) in transitions.iter().enumerate() {
            for s in [t.source, t.target] {
                if s >= num_states {
                    return Err(Error::UnknownState(s));
                }
            }
            if t.action >= alphabet.len() {
                return Err(Error::UnknownAction(format!("#{}", t.action)));
            }
            outgoing[t.source].push(id);
            enabled[t.source].insert(t.action);
        }
        Ok(Lts {
            num_states,
            initial,
            alphabet,
            transitions,
            outgoing,
            enabled,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.alphabet.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id]
    }

    pub fn outgoing(&self, s: StateId) -> &[TransitionId] {
        &self.outgoing[s]
    }

    pub fn action_id(&self, label: &str) -> Option<ActionId> {
        self.alphabet.binary_search_by(|a| a.as_str().cmp(label)).ok()
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.alphabet[id]
    }

    pub fn check_state(&self, s: StateId) -> Result<()> {
        if s < self.num_states {
            Ok(())
        } else {
            Err(Error::UnknownState(s))
        }
    }

    /// Resolves `set` to a mask, rejecting labels outside the alphabet.
    pub fn mask(&self, set: &ActionSet) -> Result<ActionMask> {
        if let Some(label) = set.labels_outside(&self.alphabet).into_iter().next() {
            return Err(Error::UnknownAction(label));
        }
        Ok(self.mask_lenient(set))
    }

    /// Resolves `set` to a mask, ignoring labels outside the alphabet.
    pub fn mask_lenient(&self, set: &ActionSet) -> ActionMask {
        let mut mask = FixedBitSet::with_capacity(self.alphabet.len());
        for (id, label) in self.alphabet.iter().enumerate() {
            if set.contains(label) {
                mask.insert(id);
            }
        }
        mask
    }

    pub fn action_set(&self, mask: &ActionMask) -> ActionSet {
        ActionSet::of(mask.ones().map(|a| self.alphabet[a].clone()))
    }

    pub fn full_action_mask(&self) -> ActionMask {
        let mut m = FixedBitSet::with_capacity(self.alphabet.len());
        m.insert_range(..);
        m
    }

    pub fn empty_state_set(&self) -> StateSet {
        FixedBitSet::with_capacity(self.num_states)
    }

    pub fn full_state_set(&self) -> StateSet {
        let mut s = self.empty_state_set();
        s.insert_range(..);
        s
    }

    pub fn enabled_mask(&self, s: StateId) -> &ActionMask {
        &self.enabled[s]
    }

    pub fn enabled_actions(&self, s: StateId) -> Result<ActionSet> {
        self.check_state(s)?;
        Ok(self.action_set(&self.enabled[s]))
    }

    pub fn is_b_locked(&self, s: StateId, blocking: &ActionSet) -> Result<bool> {
        self.check_state(s)?;
        let b = self.mask(blocking)?;
        Ok(self.is_locked_mask(s, &b))
    }

    pub fn is_locked_mask(&self, s: StateId, blocking: &ActionMask) -> bool {
        self.enabled[s].is_subset(blocking)
    }

    /// States reachable from `s` through transitions whose action is outside
    /// `blocking`, including `s` itself.
    pub fn b_reachable_states(&self, s: StateId, blocking: &ActionMask) -> StateSet {
        let mut seen = self.empty_state_set();
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &t in &self.outgoing[u] {
                let t = &self.transitions[t];
                if !blocking.contains(t.action) && !seen.put(t.target) {
                    queue.push_back(t.target);
                }
            }
        }
        seen
    }

    pub fn b_reachable_mask(&self, s: StateId, blocking: &ActionMask) -> ActionMask {
        let mut acts = FixedBitSet::with_capacity(self.alphabet.len());
        for u in self.b_reachable_states(s, blocking).ones() {
            acts.union_with(&self.enabled[u]);
        }
        acts
    }

    pub fn b_reachable_actions(&self, s: StateId, blocking: &ActionSet) -> Result<ActionSet> {
        self.check_state(s)?;
        let b = self.mask(blocking)?;
        Ok(self.action_set(&self.b_reachable_mask(s, &b)))
    }

    /// Shortest path from `s` to a state enabling `action`, using only
    /// transitions outside `blocking`. Ties go to smaller target states.
    pub fn b_free_path_to_enabling(
        &self,
        s: StateId,
        action: ActionId,
        blocking: &ActionMask,
    ) -> Option<Vec<TransitionId>> {
        let mut parent: Vec<Option<TransitionId>> = vec![None; self.num_states];
        let mut seen = self.empty_state_set();
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if self.enabled[u].contains(action) {
                let mut steps = Vec::new();
                let mut cur = u;
                while let Some(t) = parent[cur] {
                    steps.push(t);
                    cur = self.transitions[t].source;
                }
                steps.reverse();
                return Some(steps);
            }
            let mut next: Vec<TransitionId> = self.outgoing[u]
                .iter()
                .copied()
                .filter(|&t| !blocking.contains(self.transitions[t].action))
                .collect();
            next.sort_by_key(|&t| (self.transitions[t].target, t));
            for t in next {
                let v = self.transitions[t].target;
                if !seen.put(v) {
                    parent[v] = Some(t);
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Serializes to the `.aut` format. Labels without transitions are listed
    /// on a `%alphabet` line.
    pub fn to_aut(&self) -> String {
        let mut out = format!(
            "des ({},{},{})\n",
            self.initial,
            self.transitions.len(),
            self.num_states
        );
        let mut used = FixedBitSet::with_capacity(self.alphabet.len());
        for t in &self.transitions {
            used.insert(t.action);
        }
        let unused: Vec<&String> = self
            .alphabet
            .iter()
            .enumerate()
            .filter(|(i, _)| !used.contains(*i))
            .map(|(_, l)| l)
            .collect();
        if !unused.is_empty() {
            out.push_str("%alphabet");
            for l in unused {
                out.push(' ');
                write_quoted(&mut out, l).unwrap();
            }
            out.push('\n');
        }
        for t in &self.transitions {
            out.push_str(&format!("({},", t.source));
            write_quoted(&mut out, &self.alphabet[t.action]).unwrap();
            out.push_str(&format!(",{})\n", t.target));
        }
        out
    }
}
