use std::collections::HashSet;

use super::{Nfa, PredicateVerdict};
use crate::lts::{ActionId, ActionMask, Lts, Run};
use crate::templates::ViolationTemplate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Hit {
    Escape,
    Forbidden,
}

/// The `alpha_e` and `alpha_f` masks of a template.
#[derive(Clone, Debug)]
pub(crate) struct Classes {
    e: ActionMask,
    f: ActionMask,
}

impl Classes {
    pub(crate) fn new(lts: &Lts, t: &ViolationTemplate) -> Classes {
        Classes {
            e: lts.mask_lenient(&t.alpha_e),
            f: lts.mask_lenient(&t.alpha_f),
        }
    }

    /// An action in both sets counts as escaping: the forbidden prefix stops
    /// before it.
    pub(crate) fn classify(&self, a: ActionId) -> Option<Hit> {
        if self.e.contains(a) {
            Some(Hit::Escape)
        } else if self.f.contains(a) {
            Some(Hit::Forbidden)
        } else {
            None
        }
    }

    pub(crate) fn first_hit(&self, word: impl IntoIterator<Item = ActionId>) -> Option<Hit> {
        word.into_iter().find_map(|a| self.classify(a))
    }
}

/// Index of a split point `π = π_pre · π_suf` witnessing that `run` is
/// violating, counted in steps along the unrolled run.
pub fn violation_split(lts: &Lts, run: &Run, t: &ViolationTemplate) -> Option<usize> {
    let nfa = Nfa::new(lts, &t.rho);
    let classes = Classes::new(lts, t);
    let stem = run.stem().actions();
    let mut cur = nfa.initial();
    match run.cycle() {
        None => {
            for i in 0..=stem.len() {
                if nfa.accepts(&cur) && classes.first_hit(stem[i..].iter().copied()) != Some(Hit::Forbidden) {
                    return Some(i);
                }
                if i < stem.len() {
                    cur = nfa.step(&cur, stem[i]);
                }
            }
            None
        }
        Some(cycle) => {
            let cycle = cycle.actions();
            let loop_hit = classes.first_hit(cycle.iter().copied());
            for (i, &a) in stem.iter().enumerate() {
                if nfa.accepts(&cur) {
                    let hit = classes.first_hit(stem[i..].iter().copied()).or(loop_hit);
                    if hit != Some(Hit::Forbidden) {
                        return Some(i);
                    }
                }
                cur = nfa.step(&cur, a);
            }
            // Rotations of the cycle, then iterate until the automaton state at
            // the cycle entry repeats.
            let good: Vec<bool> = (0..cycle.len())
                .map(|j| {
                    let rotation = cycle[j..].iter().chain(&cycle[..j]).copied();
                    classes.first_hit(rotation) != Some(Hit::Forbidden)
                })
                .collect();
            let mut seen = HashSet::new();
            let mut k = 0;
            while seen.insert(cur.clone()) {
                for (j, &a) in cycle.iter().enumerate() {
                    if good[j] && nfa.accepts(&cur) {
                        return Some(stem.len() + k * cycle.len() + j);
                    }
                    cur = nfa.step(&cur, a);
                }
                k += 1;
            }
            None
        }
    }
}

/// Whether `run` has a finite prefix matching `rho` followed by a suffix
/// without `alpha_f` actions before the first `alpha_e` action.
pub fn is_violating(lts: &Lts, run: &Run, t: &ViolationTemplate) -> PredicateVerdict {
    if violation_split(lts, run, t).is_some() {
        return PredicateVerdict::pass();
    }
    let nfa = Nfa::new(lts, &t.rho);
    let classes = Classes::new(lts, t);
    let stem = run.stem().actions();
    let mut cur = nfa.initial();
    let unrolled: Vec<ActionId> = match run.cycle() {
        None => stem.to_vec(),
        Some(c) => stem
            .iter()
            .chain(c.actions().iter().cycle().take(c.len() * (nfa.num_states() + 1)))
            .copied()
            .collect(),
    };
    for (i, &a) in unrolled.iter().enumerate() {
        if nfa.accepts(&cur) {
            if let Some(bad) = unrolled[i..].iter().copied().find(|&b| classes.classify(b).is_some()) {
                return PredicateVerdict::fail(
                    Some(lts.action_name(bad).to_string()),
                    i,
                    "occurs after a prefix matching rho and before any alpha_e action",
                );
            }
        }
        cur = nfa.step(&cur, a);
    }
    PredicateVerdict::fail(None, 0, "no prefix matches rho")
}
