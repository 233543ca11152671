use std::collections::{BTreeMap, VecDeque};

use fixedbitset::FixedBitSet;

use super::PredicateVerdict;
use crate::error::Result;
use crate::lts::{ActionId, ActionMask, ActionSet, ConcurrencyRelation, Lts, Run, StateId};
use crate::mucalc::{evaluate, Environment, Formula};
use crate::templates::{Criterion, CriterionSpec, FinitelyRealisableSpec};

/// A criterion reduced to per-state and per-action masks over the
/// non-blocking actions.
#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Progress,
    /// Every non-blocking action switched on in a state must later be switched
    /// off in a state or killed by an occurring action.
    Realisable {
        on: Vec<ActionMask>,
        off: Vec<ActionMask>,
        kills: Vec<ActionMask>,
    },
    /// An action flagged in every state of a suffix must occur in it.
    Perpetual {
        flagged: Vec<ActionMask>,
        word: String,
        near: Option<ActionMask>,
    },
    /// An action flagged infinitely often in a suffix must occur in it.
    Relentless {
        flagged: Vec<ActionMask>,
        word: String,
        near: Option<ActionMask>,
    },
}

fn non_blocking(lts: &Lts, blocking: &ActionSet) -> ActionMask {
    let mut nb = lts.mask_lenient(blocking);
    nb.toggle_range(..);
    nb
}

fn blocking_name(blocking: &ActionSet) -> String {
    if blocking.is_syntactically_empty() {
        "∅".to_string()
    } else {
        "B".to_string()
    }
}

/// The candidate closest to `sources` along transitions outside `blocking`,
/// measured to a state enabling it; ties go to the smaller action.
fn nearest(lts: &Lts, cand: &ActionMask, sources: &[StateId], blocking: Option<&ActionMask>) -> Option<ActionId> {
    let blocking = blocking?;
    let mut dist = vec![usize::MAX; lts.num_states()];
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    let mut best: Option<(usize, ActionId)> = None;
    while let Some(s) = queue.pop_front() {
        if best.is_some_and(|(d, _)| d < dist[s]) {
            break;
        }
        for a in lts.enabled_mask(s).intersection(cand) {
            if best.is_none_or(|(d, b)| (dist[s], a) < (d, b)) {
                best = Some((dist[s], a));
            }
        }
        for &t in lts.outgoing(s) {
            let tr = lts.transition(t);
            if !blocking.contains(tr.action) && dist[tr.target] == usize::MAX {
                dist[tr.target] = dist[s] + 1;
                queue.push_back(tr.target);
            }
        }
    }
    best.map(|(_, a)| a)
}

fn enabled_masks(lts: &Lts, nb: &ActionMask) -> Vec<ActionMask> {
    (0..lts.num_states())
        .map(|s| {
            let mut m = lts.enabled_mask(s).clone();
            m.intersect_with(nb);
            m
        })
        .collect()
}

fn reachable_masks(lts: &Lts, blocking: &ActionSet, nb: &ActionMask) -> Vec<ActionMask> {
    let b = lts.mask_lenient(blocking);
    (0..lts.num_states())
        .map(|s| {
            let mut m = lts.b_reachable_mask(s, &b);
            m.intersect_with(nb);
            m
        })
        .collect()
}

/// Per state, the actions `a` for which the state satisfies `formulas[a]`.
fn formula_masks(lts: &Lts, formulas: &BTreeMap<String, Formula>) -> Result<Vec<ActionMask>> {
    let mut out = vec![FixedBitSet::with_capacity(lts.num_actions()); lts.num_states()];
    for (label, f) in formulas {
        let Some(a) = lts.action_id(label) else { continue };
        for s in evaluate(lts, f, &Environment::new())?.ones() {
            out[s].insert(a);
        }
    }
    Ok(out)
}

fn kill_masks(lts: &Lts, alpha_el: &BTreeMap<String, ActionSet>) -> Vec<ActionMask> {
    let mut kills = vec![FixedBitSet::with_capacity(lts.num_actions()); lts.num_actions()];
    for (label, el) in alpha_el {
        let Some(a) = lts.action_id(label) else { continue };
        for b in lts.mask_lenient(el).ones() {
            kills[b].insert(a);
        }
    }
    kills
}

impl Shape {
    fn realisable(lts: &Lts, blocking: &ActionSet, spec: &FinitelyRealisableSpec) -> Result<Shape> {
        let nb = non_blocking(lts, blocking);
        let mut on = formula_masks(lts, &spec.phi_on)?;
        for m in &mut on {
            m.intersect_with(&nb);
        }
        Ok(Shape::Realisable {
            on,
            off: formula_masks(lts, &spec.phi_of)?,
            kills: kill_masks(lts, &spec.alpha_el),
        })
    }

    fn justness(lts: &Lts, blocking: &ActionSet, conc: &ConcurrencyRelation) -> Shape {
        let nb = non_blocking(lts, blocking);
        // kills[b] = {a | a and b interfere}
        let mut kills = vec![FixedBitSet::with_capacity(lts.num_actions()); lts.num_actions()];
        for (a, elim) in conc.eliminator_masks(lts).iter().enumerate() {
            for b in elim.ones() {
                kills[b].insert(a);
            }
        }
        Shape::Realisable {
            on: enabled_masks(lts, &nb),
            off: vec![FixedBitSet::with_capacity(lts.num_actions()); lts.num_states()],
            kills,
        }
    }

    pub(crate) fn new(lts: &Lts, spec: &CriterionSpec) -> Result<Shape> {
        spec.validate(lts)?;
        let b = &spec.blocking;
        let nb = non_blocking(lts, b);
        let reach = || format!("{}-reachable", blocking_name(b));
        Ok(match &spec.criterion {
            Criterion::Progress => Shape::Progress,
            Criterion::Justness(conc) => Shape::justness(lts, b, conc),
            Criterion::WeakFairness => Shape::Perpetual {
                flagged: enabled_masks(lts, &nb),
                word: "enabled".into(),
                near: None,
            },
            Criterion::WeakHyperfairness => Shape::Perpetual {
                flagged: reachable_masks(lts, b, &nb),
                word: reach(),
                near: Some(lts.mask_lenient(b)),
            },
            Criterion::StrongFairness => Shape::Relentless {
                flagged: enabled_masks(lts, &nb),
                word: "enabled".into(),
                near: None,
            },
            Criterion::StrongHyperfairness => Shape::Relentless {
                flagged: reachable_masks(lts, b, &nb),
                word: reach(),
                near: Some(lts.mask_lenient(b)),
            },
            Criterion::FinitelyRealisable(fr) => Shape::realisable(lts, b, fr)?,
            Criterion::Strong(phi_of) => {
                let mut live = formula_masks(lts, phi_of)?;
                for m in &mut live {
                    m.toggle_range(..);
                    m.intersect_with(&nb);
                }
                Shape::Relentless {
                    flagged: live,
                    word: "not switched off".into(),
                    near: None,
                }
            }
        })
    }

    /// Masks over the states of `run`: stem states, then for a lasso the
    /// cycle states.
    pub(crate) fn check(&self, lts: &Lts, run: &Run) -> PredicateVerdict {
        let name = |a: usize| Some(lts.action_name(a).to_string());
        let first = |m: &ActionMask| m.ones().next();
        let stem = run.stem();
        match self {
            Shape::Progress => PredicateVerdict::pass(),
            Shape::Realisable { on, off, kills } => {
                let killed_by = |acts: &[usize]| {
                    let mut m = FixedBitSet::with_capacity(lts.num_actions());
                    for &b in acts {
                        m.union_with(&kills[b]);
                    }
                    m
                };
                // resolved: actions switched off or killed at or after the position
                let mut resolved = match run.cycle() {
                    None => off[stem.end()].clone(),
                    Some(c) => {
                        let mut r = killed_by(c.actions());
                        for &v in &c.states()[..c.len()] {
                            r.union_with(&off[v]);
                        }
                        for (j, &v) in c.states()[..c.len()].iter().enumerate() {
                            if let Some(a) = on[v].difference(&r).next() {
                                return PredicateVerdict::fail(
                                    name(a),
                                    stem.len() + j,
                                    "switched on, never eliminated",
                                );
                            }
                        }
                        r
                    }
                };
                let states = stem.states();
                let actions = stem.actions();
                let mut failure = None;
                if run.is_finite() {
                    let n = stem.len();
                    if let Some(a) = on[states[n]].difference(&resolved).next() {
                        failure = Some((a, n));
                    }
                }
                for i in (0..actions.len()).rev() {
                    resolved.union_with(&kills[actions[i]]);
                    resolved.union_with(&off[states[i]]);
                    if let Some(a) = on[states[i]].difference(&resolved).next() {
                        failure = Some((a, i));
                    }
                }
                match failure {
                    Some((a, i)) => PredicateVerdict::fail(name(a), i, "switched on, never eliminated"),
                    None => PredicateVerdict::pass(),
                }
            }
            Shape::Perpetual { flagged, word, near } | Shape::Relentless { flagged, word, near } => {
                let pick = |cond: &ActionMask, from: &[StateId]| {
                    nearest(lts, cond, from, near.as_ref()).or_else(|| first(cond))
                };
                let relentless = matches!(self, Shape::Relentless { .. });
                let adverb = if relentless { "relentlessly" } else { "perpetually" };
                let clause = format!("{adverb} {word}, never occurs");
                if let Some(c) = run.cycle() {
                    let states = &c.states()[..c.len()];
                    let mut cond = flagged[states[0]].clone();
                    for &v in &states[1..] {
                        if relentless {
                            cond.union_with(&flagged[v]);
                        } else {
                            cond.intersect_with(&flagged[v]);
                        }
                    }
                    for &a in c.actions() {
                        cond.set(a, false);
                    }
                    return match pick(&cond, states) {
                        Some(a) => PredicateVerdict::fail(name(a), stem.len(), clause),
                        None => PredicateVerdict::pass(),
                    };
                }
                // Finite: every suffix from position i, computed backwards.
                let states = stem.states();
                let actions = stem.actions();
                let n = actions.len();
                let mut occurs = FixedBitSet::with_capacity(lts.num_actions());
                let mut perpetual = flagged[states[n]].clone();
                let mut later = flagged[states[n]].clone();
                let mut relent = later.clone();
                let mut failure = None;
                for i in (0..=n).rev() {
                    if i < n {
                        occurs.insert(actions[i]);
                        perpetual.intersect_with(&flagged[states[i]]);
                        later.union_with(&flagged[states[i]]);
                        relent.intersect_with(&later);
                    }
                    let cond = if relentless { &relent } else { &perpetual };
                    let missing: ActionMask = cond.difference(&occurs).collect();
                    if let Some(a) = pick(&missing, &states[i..]) {
                        failure = Some((a, i));
                    }
                }
                match failure {
                    Some((a, i)) => PredicateVerdict::fail(name(a), i, clause),
                    None => PredicateVerdict::pass(),
                }
            }
        }
    }
}

/// A criterion predicate compiled against one LTS.
#[derive(Clone, Debug)]
pub struct CriterionChecker {
    shape: Shape,
}

impl CriterionChecker {
    pub fn new(lts: &Lts, spec: &CriterionSpec) -> Result<Self> {
        Ok(CriterionChecker {
            shape: Shape::new(lts, spec)?,
        })
    }

    pub(crate) fn shape(&self) -> &Shape {
        &self.shape
    }

    /// The criterion predicate alone; progress is checked separately.
    pub fn check(&self, lts: &Lts, run: &Run) -> PredicateVerdict {
        self.shape.check(lts, run)
    }
}

/// Infinite, or ends in a B-locked state.
pub fn satisfies_progress(lts: &Lts, run: &Run, blocking: &ActionSet) -> PredicateVerdict {
    if !run.is_finite() {
        return PredicateVerdict::pass();
    }
    let end = run.stem().end();
    let mut free = lts.enabled_mask(end).clone();
    free.difference_with(&lts.mask_lenient(blocking));
    match free.ones().next() {
        Some(a) => PredicateVerdict::fail(
            Some(lts.action_name(a).to_string()),
            run.stem().len(),
            "enabled in the final state",
        ),
        None => PredicateVerdict::pass(),
    }
}

fn named(lts: &Lts, run: &Run, spec: CriterionSpec) -> PredicateVerdict {
    match Shape::new(lts, &spec) {
        Ok(shape) => shape.check(lts, run),
        Err(_) => unreachable!("named criteria without a relation always validate"),
    }
}

pub fn satisfies_wfa(lts: &Lts, run: &Run, blocking: &ActionSet) -> PredicateVerdict {
    named(lts, run, CriterionSpec::new(Criterion::WeakFairness, blocking.materialize(lts.alphabet())))
}

pub fn satisfies_sfa(lts: &Lts, run: &Run, blocking: &ActionSet) -> PredicateVerdict {
    named(lts, run, CriterionSpec::new(Criterion::StrongFairness, blocking.materialize(lts.alphabet())))
}

pub fn satisfies_whfa(lts: &Lts, run: &Run, blocking: &ActionSet) -> PredicateVerdict {
    named(
        lts,
        run,
        CriterionSpec::new(Criterion::WeakHyperfairness, blocking.materialize(lts.alphabet())),
    )
}

pub fn satisfies_shfa(lts: &Lts, run: &Run, blocking: &ActionSet) -> PredicateVerdict {
    named(
        lts,
        run,
        CriterionSpec::new(Criterion::StrongHyperfairness, blocking.materialize(lts.alphabet())),
    )
}

/// Every non-blocking action enabled at some position is eliminated by a
/// later (or the next) interfering action.
pub fn satisfies_ja(
    lts: &Lts,
    run: &Run,
    blocking: &ActionSet,
    conc: &ConcurrencyRelation,
) -> Result<PredicateVerdict> {
    CriterionChecker::new(
        lts,
        &CriterionSpec::new(Criterion::Justness(conc.clone()), blocking.materialize(lts.alphabet())),
    )
    .map(|c| c.check(lts, run))
}

pub fn satisfies_finitely_realisable(
    lts: &Lts,
    run: &Run,
    blocking: &ActionSet,
    spec: &FinitelyRealisableSpec,
) -> Result<PredicateVerdict> {
    CriterionChecker::new(
        lts,
        &CriterionSpec::new(Criterion::FinitelyRealisable(spec.clone()), blocking.clone()),
    )
    .map(|c| c.check(lts, run))
}

/// Every non-blocking action whose `phi_of` fails infinitely often occurs
/// infinitely often.
pub fn satisfies_strong(
    lts: &Lts,
    run: &Run,
    blocking: &ActionSet,
    phi_of: &BTreeMap<String, Formula>,
) -> Result<PredicateVerdict> {
    CriterionChecker::new(
        lts,
        &CriterionSpec::new(Criterion::Strong(phi_of.clone()), blocking.clone()),
    )
    .map(|c| c.check(lts, run))
}
