//! Bounded search for complete violating runs.
//!
//! Stems and cycles are explored breadth-first and merged by signature: two
//! stems with the same signature can be swapped in any lasso without changing
//! whether it is violating or satisfies the criterion, and likewise for cycles
//! starting in the same state. Breadth-first order keeps the shortest
//! representative of every signature reachable within the bounds.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use fixedbitset::FixedBitSet;

use super::SearchBounds;
use crate::error::{Error, Result};
use crate::lts::{ActionMask, Lasso, Lts, Path, Run, StateId, TransitionId};
use crate::predicates::violation::{Classes, Hit};
use crate::predicates::{is_violating, satisfies_progress, CriterionChecker, Nfa, Shape};
use crate::templates::{CriterionSpec, ViolationTemplate};

/// No split yet, a split whose suffix is still clean, or a settled split.
const NONE: u8 = 0;
const PENDING: u8 = 1;
const SETTLED: u8 = 2;

fn advance(status: u8, hit: Option<Hit>) -> u8 {
    match (status, hit) {
        (PENDING, Some(Hit::Escape)) => SETTLED,
        (PENDING, Some(Hit::Forbidden)) => NONE,
        (s, _) => s,
    }
}

/// What a finite prefix contributes to the lassos it starts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct StemSig {
    state: StateId,
    nfa: FixedBitSet,
    status: u8,
    /// Switched-on actions still waiting for elimination (realisable shapes).
    pending: ActionMask,
}

/// What a closed walk contributes, relative to the automaton state at entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CycleSig {
    state: StateId,
    acts: ActionMask,
    visited: FixedBitSet,
    /// For each automaton state at entry, the states after the walk.
    rel: Vec<FixedBitSet>,
    /// Class of the first alpha_e or alpha_f action: 0 none, 1 escape, 2 forbidden.
    first: u8,
    /// Per automaton state at entry, the best split status inside the walk.
    status: Vec<u8>,
}

struct Node<S> {
    sig: S,
    parent: Option<(usize, TransitionId)>,
}

struct Explored<S> {
    nodes: Vec<Node<S>>,
    saturated: bool,
}

impl<S> Explored<S> {
    fn steps(&self, mut i: usize) -> Vec<TransitionId> {
        let mut out = Vec::new();
        while let Some((p, t)) = self.nodes[i].parent {
            out.push(t);
            i = p;
        }
        out.reverse();
        out
    }
}

struct Counter {
    explored: usize,
    budget: usize,
}

impl Counter {
    fn tick(&mut self) -> Result<()> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(Error::Budget {
                explored: self.explored,
            });
        }
        Ok(())
    }
}

fn explore<S: Clone + Eq + Hash>(
    lts: &Lts,
    root: S,
    max_depth: usize,
    state_of: impl Fn(&S) -> StateId,
    step: impl Fn(&S, TransitionId) -> S,
    counter: &mut Counter,
) -> Result<Explored<S>> {
    let mut index: HashMap<S, usize> = HashMap::new();
    let mut nodes = vec![Node {
        sig: root.clone(),
        parent: None,
    }];
    index.insert(root, 0);
    let mut layer: VecDeque<usize> = VecDeque::from([0]);
    for _ in 0..max_depth {
        let mut next = VecDeque::new();
        for &i in &layer {
            for &t in lts.outgoing(state_of(&nodes[i].sig)) {
                counter.tick()?;
                let sig = step(&nodes[i].sig, t);
                if !index.contains_key(&sig) {
                    index.insert(sig.clone(), nodes.len());
                    next.push_back(nodes.len());
                    nodes.push(Node {
                        sig,
                        parent: Some((i, t)),
                    });
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    let saturated = layer.iter().any(|&i| {
        lts.outgoing(state_of(&nodes[i].sig))
            .iter()
            .any(|&t| !index.contains_key(&step(&nodes[i].sig, t)))
    });
    Ok(Explored { nodes, saturated })
}

/// A closed cycle with the data needed to combine it with stems.
struct Closed {
    node: usize,
    rel: Vec<FixedBitSet>,
    first: u8,
    /// Entry automaton states from which a split inside the cycle violates.
    good: FixedBitSet,
    criterion: CycleCriterion,
}

enum CycleCriterion {
    Fixed(bool),
    /// Lasso satisfies iff `pending ∪ need ⊆ resolved`.
    Realisable { need: ActionMask, resolved: ActionMask },
}

/// Result of a bounded oracle search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub admits: bool,
    /// A complete violating run, present iff `admits`.
    pub witness: Option<Run>,
    /// Whether the bounds cut off signatures that were not yet seen.
    pub saturated: bool,
    pub explored: usize,
}

struct Search<'a> {
    lts: &'a Lts,
    nfa: Nfa,
    classes: Classes,
    shape: &'a Shape,
    blocking: ActionMask,
}

impl Search<'_> {
    fn stem_root(&self) -> StemSig {
        let nfa = self.nfa.initial();
        let status = if self.nfa.accepts(&nfa) { PENDING } else { NONE };
        StemSig {
            state: self.lts.initial(),
            nfa,
            status,
            pending: FixedBitSet::with_capacity(self.lts.num_actions()),
        }
    }

    fn stem_step(&self, sig: &StemSig, t: TransitionId) -> StemSig {
        let tr = self.lts.transition(t);
        let a = tr.action;
        let mut status = advance(sig.status, self.classes.classify(a));
        let nfa = self.nfa.step(&sig.nfa, a);
        if status == NONE && self.nfa.accepts(&nfa) {
            status = PENDING;
        }
        let mut pending = sig.pending.clone();
        if let Shape::Realisable { on, off, kills } = self.shape {
            pending.union_with(&on[sig.state]);
            pending.difference_with(&off[sig.state]);
            pending.difference_with(&kills[a]);
        }
        StemSig {
            state: tr.target,
            nfa,
            status,
            pending,
        }
    }

    fn tracks_cycle_sets(&self) -> bool {
        !matches!(self.shape, Shape::Progress)
    }

    fn cycle_root(&self, q: StateId) -> CycleSig {
        let n = self.nfa.num_states();
        let rel = (0..n)
            .map(|i| {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert(i);
                s
            })
            .collect();
        let status = (0..n)
            .map(|i| if self.nfa.accepting().contains(i) { PENDING } else { NONE })
            .collect();
        let mut visited = FixedBitSet::with_capacity(self.lts.num_states());
        if self.tracks_cycle_sets() {
            visited.insert(q);
        }
        CycleSig {
            state: q,
            acts: FixedBitSet::with_capacity(self.lts.num_actions()),
            visited,
            rel,
            first: 0,
            status,
        }
    }

    fn cycle_step(&self, sig: &CycleSig, t: TransitionId) -> CycleSig {
        let tr = self.lts.transition(t);
        let a = tr.action;
        let hit = self.classes.classify(a);
        let mut next = sig.clone();
        next.state = tr.target;
        if self.tracks_cycle_sets() {
            next.acts.insert(a);
            next.visited.insert(tr.target);
        }
        if next.first == 0 {
            next.first = match hit {
                Some(Hit::Escape) => 1,
                Some(Hit::Forbidden) => 2,
                None => 0,
            };
        }
        for (i, r) in next.rel.iter_mut().enumerate() {
            *r = self.nfa.step(r, a);
            let s = advance(next.status[i], hit);
            next.status[i] = if s == NONE && self.nfa.accepts(r) { PENDING } else { s };
        }
        next
    }

    fn close(&self, node: usize, sig: &CycleSig) -> Closed {
        let n = self.nfa.num_states();
        let mut good = FixedBitSet::with_capacity(n);
        for (i, &s) in sig.status.iter().enumerate() {
            if s == SETTLED || (s == PENDING && sig.first != 2) {
                good.insert(i);
            }
        }
        let states: Vec<StateId> = sig.visited.ones().collect();
        let criterion = match self.shape {
            Shape::Progress => CycleCriterion::Fixed(true),
            Shape::Realisable { on, off, kills } => {
                let mut need = FixedBitSet::with_capacity(self.lts.num_actions());
                let mut resolved = need.clone();
                for &v in &states {
                    need.union_with(&on[v]);
                    resolved.union_with(&off[v]);
                }
                for b in sig.acts.ones() {
                    resolved.union_with(&kills[b]);
                }
                CycleCriterion::Realisable { need, resolved }
            }
            Shape::Perpetual { flagged, .. } | Shape::Relentless { flagged, .. } => {
                let relentless = matches!(self.shape, Shape::Relentless { .. });
                let mut cond = flagged[states[0]].clone();
                for &v in &states[1..] {
                    if relentless {
                        cond.union_with(&flagged[v]);
                    } else {
                        cond.intersect_with(&flagged[v]);
                    }
                }
                CycleCriterion::Fixed(cond.is_subset(&sig.acts))
            }
        };
        Closed {
            node,
            rel: sig.rel.clone(),
            first: sig.first,
            good,
            criterion,
        }
    }

    fn finite_ok(&self, sig: &StemSig) -> bool {
        if sig.status == NONE || !self.lts.is_locked_mask(sig.state, &self.blocking) {
            return false;
        }
        match self.shape {
            Shape::Progress => true,
            Shape::Realisable { on, off, .. } => {
                let mut left = sig.pending.clone();
                left.union_with(&on[sig.state]);
                left.difference_with(&off[sig.state]);
                left.is_clear()
            }
            Shape::Perpetual { flagged, .. } | Shape::Relentless { flagged, .. } => {
                flagged[sig.state].is_clear()
            }
        }
    }

    fn lasso_ok(&self, sig: &StemSig, c: &Closed) -> bool {
        let criterion = match &c.criterion {
            CycleCriterion::Fixed(ok) => *ok,
            CycleCriterion::Realisable { need, resolved } => {
                let mut all = sig.pending.clone();
                all.union_with(need);
                all.is_subset(resolved)
            }
        };
        if !criterion {
            return false;
        }
        if sig.status == SETTLED || (sig.status == PENDING && c.first != 2) {
            return true;
        }
        // Automaton states at any cycle entry: closure of the stem's set.
        let mut reach = sig.nfa.clone();
        let mut frontier: Vec<usize> = reach.ones().collect();
        while let Some(i) = frontier.pop() {
            for j in c.rel[i].ones() {
                if !reach.put(j) {
                    frontier.push(j);
                }
            }
        }
        !reach.is_disjoint(&c.good)
    }
}

pub(super) fn search(
    lts: &Lts,
    t: &ViolationTemplate,
    spec: &CriterionSpec,
    bounds: &SearchBounds,
) -> Result<OracleOutcome> {
    let checker = CriterionChecker::new(lts, spec)?;
    let s = Search {
        lts,
        nfa: Nfa::new(lts, &t.rho),
        classes: Classes::new(lts, t),
        shape: checker.shape(),
        blocking: lts.mask_lenient(&spec.blocking),
    };
    let mut counter = Counter {
        explored: 0,
        budget: bounds.budget,
    };
    let stems = explore(
        lts,
        s.stem_root(),
        bounds.max_stem,
        |g| g.state,
        |g, t| s.stem_step(g, t),
        &mut counter,
    )?;
    let mut saturated = stems.saturated;
    let mut cycles: HashMap<StateId, (Explored<CycleSig>, Vec<Closed>)> = HashMap::new();

    let witness = |stem: Vec<TransitionId>, cycle: Option<(StateId, Vec<TransitionId>)>| {
        let stem = Path::new(lts, lts.initial(), &stem).expect("explored steps");
        let run = match cycle {
            None => Run::Finite(stem),
            Some((q, steps)) => {
                let cycle = Path::new(lts, q, &steps).expect("explored steps");
                Run::Lasso(Lasso::new(stem, cycle).expect("closed walk at the stem end"))
            }
        };
        let checks = [
            is_violating(lts, &run, t),
            satisfies_progress(lts, &run, &spec.blocking),
            checker.check(lts, &run),
        ];
        assert!(
            checks.iter().all(|v| v.holds),
            "signature search produced a run that fails {checks:?}: {}",
            run.to_trace(lts)
        );
        run
    };

    for (i, node) in stems.nodes.iter().enumerate() {
        let sig = &node.sig;
        if s.finite_ok(sig) {
            return Ok(OracleOutcome {
                admits: true,
                witness: Some(witness(stems.steps(i), None)),
                saturated,
                explored: counter.explored,
            });
        }
        if !cycles.contains_key(&sig.state) {
            let q = sig.state;
            let explored = explore(
                lts,
                s.cycle_root(q),
                bounds.max_cycle,
                |g| g.state,
                |g, t| s.cycle_step(g, t),
                &mut counter,
            )?;
            saturated |= explored.saturated;
            let closed = explored
                .nodes
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, n)| n.sig.state == q)
                .map(|(j, n)| s.close(j, &n.sig))
                .collect();
            cycles.insert(q, (explored, closed));
        }
        let (explored, closed) = &cycles[&sig.state];
        for c in closed {
            counter.tick()?;
            if s.lasso_ok(sig, c) {
                return Ok(OracleOutcome {
                    admits: true,
                    witness: Some(witness(
                        stems.steps(i),
                        Some((sig.state, explored.steps(c.node))),
                    )),
                    saturated,
                    explored: counter.explored,
                });
            }
        }
    }
    Ok(OracleOutcome {
        admits: false,
        witness: None,
        saturated,
        explored: counter.explored,
    })
}
