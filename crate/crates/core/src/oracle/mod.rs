//! An independent, definitional check of the formula verdicts.
//!
//! The oracle looks for a complete violating run directly: a finite path or a
//! lasso that is violating, satisfies progress and satisfies the criterion.
//! It never consults the modal formulas.

mod harness;
mod random;
mod search;

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::lts::{Lasso, Lts, Path, Run, StateId, TransitionId};
use crate::mucalc::satisfies;
use crate::predicates::{is_violating, satisfies_progress, CriterionChecker};
use crate::templates::{CriterionSpec, ViolationTemplate, DEFAULT_SUBSET_CAP};

pub use harness::{
    generate_corpus, parse_harness_config, run_harness, HarnessConfig, HarnessInstance,
    HarnessLine, HarnessReport,
};
pub use random::{random_blocking, random_lts, random_pattern, random_relation, RandomLtsParams};
pub use search::OracleOutcome;

/// Length bounds on the stem and the cycle of candidate runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_stem: usize,
    pub max_cycle: usize,
    /// Signatures explored before giving up with [`crate::Error::Budget`].
    pub budget: usize,
}

impl SearchBounds {
    pub const DEFAULT_BUDGET: usize = 5_000_000;

    pub fn new(max_stem: usize, max_cycle: usize) -> Self {
        SearchBounds {
            max_stem,
            max_cycle,
            budget: Self::DEFAULT_BUDGET,
        }
    }

    /// `|S| · (|Act| + 2)` for both.
    pub fn default_for(lts: &Lts) -> Self {
        let n = lts.num_states() * (lts.num_actions() + 2);
        SearchBounds::new(n, n)
    }
}

/// Whether some complete violating run exists within `bounds`.
pub fn oracle_admits_violating(
    lts: &Lts,
    t: &ViolationTemplate,
    spec: &CriterionSpec,
    bounds: &SearchBounds,
) -> Result<OracleOutcome> {
    search::search(lts, t, spec, bounds)
}

/// Walks from `start` of length at most `max`, in depth-first order.
struct Walks<'a> {
    lts: &'a Lts,
    max: usize,
    stack: Vec<(StateId, usize)>,
    steps: Vec<TransitionId>,
    started: bool,
}

impl<'a> Walks<'a> {
    fn new(lts: &'a Lts, start: StateId, max: usize) -> Self {
        Walks {
            lts,
            max,
            stack: vec![(start, 0)],
            steps: Vec::new(),
            started: false,
        }
    }
}

impl Iterator for Walks<'_> {
    type Item = Vec<TransitionId>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some(Vec::new());
        }
        loop {
            let (s, next) = self.stack.last_mut()?;
            let out = self.lts.outgoing(*s);
            if self.steps.len() < self.max && *next < out.len() {
                let t = out[*next];
                *next += 1;
                self.steps.push(t);
                self.stack.push((self.lts.transition(t).target, 0));
                return Some(self.steps.clone());
            }
            self.stack.pop();
            self.steps.pop();
        }
    }
}

fn is_proper_power(word: &[TransitionId]) -> bool {
    let n = word.len();
    (1..n).any(|d| n.is_multiple_of(d) && word.chunks(d).all(|c| c == &word[..d]))
}

/// Every finite path with at most `max_stem` steps, and every lasso with a
/// stem of at most `max_stem` and a cycle of at most `max_cycle` steps.
///
/// Lassos that denote the same run as a shorter candidate are skipped: the
/// stem may not end with the cycle's last step, and the cycle may not be a
/// repetition of a shorter cycle.
pub fn enumerate_candidates<'a>(
    lts: &'a Lts,
    bounds: &SearchBounds,
) -> impl Iterator<Item = Run> + 'a {
    let max_cycle = bounds.max_cycle;
    Walks::new(lts, lts.initial(), bounds.max_stem).flat_map(move |stem| {
        let path = Path::new(lts, lts.initial(), &stem).expect("walk from the initial state");
        let end = path.end();
        let last = stem.last().copied();
        let lassos = Walks::new(lts, end, max_cycle).filter_map(move |cycle| {
            let closes = cycle
                .last()
                .is_some_and(|&t| lts.transition(t).target == end);
            if !closes || last == cycle.last().copied() || is_proper_power(&cycle) {
                return None;
            }
            let stem = Path::new(lts, lts.initial(), &stem).expect("walk");
            let cycle = Path::new(lts, end, &cycle).expect("walk");
            Some(Run::Lasso(Lasso::new(stem, cycle).expect("closed walk")))
        });
        std::iter::once(Run::Finite(path)).chain(lassos)
    })
}

/// The first enumerated candidate that is a complete violating run.
///
/// Exponential in the bounds; meant for cross-checking on tiny instances.
pub fn brute_force_violating(
    lts: &Lts,
    t: &ViolationTemplate,
    spec: &CriterionSpec,
    bounds: &SearchBounds,
) -> Result<Option<Run>> {
    let checker = CriterionChecker::new(lts, spec)?;
    Ok(enumerate_candidates(lts, bounds).find(|run| {
        is_violating(lts, run, t).holds
            && satisfies_progress(lts, run, &spec.blocking).holds
            && checker.check(lts, run).holds
    }))
}

/// Formula verdict against oracle verdict for one template and criterion.
#[derive(Clone, Debug)]
pub struct CrossValidationReport {
    /// Whether the formula holds, i.e. no complete violating path exists.
    pub formula_verdict: bool,
    /// Whether the oracle found no complete violating run.
    pub oracle_verdict: bool,
    pub agree: bool,
    pub counterexample: Option<Run>,
    pub saturated: bool,
    pub formula_time: Duration,
    pub oracle_time: Duration,
}

pub fn cross_validate(
    lts: &Lts,
    t: &ViolationTemplate,
    spec: &CriterionSpec,
    bounds: &SearchBounds,
) -> Result<CrossValidationReport> {
    cross_validate_capped(lts, t, spec, bounds, DEFAULT_SUBSET_CAP)
}

pub fn cross_validate_capped(
    lts: &Lts,
    t: &ViolationTemplate,
    spec: &CriterionSpec,
    bounds: &SearchBounds,
    subset_cap: usize,
) -> Result<CrossValidationReport> {
    let clock = Instant::now();
    let formula = spec.build_formula(lts, t, subset_cap)?;
    let formula_verdict = satisfies(lts, &formula)?;
    let formula_time = clock.elapsed();
    let clock = Instant::now();
    let outcome = oracle_admits_violating(lts, t, spec, bounds)?;
    let oracle_time = clock.elapsed();
    Ok(CrossValidationReport {
        formula_verdict,
        oracle_verdict: !outcome.admits,
        agree: formula_verdict != outcome.admits,
        counterexample: outcome.witness,
        saturated: outcome.saturated,
        formula_time,
        oracle_time,
    })
}
