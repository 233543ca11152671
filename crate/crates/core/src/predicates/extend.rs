use std::collections::{HashMap, VecDeque};

use crate::error::Result;
use crate::lts::{
    ActionId, ActionSet, ConcurrencyRelation, Lasso, Lts, Path, Run, StateId, TransitionId,
};
use crate::templates::{Criterion, CriterionSpec};

/// The `a`-transition from `s` with the smallest target.
fn step_on(lts: &Lts, s: StateId, a: ActionId) -> Option<TransitionId> {
    lts.outgoing(s)
        .iter()
        .copied()
        .filter(|&t| lts.transition(t).action == a)
        .min_by_key(|&t| (lts.transition(t).target, t))
}

/// Runs a queue schedule from the end of `p`. `schedule` pops work off the
/// queue and appends steps; a repeated `(state, queue)` pair closes a lasso.
fn run_schedule(
    lts: &Lts,
    p: &Path,
    mut queue: VecDeque<ActionId>,
    mut schedule: impl FnMut(&mut Path, &mut VecDeque<ActionId>),
) -> Run {
    let mut path = p.clone();
    let mut seen: HashMap<(StateId, VecDeque<ActionId>), usize> = HashMap::new();
    loop {
        if queue.is_empty() {
            return Run::Finite(path);
        }
        if let Some(&at) = seen.get(&(path.end(), queue.clone())) {
            let cycle = Path::new(lts, path.states()[at], &path.steps()[at..])
                .expect("steps of a valid path");
            return Run::Lasso(Lasso::new(path.prefix(at), cycle).expect("closed by construction"));
        }
        seen.insert((path.end(), queue.clone()), path.len());
        schedule(&mut path, &mut queue);
    }
}

/// Extends `p` to a weakly B-hyperfair run using only non-blocking actions.
///
/// A queue holds the non-blocking actions B-reachable from the end of `p`,
/// in alphabet order. The head is realised by a shortest B-free path and
/// re-enqueued, or dropped once it is no longer B-reachable.
pub fn extend_to_whfa(lts: &Lts, p: &Path, blocking: &ActionSet) -> Run {
    let b = lts.mask_lenient(blocking);
    let mut initial = lts.b_reachable_mask(p.end(), &b);
    initial.difference_with(&b);
    run_schedule(lts, p, initial.ones().collect(), |path, queue| {
        let a = queue.pop_front().expect("non-empty queue");
        if let Some(steps) = lts.b_free_path_to_enabling(path.end(), a, &b) {
            for t in steps {
                path.push(lts, t).expect("B-free path from the current end");
            }
            let t = step_on(lts, path.end(), a).expect("enabled at the end of the B-free path");
            path.push(lts, t).expect("outgoing transition");
            queue.push_back(a);
        }
    })
}

/// Extends `p` to a B-just run.
///
/// A queue holds one copy of every enabled non-blocking action. The head is
/// performed, actions it interferes with are removed, and newly enabled
/// non-blocking actions join in alphabet order.
pub fn extend_to_just(
    lts: &Lts,
    p: &Path,
    blocking: &ActionSet,
    conc: &ConcurrencyRelation,
) -> Result<Run> {
    let spec = CriterionSpec::new(
        Criterion::Justness(conc.clone()),
        blocking.materialize(lts.alphabet()),
    );
    spec.validate(lts)?;
    let b = lts.mask_lenient(blocking);
    let concurrent = conc.concurrent_masks(lts);
    let enabled_free = |s: StateId| {
        let mut m = lts.enabled_mask(s).clone();
        m.difference_with(&b);
        m
    };
    Ok(run_schedule(lts, p, enabled_free(p.end()).ones().collect(), |path, queue| {
        let a = queue.pop_front().expect("non-empty queue");
        // A valid relation keeps queued actions enabled; skip defensively.
        let Some(t) = step_on(lts, path.end(), a) else { return };
        path.push(lts, t).expect("outgoing transition");
        queue.retain(|&c| concurrent[c].contains(a));
        for c in enabled_free(path.end()).ones() {
            if !queue.contains(&c) {
                queue.push_back(c);
            }
        }
    }))
}
