use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lts::{
    parse_aut, restrict_to_valid, ActionMask, ActionSet, ConcurrencyRelation, Lasso, Lts, Path,
    Run, StateId, Transition,
};
use crate::mucalc::{evaluate, expand_regular_modalities, Environment, Formula, Regular};
use crate::oracle::{
    brute_force_violating, oracle_admits_violating, random_pattern, SearchBounds,
};
use crate::predicates::{
    extend_to_just, extend_to_whfa, is_violating, satisfies_ja, satisfies_progress, satisfies_sfa,
    satisfies_shfa, satisfies_wfa, satisfies_whfa, CriterionChecker,
};
use crate::templates::{instantiate_pattern, CriterionKind, CriterionSpec};

fn lts_strategy(max_states: usize, max_actions: usize) -> impl Strategy<Value = Lts> {
    (1..=max_states, 1..=max_actions).prop_flat_map(|(n, k)| {
        prop::collection::vec((0..n, 0..k, 0..n), 0..=2 * n + 2).prop_map(move |triples| {
            let mut ts: Vec<Transition> = triples
                .into_iter()
                .map(|(source, action, target)| Transition { source, action, target })
                .collect();
            ts.sort();
            ts.dedup();
            let alphabet = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
            Lts::from_parts(n, 0, alphabet, ts).unwrap()
        })
    })
}

fn subset(lts: &Lts, bits: u32) -> ActionSet {
    ActionSet::of(
        lts.alphabet()
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, a)| a.clone()),
    )
}

/// A walk steered by `choices`, cut into a lasso at a repeated state when
/// `fold` picks one, or left finite.
fn walk(lts: &Lts, choices: &[usize], fold: usize) -> Run {
    let mut path = Path::empty(lts.initial());
    for &c in choices {
        let out = lts.outgoing(path.end());
        if out.is_empty() {
            break;
        }
        path.push(lts, out[c % out.len()]).unwrap();
    }
    let end = path.end();
    let earlier: Vec<usize> = (0..path.len()).filter(|&i| path.states()[i] == end).collect();
    if earlier.is_empty() || fold.is_multiple_of(3) {
        return Run::Finite(path);
    }
    let at = earlier[fold % earlier.len()];
    let cycle = Path::new(lts, end, &path.steps()[at..]).unwrap();
    Run::Lasso(Lasso::new(path.prefix(at), cycle).unwrap())
}

fn random_set(rng: &mut ChaCha8Rng, alphabet: &[String]) -> ActionSet {
    let n = rng.gen_range(1..=alphabet.len());
    ActionSet::of(alphabet.choose_multiple(rng, n).cloned())
}

fn random_regular(rng: &mut ChaCha8Rng, alphabet: &[String], depth: usize) -> Regular {
    if depth == 0 || rng.gen_bool(0.4) {
        return Regular::actions(random_set(rng, alphabet));
    }
    match rng.gen_range(0..3) {
        0 => {
            let l = random_regular(rng, alphabet, depth - 1);
            l.concat(random_regular(rng, alphabet, depth - 1))
        }
        1 => {
            let l = random_regular(rng, alphabet, depth - 1);
            l.union(random_regular(rng, alphabet, depth - 1))
        }
        _ => random_regular(rng, alphabet, depth - 1).star(),
    }
}

/// Closed formulas over regular modalities and fixpoints.
fn random_formula(rng: &mut ChaCha8Rng, alphabet: &[String], depth: usize, vars: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 if !vars.is_empty() => Formula::var(*vars.choose(rng).unwrap()),
            0 | 1 => Formula::True,
            _ => Formula::False,
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => {
            let l = random_formula(rng, alphabet, d, vars);
            Formula::and(l, random_formula(rng, alphabet, d, vars))
        }
        1 => {
            let l = random_formula(rng, alphabet, d, vars);
            Formula::or(l, random_formula(rng, alphabet, d, vars))
        }
        2 => {
            let r = random_regular(rng, alphabet, 2);
            Formula::diamond(r, random_formula(rng, alphabet, d, vars))
        }
        3 => {
            let r = random_regular(rng, alphabet, 2);
            Formula::boxed(r, random_formula(rng, alphabet, d, vars))
        }
        4 => {
            let x = ["X", "Y", "Z"][vars.len().min(2)];
            let mut inner = vars.to_vec();
            inner.push(x);
            Formula::mu(x, random_formula(rng, alphabet, d, &inner))
        }
        _ => {
            let x = ["X", "Y", "Z"][vars.len().min(2)];
            let mut inner = vars.to_vec();
            inner.push(x);
            Formula::nu(x, random_formula(rng, alphabet, d, &inner))
        }
    }
}

/// Unrolls `run` into positions `0..len` of its infinite word.
fn unrolled(run: &Run, len: usize) -> (Vec<StateId>, Vec<usize>) {
    let stem = run.stem();
    let mut states = stem.states()[..stem.len()].to_vec();
    let mut actions = stem.actions().to_vec();
    if let Some(c) = run.cycle() {
        while actions.len() < len {
            states.extend_from_slice(&c.states()[..c.len()]);
            actions.extend_from_slice(c.actions());
        }
    }
    (states, actions)
}

/// Fairness on a lasso straight from the definition: suffixes starting in the
/// stem or the first cycle pass, with a window of two further cycle passes.
fn definitional(lts: &Lts, run: &Run, flagged: &dyn Fn(StateId) -> ActionMask, relentless: bool) -> bool {
    let c = run.cycle().expect("lasso");
    let first = run.stem().len() + c.len();
    let (states, actions) = unrolled(run, first + 2 * c.len());
    let cycle_states = &states[states.len() - c.len()..];
    (0..first).all(|i| {
        let window = &states[i..];
        let mut occurs = lts.full_action_mask();
        occurs.clear();
        for &a in &actions[i..] {
            occurs.insert(a);
        }
        let mut cond = flagged(window[0]);
        if relentless {
            // flagged infinitely often: on some state of the repeating part
            cond.clear();
            for &s in cycle_states {
                cond.union_with(&flagged(s));
            }
        } else {
            for &s in window {
                cond.intersect_with(&flagged(s));
            }
        }
        cond.is_subset(&occurs)
    })
}

fn criteria_spec(kind: CriterionKind, blocking: ActionSet, lts: &Lts, seed: u64) -> CriterionSpec {
    let conc = (kind == CriterionKind::Justness).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = ConcurrencyRelation::empty();
        for a in lts.alphabet() {
            for b in lts.alphabet() {
                if a != b && rng.gen_bool(0.5) {
                    c.insert(a.clone(), b.clone());
                }
            }
        }
        restrict_to_valid(lts, &c)
    });
    CriterionSpec::named(kind, blocking, conc)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn aut_round_trip(lts in lts_strategy(5, 4)) {
        prop_assert_eq!(parse_aut(&lts.to_aut()).unwrap(), lts);
    }

    #[test]
    fn modal_duality(lts in lts_strategy(5, 3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_regular(&mut rng, lts.alphabet(), 2);
        let f = random_formula(&mut rng, lts.alphabet(), 3, &[]);
        let env = Environment::new();
        let dia = evaluate(&lts, &Formula::diamond(r.clone(), f.clone()), &env).unwrap();
        let boxed = evaluate(&lts, &Formula::not(Formula::boxed(r, Formula::not(f.clone()))), &env).unwrap();
        prop_assert_eq!(dia, boxed);
        let mu = evaluate(&lts, &Formula::mu("W", Formula::or(f.clone(), Formula::var("W"))), &env).unwrap();
        prop_assert_eq!(mu, evaluate(&lts, &f, &env).unwrap());
    }

    #[test]
    fn closed_formulas_ignore_the_environment(lts in lts_strategy(5, 3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, lts.alphabet(), 4, &[]);
        let mut junk = lts.empty_state_set();
        for s in 0..lts.num_states() {
            if rng.gen_bool(0.5) {
                junk.insert(s);
            }
        }
        let env = Environment::new().bind("X", junk.clone()).bind("Q", junk);
        prop_assert_eq!(
            evaluate(&lts, &f, &env).unwrap(),
            evaluate(&lts, &f, &Environment::new()).unwrap()
        );
    }

    #[test]
    fn expansion_preserves_meaning(lts in lts_strategy(5, 3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, lts.alphabet(), 4, &[]);
        let env = Environment::new();
        prop_assert_eq!(
            evaluate(&lts, &expand_regular_modalities(&f), &env).unwrap(),
            evaluate(&lts, &f, &env).unwrap()
        );
    }

    #[test]
    fn reachability_is_antitone_in_blocking(lts in lts_strategy(5, 4), small in 0u32..16, extra in 0u32..16) {
        let b1 = lts.mask_lenient(&subset(&lts, small));
        let b2 = lts.mask_lenient(&subset(&lts, small | extra));
        for s in 0..lts.num_states() {
            prop_assert!(lts.b_reachable_mask(s, &b2).is_subset(&lts.b_reachable_mask(s, &b1)));
            let mut free = lts.b_reachable_mask(s, &b1);
            free.difference_with(&b1);
            prop_assert_eq!(lts.is_locked_mask(s, &b1), free.is_clear());
        }
    }

    #[test]
    fn strength_implications(lts in lts_strategy(5, 3), choices in prop::collection::vec(0usize..8, 0..10), fold in 0usize..9, bits in 0u32..8) {
        let run = walk(&lts, &choices, fold);
        let b = subset(&lts, bits);
        let shfa = satisfies_shfa(&lts, &run, &b).holds;
        let whfa = satisfies_whfa(&lts, &run, &b).holds;
        let sfa = satisfies_sfa(&lts, &run, &b).holds;
        let wfa = satisfies_wfa(&lts, &run, &b).holds;
        prop_assert!(!shfa || whfa);
        prop_assert!(!shfa || sfa);
        prop_assert!(!whfa || wfa);
        prop_assert!(!sfa || wfa);
    }

    #[test]
    fn lasso_reduction_matches_the_definition(lts in lts_strategy(5, 3), choices in prop::collection::vec(0usize..8, 1..12), fold in 1usize..9, bits in 0u32..8) {
        let run = walk(&lts, &choices, fold);
        prop_assume!(run.cycle().is_some());
        let b = subset(&lts, bits);
        let bm = lts.mask_lenient(&b);
        let enabled = |s: StateId| {
            let mut m = lts.enabled_mask(s).clone();
            m.difference_with(&bm);
            m
        };
        let reach = |s: StateId| {
            let mut m = lts.b_reachable_mask(s, &bm);
            m.difference_with(&bm);
            m
        };
        prop_assert_eq!(satisfies_wfa(&lts, &run, &b).holds, definitional(&lts, &run, &enabled, false));
        prop_assert_eq!(satisfies_sfa(&lts, &run, &b).holds, definitional(&lts, &run, &enabled, true));
        prop_assert_eq!(satisfies_whfa(&lts, &run, &b).holds, definitional(&lts, &run, &reach, false));
        prop_assert_eq!(satisfies_shfa(&lts, &run, &b).holds, definitional(&lts, &run, &reach, true));
    }

    #[test]
    fn verdicts_ignore_lasso_presentation(lts in lts_strategy(5, 3), choices in prop::collection::vec(0usize..8, 1..12), fold in 1usize..9, bits in 0u32..8, seed in any::<u64>()) {
        let run = walk(&lts, &choices, fold);
        let Run::Lasso(l) = &run else { return Ok(()) };
        let advanced = Run::Lasso(l.advance());
        let stem = l.stem().concat(l.cycle()).unwrap();
        let unrolled = Run::Lasso(Lasso::new(stem, l.cycle().clone()).unwrap());
        let b = subset(&lts, bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pattern = random_pattern(&mut rng, lts.alphabet());
        for kind in CriterionKind::ALL {
            let checker = CriterionChecker::new(&lts, &criteria_spec(kind, b.clone(), &lts, seed)).unwrap();
            let v = checker.check(&lts, &run).holds;
            prop_assert_eq!(v, checker.check(&lts, &unrolled).holds, "{}", kind);
            // Fairness is suffix closed.
            prop_assert!(!v || checker.check(&lts, &advanced).holds, "{}", kind);
        }
        for t in instantiate_pattern(&pattern, lts.alphabet()).unwrap() {
            prop_assert_eq!(is_violating(&lts, &run, &t).holds, is_violating(&lts, &unrolled, &t).holds);
        }
    }

    #[test]
    fn extensions_meet_their_contracts(lts in lts_strategy(5, 4), choices in prop::collection::vec(0usize..8, 0..6), bits in 0u32..16, seed in any::<u64>()) {
        let Run::Finite(prefix) = walk(&lts, &choices, 0) else { unreachable!() };
        let b = subset(&lts, bits);
        let whfa = extend_to_whfa(&lts, &prefix, &b);
        prop_assert!(whfa.has_prefix(&prefix));
        prop_assert!(satisfies_whfa(&lts, &whfa, &b).holds);
        prop_assert!(satisfies_progress(&lts, &whfa, &b).holds);
        let spec = criteria_spec(CriterionKind::Justness, b.clone(), &lts, seed);
        let crate::templates::Criterion::Justness(conc) = &spec.criterion else { unreachable!() };
        let just = extend_to_just(&lts, &prefix, &b, conc).unwrap();
        prop_assert!(just.has_prefix(&prefix));
        prop_assert!(satisfies_ja(&lts, &just, &b, conc).unwrap().holds);
        prop_assert!(satisfies_progress(&lts, &just, &b).holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_agrees_with_enumeration(lts in lts_strategy(3, 2), seed in any::<u64>(), bits in 0u32..4, kind in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pattern = random_pattern(&mut rng, lts.alphabet());
        let kind = CriterionKind::ALL[kind];
        let spec = criteria_spec(kind, subset(&lts, bits), &lts, seed);
        let bounds = SearchBounds::new(3, 3);
        for t in instantiate_pattern(&pattern, lts.alphabet()).unwrap() {
            let brute = brute_force_violating(&lts, &t, &spec, &bounds).unwrap();
            let fast = oracle_admits_violating(&lts, &t, &spec, &bounds).unwrap();
            prop_assert_eq!(brute.is_some(), fast.admits, "{} {}", kind, t);
            if let Some(w) = &fast.witness {
                prop_assert!(is_violating(&lts, w, &t).holds);
                prop_assert!(satisfies_progress(&lts, w, &spec.blocking).holds);
                prop_assert!(CriterionChecker::new(&lts, &spec).unwrap().check(&lts, w).holds);
            }
        }
    }

    #[test]
    fn oracle_is_monotone_in_bounds(lts in lts_strategy(4, 3), seed in any::<u64>(), bits in 0u32..8, kind in 0usize..6, stem in 0usize..4, cycle in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pattern = random_pattern(&mut rng, lts.alphabet());
        let spec = criteria_spec(CriterionKind::ALL[kind], subset(&lts, bits), &lts, seed);
        for t in instantiate_pattern(&pattern, lts.alphabet()).unwrap() {
            let small = oracle_admits_violating(&lts, &t, &spec, &SearchBounds::new(stem, cycle)).unwrap();
            let large = oracle_admits_violating(&lts, &t, &spec, &SearchBounds::new(stem + 1, cycle + 1)).unwrap();
            prop_assert!(!small.admits || large.admits);
        }
    }

    #[test]
    fn strong_witnesses_certify_weaker_searches(lts in lts_strategy(4, 3), seed in any::<u64>(), bits in 0u32..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pattern = random_pattern(&mut rng, lts.alphabet());
        let b = subset(&lts, bits);
        let spec = CriterionSpec::named(CriterionKind::StrongHyperfairness, b.clone(), None);
        for t in instantiate_pattern(&pattern, lts.alphabet()).unwrap() {
            let out = oracle_admits_violating(&lts, &t, &spec, &SearchBounds::default_for(&lts)).unwrap();
            let Some(w) = out.witness else { continue };
            prop_assert!(satisfies_whfa(&lts, &w, &b).holds);
            prop_assert!(satisfies_sfa(&lts, &w, &b).holds);
            prop_assert!(satisfies_wfa(&lts, &w, &b).holds);
            prop_assert!(satisfies_progress(&lts, &w, &b).holds);
        }
    }
}
