//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use faircheck_core::lts::{
    parse_aut, parse_interference_list, restrict_to_valid, ActionSet, ConcurrencyRelation, Lasso,
    Lts, Path, Run, StateSet,
};
use faircheck_core::mucalc::{
    evaluate, least_fixpoint_approximant, satisfies, simplify, Environment, Formula, Regular,
};
use faircheck_core::oracle::{
    generate_corpus, oracle_admits_violating, parse_harness_config, random_blocking, random_lts,
    random_relation, run_harness, RandomLtsParams, SearchBounds,
};
use faircheck_core::predicates::{
    extend_to_just, extend_to_whfa, satisfies_ja, satisfies_progress, satisfies_sfa,
    satisfies_shfa, satisfies_wfa, satisfies_whfa,
};
use faircheck_core::templates::{
    parse_property, CriterionKind, CriterionSpec, DEFAULT_SUBSET_CAP,
};
use faircheck_core::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn lasso(lts: &Lts, stem: &[(&str, usize)], start: usize, cycle: &[(&str, usize)]) -> Run {
    let stem = Path::follow(lts, 0, stem).unwrap();
    let cycle = Path::follow(lts, start, cycle).unwrap();
    Run::Lasso(Lasso::new(stem, cycle).unwrap())
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed(limit: Duration, pass: bool, detail: String, elapsed: Duration) -> Outcome {
    let in_time = elapsed < limit;
    Outcome::new(
        pass && in_time,
        format!(
            "{detail}; {:.2}s (limit {}s{})",
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", exceeded" }
        ),
    )
}

fn reference_verdicts() -> Result<Outcome> {
    let clock = Instant::now();
    let coffee = parse_aut(&fixture("coffee.aut"))?;
    let merged = parse_aut(&fixture("coffee_pay.aut"))?;
    let none = ActionSet::empty();
    let modes = ActionSet::of(["order", "to_cash", "to_card"]);
    let ex3 = restrict_to_valid(
        &coffee,
        &parse_interference_list(&fixture("coffee.conc"), coffee.alphabet())?,
    );
    let merged_conc = restrict_to_valid(&merged, &ConcurrencyRelation::all_except(merged.alphabet(), &[] as &[(&str, &str)]));

    let prefix = Run::Finite(Path::follow(&coffee, 0, &[("order", 1), ("card", 3)])?);
    let pay = |lts: &Lts| lasso(lts, &[("order", 1)], 1, &[("to_cash", 2), ("to_card", 1)]);
    let brew = lasso(&coffee, &[("order", 1), ("card", 3)], 3, &[("brew", 3)]);

    let checks: Vec<(&str, bool, bool)> = vec![
        ("progress, finite order.card, B=∅", satisfies_progress(&coffee, &prefix, &none).holds, false),
        (
            "progress, finite order.card, B={brew}",
            satisfies_progress(&coffee, &prefix, &ActionSet::singleton("brew")).holds,
            true,
        ),
        ("JA, pay loop, listed relation", satisfies_ja(&coffee, &pay(&coffee), &none, &ex3)?.holds, true),
        (
            "JA, merged pay loop, pay concurrent with mode switches",
            satisfies_ja(&merged, &pay(&merged), &none, &merged_conc)?.holds,
            false,
        ),
        ("WFA, merged pay loop, B=∅", satisfies_wfa(&merged, &pay(&merged), &none).holds, false),
        ("WFA, pay loop, B=∅", satisfies_wfa(&coffee, &pay(&coffee), &none).holds, true),
        ("SFA, pay loop, B=∅", satisfies_sfa(&coffee, &pay(&coffee), &none).holds, false),
        ("SFA, brew loop, B=∅", satisfies_sfa(&coffee, &brew, &none).holds, true),
        ("WHFA, brew loop, B=∅", satisfies_whfa(&coffee, &brew, &none).holds, false),
        ("SHFA, brew loop, B=∅", satisfies_shfa(&coffee, &brew, &none).holds, false),
        ("WHFA, pay loop, B=modes", satisfies_whfa(&coffee, &pay(&coffee), &modes).holds, true),
        ("SHFA, pay loop, B=modes", satisfies_shfa(&coffee, &pay(&coffee), &modes).holds, false),
        ("SFA, pay loop, B=modes", satisfies_sfa(&coffee, &pay(&coffee), &modes).holds, false),
    ];
    let elapsed = clock.elapsed();
    let wrong: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(name, got, want)| format!("{name}: expected {want}, got {got}"))
        .collect();
    let mut detail = format!("{}/{} verdicts reproduced", checks.len() - wrong.len(), checks.len());
    if !wrong.is_empty() {
        write!(detail, " [{}]", wrong.join("; ")).unwrap();
    }
    Ok(timed(Duration::from_secs(1), wrong.is_empty(), detail, elapsed))
}

fn model_checks() -> Result<Outcome> {
    let clock = Instant::now();
    let lts = parse_aut(&fixture("coffee.aut"))?;
    let bounds = SearchBounds::default_for(&lts);
    let mut wrong = Vec::new();
    let mut total = 0;
    let expected = [
        ("progress", false),
        ("wfa", false),
        ("sfa", false),
        ("whfa", true),
        ("shfa", true),
    ];
    for (criterion, want) in expected {
        let prop = parse_property(&fixture(&format!("inevitable_delivery_{criterion}.prop")))?;
        let spec = prop.criterion_spec(None, None);
        let mut holds = true;
        for f in prop.formulas(&lts, &spec, DEFAULT_SUBSET_CAP)? {
            holds &= satisfies(&lts, &f)?;
        }
        let mut oracle_holds = true;
        for t in prop.templates(&lts)? {
            oracle_holds &= !oracle_admits_violating(&lts, &t, &spec, &bounds)?.admits;
        }
        total += 2;
        if holds != want {
            wrong.push(format!("inevitable delivery under {criterion}: formula {holds}"));
        }
        if oracle_holds != want {
            wrong.push(format!("inevitable delivery under {criterion}: oracle {oracle_holds}"));
        }
    }
    for name in ["single_order", "possible_delivery"] {
        let prop = parse_property(&fixture(&format!("{name}.prop")))?;
        let spec = prop.criterion_spec(None, None);
        let f = &prop.formulas(&lts, &spec, DEFAULT_SUBSET_CAP)?[0];
        total += 1;
        if !satisfies(&lts, f)? {
            wrong.push(format!("{name} violated"));
        }
    }
    let detail = format!(
        "{}/{total} verdicts match{}",
        total - wrong.len(),
        if wrong.is_empty() { String::new() } else { format!(" [{}]", wrong.join("; ")) }
    );
    Ok(timed(Duration::from_secs(5), wrong.is_empty(), detail, clock.elapsed()))
}

fn cross_validation() -> Result<Outcome> {
    let config = parse_harness_config(&fixture("harness.conf"))?;
    let report = run_harness(&config)?;
    let mut detail = report.summary();
    for l in report.lines.iter().filter(|l| l.agree != Some(true)).take(5) {
        write!(detail, "\n    {l}").unwrap();
    }
    let pass = config.instances >= 200
        && config.criteria.len() == CriterionKind::ALL.len()
        && report.all_agree();
    Ok(timed(Duration::from_secs(600), pass, detail, report.elapsed))
}

fn random_set(rng: &mut impl Rng, alphabet: &[String]) -> ActionSet {
    let n = rng.gen_range(1..=alphabet.len());
    let set = ActionSet::of(alphabet.choose_multiple(rng, n).cloned());
    if rng.gen_bool(0.25) {
        set.complement()
    } else {
        set
    }
}

fn random_formula(rng: &mut ChaCha8Rng, alphabet: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => Formula::True,
            1 => Formula::False,
            2 => Formula::diamond(Regular::actions(random_set(rng, alphabet)), Formula::True),
            _ => Formula::boxed(Regular::actions(random_set(rng, alphabet)), Formula::False),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_formula(rng, alphabet, depth - 1)),
        1 => {
            let l = random_formula(rng, alphabet, depth - 1);
            Formula::and(l, random_formula(rng, alphabet, depth - 1))
        }
        2 => {
            let l = random_formula(rng, alphabet, depth - 1);
            Formula::or(l, random_formula(rng, alphabet, depth - 1))
        }
        3 => {
            let r = Regular::actions(random_set(rng, alphabet));
            Formula::diamond(r, random_formula(rng, alphabet, depth - 1))
        }
        _ => {
            let r = Regular::actions(random_set(rng, alphabet));
            Formula::boxed(r, random_formula(rng, alphabet, depth - 1))
        }
    }
}

/// States with a finite alpha-path through `inv` states to a `goal` state.
fn bfs_oracle(lts: &Lts, inv: &StateSet, goal: &StateSet, alpha: &ActionSet) -> StateSet {
    let mask = lts.mask_lenient(alpha);
    let mut out = lts.empty_state_set();
    for s in inv.ones() {
        let mut seen = lts.empty_state_set();
        seen.insert(s);
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if goal.contains(u) {
                out.insert(s);
                break;
            }
            for &t in lts.outgoing(u) {
                let tr = lts.transition(t);
                if mask.contains(tr.action) && inv.contains(tr.target) && !seen.put(tr.target) {
                    queue.push_back(tr.target);
                }
            }
        }
    }
    out
}

fn approximants() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = RandomLtsParams {
        max_states: 6,
        max_actions: 3,
        max_transitions: 14,
    };
    let env = Environment::new();
    let mut mismatches = 0;
    let mut checks = 0;
    for _ in 0..50 {
        let lts = random_lts(&mut rng, &params);
        for _ in 0..20 {
            let phi1 = random_formula(&mut rng, lts.alphabet(), 2);
            let phi2 = random_formula(&mut rng, lts.alphabet(), 2);
            let alpha = random_set(&mut rng, lts.alphabet());
            let mu = Formula::mu(
                "Y",
                Formula::and(
                    phi1.clone(),
                    Formula::or(phi2.clone(), Formula::diamond(Regular::actions(alpha.clone()), Formula::var("Y"))),
                ),
            );
            let got = evaluate(&lts, &mu, &env)?;
            let want = bfs_oracle(&lts, &evaluate(&lts, &phi1, &env)?, &evaluate(&lts, &phi2, &env)?, &alpha);
            let last = least_fixpoint_approximant(&lts, &mu, lts.num_states(), &env)?;
            checks += 1;
            if got != want || last != want {
                mismatches += 1;
            }
        }
    }
    Ok(Outcome::new(
        mismatches == 0,
        format!("{}/{checks} fixpoints equal the search oracle", checks - mismatches),
    ))
}

fn feasibility() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = RandomLtsParams::default();
    let mut failures = Vec::new();
    for i in 0..100 {
        let lts = random_lts(&mut rng, &params);
        let mut prefix = Path::empty(lts.initial());
        for _ in 0..rng.gen_range(0..=4) {
            let Some(&t) = lts.outgoing(prefix.end()).choose(&mut rng) else { break };
            prefix.push(&lts, t)?;
        }
        let blocking = if rng.gen_bool(0.25) {
            ActionSet::empty()
        } else {
            random_blocking(&mut rng, lts.alphabet())
        };
        let conc = random_relation(&mut rng, &lts);

        let whfa = extend_to_whfa(&lts, &prefix, &blocking);
        let b = lts.mask_lenient(&blocking);
        let added = whfa.stem().actions()[prefix.len()..]
            .iter()
            .chain(whfa.cycle().map(|c| c.actions()).unwrap_or_default());
        let clean = added.copied().all(|a| !b.contains(a));
        if !whfa.has_prefix(&prefix) || !clean || !satisfies_whfa(&lts, &whfa, &blocking).holds {
            failures.push(format!("#{i} whfa: {}", whfa.to_trace(&lts)));
        }
        let just = extend_to_just(&lts, &prefix, &blocking, &conc)?;
        if !just.has_prefix(&prefix) || !satisfies_ja(&lts, &just, &blocking, &conc)?.holds {
            failures.push(format!("#{i} ja: {}", just.to_trace(&lts)));
        }
    }
    Ok(Outcome::new(
        failures.is_empty(),
        format!(
            "{}/200 extensions pass{}",
            200 - failures.len(),
            failures.first().map(|f| format!(" [{f}]")).unwrap_or_default()
        ),
    ))
}

fn count_nu_disjuncts(f: &Formula) -> usize {
    let Formula::Not(inner) = f else { return 0 };
    let Formula::Diamond(_, body) = inner.as_ref() else { return 0 };
    body.disjuncts().iter().filter(|d| matches!(d, Formula::Nu(..))).count()
}

fn structural() -> Result<Outcome> {
    let mut problems = Vec::new();
    let coffee = parse_aut(&fixture("coffee.aut"))?;
    let delivery = parse_property(&fixture("inevitable_delivery_progress.prop"))?.templates(&coffee)?;
    for n in 1..=4usize {
        let nb: Vec<&str> = coffee.alphabet().iter().take(n).map(String::as_str).collect();
        let spec = CriterionSpec::named(CriterionKind::StrongFairness, ActionSet::all_except(nb), None);
        let f = spec.build_formula(&coffee, &delivery[0], DEFAULT_SUBSET_CAP)?;
        let count = count_nu_disjuncts(&f);
        if count != (1 << n) - 1 {
            problems.push(format!("|B̄|={n}: {count} disjuncts"));
        }
    }

    let config = parse_harness_config(&fixture("harness.conf"))?;
    let corpus = generate_corpus(&config)?;
    let env = Environment::new();
    let mut collapses = 0;
    let mut inclusions = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let lts = &inst.lts;
        for t in &inst.templates {
            let expected = simplify(&Formula::not(Formula::diamond(t.rho.clone(), Formula::True)), lts.alphabet());
            for kind in [CriterionKind::Progress, CriterionKind::Justness, CriterionKind::WeakFairness, CriterionKind::WeakHyperfairness] {
                let spec = CriterionSpec::named(kind, ActionSet::all(), None);
                let f = spec.build_formula(lts, t, DEFAULT_SUBSET_CAP)?;
                collapses += 1;
                if simplify(&f, lts.alphabet()) != expected {
                    problems.push(format!("#{i} {kind}: no collapse under B = Act"));
                }
            }
            for blocking in [ActionSet::empty(), inst.blocking.clone()] {
                let set = |kind: CriterionKind| -> Result<StateSet> {
                    let f = CriterionSpec::named(kind, blocking.clone(), None).build_formula(lts, t, DEFAULT_SUBSET_CAP)?;
                    evaluate(lts, &f, &env)
                };
                let p = set(CriterionKind::Progress)?;
                let wfa = set(CriterionKind::WeakFairness)?;
                let whfa = set(CriterionKind::WeakHyperfairness)?;
                let sfa = set(CriterionKind::StrongFairness)?;
                let shfa = set(CriterionKind::StrongHyperfairness)?;
                let chain = [
                    ("progress ⊆ wfa", &p, &wfa),
                    ("wfa ⊆ whfa", &wfa, &whfa),
                    ("progress ⊆ sfa", &p, &sfa),
                    ("sfa ⊆ shfa", &sfa, &shfa),
                    ("wfa ⊆ sfa", &wfa, &sfa),
                    ("whfa ⊆ shfa", &whfa, &shfa),
                ];
                for (name, a, b) in chain {
                    inclusions += 1;
                    if !a.is_subset(b) {
                        problems.push(format!("#{i} B={blocking}: {name} fails"));
                    }
                }
            }
        }
    }
    let mut detail = format!(
        "disjunct counts for |B̄| = 1..4, {collapses} collapses, {inclusions} inclusions; {} problems",
        problems.len()
    );
    if let Some(p) = problems.first() {
        write!(detail, " [{p}]").unwrap();
    }
    Ok(Outcome::new(problems.is_empty(), detail))
}

type Check = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 6] = [
        ("reference path verdicts", reference_verdicts),
        ("fixture model checks", model_checks),
        ("formula/oracle cross-validation", cross_validation),
        ("least fixpoint approximants", approximants),
        ("feasibility constructions", feasibility),
        ("structural claims", structural),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} passed, {failed} failed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
