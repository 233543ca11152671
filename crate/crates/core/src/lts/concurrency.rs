use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use super::actions::read_label;
use super::{ActionId, ActionMask, Lts, Path, StateId, TransitionId};
use crate::error::{Error, Result};

/// Ordered pairs `(a, b)` meaning "a is concurrent with b". Every pair not
/// listed interferes: `b` eliminates `a`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConcurrencyRelation {
    concurrent: BTreeSet<(String, String)>,
}

impl ConcurrencyRelation {
    /// The empty relation: every action interferes with every other.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        ConcurrencyRelation {
            concurrent: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    /// Every ordered pair of distinct labels except the listed interfering ones.
    pub fn all_except<S: AsRef<str>>(alphabet: &[String], interfering: &[(S, S)]) -> Self {
        let excluded: BTreeSet<(&str, &str)> = interfering
            .iter()
            .map(|(a, b)| (a.as_ref(), b.as_ref()))
            .collect();
        let mut concurrent = BTreeSet::new();
        for a in alphabet {
            for b in alphabet {
                if a != b && !excluded.contains(&(a.as_str(), b.as_str())) {
                    concurrent.insert((a.clone(), b.clone()));
                }
            }
        }
        ConcurrencyRelation { concurrent }
    }

    pub fn is_concurrent(&self, a: &str, b: &str) -> bool {
        self.concurrent.contains(&(a.to_string(), b.to_string()))
    }

    pub fn insert(&mut self, a: impl Into<String>, b: impl Into<String>) {
        self.concurrent.insert((a.into(), b.into()));
    }

    pub fn remove(&mut self, a: &str, b: &str) -> bool {
        self.concurrent.remove(&(a.to_string(), b.to_string()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.concurrent.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.concurrent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concurrent.is_empty()
    }

    /// Labels mentioned by the relation that are not in `alphabet`.
    pub fn labels_outside(&self, alphabet: &[String]) -> Vec<String> {
        let mut out: BTreeSet<String> = BTreeSet::new();
        for (a, b) in self.pairs() {
            for l in [a, b] {
                if alphabet.binary_search_by(|x| x.as_str().cmp(l)).is_err() {
                    out.insert(l.to_string());
                }
            }
        }
        out.into_iter().collect()
    }

    /// For each action id `a`, the mask of actions `b` with `a` concurrent with `b`.
    pub fn concurrent_masks(&self, lts: &Lts) -> Vec<ActionMask> {
        let n = lts.num_actions();
        let mut masks = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in self.pairs() {
            if let (Some(a), Some(b)) = (lts.action_id(a), lts.action_id(b)) {
                masks[a].insert(b);
            }
        }
        masks
    }

    /// For each action id `a`, the mask of actions that eliminate `a`.
    pub fn eliminator_masks(&self, lts: &Lts) -> Vec<ActionMask> {
        let mut masks = self.concurrent_masks(lts);
        for m in &mut masks {
            m.toggle_range(..);
        }
        masks
    }
}

/// Parses a line-per-pair interference list (`a !| b`: b eliminates a). Pairs
/// not listed are concurrent; reflexive pairs always interfere.
pub fn parse_interference_list(text: &str, alphabet: &[String]) -> Result<ConcurrencyRelation> {
    let mut interfering = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| Error::Syntax {
            kind: "concurrency",
            line,
            column: 1,
            message,
        };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (a, rest) = read_label(body).map_err(syntax)?;
        let rest = rest
            .trim_start()
            .strip_prefix("!|")
            .ok_or_else(|| syntax("expected '!|'".into()))?;
        let (b, rest) = read_label(rest).map_err(syntax)?;
        if !rest.trim().is_empty() {
            return Err(syntax(format!("trailing input {:?}", rest.trim())));
        }
        for l in [&a, &b] {
            if alphabet.binary_search(l).is_err() {
                return Err(Error::UnknownAction(l.clone()));
            }
        }
        interfering.push((a, b));
    }
    Ok(ConcurrencyRelation::all_except(alphabet, &interfering))
}

/// A counterexample to persistence: `action` is enabled at the start of
/// `witness`, every action on it is concurrent with `action`, yet `action` is
/// disabled at its end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcurrencyViolation {
    pub action: String,
    pub state: StateId,
    pub witness: Path,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConcurrencyReport {
    pub reflexive: Vec<String>,
    pub violations: Vec<ConcurrencyViolation>,
    /// Pairs `(a, b)` with `a` concurrent with `b` but not the reverse.
    pub asymmetric: Vec<(String, String)>,
}

impl ConcurrencyReport {
    pub fn is_valid(&self) -> bool {
        self.reflexive.is_empty() && self.violations.is_empty()
    }

    pub fn display<'a>(&'a self, lts: &'a Lts) -> ReportDisplay<'a> {
        ReportDisplay { report: self, lts }
    }
}

pub struct ReportDisplay<'a> {
    report: &'a ConcurrencyReport,
    lts: &'a Lts,
}

impl fmt::Display for ReportDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.report;
        writeln!(f, "{}", if r.is_valid() { "valid" } else { "invalid" })?;
        for a in &r.reflexive {
            writeln!(f, "reflexive: {a} is concurrent with itself")?;
        }
        for v in &r.violations {
            writeln!(
                f,
                "violation: {} enabled in s{} is disabled after {}",
                v.action,
                v.state,
                v.witness.display(self.lts)
            )?;
        }
        for (a, b) in &r.asymmetric {
            writeln!(f, "asymmetric: {a} is concurrent with {b} but not conversely")?;
        }
        Ok(())
    }
}

/// Checks irreflexivity and persistence of every action along paths of
/// actions concurrent with it.
pub fn validate_concurrency_relation(
    lts: &Lts,
    conc: &ConcurrencyRelation,
) -> Result<ConcurrencyReport> {
    if let Some(l) = conc.labels_outside(lts.alphabet()).into_iter().next() {
        return Err(Error::UnknownAction(l));
    }
    let mut report = ConcurrencyReport::default();
    for (a, b) in conc.pairs() {
        if a == b {
            report.reflexive.push(a.to_string());
        } else if !conc.is_concurrent(b, a) {
            report.asymmetric.push((a.to_string(), b.to_string()));
        }
    }
    let masks = conc.concurrent_masks(lts);
    for (a, mask) in masks.iter().enumerate() {
        report.violations.extend(persistence_violations(lts, a, mask));
    }
    Ok(report)
}

fn persistence_violations(
    lts: &Lts,
    a: ActionId,
    concurrent: &ActionMask,
) -> Vec<ConcurrencyViolation> {
    let n = lts.num_states();
    let mut parent: Vec<Option<TransitionId>> = vec![None; n];
    let mut seen = lts.empty_state_set();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if lts.enabled_mask(s).contains(a) {
            seen.insert(s);
            queue.push_back(s);
        }
    }
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        if !lts.enabled_mask(u).contains(a) {
            let mut steps = Vec::new();
            let mut cur = u;
            while let Some(t) = parent[cur] {
                steps.push(t);
                cur = lts.transition(t).source;
            }
            steps.reverse();
            out.push(ConcurrencyViolation {
                action: lts.action_name(a).to_string(),
                state: cur,
                witness: Path::new(lts, cur, &steps).expect("BFS parents form a path"),
            });
            continue;
        }
        for &t in lts.outgoing(u) {
            let tr = lts.transition(t);
            if concurrent.contains(tr.action) && !seen.put(tr.target) {
                parent[tr.target] = Some(t);
                queue.push_back(tr.target);
            }
        }
    }
    out
}

/// Shrinks `conc` to a valid relation by dropping reflexive pairs and, for each
/// persistence counterexample, the pair that lets its final step through.
pub fn restrict_to_valid(lts: &Lts, conc: &ConcurrencyRelation) -> ConcurrencyRelation {
    let mut rel = ConcurrencyRelation {
        concurrent: conc
            .concurrent
            .iter()
            .filter(|(a, b)| {
                a != b && lts.action_id(a).is_some() && lts.action_id(b).is_some()
            })
            .cloned()
            .collect(),
    };
    loop {
        let report = validate_concurrency_relation(lts, &rel).expect("labels were filtered");
        if report.is_valid() {
            return rel;
        }
        for v in report.violations {
            let last = *v.witness.actions().last().expect("witness leaves the start");
            rel.remove(&v.action, lts.action_name(last));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::parse_aut;

    fn coffee() -> Lts {
        parse_aut(include_str!("../../fixtures/coffee.aut")).unwrap()
    }

    #[test]
    fn empty_relation_is_valid() {
        let lts = coffee();
        let r = validate_concurrency_relation(&lts, &ConcurrencyRelation::empty()).unwrap();
        assert!(r.is_valid());
    }

    #[test]
    fn card_must_not_be_concurrent_with_to_cash() {
        let lts = coffee();
        let rel = ConcurrencyRelation::from_pairs([("card", "to_cash")]);
        let r = validate_concurrency_relation(&lts, &rel).unwrap();
        assert!(!r.is_valid());
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!((v.action.as_str(), v.state), ("card", 1));
        assert_eq!(v.witness.display(&lts).to_string(), "s1 -to_cash-> s2");
        assert_eq!(r.asymmetric, vec![("card".into(), "to_cash".into())]);
    }

    #[test]
    fn reflexive_pairs_and_unknown_labels() {
        let lts = coffee();
        let r = validate_concurrency_relation(&lts, &ConcurrencyRelation::from_pairs([("brew", "brew")]))
            .unwrap();
        assert_eq!(r.reflexive, vec!["brew".to_string()]);
        assert!(validate_concurrency_relation(&lts, &ConcurrencyRelation::from_pairs([("x", "brew")]))
            .is_err());
    }

    #[test]
    fn interference_lists() {
        let lts = coffee();
        let rel = parse_interference_list("# pairs\ncard !| to_cash\n\"cash\" !| to_card\n", lts.alphabet())
            .unwrap();
        assert!(!rel.is_concurrent("card", "to_cash"));
        assert!(rel.is_concurrent("to_cash", "card"));
        assert!(!rel.is_concurrent("brew", "brew"));
        assert_eq!(rel.len(), 7 * 6 - 2);
        assert!(parse_interference_list("card to_cash", lts.alphabet()).is_err());
        assert!(parse_interference_list("card !| nope", lts.alphabet()).is_err());
    }

    #[test]
    fn restriction_yields_a_valid_subrelation() {
        let lts = coffee();
        let full = ConcurrencyRelation::all_except::<&str>(lts.alphabet(), &[]);
        let rel = restrict_to_valid(&lts, &full);
        assert!(validate_concurrency_relation(&lts, &rel).unwrap().is_valid());
        assert!(rel.pairs().all(|(a, b)| full.is_concurrent(a, b)));
        assert!(!rel.is_concurrent("card", "to_cash"));
        assert!(!rel.is_concurrent("to_cash", "card"));
    }
}
