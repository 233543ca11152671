use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::ViolationTemplate;
use crate::error::{Error, Result};
use crate::lts::{validate_concurrency_relation, ActionSet, ConcurrencyRelation, Lts};
use crate::mucalc::{rename_apart, Formula, Regular};

/// Default bound on the number of non-blocking actions for strong formulae.
pub const DEFAULT_SUBSET_CAP: usize = 12;

fn set_modality(set: ActionSet) -> Regular {
    Regular::actions(set)
}

/// `¬⟨ρ⟩νX.(⟨αe⟩tt ∨ [B̄]ff ∨ ⟨ᾱf⟩X)`.
pub fn build_progress_formula(t: &ViolationTemplate, blocking: &ActionSet) -> Formula {
    let body = Formula::or_all([
        Formula::diamond(set_modality(t.alpha_e.clone()), Formula::True),
        Formula::boxed(set_modality(blocking.complement()), Formula::False),
        Formula::diamond(set_modality(t.alpha_f.complement()), Formula::var("X")),
    ]);
    Formula::not(Formula::diamond(t.rho.clone(), Formula::nu("X", body)))
}

/// Per-action parameters of a finitely realisable completeness criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitelyRealisableSpec {
    pub phi_on: BTreeMap<String, Formula>,
    pub phi_of: BTreeMap<String, Formula>,
    pub alpha_el: BTreeMap<String, ActionSet>,
}

fn non_blocking(alphabet: &[String], blocking: &ActionSet) -> Vec<String> {
    blocking
        .complement()
        .members_in(alphabet)
        .into_iter()
        .map(String::from)
        .collect()
}

/// `B̄* . a`
fn reach(blocking: &ActionSet, a: &str) -> Regular {
    Regular::actions(blocking.complement())
        .star()
        .concat(Regular::action(a))
}

impl FinitelyRealisableSpec {
    fn build(
        alphabet: &[String],
        blocking: &ActionSet,
        mut f: impl FnMut(&str) -> (Formula, Formula, ActionSet),
    ) -> Self {
        let mut spec = FinitelyRealisableSpec {
            phi_on: BTreeMap::new(),
            phi_of: BTreeMap::new(),
            alpha_el: BTreeMap::new(),
        };
        for a in non_blocking(alphabet, blocking) {
            let (on, of, el) = f(&a);
            spec.phi_on.insert(a.clone(), on);
            spec.phi_of.insert(a.clone(), of);
            spec.alpha_el.insert(a, el);
        }
        spec
    }

    pub fn weak_fairness(alphabet: &[String], blocking: &ActionSet) -> Self {
        Self::build(alphabet, blocking, |a| {
            (
                Formula::diamond(Regular::action(a), Formula::True),
                Formula::boxed(Regular::action(a), Formula::False),
                ActionSet::singleton(a),
            )
        })
    }

    pub fn weak_hyperfairness(alphabet: &[String], blocking: &ActionSet) -> Self {
        Self::build(alphabet, blocking, |a| {
            (
                Formula::diamond(reach(blocking, a), Formula::True),
                Formula::boxed(reach(blocking, a), Formula::False),
                ActionSet::singleton(a),
            )
        })
    }

    pub fn justness(alphabet: &[String], blocking: &ActionSet, conc: &ConcurrencyRelation) -> Self {
        Self::build(alphabet, blocking, |a| {
            let eliminators = alphabet.iter().filter(|b| !conc.is_concurrent(a, b)).cloned();
            (
                Formula::diamond(Regular::action(a), Formula::True),
                Formula::False,
                ActionSet::of(eliminators),
            )
        })
    }

    fn check_domain(&self, expected: &[String]) -> Result<()> {
        for (name, keys) in [
            ("phi_on", self.phi_on.keys().collect::<Vec<_>>()),
            ("phi_of", self.phi_of.keys().collect()),
            ("alpha_el", self.alpha_el.keys().collect()),
        ] {
            if !keys.iter().copied().eq(expected.iter()) {
                return Err(Error::DomainMismatch(format!(
                    "{name} must be defined on exactly {{{}}}",
                    expected.join(",")
                )));
            }
        }
        Ok(())
    }
}

/// `¬⟨ρ⟩νX.(⋀_{a∈B̄}(φon(a) ⇒ ⟨ᾱf*⟩(⟨αe⟩tt ∨ (φof(a) ∧ X) ∨ ⟨αel(a)\αf⟩X)))`.
pub fn build_finitely_realisable_formula(
    t: &ViolationTemplate,
    blocking: &ActionSet,
    spec: &FinitelyRealisableSpec,
    alphabet: &[String],
) -> Result<Formula> {
    let nb = non_blocking(alphabet, blocking);
    spec.check_domain(&nb)?;
    let conjuncts = nb.iter().map(|a| {
        let inner = Formula::or_all([
            Formula::diamond(set_modality(t.alpha_e.clone()), Formula::True),
            Formula::and(spec.phi_of[a].clone(), Formula::var("X")),
            Formula::diamond(
                set_modality(spec.alpha_el[a].difference(&t.alpha_f)),
                Formula::var("X"),
            ),
        ]);
        Formula::implies(
            spec.phi_on[a].clone(),
            Formula::diamond(set_modality(t.alpha_f.complement()).star(), inner),
        )
    });
    let body = Formula::nu("X", Formula::and_all(conjuncts));
    Ok(rename_apart(&Formula::not(Formula::diamond(
        t.rho.clone(),
        body,
    ))))
}

pub fn strong_fairness_phi_of(alphabet: &[String], blocking: &ActionSet) -> BTreeMap<String, Formula> {
    non_blocking(alphabet, blocking)
        .into_iter()
        .map(|b| {
            let f = Formula::boxed(Regular::action(b.clone()), Formula::False);
            (b, f)
        })
        .collect()
}

pub fn strong_hyperfairness_phi_of(
    alphabet: &[String],
    blocking: &ActionSet,
) -> BTreeMap<String, Formula> {
    non_blocking(alphabet, blocking)
        .into_iter()
        .map(|b| {
            let f = Formula::boxed(reach(blocking, &b), Formula::False);
            (b, f)
        })
        .collect()
}

/// `¬⟨ρ·ᾱf*⟩(⟨αe⟩tt ∨ [B̄]ff ∨ ⋁_{∅≠F⊆B̄} νX.(⋀_{a∈F} μW.((⋀_{b∈B̄\F} φof(b)) ∧ (⟨a\αf⟩X ∨ ⟨ᾱf⟩W))))`.
///
/// Subsets are enumerated as binary counters over the sorted non-blocking
/// actions, lowest action in the lowest bit.
pub fn build_strong_formula(
    t: &ViolationTemplate,
    blocking: &ActionSet,
    phi_of: &BTreeMap<String, Formula>,
    alphabet: &[String],
    subset_cap: usize,
) -> Result<Formula> {
    let nb = non_blocking(alphabet, blocking);
    if !phi_of.keys().eq(nb.iter()) {
        return Err(Error::DomainMismatch(format!(
            "phi_of must be defined on exactly {{{}}}",
            nb.join(",")
        )));
    }
    if nb.len() > subset_cap {
        return Err(Error::SubsetCap {
            count: nb.len(),
            cap: subset_cap,
        });
    }
    let not_f = set_modality(t.alpha_f.complement());
    let disjuncts = (1u64..(1u64 << nb.len())).map(|subset| {
        let in_f = |i: usize| subset & (1 << i) != 0;
        let off = Formula::and_all(
            nb.iter()
                .enumerate()
                .filter(|(i, _)| !in_f(*i))
                .map(|(_, b)| phi_of[b].clone()),
        );
        let per_action = nb.iter().enumerate().filter(|(i, _)| in_f(*i)).map(|(_, a)| {
            let step = Formula::or(
                Formula::diamond(
                    set_modality(ActionSet::singleton(a.clone()).difference(&t.alpha_f)),
                    Formula::var("X"),
                ),
                Formula::diamond(not_f.clone(), Formula::var("W")),
            );
            Formula::mu("W", Formula::and(off.clone(), step))
        });
        Formula::nu("X", Formula::and_all(per_action))
    });
    let body = Formula::or_all(
        [
            Formula::diamond(set_modality(t.alpha_e.clone()), Formula::True),
            Formula::boxed(set_modality(blocking.complement()), Formula::False),
        ]
        .into_iter()
        .chain(disjuncts),
    );
    let prefix = t.rho.clone().then(not_f.star());
    Ok(rename_apart(&Formula::not(Formula::diamond(prefix, body))))
}

/// The six named completeness criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionKind {
    Progress,
    Justness,
    WeakFairness,
    WeakHyperfairness,
    StrongFairness,
    StrongHyperfairness,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 6] = [
        CriterionKind::Progress,
        CriterionKind::Justness,
        CriterionKind::WeakFairness,
        CriterionKind::WeakHyperfairness,
        CriterionKind::StrongFairness,
        CriterionKind::StrongHyperfairness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Progress => "progress",
            CriterionKind::Justness => "ja",
            CriterionKind::WeakFairness => "wfa",
            CriterionKind::WeakHyperfairness => "whfa",
            CriterionKind::StrongFairness => "sfa",
            CriterionKind::StrongHyperfairness => "shfa",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Pattern(format!("unknown criterion {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criterion {
    Progress,
    Justness(ConcurrencyRelation),
    WeakFairness,
    WeakHyperfairness,
    StrongFairness,
    StrongHyperfairness,
    FinitelyRealisable(FinitelyRealisableSpec),
    Strong(BTreeMap<String, Formula>),
}

/// A completeness criterion together with its blocking actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionSpec {
    pub criterion: Criterion,
    pub blocking: ActionSet,
}

impl CriterionSpec {
    pub fn new(criterion: Criterion, blocking: ActionSet) -> Self {
        CriterionSpec {
            criterion,
            blocking,
        }
    }

    /// A named criterion; justness uses `conc`, or the empty relation.
    pub fn named(kind: CriterionKind, blocking: ActionSet, conc: Option<ConcurrencyRelation>) -> Self {
        let criterion = match kind {
            CriterionKind::Progress => Criterion::Progress,
            CriterionKind::Justness => Criterion::Justness(conc.unwrap_or_default()),
            CriterionKind::WeakFairness => Criterion::WeakFairness,
            CriterionKind::WeakHyperfairness => Criterion::WeakHyperfairness,
            CriterionKind::StrongFairness => Criterion::StrongFairness,
            CriterionKind::StrongHyperfairness => Criterion::StrongHyperfairness,
        };
        CriterionSpec::new(criterion, blocking)
    }

    pub fn name(&self) -> &'static str {
        match &self.criterion {
            Criterion::Progress => "progress",
            Criterion::Justness(_) => "ja",
            Criterion::WeakFairness => "wfa",
            Criterion::WeakHyperfairness => "whfa",
            Criterion::StrongFairness => "sfa",
            Criterion::StrongHyperfairness => "shfa",
            Criterion::FinitelyRealisable(_) => "finitely-realisable",
            Criterion::Strong(_) => "strong",
        }
    }

    /// Checks the blocking set and, for justness, the concurrency relation.
    pub fn validate(&self, lts: &Lts) -> Result<()> {
        lts.mask(&self.blocking)?;
        if let Criterion::Justness(conc) = &self.criterion {
            let report = validate_concurrency_relation(lts, conc)?;
            if !report.is_valid() {
                let first = report.display(lts).to_string();
                let detail = first.lines().nth(1).unwrap_or("").to_string();
                return Err(Error::InvalidConcurrency(detail));
            }
        }
        Ok(())
    }

    /// The formula that holds iff no complete path under this criterion is
    /// violating for `t`.
    pub fn build_formula(&self, lts: &Lts, t: &ViolationTemplate, subset_cap: usize) -> Result<Formula> {
        self.validate(lts)?;
        let alphabet = lts.alphabet();
        let b = &self.blocking;
        match &self.criterion {
            Criterion::Progress => Ok(build_progress_formula(t, b)),
            Criterion::Justness(conc) => build_finitely_realisable_formula(
                t,
                b,
                &FinitelyRealisableSpec::justness(alphabet, b, conc),
                alphabet,
            ),
            Criterion::WeakFairness => build_finitely_realisable_formula(
                t,
                b,
                &FinitelyRealisableSpec::weak_fairness(alphabet, b),
                alphabet,
            ),
            Criterion::WeakHyperfairness => build_finitely_realisable_formula(
                t,
                b,
                &FinitelyRealisableSpec::weak_hyperfairness(alphabet, b),
                alphabet,
            ),
            Criterion::FinitelyRealisable(spec) => {
                build_finitely_realisable_formula(t, b, spec, alphabet)
            }
            Criterion::StrongFairness => build_strong_formula(
                t,
                b,
                &strong_fairness_phi_of(alphabet, b),
                alphabet,
                subset_cap,
            ),
            Criterion::StrongHyperfairness => build_strong_formula(
                t,
                b,
                &strong_hyperfairness_phi_of(alphabet, b),
                alphabet,
                subset_cap,
            ),
            Criterion::Strong(phi_of) => build_strong_formula(t, b, phi_of, alphabet, subset_cap),
        }
    }
}
