use std::fmt;

use crate::error::{Error, Result};
use crate::lts::ActionSet;
use crate::mucalc::Regular;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    Global,
    Until { sb: ActionSet },
    After { sa: ActionSet },
    AfterUntil { sa: ActionSet, sb: ActionSet },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Behaviour {
    Existence {
        sr: ActionSet,
    },
    AtLeast {
        k: usize,
        sr: ActionSet,
    },
    Response {
        sq: ActionSet,
        sr: ActionSet,
    },
    /// Triggers `q[0] .. q[n]` must be followed by responses `r[0] .. r[m]`.
    ChainResponse {
        q: Vec<ActionSet>,
        r: Vec<ActionSet>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSpec {
    pub scope: Scope,
    pub behaviour: Behaviour,
}

/// Paths with a prefix matching `rho` whose remainder avoids `alpha_f` up to
/// the first occurrence of an action in `alpha_e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ViolationTemplate {
    pub rho: Regular,
    pub alpha_f: ActionSet,
    pub alpha_e: ActionSet,
}

impl ViolationTemplate {
    pub fn new(rho: Regular, alpha_f: ActionSet, alpha_e: ActionSet) -> Self {
        ViolationTemplate {
            rho,
            alpha_f,
            alpha_e,
        }
    }

    /// With nothing forbidden every matching progressing path violates.
    pub fn is_degenerate(&self, alphabet: &[String]) -> bool {
        self.alpha_f.members_in(alphabet).is_empty()
    }
}

impl fmt::Display for ViolationTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rho = {}, alpha_f = {}, alpha_e = {}",
            self.rho, self.alpha_f, self.alpha_e
        )
    }
}

fn check_within(set: &ActionSet, alphabet: &[String]) -> Result<()> {
    match set.labels_outside(alphabet).into_iter().next() {
        Some(l) => Err(Error::UnknownAction(l)),
        None => Ok(()),
    }
}

/// `(!(ae ∪ s))* . s`: reach the next `s` without meeting `ae` or `s` earlier.
fn next_occurrence(alpha_e: &ActionSet, s: &ActionSet) -> Regular {
    Regular::actions(alpha_e.union(s).complement())
        .star()
        .then(Regular::actions(s.clone()))
}

/// Instantiates the violation templates of a pattern; a property holds iff no
/// template admits a complete violating path.
pub fn instantiate_pattern(spec: &PatternSpec, alphabet: &[String]) -> Result<Vec<ViolationTemplate>> {
    let (rho_s, alpha_e) = match &spec.scope {
        Scope::Global => (Regular::Epsilon, ActionSet::empty()),
        Scope::Until { sb } => {
            check_within(sb, alphabet)?;
            (Regular::Epsilon, sb.clone())
        }
        Scope::After { sa } => {
            check_within(sa, alphabet)?;
            (
                Regular::actions(sa.complement())
                    .star()
                    .then(Regular::actions(sa.clone())),
                ActionSet::empty(),
            )
        }
        Scope::AfterUntil { sa, sb } => {
            check_within(sa, alphabet)?;
            check_within(sb, alphabet)?;
            (
                Regular::actions(ActionSet::all())
                    .star()
                    .then(Regular::actions(sa.clone())),
                sb.clone(),
            )
        }
    };
    let not_e = Regular::actions(alpha_e.complement()).star();

    let bodies: Vec<(Regular, ActionSet)> = match &spec.behaviour {
        Behaviour::Existence { sr } => {
            check_within(sr, alphabet)?;
            vec![(Regular::Epsilon, sr.clone())]
        }
        Behaviour::AtLeast { k, sr } => {
            check_within(sr, alphabet)?;
            if *k == 0 {
                return Err(Error::Pattern("k must be at least 1".into()));
            }
            let step = next_occurrence(&alpha_e, sr);
            let mut power = Regular::Epsilon;
            let mut sum = Regular::Epsilon;
            for _ in 1..*k {
                power = power.then(step.clone());
                sum = sum.union(power.clone());
            }
            vec![(sum, sr.clone())]
        }
        Behaviour::Response { sq, sr } => {
            check_within(sq, alphabet)?;
            check_within(sr, alphabet)?;
            vec![(not_e.then(Regular::actions(sq.clone())), sr.clone())]
        }
        Behaviour::ChainResponse { q, r } => {
            if q.is_empty() || r.is_empty() {
                return Err(Error::Pattern("chain response needs non-empty chains".into()));
            }
            for s in q.iter().chain(r) {
                check_within(s, alphabet)?;
            }
            (0..r.len())
                .map(|i| {
                    let chain: Vec<&ActionSet> = q.iter().chain(&r[..i]).collect();
                    let mut rho = not_e.clone().then(Regular::actions(chain[0].clone()));
                    for s in &chain[1..] {
                        rho = rho.then(next_occurrence(&alpha_e, s));
                    }
                    (rho, r[i].clone())
                })
                .collect()
        }
    };

    Ok(bodies
        .into_iter()
        .map(|(rho_b, alpha_f)| ViolationTemplate {
            rho: rho_s.clone().then(rho_b),
            alpha_f,
            alpha_e: alpha_e.clone(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mucalc::parse_regular;

    fn alphabet() -> Vec<String> {
        ["a", "b", "deliver", "order", "q0", "q1", "r0", "r1"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn set(l: &str) -> ActionSet {
        ActionSet::singleton(l)
    }

    #[test]
    fn global_response() {
        let spec = PatternSpec {
            scope: Scope::Global,
            behaviour: Behaviour::Response {
                sq: set("order"),
                sr: set("deliver"),
            },
        };
        let t = instantiate_pattern(&spec, &alphabet()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].rho, parse_regular("!{}* . order").unwrap());
        assert_eq!(t[0].alpha_f, set("deliver"));
        assert_eq!(t[0].alpha_e, ActionSet::empty());
    }

    #[test]
    fn until_existence() {
        let spec = PatternSpec {
            scope: Scope::Until { sb: set("b") },
            behaviour: Behaviour::Existence { sr: set("a") },
        };
        let t = instantiate_pattern(&spec, &alphabet()).unwrap();
        assert_eq!(t, vec![ViolationTemplate::new(Regular::Epsilon, set("a"), set("b"))]);
    }

    #[test]
    fn after_uses_first_occurrence() {
        let spec = PatternSpec {
            scope: Scope::After { sa: set("a") },
            behaviour: Behaviour::Existence { sr: set("b") },
        };
        let t = instantiate_pattern(&spec, &alphabet()).unwrap();
        assert_eq!(t[0].rho, parse_regular("!a* . a").unwrap());
    }

    #[test]
    fn after_until_chain_response() {
        let spec = PatternSpec {
            scope: Scope::AfterUntil {
                sa: set("a"),
                sb: set("b"),
            },
            behaviour: Behaviour::ChainResponse {
                q: vec![set("q0"), set("q1")],
                r: vec![set("r0"), set("r1")],
            },
        };
        let t = instantiate_pattern(&spec, &alphabet()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(
            t[0].rho,
            parse_regular("!{}* . a . !b* . q0 . !{b,q1}* . q1").unwrap()
        );
        assert_eq!(
            t[1].rho,
            parse_regular("!{}* . a . !b* . q0 . !{b,q1}* . q1 . !{b,r0}* . r0").unwrap()
        );
        assert_eq!(t[0].alpha_f, set("r0"));
        assert_eq!(t[1].alpha_f, set("r1"));
        assert!(t.iter().all(|t| t.alpha_e == set("b")));
    }

    #[test]
    fn at_least_k() {
        let spec = |k| PatternSpec {
            scope: Scope::Global,
            behaviour: Behaviour::AtLeast { k, sr: set("a") },
        };
        let t1 = instantiate_pattern(&spec(1), &alphabet()).unwrap();
        assert_eq!(t1[0].rho, Regular::Epsilon);
        let t3 = instantiate_pattern(&spec(3), &alphabet()).unwrap();
        assert_eq!(
            t3[0].rho,
            parse_regular("eps + !a* . a + !a* . a . !a* . a").unwrap()
        );
        assert!(matches!(instantiate_pattern(&spec(0), &alphabet()), Err(Error::Pattern(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = PatternSpec {
            scope: Scope::Global,
            behaviour: Behaviour::Existence { sr: set("zzz") },
        };
        assert_eq!(
            instantiate_pattern(&spec, &alphabet()),
            Err(Error::UnknownAction("zzz".into()))
        );
        let spec = PatternSpec {
            scope: Scope::Global,
            behaviour: Behaviour::ChainResponse { q: vec![], r: vec![set("a")] },
        };
        assert!(instantiate_pattern(&spec, &alphabet()).is_err());
    }
}
