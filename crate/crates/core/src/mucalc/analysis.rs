use std::collections::BTreeSet;
use std::fmt;

use super::{Formula, Regular};
use crate::lts::ActionSet;

pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            Formula::False | Formula::True => {}
            Formula::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Formula::Not(g) | Formula::Diamond(_, g) | Formula::BoxOp(_, g) => go(g, bound, out),
            Formula::Or(l, r) | Formula::And(l, r) | Formula::Implies(l, r) => {
                go(l, bound, out);
                go(r, bound, out);
            }
            Formula::Mu(x, g) | Formula::Nu(x, g) => {
                bound.push(x.clone());
                go(g, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

fn all_names(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::False | Formula::True => {}
        Formula::Var(x) => {
            out.insert(x.clone());
        }
        Formula::Not(g) | Formula::Diamond(_, g) | Formula::BoxOp(_, g) => all_names(g, out),
        Formula::Or(l, r) | Formula::And(l, r) | Formula::Implies(l, r) => {
            all_names(l, out);
            all_names(r, out);
        }
        Formula::Mu(x, g) | Formula::Nu(x, g) => {
            out.insert(x.clone());
            all_names(g, out);
        }
    }
}

/// Variable names not yet used in a formula.
struct Fresh {
    used: BTreeSet<String>,
}

impl Fresh {
    fn new(f: &Formula) -> Fresh {
        let mut used = BTreeSet::new();
        all_names(f, &mut used);
        Fresh { used }
    }

    fn next(&mut self, base: &str) -> String {
        let base = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let base = if base.is_empty() { "X" } else { base };
        let mut name = base.to_string();
        let mut i = 1;
        while self.used.contains(&name) {
            name = format!("{base}{i}");
            i += 1;
        }
        self.used.insert(name.clone());
        name
    }
}

/// A fixpoint variable occurring under an odd number of negations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub variable: String,
    /// Operators from the binder down to the occurrence, outermost first.
    pub path: Vec<String>,
}

impl fmt::Display for MonotonicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} occurs under an odd number of negations at {}",
            self.variable,
            self.path.join(" > ")
        )
    }
}

/// Checks that every bound variable occurs under an even number of negations
/// inside its binder, counting the left side of `=>` as a negation.
pub fn check_syntactic_monotonicity(f: &Formula) -> Result<(), Vec<MonotonicityViolation>> {
    // Per enclosing binder: name and parity of negations since that binder.
    struct Scope {
        name: String,
        odd: bool,
    }
    fn flip(scopes: &mut [Scope]) {
        for s in scopes {
            s.odd = !s.odd;
        }
    }
    fn go(
        f: &Formula,
        scopes: &mut Vec<Scope>,
        path: &mut Vec<String>,
        out: &mut Vec<MonotonicityViolation>,
    ) {
        match f {
            Formula::False | Formula::True => {}
            Formula::Var(x) => {
                if let Some(s) = scopes.iter().rev().find(|s| &s.name == x) {
                    if s.odd {
                        let mut p = path.clone();
                        p.push(x.clone());
                        out.push(MonotonicityViolation {
                            variable: x.clone(),
                            path: p,
                        });
                    }
                }
            }
            Formula::Not(g) => {
                path.push("!".into());
                flip(scopes);
                go(g, scopes, path, out);
                flip(scopes);
                path.pop();
            }
            Formula::Diamond(r, g) | Formula::BoxOp(r, g) => {
                path.push(if matches!(f, Formula::Diamond(..)) {
                    format!("<{r}>")
                } else {
                    format!("[{r}]")
                });
                go(g, scopes, path, out);
                path.pop();
            }
            Formula::Or(l, r) | Formula::And(l, r) => {
                let op = if matches!(f, Formula::Or(..)) { "||" } else { "&&" };
                path.push(format!("{op}.0"));
                go(l, scopes, path, out);
                path.pop();
                path.push(format!("{op}.1"));
                go(r, scopes, path, out);
                path.pop();
            }
            Formula::Implies(l, r) => {
                path.push("=>.0".into());
                flip(scopes);
                go(l, scopes, path, out);
                flip(scopes);
                path.pop();
                path.push("=>.1".into());
                go(r, scopes, path, out);
                path.pop();
            }
            Formula::Mu(x, g) | Formula::Nu(x, g) => {
                let kw = if matches!(f, Formula::Mu(..)) { "mu" } else { "nu" };
                path.push(format!("{kw} {x}"));
                scopes.push(Scope {
                    name: x.clone(),
                    odd: false,
                });
                go(g, scopes, path, out);
                scopes.pop();
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Renames binders so that every bound variable name is unique and distinct
/// from every free variable name.
pub fn rename_apart(f: &Formula) -> Formula {
    fn go(
        f: &Formula,
        fresh: &mut Fresh,
        taken: &mut BTreeSet<String>,
        env: &mut Vec<(String, String)>,
    ) -> Formula {
        match f {
            Formula::False => Formula::False,
            Formula::True => Formula::True,
            Formula::Var(x) => Formula::Var(
                env.iter()
                    .rev()
                    .find(|(from, _)| from == x)
                    .map(|(_, to)| to.clone())
                    .unwrap_or_else(|| x.clone()),
            ),
            Formula::Not(g) => Formula::not(go(g, fresh, taken, env)),
            Formula::Diamond(r, g) => Formula::diamond(r.clone(), go(g, fresh, taken, env)),
            Formula::BoxOp(r, g) => Formula::boxed(r.clone(), go(g, fresh, taken, env)),
            Formula::Or(l, r) => Formula::or(go(l, fresh, taken, env), go(r, fresh, taken, env)),
            Formula::And(l, r) => Formula::and(go(l, fresh, taken, env), go(r, fresh, taken, env)),
            Formula::Implies(l, r) => {
                Formula::implies(go(l, fresh, taken, env), go(r, fresh, taken, env))
            }
            Formula::Mu(x, g) | Formula::Nu(x, g) => {
                let name = if taken.insert(x.clone()) {
                    x.clone()
                } else {
                    let n = fresh.next(x);
                    taken.insert(n.clone());
                    n
                };
                env.push((x.clone(), name.clone()));
                let body = go(g, fresh, taken, env);
                env.pop();
                if matches!(f, Formula::Mu(..)) {
                    Formula::mu(name, body)
                } else {
                    Formula::nu(name, body)
                }
            }
        }
    }
    let mut fresh = Fresh::new(f);
    let mut taken = free_variables(f);
    go(f, &mut fresh, &mut taken, &mut Vec::new())
}

/// Rewrites regular modalities into the core grammar, where every modality is
/// labelled by a single action set. Fresh variables are introduced for `*`.
pub fn expand_regular_modalities(f: &Formula) -> Formula {
    fn formula(f: &Formula, fresh: &mut Fresh) -> Formula {
        match f {
            Formula::False | Formula::True | Formula::Var(_) => f.clone(),
            Formula::Not(g) => Formula::not(formula(g, fresh)),
            Formula::Or(l, r) => Formula::or(formula(l, fresh), formula(r, fresh)),
            Formula::And(l, r) => Formula::and(formula(l, fresh), formula(r, fresh)),
            Formula::Implies(l, r) => Formula::implies(formula(l, fresh), formula(r, fresh)),
            Formula::Mu(x, g) => Formula::mu(x.clone(), formula(g, fresh)),
            Formula::Nu(x, g) => Formula::nu(x.clone(), formula(g, fresh)),
            Formula::Diamond(r, g) => diamond(r, formula(g, fresh), fresh),
            Formula::BoxOp(r, g) => boxed(r, formula(g, fresh), fresh),
        }
    }
    fn diamond(r: &Regular, body: Formula, fresh: &mut Fresh) -> Formula {
        match r {
            Regular::Epsilon => body,
            Regular::Actions(_) => Formula::diamond(r.clone(), body),
            Regular::Concat(a, b) => {
                let inner = diamond(b, body, fresh);
                diamond(a, inner, fresh)
            }
            Regular::Union(a, b) => {
                let l = diamond(a, body.clone(), fresh);
                Formula::or(l, diamond(b, body, fresh))
            }
            Regular::Star(a) => {
                let x = fresh.next("X");
                let step = diamond(a, Formula::var(x.clone()), fresh);
                Formula::mu(x, Formula::or(step, body))
            }
        }
    }
    fn boxed(r: &Regular, body: Formula, fresh: &mut Fresh) -> Formula {
        match r {
            Regular::Epsilon => body,
            Regular::Actions(_) => Formula::boxed(r.clone(), body),
            Regular::Concat(a, b) => {
                let inner = boxed(b, body, fresh);
                boxed(a, inner, fresh)
            }
            Regular::Union(a, b) => {
                let l = boxed(a, body.clone(), fresh);
                Formula::and(l, boxed(b, body, fresh))
            }
            Regular::Star(a) => {
                let x = fresh.next("X");
                let step = boxed(a, Formula::var(x.clone()), fresh);
                Formula::nu(x, Formula::and(step, body))
            }
        }
    }
    let mut fresh = Fresh::new(f);
    rename_apart(&formula(f, &mut fresh))
}

fn is_empty_over(set: &ActionSet, alphabet: &[String]) -> bool {
    set.members_in(alphabet).is_empty()
}

fn regular_is_empty_language(r: &Regular, alphabet: &[String]) -> bool {
    match r {
        Regular::Epsilon | Regular::Star(_) => false,
        Regular::Actions(s) => is_empty_over(s, alphabet),
        Regular::Concat(a, b) => {
            regular_is_empty_language(a, alphabet) || regular_is_empty_language(b, alphabet)
        }
        Regular::Union(a, b) => {
            regular_is_empty_language(a, alphabet) && regular_is_empty_language(b, alphabet)
        }
    }
}

/// Drops trailing starred factors, which never matter in front of `tt`.
fn strip_trailing_stars(r: &Regular) -> Regular {
    match r {
        Regular::Star(_) => Regular::Epsilon,
        Regular::Concat(a, b) if matches!(**b, Regular::Star(_)) => strip_trailing_stars(a),
        r => r.clone(),
    }
}

fn occurs_free(f: &Formula, x: &str) -> bool {
    free_variables(f).contains(x)
}

/// Constant folding: modalities over empty languages, boolean identities with
/// `tt` and `ff`, `eps` modalities and fixpoints whose variable is unused.
pub fn simplify(f: &Formula, alphabet: &[String]) -> Formula {
    use Formula::*;
    match f {
        False | True | Var(_) => f.clone(),
        Not(g) => match simplify(g, alphabet) {
            True => False,
            False => True,
            Not(h) => *h,
            g => Formula::not(g),
        },
        Or(l, r) => match (simplify(l, alphabet), simplify(r, alphabet)) {
            (True, _) | (_, True) => True,
            (False, g) | (g, False) => g,
            (l, r) => Formula::or(l, r),
        },
        And(l, r) => match (simplify(l, alphabet), simplify(r, alphabet)) {
            (False, _) | (_, False) => False,
            (True, g) | (g, True) => g,
            (l, r) => Formula::and(l, r),
        },
        Implies(l, r) => match (simplify(l, alphabet), simplify(r, alphabet)) {
            (False, _) | (_, True) => True,
            (True, g) => g,
            (l, False) => simplify(&Formula::not(l), alphabet),
            (l, r) => Formula::implies(l, r),
        },
        Diamond(reg, g) => {
            let g = simplify(g, alphabet);
            let reg = if g == True {
                strip_trailing_stars(reg)
            } else {
                reg.clone()
            };
            if g == False || regular_is_empty_language(&reg, alphabet) {
                False
            } else if reg == Regular::Epsilon {
                g
            } else {
                Formula::diamond(reg, g)
            }
        }
        BoxOp(reg, g) => {
            let g = simplify(g, alphabet);
            if g == True || regular_is_empty_language(reg, alphabet) {
                True
            } else if *reg == Regular::Epsilon {
                g
            } else {
                Formula::boxed(reg.clone(), g)
            }
        }
        Mu(x, g) | Nu(x, g) => {
            let g = simplify(g, alphabet);
            if !occurs_free(&g, x) {
                g
            } else if matches!(f, Mu(..)) {
                Formula::mu(x.clone(), g)
            } else {
                Formula::nu(x.clone(), g)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mucalc::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn monotonicity() {
        let e = check_syntactic_monotonicity(&p("mu X. !X")).unwrap_err();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].variable, "X");
        assert_eq!(e[0].to_string(), "X occurs under an odd number of negations at mu X > ! > X");
        assert!(check_syntactic_monotonicity(&p("mu X. <a>X")).is_ok());
        assert!(check_syntactic_monotonicity(&p("mu X. !<a>!X")).is_ok());
        assert!(check_syntactic_monotonicity(&p("nu X. X => tt")).is_err());
        assert!(check_syntactic_monotonicity(&p("nu X. !(X => ff)")).is_ok());
        // A negated free variable is no concern of the inner binder.
        assert!(check_syntactic_monotonicity(&p("!Y && mu X. X")).is_ok());
        // Shadowing: the inner X is a different variable.
        assert!(check_syntactic_monotonicity(&p("mu X. !(mu X. X)")).is_ok());
    }

    #[test]
    fn expansion_rules() {
        assert_eq!(expand_regular_modalities(&p("<eps>Y")), p("Y"));
        assert_eq!(expand_regular_modalities(&p("<a + b>Y")), p("<a>Y || <b>Y"));
        assert_eq!(expand_regular_modalities(&p("<a . b>Y")), p("<a><b>Y"));
        assert_eq!(expand_regular_modalities(&p("<a*>Y")), p("mu X. <a>X || Y"));
        assert_eq!(expand_regular_modalities(&p("[a*]X")), p("nu X1. [a]X1 && X"));
        assert_eq!(
            expand_regular_modalities(&p("<a*><b*>tt")),
            p("mu X1. <a>X1 || (mu X. <b>X || tt)")
        );
    }

    #[test]
    fn renaming_makes_binders_unique() {
        let f = rename_apart(&p("(mu X. <a>X) && (nu X. [b]X) && X"));
        assert_eq!(f, p("(mu X1. <a>X1) && (nu X2. [b]X2) && X"));
        let g = rename_apart(&p("mu X. <a>(mu X. X || <b>X)"));
        assert_eq!(g, p("mu X. <a>(mu X1. X1 || <b>X1)"));
    }

    #[test]
    fn simplification() {
        let alphabet: Vec<String> = vec!["a".into(), "b".into()];
        let s = |src: &str| simplify(&p(src), &alphabet).to_string();
        assert_eq!(s("<{}>tt || [{}]ff || <a>X"), "tt");
        assert_eq!(s("<!{a,b}>tt || <a>X"), "<a>X");
        assert_eq!(s("!<a . b*>(nu X. tt)"), "!<a>tt");
        assert_eq!(s("mu X. <a>Y"), "<a>Y");
        assert_eq!(s("tt => ff"), "ff");
        assert_eq!(s("[a]tt && <eps>Y"), "Y");
        assert_eq!(s("<a . b* . a*>tt"), "<a>tt");
        assert_eq!(s("<b*>tt"), "tt");
    }
}
