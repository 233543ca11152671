//! Modal μ-calculus with regular modalities.
//!
//! Formulae are plain trees. [`expand_regular_modalities`] rewrites them into
//! the core grammar, and [`evaluate`] computes their semantics over an LTS by
//! naive fixpoint iteration.

mod analysis;
mod eval;
mod parser;

pub use analysis::{
    check_syntactic_monotonicity, expand_regular_modalities, free_variables, rename_apart,
    simplify, MonotonicityViolation,
};
pub use eval::{evaluate, least_fixpoint_approximant, satisfies, Environment};
pub use parser::{parse_formula, parse_regular};

use std::fmt::{self, Write};

use crate::lts::{write_label, ActionSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Regular {
    Epsilon,
    Actions(ActionSet),
    Concat(Box<Regular>, Box<Regular>),
    Union(Box<Regular>, Box<Regular>),
    Star(Box<Regular>),
}

impl Regular {
    pub fn actions(set: ActionSet) -> Regular {
        Regular::Actions(set)
    }

    pub fn action(label: impl Into<String>) -> Regular {
        Regular::Actions(ActionSet::singleton(label))
    }

    pub fn concat(self, other: Regular) -> Regular {
        Regular::Concat(Box::new(self), Box::new(other))
    }

    /// Concatenation that drops `eps` operands and keeps chains left-nested.
    pub fn then(self, other: Regular) -> Regular {
        match (self, other) {
            (Regular::Epsilon, r) | (r, Regular::Epsilon) => r,
            (l, Regular::Concat(a, b)) => l.then(*a).then(*b),
            (l, r) => l.concat(r),
        }
    }

    pub fn union(self, other: Regular) -> Regular {
        Regular::Union(Box::new(self), Box::new(other))
    }

    pub fn star(self) -> Regular {
        Regular::Star(Box::new(self))
    }

    fn precedence(&self) -> u8 {
        match self {
            Regular::Union(..) => 0,
            Regular::Concat(..) => 1,
            Regular::Star(_) => 2,
            Regular::Epsilon | Regular::Actions(_) => 3,
        }
    }

    fn write_at(&self, out: &mut impl Write, ctx: u8) -> fmt::Result {
        let paren = self.precedence() < ctx;
        if paren {
            out.write_char('(')?;
        }
        match self {
            Regular::Epsilon => out.write_str("eps")?,
            Regular::Actions(set) => match set.listed().iter().next() {
                Some(only) if !set.is_complemented() && set.listed().len() == 1 => {
                    write_label(out, only)?
                }
                _ => write!(out, "{set}")?,
            },
            Regular::Concat(l, r) => {
                l.write_at(out, 1)?;
                out.write_str(" . ")?;
                r.write_at(out, 2)?;
            }
            Regular::Union(l, r) => {
                l.write_at(out, 0)?;
                out.write_str(" + ")?;
                r.write_at(out, 1)?;
            }
            Regular::Star(r) => {
                r.write_at(out, 2)?;
                out.write_char('*')?;
            }
        }
        if paren {
            out.write_char(')')?;
        }
        Ok(())
    }
}

impl fmt::Display for Regular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    False,
    True,
    Var(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Diamond(Regular, Box<Formula>),
    BoxOp(Regular, Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn diamond(r: Regular, f: Formula) -> Formula {
        Formula::Diamond(r, Box::new(f))
    }

    pub fn boxed(r: Regular, f: Formula) -> Formula {
        Formula::BoxOp(r, Box::new(f))
    }

    pub fn mu(x: impl Into<String>, f: Formula) -> Formula {
        Formula::Mu(x.into(), Box::new(f))
    }

    pub fn nu(x: impl Into<String>, f: Formula) -> Formula {
        Formula::Nu(x.into(), Box::new(f))
    }

    /// Left-folded conjunction; `tt` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-folded disjunction; `ff` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Number of nodes, counting regular formulae as one node each.
    pub fn size(&self) -> usize {
        match self {
            Formula::False | Formula::True | Formula::Var(_) => 1,
            Formula::Not(f) | Formula::Mu(_, f) | Formula::Nu(_, f) => 1 + f.size(),
            Formula::Diamond(_, f) | Formula::BoxOp(_, f) => 2 + f.size(),
            Formula::Or(l, r) | Formula::And(l, r) | Formula::Implies(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// Operands of a left-nested disjunction chain.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::Or(l, r) => {
                let mut out = l.disjuncts();
                out.push(r);
                out
            }
            f => vec![f],
        }
    }

    /// Operands of a left-nested conjunction chain.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(l, r) => {
                let mut out = l.conjuncts();
                out.push(r);
                out
            }
            f => vec![f],
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Mu(..) | Formula::Nu(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) | Formula::Diamond(..) | Formula::BoxOp(..) => 4,
            Formula::False | Formula::True | Formula::Var(_) => 5,
        }
    }

    fn write_at(&self, out: &mut impl Write, ctx: u8) -> fmt::Result {
        let paren = self.precedence() < ctx;
        if paren {
            out.write_char('(')?;
        }
        match self {
            Formula::False => out.write_str("ff")?,
            Formula::True => out.write_str("tt")?,
            Formula::Var(x) => out.write_str(x)?,
            Formula::Not(f) => {
                out.write_char('!')?;
                f.write_at(out, 4)?;
            }
            Formula::Or(l, r) => {
                l.write_at(out, 2)?;
                out.write_str(" || ")?;
                r.write_at(out, 3)?;
            }
            Formula::And(l, r) => {
                l.write_at(out, 3)?;
                out.write_str(" && ")?;
                r.write_at(out, 4)?;
            }
            Formula::Implies(l, r) => {
                l.write_at(out, 2)?;
                out.write_str(" => ")?;
                r.write_at(out, 1)?;
            }
            Formula::Diamond(reg, f) => {
                write!(out, "<{reg}>")?;
                f.write_at(out, 4)?;
            }
            Formula::BoxOp(reg, f) => {
                write!(out, "[{reg}]")?;
                f.write_at(out, 4)?;
            }
            Formula::Mu(x, f) | Formula::Nu(x, f) => {
                let kw = if matches!(self, Formula::Mu(..)) { "mu" } else { "nu" };
                write!(out, "{kw} {x}. ")?;
                f.write_at(out, 0)?;
            }
        }
        if paren {
            out.write_char(')')?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
