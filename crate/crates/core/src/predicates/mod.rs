//! Decision procedures on finite paths and lassos: the violation template,
//! the completeness criteria, and the fair-extension constructions.
//!
//! Lassos are decided on their cycle. A suffix of `stem · cycle^ω` that
//! starts in the stem contains the whole cycle, so an action is perpetually
//! enabled there only if it is enabled on every cycle state, and relentlessly
//! enabled iff it is enabled on some cycle state.

mod criteria;
mod extend;
mod nfa;
mod trace;
pub(crate) mod violation;

use std::fmt;

pub(crate) use criteria::Shape;
pub use criteria::{
    satisfies_finitely_realisable, satisfies_ja, satisfies_progress, satisfies_sfa,
    satisfies_shfa, satisfies_strong, satisfies_wfa, satisfies_whfa, CriterionChecker,
};
pub use extend::{extend_to_just, extend_to_whfa};
pub use nfa::{matches_regular, Nfa};
pub use trace::parse_trace;
pub use violation::{is_violating, violation_split};

/// Why a predicate fails on a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    /// The offending action, when there is one.
    pub action: Option<String>,
    /// Index of the first state of the offending suffix.
    pub position: usize,
    pub clause: String,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = &self.action {
            write!(f, "{a} ")?;
        }
        write!(f, "{} (from position {})", self.clause, self.position)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateVerdict {
    pub holds: bool,
    pub witness: Option<Explanation>,
}

impl PredicateVerdict {
    pub fn pass() -> Self {
        PredicateVerdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(action: Option<String>, position: usize, clause: impl Into<String>) -> Self {
        PredicateVerdict {
            holds: false,
            witness: Some(Explanation {
                action,
                position,
                clause: clause.into(),
            }),
        }
    }
}

impl fmt::Display for PredicateVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => f.write_str("holds"),
            Some(w) => write!(f, "fails: {w}"),
        }
    }
}
