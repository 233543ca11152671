//! Violation templates for the property specification patterns and the
//! formulae that check them under completeness criteria.

mod formulas;
mod pattern;
mod property;

pub use formulas::{
    build_finitely_realisable_formula, build_progress_formula, build_strong_formula,
    strong_fairness_phi_of, strong_hyperfairness_phi_of, Criterion, CriterionKind, CriterionSpec,
    FinitelyRealisableSpec, DEFAULT_SUBSET_CAP,
};
pub use pattern::{instantiate_pattern, Behaviour, PatternSpec, Scope, ViolationTemplate};
pub use property::{parse_action_set, parse_property, Property, PropertyBody};
