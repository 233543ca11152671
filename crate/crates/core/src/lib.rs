//! Model checking of liveness properties under completeness criteria.

pub mod error;
pub mod lts;
pub mod mucalc;
pub mod templates;
pub mod predicates;
pub mod oracle;

pub use error::{Error, Result};
pub use fixedbitset::FixedBitSet;

#[cfg(test)]
mod proptests;
