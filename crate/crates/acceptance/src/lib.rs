//! Brute-force oracles used by the acceptance suite, plus the small runner
//! that prints one line per criterion.
//!
//! Nothing here calls into the code under test except to build inputs.

pub mod coherence;
pub mod diff;
pub mod ledger;
pub mod report;
pub mod trust;
