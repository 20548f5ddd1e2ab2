//! Deduction with scope-ambiguous first-order formulas: underspecified
//! representations, their disambiguations, finite-model semantics and three
//! tableaux calculi.

pub mod fixtures;
pub mod oracle;
pub mod semantics;
pub mod syntax;
pub mod tableau;
pub mod ur;
