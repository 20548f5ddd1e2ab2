//! Terms, h-formulas and u-formulas, their concrete syntax, and substitution.
//!
//! A single [`Formula`] type covers plain first-order formulas, formulas with
//! holes (the bodies of UR labels) and formulas with embedded UR leaves. The
//! predicates [`Formula::is_hole_free`] and [`Formula::is_ur_free`] tell the
//! three apart.

mod formula;
mod parser;
mod printer;
mod subst;
mod term;

pub use formula::{Atom, Formula, HoleId, LabelId};
pub use parser::{
    parse_document, parse_sequent, parse_uformula, Document, ParseError, Sequent, Warning,
};
pub use subst::{substitute, substitute_in_place_of_var};
pub use term::{is_skolem_name, is_variable_name, Term};

/// Formulas that may contain holes.
pub type HFormula = Formula;
/// Formulas that may contain embedded underspecified representations.
pub type UFormula = Formula;
