//! Finite models, classical truth, the underspecified satisfaction and
//! falsification relations, and ambiguous consequence checked by bounded
//! model enumeration.

mod consequence;
mod eval;
mod model;

pub use consequence::{
    consequence_u, consequence_u_with, counterexample_in, delta_with, signature, ConsequenceError, ConsequenceLimits, Counterexample,
    Signature, SignatureError, Verdict,
};
pub use eval::{
    eval_classical, fals_u, fals_u_with, sat_u, sat_u_failure_as_falsity, sat_u_with, Assignment, Disambiguate,
    EvalError, Readings,
};
pub use model::{parse_model, FiniteModel, ModelError};
