use std::collections::BTreeMap;

use thiserror::Error;

use super::model::FiniteModel;
use crate::syntax::{Formula, Term};
use crate::ur::Ur;

/// Variable → individual.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("predicate `{pred}` used with arity {used} but interpreted with arity {model}")]
    ArityMismatch { pred: String, used: usize, model: usize },
    #[error("skolem term `{0}` cannot be evaluated")]
    Skolem(String),
    #[error("hole {0} cannot be evaluated")]
    Hole(String),
    #[error("formula contains a UR; use sat_u / fals_u")]
    Ambiguous,
}

/// Supplies the total disambiguations of a UR leaf.
pub trait Readings {
    fn readings(&self, ur: &Ur) -> Vec<Formula>;
}

/// The readings given by the UR's own constraints.
pub struct Disambiguate;

impl Readings for Disambiguate {
    fn readings(&self, ur: &Ur) -> Vec<Formula> {
        ur.readings()
    }
}

impl<F: Fn(&Ur) -> Vec<Formula>> Readings for F {
    fn readings(&self, ur: &Ur) -> Vec<Formula> {
        self(ur)
    }
}

fn term_value(m: &FiniteModel, t: &Term, g: &Assignment) -> Result<usize, EvalError> {
    match t {
        Term::Var(v) => g.get(v).copied().ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::Const(c) => m.constant(c).ok_or_else(|| EvalError::UnknownConstant(c.clone())),
        Term::Skolem(..) => Err(EvalError::Skolem(t.to_string())),
    }
}

fn atom_value(m: &FiniteModel, pred: &str, args: &[Term], g: &Assignment) -> Result<bool, EvalError> {
    let tuple = args.iter().map(|t| term_value(m, t, g)).collect::<Result<Vec<_>, _>>()?;
    let ext = m.predicates.get(pred).ok_or_else(|| EvalError::UnknownPredicate(pred.to_string()))?;
    if let Some(first) = ext.iter().next() {
        if first.len() != tuple.len() {
            return Err(EvalError::ArityMismatch { pred: pred.to_string(), used: tuple.len(), model: first.len() });
        }
    }
    Ok(ext.contains(&tuple))
}

fn with_var(g: &Assignment, v: &str, a: usize) -> Assignment {
    let mut g = g.clone();
    g.insert(v.to_string(), a);
    g
}

/// Tarskian truth of a plain first-order formula.
pub fn eval_classical(m: &FiniteModel, phi: &Formula, g: &Assignment) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::Atom(a) => atom_value(m, &a.pred, &a.args, g)?,
        Formula::Hole(h) => return Err(EvalError::Hole(h.to_string())),
        Formula::Ur(_) => return Err(EvalError::Ambiguous),
        Formula::Not(a) => !eval_classical(m, a, g)?,
        Formula::And(a, b) => eval_classical(m, a, g)? && eval_classical(m, b, g)?,
        Formula::Or(a, b) => eval_classical(m, a, g)? || eval_classical(m, b, g)?,
        Formula::Imp(a, b) => !eval_classical(m, a, g)? || eval_classical(m, b, g)?,
        Formula::Forall(v, b) => {
            for a in 0..m.domain.len() {
                if !eval_classical(m, b, &with_var(g, v, a))? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(v, b) => {
            for a in 0..m.domain.len() {
                if eval_classical(m, b, &with_var(g, v, a))? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// `M ⊨_u φ` of a closed u-formula.
pub fn sat_u(m: &FiniteModel, phi: &Formula) -> Result<bool, EvalError> {
    sat_u_with(m, phi, &Assignment::new(), &Disambiguate)
}

/// `M` falsifies the closed u-formula `φ`.
pub fn fals_u(m: &FiniteModel, phi: &Formula) -> Result<bool, EvalError> {
    fals_u_with(m, phi, &Assignment::new(), &Disambiguate)
}

pub fn sat_u_with(m: &FiniteModel, phi: &Formula, g: &Assignment, r: &dyn Readings) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::Ur(u) => {
            for d in r.readings(u) {
                if !eval_classical(m, &d, g)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Atom(_) | Formula::Hole(_) => eval_classical(m, phi, g)?,
        Formula::Not(a) => fals_u_with(m, a, g, r)?,
        Formula::And(a, b) => sat_u_with(m, a, g, r)? && sat_u_with(m, b, g, r)?,
        Formula::Or(a, b) => sat_u_with(m, a, g, r)? || sat_u_with(m, b, g, r)?,
        Formula::Imp(a, b) => fals_u_with(m, a, g, r)? || sat_u_with(m, b, g, r)?,
        Formula::Forall(v, b) => {
            for a in 0..m.domain.len() {
                if !sat_u_with(m, b, &with_var(g, v, a), r)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(v, b) => {
            for a in 0..m.domain.len() {
                if sat_u_with(m, b, &with_var(g, v, a), r)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

pub fn fals_u_with(m: &FiniteModel, phi: &Formula, g: &Assignment, r: &dyn Readings) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::Ur(u) => {
            for d in r.readings(u) {
                if eval_classical(m, &d, g)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Atom(_) | Formula::Hole(_) => !eval_classical(m, phi, g)?,
        Formula::Not(a) => sat_u_with(m, a, g, r)?,
        Formula::And(a, b) => fals_u_with(m, a, g, r)? || fals_u_with(m, b, g, r)?,
        Formula::Or(a, b) => fals_u_with(m, a, g, r)? && fals_u_with(m, b, g, r)?,
        Formula::Imp(a, b) => sat_u_with(m, a, g, r)? && fals_u_with(m, b, g, r)?,
        Formula::Forall(v, b) => {
            for a in 0..m.domain.len() {
                if fals_u_with(m, b, &with_var(g, v, a), r)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(v, b) => {
            for a in 0..m.domain.len() {
                if !fals_u_with(m, b, &with_var(g, v, a), r)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

/// Satisfaction with falsity read as plain non-satisfaction: the variant a
/// primitive falsification relation is there to avoid. Kept for comparison.
pub fn sat_u_failure_as_falsity(
    m: &FiniteModel,
    phi: &Formula,
    g: &Assignment,
    r: &dyn Readings,
) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::Ur(_) | Formula::Atom(_) | Formula::Hole(_) => sat_u_with(m, phi, g, r)?,
        Formula::Not(a) => !sat_u_failure_as_falsity(m, a, g, r)?,
        Formula::And(a, b) => sat_u_failure_as_falsity(m, a, g, r)? && sat_u_failure_as_falsity(m, b, g, r)?,
        Formula::Or(a, b) => sat_u_failure_as_falsity(m, a, g, r)? || sat_u_failure_as_falsity(m, b, g, r)?,
        Formula::Imp(a, b) => !sat_u_failure_as_falsity(m, a, g, r)? || sat_u_failure_as_falsity(m, b, g, r)?,
        Formula::Forall(v, b) => {
            for a in 0..m.domain.len() {
                if !sat_u_failure_as_falsity(m, b, &with_var(g, v, a), r)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(v, b) => {
            for a in 0..m.domain.len() {
                if sat_u_failure_as_falsity(m, b, &with_var(g, v, a), r)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}
