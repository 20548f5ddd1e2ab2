use std::sync::Arc;

use super::formula::{Atom, Formula};
use super::term::Term;

/// Capture-avoiding substitution of `by` for the free occurrences of `var`.
///
/// A binder that would capture a variable of `by` is renamed by appending
/// primes until the name is fresh, so the output is deterministic. UR leaves
/// are rewritten label by label; their binders are never renamed because the
/// variables they bind occur in other labels.
pub fn substitute(phi: &Formula, var: &str, by: &Term) -> Formula {
    if var_is(by, var) {
        return phi.clone();
    }
    let mut by_vars = Vec::new();
    by.collect_vars(&mut by_vars);
    subst(phi, var, by, &by_vars, true)
}

/// Substitution that never renames binders. Used on UR label bodies, whose
/// quantifier variables are shared across labels.
pub fn substitute_in_place_of_var(phi: &Formula, var: &str, by: &Term) -> Formula {
    subst(phi, var, by, &[], false)
}

fn var_is(t: &Term, name: &str) -> bool {
    matches!(t, Term::Var(v) if v == name)
}

fn subst(phi: &Formula, var: &str, by: &Term, by_vars: &[String], rename: bool) -> Formula {
    match phi {
        Formula::Atom(a) => Formula::Atom(Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| t.replace_var(var, by)).collect(),
        }),
        Formula::Hole(_) => phi.clone(),
        Formula::Ur(u) => {
            if u.binds(var) {
                phi.clone()
            } else {
                Formula::Ur(Arc::new(u.map_labels(|f| substitute_in_place_of_var(f, var, by))))
            }
        }
        Formula::Not(a) => Formula::not(subst(a, var, by, by_vars, rename)),
        Formula::And(a, b) => {
            Formula::and(subst(a, var, by, by_vars, rename), subst(b, var, by, by_vars, rename))
        }
        Formula::Or(a, b) => {
            Formula::or(subst(a, var, by, by_vars, rename), subst(b, var, by, by_vars, rename))
        }
        Formula::Imp(a, b) => {
            Formula::imp(subst(a, var, by, by_vars, rename), subst(b, var, by, by_vars, rename))
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let universal = matches!(phi, Formula::Forall(..));
            let rebuild = |v: String, b: Formula| {
                if universal {
                    Formula::forall(v, b)
                } else {
                    Formula::exists(v, b)
                }
            };
            if v == var {
                return phi.clone();
            }
            let captured = rename
                && by_vars.contains(v)
                && body.free_variables().iter().any(|f| f == var);
            if captured {
                let mut used = Vec::new();
                body.all_variable_names(&mut used);
                let mut fresh = format!("{v}'");
                while used.contains(&fresh) || by_vars.contains(&fresh) || fresh == var {
                    fresh.push('\'');
                }
                let renamed = subst(body, v, &Term::Var(fresh.clone()), &[], rename);
                rebuild(fresh, subst(&renamed, var, by, by_vars, rename))
            } else {
                rebuild(v.clone(), subst(body, var, by, by_vars, rename))
            }
        }
    }
}
