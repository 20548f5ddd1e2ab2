//! Syntactic unification over tableau terms. Only variables are bindable.

use std::collections::BTreeMap;

use crate::syntax::{Atom, Term};

/// A triangular substitution; apply with [`Subst::resolve`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    bindings: BTreeMap<String, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    fn walk<'a>(&'a self, t: &'a Term) -> &'a Term {
        let mut t = t;
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Fully applies the substitution.
    pub fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Skolem(n, args) => Term::Skolem(*n, args.iter().map(|a| self.resolve(a)).collect()),
            other => other.clone(),
        }
    }

    pub fn resolve_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.resolve(t)).collect() }
    }

    fn occurs(&self, v: &str, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::Skolem(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    /// Extends the substitution so that `a` and `b` become equal. On failure
    /// the substitution may have been partially extended; callers clone first.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.walk(a).clone(), self.walk(b).clone());
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(x, t) {
                    return false;
                }
                self.bindings.insert(x.clone(), t.clone());
                true
            }
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::Skolem(f, xs), Term::Skolem(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    pub fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> bool {
        a.pred == b.pred && a.args.len() == b.args.len() && a.args.iter().zip(&b.args).all(|(x, y)| self.unify(x, y))
    }

    /// The bindings in solved form, variable → fully resolved term.
    pub fn solved(&self) -> BTreeMap<String, Term> {
        self.bindings.keys().map(|v| (v.clone(), self.resolve(&Term::Var(v.clone())))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn binds_and_resolves() {
        let mut s = Subst::new();
        assert!(s.unify(&v("X1"), &Term::Skolem(0, vec![v("X2")])));
        assert!(s.unify(&v("X2"), &Term::constant("c")));
        assert_eq!(s.resolve(&v("X1")).to_string(), "sk0(c)");
    }

    #[test]
    fn occurs_check() {
        let mut s = Subst::new();
        assert!(!s.unify(&v("X1"), &Term::Skolem(0, vec![v("X1")])));
    }

    #[test]
    fn clash() {
        let mut s = Subst::new();
        assert!(!s.unify(&Term::constant("a"), &Term::constant("b")));
        assert!(!s.unify(&Term::Skolem(0, vec![]), &Term::Skolem(1, vec![])));
        let p = Atom::new("p", vec![v("X1")]);
        let q = Atom::new("q", vec![v("X1")]);
        assert!(!s.unify_atoms(&p, &q));
    }

    #[test]
    fn solved_form_is_idempotent() {
        let mut s = Subst::new();
        assert!(s.unify(&v("X1"), &v("X2")));
        assert!(s.unify(&v("X2"), &Term::Skolem(3, vec![v("X3")])));
        let solved = s.solved();
        for t in solved.values() {
            let mut vars = Vec::new();
            t.collect_vars(&mut vars);
            assert!(vars.iter().all(|x| !solved.contains_key(x)));
        }
    }
}
