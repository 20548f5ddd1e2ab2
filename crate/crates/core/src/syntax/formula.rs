use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::term::Term;
use crate::ur::Ur;

/// Hole identifier, written `#N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HoleId(pub u32);

/// Label identifier, written `lN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabelId(pub u32);

impl fmt::Display for HoleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom { pred: pred.into(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Hole(HoleId),
    Ur(Arc<Ur>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(pred, args))
    }

    /// 0-ary atom.
    pub fn prop(pred: impl Into<String>) -> Formula {
        Formula::Atom(Atom::new(pred, vec![]))
    }

    pub fn hole(id: u32) -> Formula {
        Formula::Hole(HoleId(id))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn ur(ur: Ur) -> Formula {
        Formula::Ur(Arc::new(ur))
    }

    /// Immediate subformulas, left to right. UR leaves have none.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Hole(_) | Formula::Ur(_) => vec![],
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_hole_free(&self) -> bool {
        match self {
            Formula::Hole(_) => false,
            Formula::Atom(_) | Formula::Ur(_) => true,
            _ => self.children().into_iter().all(Formula::is_hole_free),
        }
    }

    pub fn is_ur_free(&self) -> bool {
        match self {
            Formula::Ur(_) => false,
            Formula::Atom(_) | Formula::Hole(_) => true,
            _ => self.children().into_iter().all(Formula::is_ur_free),
        }
    }

    /// Neither holes nor URs: a formula of plain first-order logic.
    pub fn is_first_order(&self) -> bool {
        self.is_hole_free() && self.is_ur_free()
    }

    /// Holes in left-to-right order of occurrence.
    pub fn holes(&self) -> Vec<HoleId> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<HoleId>) {
        match self {
            Formula::Hole(h) => out.push(*h),
            _ => self.children().into_iter().for_each(|c| c.collect_holes(out)),
        }
    }

    /// UR leaves in left-to-right order.
    pub fn urs(&self) -> Vec<&Arc<Ur>> {
        let mut out = Vec::new();
        self.collect_urs(&mut out);
        out
    }

    fn collect_urs<'a>(&'a self, out: &mut Vec<&'a Arc<Ur>>) {
        match self {
            Formula::Ur(u) => out.push(u),
            _ => self.children().into_iter().for_each(|c| c.collect_urs(out)),
        }
    }

    /// Free variables in first-occurrence order. A UR leaf contributes the
    /// variables of its labels that no label of the UR binds.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                let mut vars = Vec::new();
                a.args.iter().for_each(|t| t.collect_vars(&mut vars));
                for v in vars {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Formula::Hole(_) => {}
            Formula::Ur(u) => {
                for v in u.free_variables() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free, including
    /// inside UR labels.
    pub fn all_variable_names(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Hole(_) => {}
            Formula::Ur(u) => u.labels().values().for_each(|f| f.all_variable_names(out)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
                body.all_variable_names(out);
            }
            _ => self.children().into_iter().for_each(|c| c.all_variable_names(out)),
        }
    }

    /// Predicate symbols with multiplicity, in occurrence order.
    pub fn predicate_symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_preds(&mut out);
        out
    }

    fn collect_preds(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => out.push(a.pred.clone()),
            Formula::Ur(u) => u.labels().values().for_each(|f| f.collect_preds(out)),
            _ => self.children().into_iter().for_each(|c| c.collect_preds(out)),
        }
    }

    /// Number of constructor nodes (UR leaves count as one).
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }
}
