//! Analysis used by the partially disambiguating calculus: polarity of
//! occurrences, definiteness of labels, special quantifier shapes, and
//! partial negation resolution.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Formula, HoleId, LabelId};
use crate::ur::{Instantiation, Node, Ur, UrError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    fn times(self, other: Polarity) -> Polarity {
        if self == other {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolarityError {
    #[error("path step {step} leaves the formula at depth {depth}")]
    InvalidPath { step: usize, depth: usize },
}

/// Polarity of the occurrence reached by following child indices `path`
/// (0 = left or only child, 1 = right child).
pub fn polarity(phi: &Formula, path: &[usize]) -> Result<Polarity, PolarityError> {
    let mut pol = Polarity::Positive;
    let mut cur = phi;
    for (depth, &step) in path.iter().enumerate() {
        let children = cur.children();
        let Some(next) = children.get(step) else {
            return Err(PolarityError::InvalidPath { step, depth });
        };
        let flips = matches!(cur, Formula::Not(_)) || (matches!(cur, Formula::Imp(..)) && step == 0);
        if flips {
            pol = pol.flip();
        }
        cur = next;
    }
    Ok(pol)
}

/// Polarity of the occurrence of hole `h` in `phi`, if it occurs.
pub fn hole_polarity(phi: &Formula, h: HoleId) -> Option<Polarity> {
    fn go(f: &Formula, h: HoleId, pol: Polarity) -> Option<Polarity> {
        match f {
            Formula::Hole(g) if *g == h => Some(pol),
            Formula::Not(a) => go(a, h, pol.flip()),
            Formula::Imp(a, b) => go(a, h, pol.flip()).or_else(|| go(b, h, pol)),
            _ => f.children().into_iter().find_map(|c| go(c, h, pol)),
        }
    }
    go(phi, h, Polarity::Positive)
}

/// `ψ` is a negative context for its hole `h`.
pub fn con_neg(psi: &Formula, h: HoleId) -> bool {
    hole_polarity(psi, h) == Some(Polarity::Negative)
}

/// `∀x(χ1 → h)`, `∀x(χ1 ∧ h → χ2)` or `∃x(χ1 ∧ h)` with hole-free `χ`s.
pub fn is_special(phi: &Formula) -> bool {
    special_shape(phi).is_some()
}

/// Which special shape `phi` has: 1, 2 or 3 in the order listed at
/// [`is_special`].
pub fn special_shape(phi: &Formula) -> Option<u8> {
    let free = |f: &Formula| f.is_hole_free();
    match phi {
        Formula::Forall(_, body) => match &**body {
            Formula::Imp(a, b) if free(a) && matches!(**b, Formula::Hole(_)) => Some(1),
            Formula::Imp(a, b) if free(b) => match &**a {
                Formula::And(c, h) if free(c) && matches!(**h, Formula::Hole(_)) => Some(2),
                _ => None,
            },
            _ => None,
        },
        Formula::Exists(_, body) => match &**body {
            Formula::And(a, h) if free(a) && matches!(**h, Formula::Hole(_)) => Some(3),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefinitenessReport {
    pub label: LabelId,
    pub definite: bool,
    /// Labels with a negative-context hole whose relative scope is unfixed.
    pub witnesses: Vec<LabelId>,
    pub note: Option<String>,
}

/// A label is definite when every label holding a negative-context hole
/// whose join with one of its holes is defined is already ordered with it.
pub fn is_definite(ur: &Ur, l: LabelId) -> DefinitenessReport {
    let Some(phi) = ur.formula(l) else {
        return DefinitenessReport { label: l, definite: true, witnesses: vec![], note: Some("unknown label".into()) };
    };
    let holes = phi.holes();
    if holes.is_empty() {
        return DefinitenessReport { label: l, definite: true, witnesses: vec![], note: Some("label has no hole".into()) };
    }
    let witnesses: Vec<LabelId> = ur
        .labels()
        .iter()
        .filter(|(l2, _)| **l2 != l)
        .filter(|(l2, psi)| {
            psi.holes().into_iter().filter(|h2| con_neg(psi, *h2)).any(|h2| {
                holes.iter().any(|&h| {
                    ur.order().join(Node::Hole(h), Node::Hole(h2)).is_some()
                        && !ur.leq(l, h2)
                        && !ur.leq(**l2, h)
                })
            })
        })
        .map(|(l2, _)| *l2)
        .collect();
    DefinitenessReport { label: l, definite: witnesses.is_empty(), witnesses, note: None }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("label {0} is not in the UR")]
    UnknownLabel(LabelId),
    #[error("label {0} cannot be resolved against itself")]
    SameLabel(LabelId),
    #[error("label {0} has no negative-context hole")]
    NotNegative(LabelId),
    #[error("label {lj} is already ordered with {lm}")]
    AlreadyDefinite { lj: LabelId, lm: LabelId },
    #[error(transparent)]
    Ur(#[from] UrError),
}

/// The hole pair a resolution orders: a hole `h_k` of `l_j` and a
/// negative-context hole `h_n` of `l_m` whose join is defined.
fn resolution_holes(ur: &Ur, lj: LabelId, lm: LabelId) -> Result<(HoleId, HoleId), ResolveError> {
    if lj == lm {
        return Err(ResolveError::SameLabel(lj));
    }
    let phi_j = ur.formula(lj).ok_or(ResolveError::UnknownLabel(lj))?;
    let phi_m = ur.formula(lm).ok_or(ResolveError::UnknownLabel(lm))?;
    let negative: Vec<HoleId> = phi_m.holes().into_iter().filter(|h| con_neg(phi_m, *h)).collect();
    if negative.is_empty() {
        return Err(ResolveError::NotNegative(lm));
    }
    for hk in phi_j.holes() {
        for &hn in &negative {
            if ur.order().join(Node::Hole(hk), Node::Hole(hn)).is_some() && !ur.leq(lj, hn) && !ur.leq(lm, hk) {
                return Ok((hk, hn));
            }
        }
    }
    Err(ResolveError::AlreadyDefinite { lj, lm })
}

/// Splits `ur` on the relative scope of `l_j` and the negative context
/// `l_m`. The left side puts `l_m` under `l_j` (`l_m ≤ h_k`), the right side
/// puts `l_j` under the negation (`l_j ≤ h_n`). A side whose constraints
/// become cyclic is `None`.
pub fn negation_resolve(ur: &Ur, lj: LabelId, lm: LabelId) -> Result<(Option<Ur>, Option<Ur>), ResolveError> {
    let (hk, hn) = resolution_holes(ur, lj, lm)?;
    let side = |lo: Node, hi: Node| match ur.refine([(lo, hi)]) {
        Ok(u) => Ok(Some(u)),
        Err(UrError::Cycle(..)) => Ok(None),
        Err(e) => Err(ResolveError::Ur(e)),
    };
    Ok((side(Node::Label(lm), Node::Hole(hk))?, side(Node::Label(lj), Node::Hole(hn))?))
}

/// Labels that some instantiation plugs into the top hole.
pub fn daughters(ur: &Ur) -> BTreeSet<LabelId> {
    ur.instantiations().iter().filter_map(|i| i.label_at(ur.top())).collect()
}

/// Polarity of label `l` in the formula plugged by `inst`.
pub fn label_polarity(ur: &Ur, inst: &Instantiation, l: LabelId) -> Polarity {
    let mut pol = Polarity::Positive;
    let mut cur = l;
    let mut guard = ur.labels().len() + 1;
    while let Some((&h, _)) = inst.assignment.iter().find(|(_, v)| **v == cur) {
        match ur.owner(h) {
            Some(o) if ur.formula(o).is_some_and(|f| !matches!(f, Formula::Hole(_))) => {
                let p = hole_polarity(ur.formula(o).unwrap(), h).unwrap_or(Polarity::Positive);
                pol = pol.times(p);
                cur = o;
            }
            _ => break,
        }
        guard -= 1;
        if guard == 0 {
            break;
        }
    }
    pol
}

/// True if `l` occurs positively in every reading of `ur`.
pub fn positive_in_all(ur: &Ur, l: LabelId) -> bool {
    ur.instantiations().iter().all(|i| label_polarity(ur, i, l) == Polarity::Positive)
}

/// The labels `l_m` making `l_j` indefinite, most encompassing first: a
/// witness not below any other witness comes before those below it.
pub fn ordered_witnesses(ur: &Ur, lj: LabelId) -> Vec<LabelId> {
    let ws = is_definite(ur, lj).witnesses;
    let mut maximal: Vec<LabelId> =
        ws.iter().copied().filter(|&w| !ws.iter().any(|&o| o != w && ur.leq(w, o))).collect();
    let rest: Vec<LabelId> = ws.iter().copied().filter(|w| !maximal.contains(w)).collect();
    maximal.extend(rest);
    maximal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::parse_uformula;
    use crate::ur::delta;

    fn f(s: &str) -> Formula {
        parse_uformula(s).unwrap()
    }

    #[test]
    fn polarity_by_path() {
        assert_eq!(polarity(&f("~p"), &[0]), Ok(Polarity::Negative));
        assert_eq!(polarity(&f("p -> q"), &[0]), Ok(Polarity::Negative));
        assert_eq!(polarity(&f("p -> q"), &[1]), Ok(Polarity::Positive));
        assert_eq!(polarity(&f("~(p -> ~q)"), &[0, 1, 0]), Ok(Polarity::Positive));
        assert_eq!(polarity(&f("~(p -> ~q)"), &[0, 0]), Ok(Polarity::Positive));
        assert_eq!(polarity(&f("~(p -> ~q)"), &[0, 1]), Ok(Polarity::Negative));
        assert!(polarity(&f("p"), &[0]).is_err());
    }

    #[test]
    fn special_shapes() {
        let ur = fixtures::every_man_ur();
        assert!(is_special(ur.formula(LabelId(1)).unwrap()));
        assert!(is_special(ur.formula(LabelId(2)).unwrap()));
        let g = fixtures::man_car_bike_ur();
        assert_eq!(special_shape(g.formula(LabelId(1)).unwrap()), None);
        let h = parse_uformula("ur { l0: #0 ; l1: forall x. (#1 | p(x)) ; l2: q ; constraints { l1 <= #0 ; l2 <= #1 } }")
            .unwrap();
        let Formula::Ur(h) = h else { unreachable!() };
        assert!(!is_special(h.formula(LabelId(1)).unwrap()));
        let k = parse_uformula("ur { l0: #0 ; l1: forall x. (p(x) & #1 -> q(x)) ; l2: r ; constraints { l1 <= #0 ; l2 <= #1 } }")
            .unwrap();
        let Formula::Ur(k) = k else { unreachable!() };
        assert_eq!(special_shape(k.formula(LabelId(1)).unwrap()), Some(2));
    }

    #[test]
    fn definiteness() {
        let fig = fixtures::boy_movie_ur();
        let r = is_definite(&fig, LabelId(1));
        assert!(!r.definite);
        assert_eq!(r.witnesses, vec![LabelId(2)]);
        let six = fixtures::every_man_ur();
        for l in six.labels().keys() {
            assert!(is_definite(&six, *l).definite);
        }
        let ex5 = fixtures::man_car_bike_ur();
        assert!(is_definite(&ex5, LabelId(3)).definite);
    }

    #[test]
    fn resolution_splits_readings() {
        let fig = fixtures::boy_movie_ur();
        let (left, right) = negation_resolve(&fig, LabelId(1), LabelId(2)).unwrap();
        let (left, right) = (left.unwrap(), right.unwrap());
        let got: BTreeSet<String> = left.readings().iter().map(|d| d.to_string()).collect();
        let want: BTreeSet<String> = fixtures::BOY_MOVIE_UNIVERSAL_OVER_NEGATION.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, want);
        let all: BTreeSet<String> = delta(&fixtures::boy_movie()).iter().map(|d| d.to_string()).collect();
        let r: BTreeSet<String> = right.readings().iter().map(|d| d.to_string()).collect();
        assert!(got.is_disjoint(&r));
        assert_eq!(got.union(&r).cloned().collect::<BTreeSet<_>>(), all);
        assert!(is_definite(&left, LabelId(1)).definite);
        assert!(matches!(negation_resolve(&left, LabelId(1), LabelId(2)), Err(ResolveError::AlreadyDefinite { .. })));
        assert_eq!(negation_resolve(&fig, LabelId(2), LabelId(2)), Err(ResolveError::SameLabel(LabelId(2))));
    }

    #[test]
    fn daughters_and_positivity() {
        let six = fixtures::every_man_ur();
        assert_eq!(daughters(&six), BTreeSet::from([LabelId(1), LabelId(2)]));
        assert!(positive_in_all(&six, LabelId(1)));
        let fig = fixtures::boy_movie_ur();
        assert!(!positive_in_all(&fig, LabelId(1)));
    }
}
