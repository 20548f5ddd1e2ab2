use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::eval::{eval_classical, Assignment, Disambiguate, EvalError, Readings};
use super::model::FiniteModel;
use crate::syntax::{Formula, Term};

/// Predicate arities and constants occurring in a query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("predicate `{0}` is used with arities {1} and {2}")]
    ArityConflict(String, usize, usize),
    #[error("function term `{0}` is not supported in model search")]
    FunctionTerm(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsequenceError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("model search over domains up to {max_domain} needs {needed} models, cap is {cap}")]
    ResourceCap { max_domain: usize, needed: u128, cap: u64 },
    #[error("max_domain must be at least 1")]
    ZeroDomain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsequenceLimits {
    pub max_domain: usize,
    /// Total number of models the search may visit.
    pub max_models: u64,
}

impl ConsequenceLimits {
    pub fn up_to(max_domain: usize) -> ConsequenceLimits {
        ConsequenceLimits { max_domain, max_models: 5_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub model: FiniteModel,
    /// One true reading per premise.
    pub premises: Vec<Formula>,
    /// A false reading of the conclusion.
    pub conclusion: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoCounterexampleUpTo(usize),
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::Counterexample(_))
    }
}

pub fn signature<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Result<Signature, SignatureError> {
    fn term(t: &Term, sig: &mut Signature) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => {
                sig.constants.insert(c.clone());
                Ok(())
            }
            Term::Skolem(..) => Err(SignatureError::FunctionTerm(t.to_string())),
        }
    }
    fn walk(f: &Formula, sig: &mut Signature) -> Result<(), SignatureError> {
        match f {
            Formula::Atom(a) => {
                if let Some(&k) = sig.predicates.get(&a.pred) {
                    if k != a.args.len() {
                        return Err(SignatureError::ArityConflict(a.pred.clone(), k, a.args.len()));
                    }
                }
                sig.predicates.insert(a.pred.clone(), a.args.len());
                a.args.iter().try_for_each(|t| term(t, sig))
            }
            Formula::Ur(u) => u.labels().values().try_for_each(|g| walk(g, sig)),
            _ => f.children().into_iter().try_for_each(|c| walk(c, sig)),
        }
    }
    let mut sig = Signature::default();
    for f in formulas {
        walk(f, &mut sig)?;
    }
    Ok(sig)
}

/// Total disambiguations with the UR readings supplied by `r`.
pub fn delta_with(phi: &Formula, r: &dyn Readings) -> Vec<Formula> {
    let combine = |a: &Formula, b: &Formula, k: fn(Formula, Formula) -> Formula| {
        let (da, db) = (delta_with(a, r), delta_with(b, r));
        let mut out = Vec::new();
        for x in &da {
            for y in &db {
                out.push(k(x.clone(), y.clone()));
            }
        }
        out
    };
    let mut out = match phi {
        Formula::Atom(_) | Formula::Hole(_) => vec![phi.clone()],
        Formula::Ur(u) => r.readings(u),
        Formula::Not(a) => delta_with(a, r).into_iter().map(Formula::not).collect(),
        Formula::And(a, b) => combine(a, b, Formula::and),
        Formula::Or(a, b) => combine(a, b, Formula::or),
        Formula::Imp(a, b) => combine(a, b, Formula::imp),
        Formula::Forall(v, b) => delta_with(b, r).into_iter().map(|d| Formula::forall(v.clone(), d)).collect(),
        Formula::Exists(v, b) => delta_with(b, r).into_iter().map(|d| Formula::exists(v.clone(), d)).collect(),
    };
    out.sort_by_key(|f| f.to_string());
    out.dedup();
    out
}

fn universal_closure(f: &Formula) -> Formula {
    f.free_variables().into_iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc))
}

fn models_at(sig: &Signature, n: usize) -> Option<u128> {
    let consts = (n as u128).checked_pow(sig.constants.len() as u32)?;
    let bits: u32 = sig.predicates.values().map(|&k| (n as u32).pow(k as u32)).sum();
    consts.checked_mul(2u128.checked_pow(bits)?)
}

/// Checks `premises ⊨_u conclusion` on every model with at most
/// `limits.max_domain` individuals over the query's signature.
pub fn consequence_u(
    premises: &[Formula],
    conclusion: &Formula,
    limits: ConsequenceLimits,
) -> Result<Verdict, ConsequenceError> {
    consequence_u_with(premises, conclusion, limits, &Disambiguate)
}

pub fn consequence_u_with(
    premises: &[Formula],
    conclusion: &Formula,
    limits: ConsequenceLimits,
    r: &dyn Readings,
) -> Result<Verdict, ConsequenceError> {
    if limits.max_domain == 0 {
        return Err(ConsequenceError::ZeroDomain);
    }
    let premise_readings: Vec<Vec<Formula>> =
        premises.iter().map(|p| delta_with(p, r).iter().map(universal_closure).collect()).collect();
    let conclusion_readings: Vec<Formula> = delta_with(conclusion, r).iter().map(universal_closure).collect();
    let sig = signature(
        premises.iter().chain([conclusion]).chain(premise_readings.iter().flatten()).chain(&conclusion_readings),
    )?;
    let needed = (1..=limits.max_domain)
        .map(|n| models_at(&sig, n))
        .try_fold(0u128, |acc, k| k.and_then(|k| acc.checked_add(k)))
        .unwrap_or(u128::MAX);
    if needed > limits.max_models as u128 {
        return Err(ConsequenceError::ResourceCap { max_domain: limits.max_domain, needed, cap: limits.max_models });
    }
    let g = Assignment::new();
    for n in 1..=limits.max_domain {
        let constants: Vec<&String> = sig.constants.iter().collect();
        let slots: Vec<(&String, Vec<usize>)> = sig
            .predicates
            .iter()
            .flat_map(|(p, &k)| tuples(n, k).into_iter().map(move |t| (p, t)))
            .collect();
        let count = models_at(&sig, n).expect("checked above");
        for index in 0..count {
            let mut m = FiniteModel::with_domain((0..n).map(|i| format!("e{i}")));
            for p in sig.predicates.keys() {
                m.declare(p);
            }
            let mut rest = index;
            for c in &constants {
                m.constants.insert((*c).clone(), (rest % n as u128) as usize);
                rest /= n as u128;
            }
            for (bit, (p, t)) in slots.iter().enumerate() {
                if rest >> bit & 1 == 1 {
                    m.predicates.get_mut(*p).unwrap().insert(t.clone());
                }
            }
            if let Some(cx) = refutes(&m, &premise_readings, &conclusion_readings, &g)? {
                return Ok(Verdict::Counterexample(cx));
            }
        }
    }
    Ok(Verdict::NoCounterexampleUpTo(limits.max_domain))
}

/// Whether `m` alone refutes `premises ⊨_u conclusion`: every premise has
/// a true reading and some reading of the conclusion is false.
pub fn counterexample_in(
    m: &FiniteModel,
    premises: &[Formula],
    conclusion: &Formula,
) -> Result<Option<Counterexample>, EvalError> {
    let premise_readings: Vec<Vec<Formula>> =
        premises.iter().map(|p| delta_with(p, &Disambiguate).iter().map(universal_closure).collect()).collect();
    let conclusion_readings: Vec<Formula> = delta_with(conclusion, &Disambiguate).iter().map(universal_closure).collect();
    refutes(m, &premise_readings, &conclusion_readings, &Assignment::new())
}

fn refutes(
    m: &FiniteModel,
    premises: &[Vec<Formula>],
    conclusion: &[Formula],
    g: &Assignment,
) -> Result<Option<Counterexample>, EvalError> {
    let mut chosen = Vec::new();
    for readings in premises {
        let mut found = None;
        for d in readings {
            if eval_classical(m, d, g)? {
                found = Some(d.clone());
                break;
            }
        }
        match found {
            Some(d) => chosen.push(d),
            None => return Ok(None),
        }
    }
    for d in conclusion {
        if !eval_classical(m, d, g)? {
            return Ok(Some(Counterexample { model: m.clone(), premises: chosen, conclusion: d.clone() }));
        }
    }
    Ok(None)
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::semantics::{fals_u, parse_model, sat_u};
    use crate::syntax::parse_uformula;
    use crate::ur::Ur;

    fn f(s: &str) -> Formula {
        parse_uformula(s).unwrap()
    }

    #[test]
    fn reflexivity_fails_for_an_ambiguous_sentence() {
        let a = fixtures::every_man();
        let v = consequence_u(&[a.clone()], &a, ConsequenceLimits::up_to(3)).unwrap();
        let Verdict::Counterexample(cx) = v else { panic!("expected a counterexample") };
        assert_eq!(cx.premises, vec![f(fixtures::WEAK_READING)]);
        assert_eq!(cx.conclusion, f(fixtures::STRONG_READING));
        assert!(!sat_u(&cx.model, &a).unwrap() && !fals_u(&cx.model, &a).unwrap());
    }

    #[test]
    fn one_model_refutes_reflexivity() {
        let m = parse_model(
            "model { domain = {m1, m2, w1, w2}; man = {m1, m2}; woman = {w1, w2}; love = {(m1,w1), (m2,w2)} }",
        )
        .unwrap();
        let a = fixtures::every_man();
        let cx = counterexample_in(&m, &[a.clone()], &a).unwrap().unwrap();
        assert_eq!(cx.premises[0], f(fixtures::WEAK_READING));
        assert_eq!(cx.conclusion, f(fixtures::STRONG_READING));
        assert_eq!(counterexample_in(&m, &[], &f(fixtures::WEAK_READING)).unwrap(), None);
    }

    #[test]
    fn atomic_reflexivity_holds() {
        for n in 1..=3 {
            let v = consequence_u(&[f("p(c)")], &f("p(c)"), ConsequenceLimits::up_to(n)).unwrap();
            assert_eq!(v, Verdict::NoCounterexampleUpTo(n));
        }
    }

    #[test]
    fn tautology_with_an_ambiguous_antecedent() {
        let pq = |_: &Ur| vec![f("p"), f("q")];
        let a = fixtures::every_man();
        let keep_a = Formula::imp(Formula::and(a.clone(), f("B")), a.clone());
        let v = consequence_u_with(&[], &keep_a, ConsequenceLimits::up_to(1), &pq).unwrap();
        assert!(v.is_counterexample());
        let keep_b = Formula::imp(Formula::and(a, f("B")), f("B"));
        let v = consequence_u_with(&[], &keep_b, ConsequenceLimits::up_to(1), &pq).unwrap();
        assert_eq!(v, Verdict::NoCounterexampleUpTo(1));
    }

    #[test]
    fn strong_entails_weak_but_not_conversely() {
        let lim = ConsequenceLimits::up_to(3);
        let (w, s) = (f(fixtures::WEAK_READING), f(fixtures::STRONG_READING));
        assert_eq!(consequence_u(&[s.clone()], &w, lim).unwrap(), Verdict::NoCounterexampleUpTo(3));
        assert!(consequence_u(&[w], &s, lim).unwrap().is_counterexample());
    }

    #[test]
    fn signature_errors_and_caps() {
        let e = consequence_u(&[f("p(a)")], &f("p(a,b)"), ConsequenceLimits::up_to(1)).unwrap_err();
        assert!(matches!(e, ConsequenceError::Signature(SignatureError::ArityConflict(..))));
        let e = consequence_u(&[], &f("r(x,y,z)"), ConsequenceLimits { max_domain: 3, max_models: 1000 }).unwrap_err();
        assert!(matches!(e, ConsequenceError::ResourceCap { .. }));
        let sk = Formula::atom("p", vec![Term::Skolem(0, vec![])]);
        assert!(consequence_u(&[], &sk, ConsequenceLimits::up_to(1)).is_err());
    }

    #[test]
    fn free_variables_are_read_universally() {
        let v = consequence_u(&[], &f("p(x) | ~p(x)"), ConsequenceLimits::up_to(2)).unwrap();
        assert_eq!(v, Verdict::NoCounterexampleUpTo(2));
        assert!(consequence_u(&[], &f("p(x)"), ConsequenceLimits::up_to(1)).unwrap().is_counterexample());
    }
}
