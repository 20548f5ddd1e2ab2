use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use ambitab::fixtures;
use ambitab::oracle::corpus::random_small_urs;
use ambitab::syntax::{parse_uformula, substitute, Formula, HoleId, LabelId, Term};
use ambitab::tableau::negation_resolve;
use ambitab::ur::{close_constraints, Node, Ur};

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["x", "y", "z", "X1"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b", "c0"]).prop_map(Term::constant),
    ]
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        8 => (prop::sample::select(vec!["p", "q", "love"]), prop::collection::vec(term(), 0..3))
            .prop_map(|(p, args)| Formula::atom(p, args)),
        1 => prop::sample::select(vec![fixtures::EVERY_MAN, fixtures::INDEPENDENT])
            .prop_map(|s| parse_uformula(s).unwrap()),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(8, 96, 2, |inner| {
        let var = prop::sample::select(vec!["x", "y", "z"]);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (var, inner).prop_map(|(v, b)| Formula::exists(v, b)),
        ]
    })
}

fn node(i: u32) -> Node {
    if i % 2 == 0 {
        Node::Label(LabelId(i / 2))
    } else {
        Node::Hole(HoleId(i / 2))
    }
}

type Insts = BTreeSet<BTreeMap<HoleId, LabelId>>;

fn insts(u: &Ur) -> Insts {
    u.instantiations().into_iter().map(|i| i.assignment).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse(phi in formula()) {
        let text = phi.to_string();
        let back = parse_uformula(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        if phi.is_ur_free() {
            prop_assert_eq!(back, phi);
        }
    }

    #[test]
    fn substituting_a_non_free_variable_is_identity(phi in formula(), t in term()) {
        let fresh = "w9";
        prop_assert_eq!(substitute(&phi, fresh, &t), phi);
    }

    #[test]
    fn substituting_a_constant_removes_the_variable(phi in formula(), v in prop::sample::select(vec!["x", "y", "z"])) {
        let out = substitute(&phi, v, &Term::constant("k"));
        let want: Vec<String> = phi.free_variables().into_iter().filter(|w| w != v).collect();
        prop_assert_eq!(out.free_variables(), want);
    }

    #[test]
    fn substitution_does_not_capture(phi in formula(), v in prop::sample::select(vec!["x", "y", "z"])) {
        prop_assume!(phi.is_ur_free());
        let by = Term::var(if v == "x" { "y" } else { "x" });
        let out = substitute(&phi, v, &by);
        let mut want: BTreeSet<String> = phi.free_variables().into_iter().filter(|w| w != v).collect();
        if phi.free_variables().iter().any(|w| w == v) {
            want.insert(by.to_string());
        }
        prop_assert_eq!(out.free_variables().into_iter().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn closure_is_idempotent(pairs in prop::collection::vec((0u32..8, 0u32..8), 0..12)) {
        let universe: BTreeSet<Node> = (0..8).map(node).collect();
        let pairs: Vec<(Node, Node)> = pairs.into_iter().map(|(a, b)| (node(a), node(b))).collect();
        if let Ok(order) = close_constraints(&universe, pairs.clone()) {
            for &(a, b) in &pairs {
                prop_assert!(order.leq(a, b));
            }
            for a in &universe {
                prop_assert!(order.leq(*a, *a));
                for b in &universe {
                    for c in &universe {
                        if order.leq(*a, *b) && order.leq(*b, *c) {
                            prop_assert!(order.leq(*a, *c));
                        }
                    }
                }
            }
            let again = close_constraints(&universe, order.pairs()).unwrap();
            prop_assert_eq!(again, order);
        }
    }

    #[test]
    fn negation_resolution_splits_the_instantiations(seed in any::<u64>()) {
        for u in random_small_urs(seed, 1) {
            let all: BTreeSet<String> = u.readings().iter().map(|d| d.to_string()).collect();
            let labels: Vec<LabelId> = u.labels().keys().copied().collect();
            for &lj in &labels {
                for &lm in &labels {
                    let Ok((left, right)) = negation_resolve(&u, lj, lm) else { continue };
                    let side = |s: &Option<Ur>| s.as_ref().map(insts).unwrap_or_default();
                    let (l, r) = (side(&left), side(&right));
                    prop_assert!(l.is_disjoint(&r));
                    prop_assert_eq!(l.union(&r).cloned().collect::<Insts>(), insts(&u));
                    let covered: BTreeSet<String> = [left, right]
                        .iter()
                        .flatten()
                        .flat_map(|s| s.readings())
                        .map(|d| d.to_string())
                        .collect();
                    prop_assert_eq!(&covered, &all);
                }
            }
        }
    }
}
