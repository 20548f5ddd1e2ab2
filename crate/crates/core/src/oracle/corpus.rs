//! The fixed regression corpus: the worked examples in tautological and
//! non-tautological contexts, plus seeded random u-formulas.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::delta::{delta, readings};
use super::MAX_READINGS;
use crate::fixtures;
use crate::syntax::{parse_uformula, Formula};
use crate::ur::Ur;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusItem {
    pub id: String,
    pub formula: Formula,
}

pub const SEED: u64 = 0x5_c09e;
pub const RANDOM_ITEMS: usize = 45;

fn parse(text: &str) -> Formula {
    parse_uformula(text).unwrap_or_else(|e| panic!("corpus item does not parse: {e}: {text}"))
}

fn joined(ur: &str, op: &str) -> String {
    let Formula::Ur(u) = parse(ur) else { unreachable!("not a UR: {ur}") };
    readings(&u).iter().map(|r| format!("({r})")).collect::<Vec<_>>().join(&format!(" {op} "))
}

fn fixed() -> Vec<(String, String)> {
    let (em, bm, mcb, ind) = (fixtures::EVERY_MAN, fixtures::BOY_MOVIE, fixtures::MAN_CAR_BIKE, fixtures::INDEPENDENT);
    let (weak, strong) = (fixtures::WEAK_READING, fixtures::STRONG_READING);
    let mut v = vec![
        ("every-man-weak", format!("{em} -> {weak}")),
        ("strong-every-man", format!("({strong}) -> {em}")),
        ("every-man-reflexive", format!("{em} -> {em}")),
        ("weak-every-man", format!("({weak}) -> {em}")),
        ("every-man-disjunction", format!("{em} -> {}", joined(em, "|"))),
        ("keep-ambiguous-conjunct", format!("{ind} & q -> {ind}")),
        ("keep-plain-conjunct", format!("{ind} & q -> q")),
        ("independent-disjunction", format!("{ind} -> {}", joined(ind, "|"))),
        ("independent-one-reading", format!("{ind} -> ~exists y. (r(y) & s(y))")),
        ("boy-movie-disjunction", format!("{bm} -> {}", joined(bm, "|"))),
        ("boy-movie-conjunction", format!("{} -> {bm}", joined(bm, "&"))),
        ("boy-movie-sharing", format!("{bm} & q -> q")),
        ("man-car-bike-sharing", format!("p & {mcb} -> p")),
        ("classical-identity", "p -> p".to_string()),
        ("classical-quantifier-swap", "(exists x. forall y. t(x,y)) -> forall y. exists x. t(x,y)".to_string()),
        ("classical-non-theorem", "p -> q".to_string()),
        ("classical-swap-back", "(forall y. exists x. t(x,y)) -> exists x. forall y. t(x,y)".to_string()),
    ];
    if readings_of(mcb) <= MAX_READINGS {
        v.push(("man-car-bike-disjunction", format!("{mcb} -> {}", joined(mcb, "|"))));
    }
    v.into_iter().map(|(a, b)| (a.to_string(), b)).collect()
}

fn readings_of(ur: &str) -> usize {
    delta(&parse(ur)).len()
}

/// A closed UR with one or two quantifiers, possibly a negation and a
/// disjunctive wrapper, all competing for the top hole.
fn random_ur(rng: &mut ChaCha8Rng) -> String {
    let nq = rng.gen_range(1..=2);
    let mut scope = Vec::new();
    let vars = ["x", "y"];
    let preds = ["a", "b"];
    for i in 0..nq {
        let (v, p) = (vars[i], preds[i]);
        let k = scope.len() + 1;
        scope.push(if rng.gen_bool(0.5) {
            format!("forall {v}. ({p}({v}) -> #{k})")
        } else {
            format!("exists {v}. ({p}({v}) & #{k})")
        });
    }
    if rng.gen_bool(0.5) {
        let k = scope.len() + 1;
        scope.push(format!("~#{k}"));
    }
    if scope.len() < 3 && rng.gen_bool(0.3) {
        let k = scope.len() + 1;
        scope.push(format!("(c | #{k})"));
    }
    let leaf = if nq == 1 { "r(x)" } else { "t(x,y)" };
    let n = scope.len();
    let mut entries = vec!["l0: #0".to_string()];
    for (i, s) in scope.iter().enumerate() {
        entries.push(format!("l{}: {s}", i + 1));
    }
    entries.push(format!("l{}: {leaf}", n + 1));
    let mut cons: Vec<String> = (1..=n).map(|i| format!("l{i} <= #0")).collect();
    cons.extend((1..=n).map(|k| format!("l{} <= #{k}", n + 1)));
    format!("ur {{ {} ; constraints {{ {} }} }}", entries.join(" ; "), cons.join(" ; "))
}

/// A UR with one to three scope-taking labels over a single leaf, so at
/// most four labels below the root. With some probability one extra
/// constraint orders two of the scope labels.
pub fn random_small_ur(rng: &mut ChaCha8Rng) -> Option<Arc<Ur>> {
    let n = rng.gen_range(1..=3);
    let mut entries = vec!["l0: #0".to_string()];
    let mut bound = Vec::new();
    for k in 1..=n {
        let v = ["x", "y", "z"][k - 1];
        let s = match rng.gen_range(0..4) {
            0 => {
                bound.push(v);
                format!("forall {v}. (a({v}) -> #{k})")
            }
            1 => {
                bound.push(v);
                format!("exists {v}. (b({v}) & #{k})")
            }
            2 => format!("~#{k}"),
            _ => format!("(c | #{k})"),
        };
        entries.push(format!("l{k}: {s}"));
    }
    let leaf = if bound.is_empty() { "r".to_string() } else { format!("r({})", bound.join(",")) };
    entries.push(format!("l{}: {leaf}", n + 1));
    let mut cons: Vec<String> = (1..=n).map(|i| format!("l{i} <= #0")).collect();
    cons.extend((1..=n).map(|k| format!("l{} <= #{k}", n + 1)));
    if n >= 2 && rng.gen_bool(0.3) {
        let i = rng.gen_range(1..=n);
        let k = (i % n) + 1;
        cons.push(format!("l{i} <= #{k}"));
    }
    let text = format!("ur {{ {} ; constraints {{ {} }} }}", entries.join(" ; "), cons.join(" ; "));
    match parse_uformula(&text) {
        Ok(Formula::Ur(u)) if !u.readings().is_empty() => Some(u),
        _ => None,
    }
}

/// `count` URs from [`random_small_ur`], drawn from `seed`.
pub fn random_small_urs(seed: u64, count: usize) -> Vec<Arc<Ur>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(|| random_small_ur(&mut rng)).flatten().take(count).collect()
}

fn random_context(rng: &mut ChaCha8Rng, depth: usize, urs: &mut Vec<String>) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        if !urs.is_empty() && rng.gen_bool(0.5) {
            return urs.pop().unwrap();
        }
        return ["p", "q"][rng.gen_range(0..2)].to_string();
    }
    match rng.gen_range(0..4) {
        0 => format!("~({})", random_context(rng, depth - 1, urs)),
        1 => format!("({}) & ({})", random_context(rng, depth - 1, urs), random_context(rng, depth - 1, urs)),
        2 => format!("({}) | ({})", random_context(rng, depth - 1, urs), random_context(rng, depth - 1, urs)),
        _ => format!("({}) -> ({})", random_context(rng, depth - 1, urs), random_context(rng, depth - 1, urs)),
    }
}

fn random_item(rng: &mut ChaCha8Rng) -> String {
    let u = random_ur(rng);
    let Formula::Ur(parsed) = parse(&u) else { unreachable!() };
    let rs: Vec<String> = readings(&parsed).iter().map(|r| format!("({r})")).collect();
    let pick = rs[rng.gen_range(0..rs.len())].clone();
    match rng.gen_range(0..8) {
        0 => format!("{u} -> {}", rs.join(" | ")),
        1 => format!("{} -> {u}", rs.join(" & ")),
        2 => format!("{u} & q -> q"),
        3 => format!("{u} & q -> {u}"),
        4 => format!("{u} -> {pick}"),
        5 => format!("{pick} -> {u}"),
        6 => format!("p -> ({u} -> p)"),
        _ => {
            let mut urs = vec![u, random_ur(rng)];
            urs.truncate(rng.gen_range(1..=2));
            random_context(rng, 3, &mut urs)
        }
    }
}

/// The corpus, in a fixed order. Random items are drawn from [`SEED`] and
/// redrawn until they have at most [`MAX_READINGS`] total disambiguations.
pub fn regression_corpus() -> Vec<CorpusItem> {
    let mut out: Vec<CorpusItem> =
        fixed().into_iter().map(|(id, text)| CorpusItem { id, formula: parse(&text) }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut n = 0;
    while n < RANDOM_ITEMS {
        let f = parse(&random_item(&mut rng));
        let k = delta(&f).len();
        if k == 0 || k > MAX_READINGS {
            continue;
        }
        out.push(CorpusItem { id: format!("random-{n:02}"), formula: f });
        n += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn shape_of_the_corpus() {
        let c = regression_corpus();
        assert!(c.len() >= 50);
        let ids: BTreeSet<&str> = c.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids.len(), c.len());
        for item in &c {
            let n = delta(&item.formula).len();
            assert!((1..=MAX_READINGS).contains(&n), "{}: {n}", item.id);
            assert!(item.formula.free_variables().is_empty(), "{}", item.id);
        }
    }

    #[test]
    fn corpus_is_fixed() {
        assert_eq!(regression_corpus(), regression_corpus());
    }
}
