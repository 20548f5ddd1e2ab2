//! ASCII printer. Output re-parses to the same AST.

use std::fmt::{self, Write};

use super::formula::{Atom, Formula};

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_char('(')?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write!(f, "{a}")?;
            }
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, 0, true)
    }
}

/// `tail` is true when nothing follows this subformula inside its enclosing
/// parenthesis group, so a quantifier body may extend to the right.
fn write_formula(
    phi: &Formula,
    f: &mut fmt::Formatter<'_>,
    min_prec: u8,
    tail: bool,
) -> fmt::Result {
    match phi {
        Formula::Atom(a) => write!(f, "{a}"),
        Formula::Hole(h) => write!(f, "{h}"),
        Formula::Ur(u) => write!(f, "{u}"),
        Formula::Not(a) => {
            f.write_char('~')?;
            write_formula(a, f, UNARY, tail)
        }
        Formula::And(a, b) => write_binary(f, a, b, " & ", AND, AND, AND + 1, min_prec, tail),
        Formula::Or(a, b) => write_binary(f, a, b, " | ", OR, OR, OR + 1, min_prec, tail),
        Formula::Imp(a, b) => write_binary(f, a, b, " -> ", IMP, IMP + 1, IMP, min_prec, tail),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let kw = if matches!(phi, Formula::Forall(..)) { "forall" } else { "exists" };
            let paren = !tail;
            if paren {
                f.write_char('(')?;
            }
            write!(f, "{kw} {v}. ")?;
            if matches!(**body, Formula::And(..) | Formula::Or(..) | Formula::Imp(..)) {
                f.write_char('(')?;
                write_formula(body, f, 0, true)?;
                f.write_char(')')?;
            } else {
                write_formula(body, f, 0, true)?;
            }
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn write_binary(
    f: &mut fmt::Formatter<'_>,
    a: &Formula,
    b: &Formula,
    op: &str,
    prec: u8,
    left_min: u8,
    right_min: u8,
    min_prec: u8,
    tail: bool,
) -> fmt::Result {
    let paren = prec < min_prec;
    let inner_tail = paren || tail;
    if paren {
        f.write_char('(')?;
    }
    write_operand(a, f, left_min, false)?;
    f.write_str(op)?;
    write_operand(b, f, right_min, inner_tail)?;
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

fn write_operand(phi: &Formula, f: &mut fmt::Formatter<'_>, min_prec: u8, tail: bool) -> fmt::Result {
    write_formula(phi, f, min_prec, tail)
}

#[cfg(test)]
mod tests {
    use crate::syntax::{Formula as F, Term};

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn weak_reading_layout() {
        let f = F::forall(
            "x",
            F::imp(
                F::atom("man", vec![x()]),
                F::exists(
                    "y",
                    F::and(F::atom("woman", vec![Term::var("y")]), F::atom("love", vec![x(), Term::var("y")])),
                ),
            ),
        );
        assert_eq!(f.to_string(), "forall x. (man(x) -> exists y. (woman(y) & love(x,y)))");
    }

    #[test]
    fn quantifier_in_left_operand_is_parenthesized() {
        let f = F::and(F::forall("x", F::atom("p", vec![x()])), F::prop("q"));
        assert_eq!(f.to_string(), "(forall x. p(x)) & q");
        let g = F::and(F::not(F::forall("x", F::atom("p", vec![x()]))), F::prop("q"));
        assert_eq!(g.to_string(), "~(forall x. p(x)) & q");
    }

    #[test]
    fn associativity() {
        let (p, q, r) = (F::prop("p"), F::prop("q"), F::prop("r"));
        assert_eq!(F::imp(p.clone(), F::imp(q.clone(), r.clone())).to_string(), "p -> q -> r");
        assert_eq!(F::imp(F::imp(p.clone(), q.clone()), r.clone()).to_string(), "(p -> q) -> r");
        assert_eq!(F::and(p.clone(), F::and(q.clone(), r.clone())).to_string(), "p & (q & r)");
        assert_eq!(F::or(F::and(p.clone(), q.clone()), r.clone()).to_string(), "p & q | r");
        assert_eq!(F::not(F::or(p, q)).to_string(), "~(p | q)");
    }
}
