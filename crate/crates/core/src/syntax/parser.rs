//! Recursive-descent parser for formulas, UR blocks and sequents.
//!
//! ```text
//! document := ("let" NAME "=" ur-block ";")* sequent
//! sequent  := [formula ("," formula)*] "|-" formula | formula
//! formula  := or ["->" formula]
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | ("forall" | "exists") VAR "." formula | primary
//! primary  := "(" formula ")" | "#" NAT | ur-block | "@" NAME | atom
//! ur-block := "ur" "{" entry (";" entry)* "}"
//! entry    := LABEL ":" formula | "constraints" "{" node "<=" node (";" ...)* "}"
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::formula::{Atom, Formula, HoleId, LabelId};
use super::term::{is_skolem_name, is_variable_name, Term};
use crate::ur::{Node, SourceSpan, Ur};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Non-fatal diagnostics, such as holes that no formula uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: warning: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub sequent: Sequent,
    pub warnings: Vec<Warning>,
}

/// Parses a single u-formula (a document without premises).
pub fn parse_uformula(text: &str) -> Result<Formula, ParseError> {
    let doc = parse_document(text)?;
    if !doc.sequent.premises.is_empty() {
        return Err(ParseError { line: 1, col: 1, message: "expected a formula, found a sequent".into() });
    }
    Ok(doc.sequent.conclusion)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    parse_document(text).map(|d| d.sequent)
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, in_ur: false, defs: HashMap::new(), warnings: Vec::new(), bound: Vec::new() };
    let sequent = p.document()?;
    Ok(Document { sequent, warnings: p.warnings })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Hash,
    At,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Semi,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Le,
    Turnstile,
    Eq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::Hash => "#",
                    Tok::At => "@",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::Colon => ":",
                    Tok::Semi => ";",
                    Tok::Tilde => "~",
                    Tok::Amp => "&",
                    Tok::Bar => "|",
                    Tok::Arrow => "->",
                    Tok::Le => "<=",
                    Tok::Turnstile => "|-",
                    Tok::Eq => "=",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

pub(crate) fn lex_error(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, col, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            while i < chars.len() && chars[i] == '\'' {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<u32>().map_err(|_| lex_error(tl, tc, format!("number `{s}` out of range")))?;
            out.push(Token { tok: Tok::Nat(n), line: tl, col: tc });
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, n) = match two.as_str() {
            "->" => (Tok::Arrow, 2),
            "<=" => (Tok::Le, 2),
            "|-" => (Tok::Turnstile, 2),
            _ => match c {
                '#' => (Tok::Hash, 1),
                '@' => (Tok::At, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                ':' => (Tok::Colon, 1),
                ';' => (Tok::Semi, 1),
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Bar, 1),
                '=' => (Tok::Eq, 1),
                other => return Err(lex_error(tl, tc, format!("unexpected character `{other}`"))),
            },
        };
        advance(n, &mut i, &mut col);
        out.push(Token { tok, line: tl, col: tc });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    in_ur: bool,
    defs: HashMap<String, Arc<Ur>>,
    warnings: Vec<Warning>,
    bound: Vec<String>,
}

const KEYWORDS: &[&str] = &["forall", "exists", "ur", "constraints", "let"];

fn parse_label(name: &str) -> Option<LabelId> {
    let digits = name.strip_prefix('l')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(LabelId)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected {what}, found {other}")),
        }
    }

    fn document(&mut self) -> Result<Sequent, ParseError> {
        while self.is_keyword("let") {
            self.bump();
            let (line, col) = self.here();
            let name = self.ident("a definition name")?;
            self.expect(Tok::Eq)?;
            if !self.is_keyword("ur") {
                return self.error("expected a `ur { ... }` block");
            }
            let ur = self.ur_block()?;
            self.expect(Tok::Semi)?;
            if self.defs.insert(name.clone(), ur).is_some() {
                return Err(ParseError { line, col, message: format!("`{name}` is defined twice") });
            }
        }
        let sequent = self.sequent()?;
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {} after formula", self.peek()));
        }
        Ok(sequent)
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        if *self.peek() == Tok::Turnstile {
            self.bump();
            let conclusion = self.formula()?;
            return Ok(Sequent { premises: vec![], conclusion });
        }
        let mut list = vec![self.formula()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            list.push(self.formula()?);
        }
        if *self.peek() == Tok::Turnstile {
            self.bump();
            let conclusion = self.formula()?;
            return Ok(Sequent { premises: list, conclusion });
        }
        if list.len() > 1 {
            return self.error("a list of premises must be followed by `|-`");
        }
        Ok(Sequent { premises: vec![], conclusion: list.pop().unwrap() })
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            let universal = self.is_keyword("forall");
            self.bump();
            let v = self.ident("a variable")?;
            if !is_variable_name(&v) {
                return self.error(format!(
                    "`{v}` is not a variable name (use an uppercase initial or one of u..z)"
                ));
            }
            self.expect(Tok::Dot)?;
            self.bound.push(v.clone());
            let body = self.formula();
            self.bound.pop();
            let body = body?;
            return Ok(if universal { Formula::forall(v, body) } else { Formula::exists(v, body) });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Hash => {
                if !self.in_ur {
                    return self.error("holes are only allowed inside ur blocks");
                }
                self.bump();
                match self.bump() {
                    Tok::Nat(n) => Ok(Formula::hole(n)),
                    other => self.error(format!("expected a hole number, found {other}")),
                }
            }
            Tok::At => {
                self.bump();
                let (line, col) = self.here();
                let name = self.ident("a definition name")?;
                match self.defs.get(&name) {
                    Some(ur) => Ok(Formula::Ur(ur.clone())),
                    None => Err(ParseError { line, col, message: format!("undefined UR `@{name}`") }),
                }
            }
            Tok::Ident(s) if s == "ur" => {
                if self.in_ur {
                    return self.error("ur blocks cannot be nested inside ur blocks");
                }
                Ok(Formula::Ur(self.ur_block()?))
            }
            Tok::Ident(_) => self.atom(),
            other => self.error(format!("expected a formula, found {other}")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pred = self.ident("a predicate")?;
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Formula::Atom(Atom { pred, args }))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        let name = self.ident("a term")?;
        if is_skolem_name(&name) {
            let n: u32 = name[2..]
                .parse()
                .map_err(|_| ParseError { line, col, message: "skolem index out of range".into() })?;
            let mut args = Vec::new();
            if *self.peek() == Tok::LParen {
                self.bump();
                args.push(self.term()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
            }
            return Ok(Term::Skolem(n, args));
        }
        if *self.peek() == Tok::LParen {
            return Err(ParseError {
                line,
                col,
                message: format!("function symbol `{name}`: only skolem functions `sk<N>` are supported"),
            });
        }
        if is_variable_name(&name) {
            Ok(Term::Var(name))
        } else {
            Ok(Term::Const(name))
        }
    }

    fn node(&mut self) -> Result<(Node, (usize, usize)), ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Hash => {
                self.bump();
                match self.bump() {
                    Tok::Nat(n) => Ok((Node::Hole(HoleId(n)), at)),
                    other => self.error(format!("expected a hole number, found {other}")),
                }
            }
            Tok::Ident(s) => match parse_label(&s) {
                Some(l) => {
                    self.bump();
                    Ok((Node::Label(l), at))
                }
                None => self.error(format!("expected a label `lN` or hole `#N`, found `{s}`")),
            },
            other => self.error(format!("expected a label or hole, found {other}")),
        }
    }

    fn ur_block(&mut self) -> Result<Arc<Ur>, ParseError> {
        let (line, col) = self.here();
        self.bump(); // `ur`
        self.expect(Tok::LBrace)?;
        self.in_ur = true;
        let outer_bound = std::mem::take(&mut self.bound);
        let result = self.ur_entries();
        self.in_ur = false;
        self.bound = outer_bound;
        let (labels, constraints) = result?;
        let span = SourceSpan::new(line, col);
        let (ur, warnings) = Ur::from_parts(labels, constraints.iter().map(|(a, b, _)| (*a, *b)), span)
            .map_err(|e| ParseError { line, col, message: e.to_string() })?;
        self.warnings.extend(warnings.into_iter().map(|message| Warning { line, col, message }));
        Ok(Arc::new(ur))
    }

    #[allow(clippy::type_complexity)]
    fn ur_entries(
        &mut self,
    ) -> Result<(BTreeMap<LabelId, Formula>, Vec<(Node, Node, (usize, usize))>), ParseError> {
        let mut labels = BTreeMap::new();
        let mut constraints = Vec::new();
        let mut seen_constraints = false;
        loop {
            if *self.peek() == Tok::RBrace {
                self.bump();
                break;
            }
            if self.is_keyword("constraints") {
                if seen_constraints {
                    return self.error("duplicate constraints block");
                }
                seen_constraints = true;
                self.bump();
                self.expect(Tok::LBrace)?;
                while *self.peek() != Tok::RBrace {
                    let (lo, at) = self.node()?;
                    self.expect(Tok::Le)?;
                    let (hi, _) = self.node()?;
                    constraints.push((lo, hi, at));
                    if *self.peek() == Tok::Semi {
                        self.bump();
                    } else if *self.peek() != Tok::RBrace {
                        return self.error(format!("expected `;` or `}}`, found {}", self.peek()));
                    }
                }
                self.bump();
            } else {
                let (line, col) = self.here();
                let name = self.ident("a label")?;
                let Some(label) = parse_label(&name) else {
                    return Err(ParseError { line, col, message: format!("`{name}` is not a label (expected lN)") });
                };
                self.expect(Tok::Colon)?;
                let f = self.formula()?;
                if labels.insert(label, f).is_some() {
                    return Err(ParseError { line, col, message: format!("duplicate label {label}") });
                }
            }
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => {}
                other => return self.error(format!("expected `;` or `}}`, found {other}")),
            }
        }
        for (lo, hi, (line, col)) in &constraints {
            for n in [lo, hi] {
                if let Node::Label(l) = n {
                    if !labels.contains_key(l) {
                        return Err(ParseError {
                            line: *line,
                            col: *col,
                            message: format!("constraint refers to undeclared label {l}"),
                        });
                    }
                }
            }
        }
        Ok((labels, constraints))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const UR6: &str = "ur { l0: #0 ; l1: forall x. (man(x) -> #1) ; l2: exists y. (woman(y) & #2) ; l3: love(x,y) ; constraints { l1 <= #0 ; l2 <= #0 ; l3 <= #1 ; l3 <= #2 } }";

    #[test]
    fn weak_reading_parses() {
        let f = parse_uformula("forall x. (man(x) -> exists y. (woman(y) & love(x,y)))").unwrap();
        let x = Term::var("x");
        let y = Term::var("y");
        let expected = Formula::forall(
            "x",
            Formula::imp(
                Formula::atom("man", vec![x.clone()]),
                Formula::exists("y", Formula::and(Formula::atom("woman", vec![y.clone()]), Formula::atom("love", vec![x, y]))),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn propositional_atom() {
        assert_eq!(parse_uformula("p").unwrap(), Formula::prop("p"));
    }

    #[test]
    fn ur_block_is_a_single_leaf() {
        let f = parse_uformula(UR6).unwrap();
        let Formula::Ur(ur) = &f else { panic!("expected UR leaf, got {f:?}") };
        assert_eq!(ur.labels().len(), 4);
        assert_eq!(ur.top(), HoleId(0));
        assert_eq!(f.to_string(), UR6);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_uformula("p &\n  & q").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        let e = parse_uformula("#1").unwrap_err();
        assert!(e.message.contains("only allowed inside ur"));
        let e = parse_uformula("f(g(x))").unwrap_err();
        assert!(e.message.contains("function symbol"));
    }

    #[test]
    fn duplicate_hole_is_rejected() {
        let e = parse_uformula("ur { l0: #0 ; l1: p & #1 ; l2: q | #1 ; l3: r ; constraints { l1 <= #0 } }").unwrap_err();
        assert!(e.message.contains("#1"), "{e}");
    }

    #[test]
    fn undeclared_label_is_rejected() {
        let e = parse_uformula("ur { l0: #0 ; l1: p ; constraints { l7 <= #0 } }").unwrap_err();
        assert!(e.message.contains("undeclared label l7"), "{e}");
    }

    #[test]
    fn duplicate_label_is_rejected() {
        let e = parse_uformula("ur { l0: #0 ; l0: p }").unwrap_err();
        assert!(e.message.contains("duplicate label"), "{e}");
    }

    #[test]
    fn unused_hole_is_a_warning() {
        let doc = parse_document(
            "ur { l0: #0 ; l1: forall x. (man(x) -> #1) ; l2: exists y. (woman(y) & #2) ; l3: love(x,y) ; constraints { l1 <= #0 ; l2 <= #0 ; l3 <= #1 ; l3 <= #2 ; #3 <= #3 } }",
        )
        .unwrap();
        assert_eq!(doc.warnings.len(), 1, "{:?}", doc.warnings);
        assert!(doc.warnings[0].message.contains("#3"));
    }

    #[test]
    fn sequents_and_definitions() {
        let doc = parse_document(&format!("let A = {UR6};\n@A, p |- @A & q")).unwrap();
        assert_eq!(doc.sequent.premises.len(), 2);
        assert_eq!(doc.sequent.premises[0], doc.sequent.conclusion.children()[0].clone());
        let s = parse_sequent("|- p -> p").unwrap();
        assert!(s.premises.is_empty());
        assert!(parse_sequent("p, q").is_err());
    }

    #[test]
    fn quantifier_needs_variable_name() {
        assert!(parse_uformula("forall john. p(john)").is_err());
        let f = parse_uformula("forall X. p(X, c)").unwrap();
        assert_eq!(f.to_string(), "forall X. p(X,c)");
    }
}
