use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A finite first-order structure. Individuals are indices into `domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    pub domain: Vec<String>,
    pub predicates: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ModelError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl FiniteModel {
    /// A model over `names` with every predicate empty.
    pub fn with_domain<S: Into<String>>(names: impl IntoIterator<Item = S>) -> FiniteModel {
        FiniteModel {
            domain: names.into_iter().map(Into::into).collect(),
            predicates: BTreeMap::new(),
            constants: BTreeMap::new(),
        }
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == name)
    }

    /// Adds a tuple given by element names. Panics on unknown names; meant for
    /// building fixtures.
    pub fn insert(&mut self, pred: &str, tuple: &[&str]) {
        let t = tuple.iter().map(|n| self.element(n).unwrap_or_else(|| panic!("unknown element {n}"))).collect();
        self.predicates.entry(pred.to_string()).or_default().insert(t);
    }

    /// Declares a predicate with an empty extension.
    pub fn declare(&mut self, pred: &str) {
        self.predicates.entry(pred.to_string()).or_default();
    }

    /// The individual a constant denotes: its explicit mapping, else the
    /// domain element of the same name.
    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied().or_else(|| self.element(name))
    }

    pub fn holds(&self, pred: &str, tuple: &[usize]) -> Option<bool> {
        self.predicates.get(pred).map(|s| s.contains(tuple))
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model {{ domain = {{{}}}", self.domain.join(", "))?;
        for (p, tuples) in &self.predicates {
            let items: Vec<String> = tuples
                .iter()
                .map(|t| {
                    let names: Vec<&str> = t.iter().map(|&i| self.domain[i].as_str()).collect();
                    if t.len() == 1 {
                        names[0].to_string()
                    } else {
                        format!("({})", names.join(","))
                    }
                })
                .collect();
            write!(f, "; {p} = {{{}}}", items.join(", "))?;
        }
        for (c, i) in &self.constants {
            write!(f, "; {c} = {}", self.domain[*i])?;
        }
        f.write_str(" }")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Sym(char),
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ModelError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '/' {
            chars.next();
            if chars.peek() != Some(&'/') {
                return Err(ModelError { line, col, message: "unexpected `/`".into() });
            }
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), tl, tc));
        } else if "{}(),;=".contains(c) {
            chars.next();
            col += 1;
            out.push((Tok::Sym(c), tl, tc));
        } else {
            return Err(ModelError { line, col, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

enum Value {
    Set(Vec<(Vec<String>, usize, usize)>),
    Name(String, usize, usize),
}

struct P {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ModelError> {
        let (line, col) = self.here();
        Err(ModelError { line, col, message: message.into() })
    }

    fn sym(&mut self, c: char) -> Result<(), ModelError> {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn names_until(&mut self, close: char) -> Result<Vec<String>, ModelError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Sym(close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if *self.peek() == Tok::Sym(',') {
                self.pos += 1;
            } else {
                self.sym(close)?;
                return Ok(out);
            }
        }
    }

    fn value(&mut self) -> Result<Value, ModelError> {
        if *self.peek() != Tok::Sym('{') {
            let (l, c) = self.here();
            return Ok(Value::Name(self.ident()?, l, c));
        }
        self.pos += 1;
        let mut items = Vec::new();
        if *self.peek() == Tok::Sym('}') {
            self.pos += 1;
            return Ok(Value::Set(items));
        }
        loop {
            let (l, c) = self.here();
            if *self.peek() == Tok::Sym('(') {
                self.pos += 1;
                items.push((self.names_until(')')?, l, c));
            } else {
                items.push((vec![self.ident()?], l, c));
            }
            if *self.peek() == Tok::Sym(',') {
                self.pos += 1;
            } else {
                self.sym('}')?;
                return Ok(Value::Set(items));
            }
        }
    }
}

/// Parses `model { domain = {a, b}; man = {a}; love = {(a,b)}; c = a }`.
/// A 0-ary predicate is true when written `p = {()}`.
pub fn parse_model(text: &str) -> Result<FiniteModel, ModelError> {
    let mut p = P { toks: lex(text)?, pos: 0 };
    if p.ident()? != "model" {
        p.pos -= 1;
        return p.err("expected `model`");
    }
    p.sym('{')?;
    let mut entries = Vec::new();
    while *p.peek() != Tok::Sym('}') {
        let (l, c) = p.here();
        let name = p.ident()?;
        p.sym('=')?;
        entries.push((name, p.value()?, l, c));
        if *p.peek() == Tok::Sym(';') {
            p.pos += 1;
        } else if *p.peek() != Tok::Sym('}') {
            return p.err("expected `;` or `}`");
        }
    }
    p.sym('}')?;
    if *p.peek() != Tok::Eof {
        return p.err("trailing input after model");
    }
    let fail = |line, col, message: String| Err(ModelError { line, col, message });
    let mut model: Option<FiniteModel> = None;
    for (name, value, l, c) in &entries {
        if name == "domain" {
            let Value::Set(items) = value else { return fail(*l, *c, "domain must be a set".into()) };
            let mut names = Vec::new();
            for (t, il, ic) in items {
                if t.len() != 1 {
                    return fail(*il, *ic, "domain elements must be names".into());
                }
                if names.contains(&t[0]) {
                    return fail(*il, *ic, format!("duplicate element `{}`", t[0]));
                }
                names.push(t[0].clone());
            }
            if names.is_empty() {
                return fail(*l, *c, "domain must be nonempty".into());
            }
            if model.is_some() {
                return fail(*l, *c, "domain given twice".into());
            }
            model = Some(FiniteModel::with_domain(names));
        }
    }
    let Some(mut model) = model else {
        return fail(1, 1, "missing `domain`".into());
    };
    for (name, value, l, c) in entries {
        if name == "domain" {
            continue;
        }
        if model.predicates.contains_key(&name) || model.constants.contains_key(&name) {
            return fail(l, c, format!("`{name}` defined twice"));
        }
        match value {
            Value::Name(e, el, ec) => match model.element(&e) {
                Some(i) => {
                    model.constants.insert(name, i);
                }
                None => return fail(el, ec, format!("unknown element `{e}`")),
            },
            Value::Set(items) => {
                let mut set = BTreeSet::new();
                let mut arity = None;
                for (t, il, ic) in items {
                    if *arity.get_or_insert(t.len()) != t.len() {
                        return fail(il, ic, format!("tuple arity differs in `{name}`"));
                    }
                    let mut idx = Vec::new();
                    for e in &t {
                        match model.element(e) {
                            Some(i) => idx.push(i),
                            None => return fail(il, ic, format!("unknown element `{e}`")),
                        }
                    }
                    set.insert(idx);
                }
                model.predicates.insert(name, set);
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_format() {
        let m = parse_model("model { domain = {a, b}; man = {a}; woman = {b}; love = {(a,b)} }").unwrap();
        assert_eq!(m.domain, vec!["a", "b"]);
        assert_eq!(m.holds("love", &[0, 1]), Some(true));
        assert_eq!(m.holds("love", &[1, 0]), Some(false));
        assert_eq!(m.holds("man", &[0]), Some(true));
    }

    #[test]
    fn constants_and_propositions() {
        let m = parse_model("model { domain = {a}; c = a; p = {()}; q = {} ; }").unwrap();
        assert_eq!(m.constant("c"), Some(0));
        assert_eq!(m.constant("a"), Some(0));
        assert_eq!(m.holds("p", &[]), Some(true));
        assert_eq!(m.holds("q", &[]), Some(false));
    }

    #[test]
    fn print_then_parse() {
        let text = "model { domain = {a, b}; love = {(a,b), (b,b)}; man = {a}; p = {()}; c = b }";
        let m = parse_model(text).unwrap();
        assert_eq!(m.to_string(), text);
        assert_eq!(parse_model(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_model("model { domain = {a};\n man = {z} }").unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));
        assert!(parse_model("model { man = {a} }").is_err());
        assert!(parse_model("model { domain = {} }").is_err());
        assert!(parse_model("model { domain = {a}; r = {a, (a,a)} }").is_err());
    }
}
