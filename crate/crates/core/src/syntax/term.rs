use std::fmt;

/// A first-order term.
///
/// Function symbols are reserved for skolem terms introduced by the provers;
/// user input contains only variables and constants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    /// `sk<N>(t1, ..., tn)`.
    Skolem(u32, Vec<Term>),
}

/// Variables are identifiers starting with an uppercase letter, or a single
/// letter `u`..`z` optionally followed by digits. Either form may carry
/// trailing primes.
pub fn is_variable_name(name: &str) -> bool {
    let stem = name.trim_end_matches('\'');
    let mut chars = stem.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        Some(c) if ('u'..='z').contains(&c) => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

/// `sk` followed by at least one digit.
pub fn is_skolem_name(name: &str) -> bool {
    name.strip_prefix("sk")
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Skolem(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Const(_) => false,
            Term::Skolem(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }

    /// Appends variables in first-occurrence order, skipping duplicates.
    pub(crate) fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|o| o == v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Skolem(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub(crate) fn replace_var(&self, name: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == name => by.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Skolem(n, args) => {
                Term::Skolem(*n, args.iter().map(|a| a.replace_var(name, by)).collect())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) | Term::Const(name) => f.write_str(name),
            Term::Skolem(n, args) => {
                write!(f, "sk{n}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_lexemes() {
        for v in ["x", "y", "z1", "y'", "X", "X12", "Who", "u''"] {
            assert!(is_variable_name(v), "{v}");
        }
        for c in ["a", "john", "c", "xa", "sk1", "t", "yoda"] {
            assert!(!is_variable_name(c), "{c}");
        }
    }

    #[test]
    fn skolem_namespace() {
        assert!(is_skolem_name("sk0"));
        assert!(is_skolem_name("sk12"));
        assert!(!is_skolem_name("sk"));
        assert!(!is_skolem_name("skx"));
        assert!(!is_skolem_name("ask1"));
    }

    #[test]
    fn skolem_display() {
        let t = Term::Skolem(3, vec![Term::var("X1"), Term::constant("c")]);
        assert_eq!(t.to_string(), "sk3(X1,c)");
        assert_eq!(Term::Skolem(1, vec![]).to_string(), "sk1");
    }
}
