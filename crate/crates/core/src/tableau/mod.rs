//! Signed free-variable tableaux for plain, totally disambiguated and
//! partially disambiguated reasoning. One engine serves all three calculi;
//! the [`Calculus`] decides which rule groups are available.

mod engine;
mod export;
pub mod tcup;
pub mod unify;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Formula, HoleId, Term};
use crate::ur::{SourceSpan, Ur, UrError};

pub use engine::prove_roots;
pub use tcup::{
    con_neg, daughters, hole_polarity, is_definite, is_special, negation_resolve, polarity, positive_in_all,
    special_shape, DefinitenessReport, Polarity, ResolveError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    T,
    F,
    Tu,
    Fu,
}

impl Sign {
    /// True for `T` and `T_u`.
    pub fn is_true(self) -> bool {
        matches!(self, Sign::T | Sign::Tu)
    }

    pub fn classical(self) -> Sign {
        if self.is_true() {
            Sign::T
        } else {
            Sign::F
        }
    }

    pub fn underspecified(self) -> Sign {
        if self.is_true() {
            Sign::Tu
        } else {
            Sign::Fu
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::T => "T",
            Sign::F => "F",
            Sign::Tu => "T_u",
            Sign::Fu => "F_u",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Calculus {
    /// Classical first-order tableaux.
    Tc,
    /// UR leaves are split into their total disambiguations.
    Tcu,
    /// Reasoning inside URs with partial disambiguation.
    Tcup,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Calculus::Tc => "tc",
            Calculus::Tcu => "tcu",
            Calculus::Tcup => "tcup",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Instances each universal-type formula may produce on one branch.
    pub gamma_multiplicity: usize,
    /// Maximum number of nodes on one branch.
    pub max_depth: usize,
    /// Maximum number of nodes in the whole tableau.
    pub max_nodes: usize,
    /// Backtracking steps allowed when searching a closing unifier.
    pub max_unify_steps: usize,
    /// Maximum number of disambiguation choices checked for closure.
    pub max_projections: usize,
}

impl SearchLimits {
    pub fn with_gamma(gamma_multiplicity: usize) -> SearchLimits {
        SearchLimits { gamma_multiplicity, ..SearchLimits::default() }
    }
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            gamma_multiplicity: 3,
            max_depth: 200,
            max_nodes: 20_000,
            max_unify_steps: 200_000,
            max_projections: 4096,
        }
    }
}

/// What a tableau node asserts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Content {
    /// A formula; each hole it contains stands for the sub-UR in `env`.
    Formula { formula: Formula, env: BTreeMap<HoleId, Arc<Ur>> },
    /// Reasoning inside a UR, starting at its top hole.
    Focus(Arc<Ur>),
}

impl Content {
    pub fn formula(f: Formula) -> Content {
        Content::Formula { formula: f, env: BTreeMap::new() }
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Content::Formula { formula, .. } => write!(f, "{formula}"),
            Content::Focus(u) => write!(f, "{}", u.top()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub sign: Sign,
    pub content: Content,
    /// Rule that produced the node; `None` for the initial nodes.
    pub rule: Option<String>,
    /// Node the rule was applied to.
    pub premise: Option<usize>,
    /// Which alternative of a disambiguating split the node starts.
    pub disambiguation: Option<usize>,
}

impl TableauNode {
    /// The UR state this node carries, printed.
    pub fn ur_state(&self) -> Option<String> {
        match &self.content {
            Content::Focus(u) => Some(u.to_string()),
            Content::Formula { env, .. } if !env.is_empty() => {
                Some(env.iter().map(|(h, u)| format!("{h} = {u}")).collect::<Vec<_>>().join(" ; "))
            }
            _ => None,
        }
    }
}

/// One rule application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub rule: String,
    pub premise: usize,
    /// Node ids added, one list per branch.
    pub children: Vec<Vec<usize>>,
}

/// How one choice of disambiguations was closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionClosure {
    /// Per leaf: the leaf and the `T`/`F` nodes closing it, either
    /// complementary atoms or one compound formula with both signs.
    pub leaves: Vec<(usize, usize, usize)>,
    pub unifier: BTreeMap<String, Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    pub calculus: Calculus,
    pub nodes: Vec<TableauNode>,
    pub applications: Vec<Application>,
    /// Filled in for proved tableaux.
    pub closures: Vec<ProjectionClosure>,
    /// γ-multiplicity the tableau was built with.
    pub multiplicity: usize,
}

impl Tableau {
    pub fn children(&self, id: usize) -> Vec<usize> {
        self.nodes.iter().filter(|n| n.parent == Some(id)).map(|n| n.id).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.nodes.len()];
        for n in &self.nodes {
            if let Some(p) = n.parent {
                has_child[p] = true;
            }
        }
        (0..self.nodes.len()).filter(|&i| !has_child[i]).collect()
    }

    /// Nodes from the root down to `id`.
    pub fn path(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Number of applications of rules whose name ends with `suffix`.
    pub fn count_rule(&self, suffix: &str) -> usize {
        self.applications.iter().filter(|a| a.rule.ends_with(suffix)).count()
    }

    /// Applications of the total-disambiguation rules.
    pub fn total_disambiguations(&self) -> usize {
        self.applications.iter().filter(|a| a.rule == "T_u:UR" || a.rule == "F_u:UR").count()
    }

    pub fn to_text(&self) -> String {
        export::text(self)
    }

    pub fn to_ndjson(&self) -> String {
        export::ndjson(self)
    }

    pub fn to_dot(&self) -> String {
        export::dot(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofResult {
    Proved(Tableau),
    NotProved { tableau: Tableau, limit_reached: bool },
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofResult::Proved(_))
    }

    pub fn tableau(&self) -> &Tableau {
        match self {
            ProofResult::Proved(t) | ProofResult::NotProved { tableau: t, .. } => t,
        }
    }

    pub fn limit_reached(&self) -> bool {
        matches!(self, ProofResult::NotProved { limit_reached: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("URs require tcu/tcup")]
    UrInClassical,
    #[error("hole outside a UR")]
    HoleOutsideUr,
    #[error("UR at {span} has no disambiguation: {ur}")]
    EmptyDisambiguation { span: SourceSpan, ur: String },
    #[error(transparent)]
    Ur(#[from] UrError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

fn closure(f: &Formula) -> Formula {
    f.free_variables().into_iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc))
}

/// Proves `premises ⊢ conclusion` in `calculus`. Free variables are read
/// universally.
pub fn prove(
    calculus: Calculus,
    premises: &[Formula],
    conclusion: &Formula,
    limits: SearchLimits,
) -> Result<ProofResult, ProveError> {
    let mut roots: Vec<(bool, Formula)> = premises.iter().map(|p| (true, closure(p))).collect();
    roots.push((false, closure(conclusion)));
    prove_roots(calculus, &roots, limits)
}

pub fn prove_tc(phi: &Formula, limits: SearchLimits) -> Result<ProofResult, ProveError> {
    prove(Calculus::Tc, &[], phi, limits)
}

pub fn prove_tc_sequent(premises: &[Formula], conclusion: &Formula, limits: SearchLimits) -> Result<ProofResult, ProveError> {
    prove(Calculus::Tc, premises, conclusion, limits)
}

pub fn prove_tcu(phi: &Formula, limits: SearchLimits) -> Result<ProofResult, ProveError> {
    prove(Calculus::Tcu, &[], phi, limits)
}

pub fn prove_tcu_sequent(premises: &[Formula], conclusion: &Formula, limits: SearchLimits) -> Result<ProofResult, ProveError> {
    prove(Calculus::Tcu, premises, conclusion, limits)
}

pub fn prove_tcup(phi: &Formula, limits: SearchLimits) -> Result<ProofResult, ProveError> {
    prove(Calculus::Tcup, &[], phi, limits)
}

pub fn prove_tcup_sequent(
    premises: &[Formula],
    conclusion: &Formula,
    limits: SearchLimits,
) -> Result<ProofResult, ProveError> {
    prove(Calculus::Tcup, premises, conclusion, limits)
}
