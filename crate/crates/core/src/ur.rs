//! Underspecified representations: labeled h-formulas under a partial scope
//! order, their instantiations, and total disambiguation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::syntax::{Formula, HoleId, LabelId};

/// An element of `L ∪ H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Label(LabelId),
    Hole(HoleId),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Label(l) => write!(f, "{l}"),
            Node::Hole(h) => write!(f, "{h}"),
        }
    }
}

impl From<LabelId> for Node {
    fn from(l: LabelId) -> Node {
        Node::Label(l)
    }
}

impl From<HoleId> for Node {
    fn from(h: HoleId) -> Node {
        Node::Hole(h)
    }
}

/// Where a UR block appeared in the source. Ignored by equality and hashing.
#[derive(Clone, Copy, Debug, Default)]
pub struct SourceSpan(pub Option<(usize, usize)>);

impl SourceSpan {
    pub fn new(line: usize, col: usize) -> SourceSpan {
        SourceSpan(Some((line, col)))
    }
}

impl PartialEq for SourceSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SourceSpan {}

impl Hash for SourceSpan {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some((l, c)) => write!(f, "{l}:{c}"),
            None => f.write_str("<generated>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrError {
    #[error("constraints force {0} <= {1} <= {0}")]
    Cycle(Node, Node),
    #[error("hole {0} occurs more than once")]
    DuplicateHole(HoleId),
    #[error("no top hole: every hole occurs inside a label")]
    NoTop,
    #[error("cannot determine a unique top hole among {0:?}")]
    AmbiguousTop(Vec<HoleId>),
    #[error("label {0} is a bare hole but does not hold the top hole")]
    BareLabelNotTop(LabelId),
    #[error("variable `{0}` is bound by more than one label")]
    DuplicateBinder(String),
    #[error("label {0} contains a nested UR")]
    NestedUr(LabelId),
    #[error("constraint mentions unknown element {0}")]
    UnknownNode(Node),
}

/// A reflexive, transitive, antisymmetric relation over a finite universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Order {
    /// For each element, every element above or equal to it.
    up: BTreeMap<Node, BTreeSet<Node>>,
}

/// Closes `pairs` (each `(k, k')` meaning `k <= k'`) under reflexivity and
/// transitivity over `universe` and checks antisymmetry.
pub fn close_constraints(
    universe: &BTreeSet<Node>,
    pairs: impl IntoIterator<Item = (Node, Node)>,
) -> Result<Order, UrError> {
    let mut direct: BTreeMap<Node, BTreeSet<Node>> = universe.iter().map(|n| (*n, BTreeSet::new())).collect();
    for (lo, hi) in pairs {
        for n in [lo, hi] {
            if !universe.contains(&n) {
                return Err(UrError::UnknownNode(n));
            }
        }
        direct.get_mut(&lo).unwrap().insert(hi);
    }
    let mut up = BTreeMap::new();
    for &start in universe {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            for &m in &direct[&n] {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        up.insert(start, seen);
    }
    for (&a, above) in &up {
        for &b in above {
            if a != b && up[&b].contains(&a) {
                return Err(UrError::Cycle(a.min(b), a.max(b)));
            }
        }
    }
    Ok(Order { up })
}

impl Order {
    pub fn leq(&self, a: Node, b: Node) -> bool {
        a == b || self.up.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn universe(&self) -> impl Iterator<Item = Node> + '_ {
        self.up.keys().copied()
    }

    /// All pairs `(k, k')` with `k <= k'`, reflexive ones included.
    pub fn pairs(&self) -> Vec<(Node, Node)> {
        self.up.iter().flat_map(|(&a, s)| s.iter().map(move |&b| (a, b))).collect()
    }

    pub fn lower_bounds(&self, k: Node) -> Vec<Node> {
        self.up.iter().filter(|(_, s)| s.contains(&k)).map(|(&n, _)| n).collect()
    }

    /// The greatest common lower bound of `a` and `b`, if it exists and is
    /// unique.
    pub fn join(&self, a: Node, b: Node) -> Option<Node> {
        let common: Vec<Node> = self
            .up
            .iter()
            .filter(|(_, s)| s.contains(&a) && s.contains(&b))
            .map(|(&n, _)| n)
            .collect();
        let maximal: Vec<Node> = common
            .iter()
            .copied()
            .filter(|&n| !common.iter().any(|&m| m != n && self.leq(n, m)))
            .collect();
        match maximal.as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }
}

/// `⟨LHF, L, H, C⟩` together with its top hole.
#[derive(Clone, Debug)]
pub struct Ur {
    labels: BTreeMap<LabelId, Formula>,
    holes: BTreeSet<HoleId>,
    top: HoleId,
    declared: BTreeSet<(Node, Node)>,
    order: Order,
    span: SourceSpan,
}

impl PartialEq for Ur {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.top == other.top && self.declared == other.declared
    }
}

impl Eq for Ur {}

impl Hash for Ur {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.labels.hash(state);
        self.top.hash(state);
        self.declared.hash(state);
    }
}

/// An assignment of labels to holes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instantiation {
    pub assignment: BTreeMap<HoleId, LabelId>,
}

impl Instantiation {
    /// The induced substitution: each hole maps to its label's h-formula.
    pub fn sigma(&self, ur: &Ur) -> BTreeMap<HoleId, Formula> {
        self.assignment.iter().map(|(h, l)| (*h, ur.labels[l].clone())).collect()
    }

    pub fn label_at(&self, h: HoleId) -> Option<LabelId> {
        self.assignment.get(&h).copied()
    }
}

impl fmt::Display for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (h, l)) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h} := {l}")?;
        }
        f.write_str("}")
    }
}

fn is_bare_hole(f: &Formula) -> bool {
    matches!(f, Formula::Hole(_))
}

fn binders(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            out.push(v.clone());
            binders(b, out);
        }
        _ => f.children().into_iter().for_each(|c| binders(c, out)),
    }
}

impl Ur {
    /// Builds a UR from its labeled h-formulas and declared constraints,
    /// inferring the hole set and the top hole. Returns warnings for holes
    /// that occur only in constraints and are not the top hole; those holes
    /// and their constraints are dropped.
    pub fn from_parts(
        labels: BTreeMap<LabelId, Formula>,
        constraints: impl IntoIterator<Item = (Node, Node)>,
        span: SourceSpan,
    ) -> Result<(Ur, Vec<String>), UrError> {
        let constraints: Vec<(Node, Node)> = constraints.into_iter().collect();
        let in_formulas = Self::check_labels(&labels)?;
        let mut holes: BTreeSet<HoleId> = in_formulas.keys().copied().collect();
        for (a, b) in &constraints {
            for n in [a, b] {
                match n {
                    Node::Hole(h) => {
                        holes.insert(*h);
                    }
                    Node::Label(l) if !labels.contains_key(l) => return Err(UrError::UnknownNode(*n)),
                    Node::Label(_) => {}
                }
            }
        }
        let inside_pluggable =
            |h: &HoleId| in_formulas.get(h).is_some_and(|l| !is_bare_hole(&labels[l]));
        let candidates: Vec<HoleId> = holes.iter().copied().filter(|h| !inside_pluggable(h)).collect();
        let mut warnings = Vec::new();
        let top = match candidates.as_slice() {
            [] => return Err(UrError::NoTop),
            [only] => *only,
            _ => {
                let order = Self::close(&labels, &holes, &constraints)?;
                let pluggable: Vec<LabelId> =
                    labels.iter().filter(|(_, f)| !is_bare_hole(f)).map(|(l, _)| *l).collect();
                let dominating: Vec<HoleId> = candidates
                    .iter()
                    .copied()
                    .filter(|h| pluggable.iter().all(|l| order.leq(Node::Label(*l), Node::Hole(*h))))
                    .collect();
                let in_bare: Vec<HoleId> =
                    candidates.iter().copied().filter(|h| in_formulas.contains_key(h)).collect();
                let top = match (dominating.as_slice(), in_bare.as_slice()) {
                    ([only], _) => *only,
                    (_, [only]) => *only,
                    _ => return Err(UrError::AmbiguousTop(candidates.clone())),
                };
                for &h in &candidates {
                    if h == top {
                        continue;
                    }
                    if in_formulas.contains_key(&h) {
                        return Err(UrError::BareLabelNotTop(in_formulas[&h]));
                    }
                    warnings.push(format!("hole {h} occurs in no h-formula and is ignored"));
                    holes.remove(&h);
                }
                top
            }
        };
        let constraints: Vec<(Node, Node)> = constraints
            .into_iter()
            .filter(|(a, b)| [a, b].iter().all(|n| !matches!(n, Node::Hole(h) if !holes.contains(h))))
            .collect();
        let ur = Ur::with_top(labels, constraints, top, span)?;
        Ok((ur, warnings))
    }

    /// Builds a UR with an explicitly chosen top hole.
    pub fn with_top(
        labels: BTreeMap<LabelId, Formula>,
        constraints: impl IntoIterator<Item = (Node, Node)>,
        top: HoleId,
        span: SourceSpan,
    ) -> Result<Ur, UrError> {
        let in_formulas = Self::check_labels(&labels)?;
        for (h, l) in &in_formulas {
            if is_bare_hole(&labels[l]) && *h != top {
                return Err(UrError::BareLabelNotTop(*l));
            }
        }
        let declared: BTreeSet<(Node, Node)> = constraints.into_iter().collect();
        let mut holes: BTreeSet<HoleId> = in_formulas.keys().copied().collect();
        holes.insert(top);
        for (a, b) in &declared {
            for n in [a, b] {
                match n {
                    Node::Hole(h) if !holes.contains(h) => return Err(UrError::UnknownNode(*n)),
                    Node::Label(l) if !labels.contains_key(l) => return Err(UrError::UnknownNode(*n)),
                    _ => {}
                }
            }
        }
        let order = Self::close(&labels, &holes, &declared.iter().copied().collect::<Vec<_>>())?;
        Ok(Ur { labels, holes, top, declared, order, span })
    }

    /// Checks hole uniqueness, binder uniqueness and absence of nested URs.
    /// Returns the label containing each hole.
    fn check_labels(labels: &BTreeMap<LabelId, Formula>) -> Result<BTreeMap<HoleId, LabelId>, UrError> {
        let mut in_formulas = BTreeMap::new();
        let mut all_binders = Vec::new();
        for (l, f) in labels {
            if !f.is_ur_free() {
                return Err(UrError::NestedUr(*l));
            }
            for h in f.holes() {
                if in_formulas.insert(h, *l).is_some() {
                    return Err(UrError::DuplicateHole(h));
                }
            }
            let mut bs = Vec::new();
            binders(f, &mut bs);
            for b in bs {
                if all_binders.contains(&b) {
                    return Err(UrError::DuplicateBinder(b));
                }
                all_binders.push(b);
            }
        }
        Ok(in_formulas)
    }

    fn close(
        labels: &BTreeMap<LabelId, Formula>,
        holes: &BTreeSet<HoleId>,
        declared: &[(Node, Node)],
    ) -> Result<Order, UrError> {
        let universe: BTreeSet<Node> = labels
            .keys()
            .map(|l| Node::Label(*l))
            .chain(holes.iter().map(|h| Node::Hole(*h)))
            .collect();
        let structural = labels
            .iter()
            .flat_map(|(l, f)| f.holes().into_iter().map(move |h| (Node::Hole(h), Node::Label(*l))));
        close_constraints(&universe, declared.iter().copied().chain(structural))
    }

    pub fn labels(&self) -> &BTreeMap<LabelId, Formula> {
        &self.labels
    }

    pub fn formula(&self, l: LabelId) -> Option<&Formula> {
        self.labels.get(&l)
    }

    pub fn holes(&self) -> &BTreeSet<HoleId> {
        &self.holes
    }

    pub fn top(&self) -> HoleId {
        self.top
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn declared(&self) -> &BTreeSet<(Node, Node)> {
        &self.declared
    }

    pub fn span(&self) -> SourceSpan {
        self.span
    }

    pub fn leq(&self, a: impl Into<Node>, b: impl Into<Node>) -> bool {
        self.order.leq(a.into(), b.into())
    }

    /// Labels whose h-formula is not a bare hole: the ones instantiations
    /// assign to holes.
    pub fn pluggable_labels(&self) -> Vec<LabelId> {
        self.labels.iter().filter(|(_, f)| !is_bare_hole(f)).map(|(l, _)| *l).collect()
    }

    /// The label whose h-formula contains `h`.
    pub fn owner(&self, h: HoleId) -> Option<LabelId> {
        self.labels.iter().find(|(_, f)| f.holes().contains(&h)).map(|(l, _)| *l)
    }

    /// True if some label quantifies over `var`.
    pub fn binds(&self, var: &str) -> bool {
        self.labels.values().any(|f| {
            let mut bs = Vec::new();
            binders(f, &mut bs);
            bs.iter().any(|b| b == var)
        })
    }

    /// Variables of the labels not bound by any label.
    pub fn free_variables(&self) -> Vec<String> {
        let mut all = Vec::new();
        for f in self.labels.values() {
            f.collect_free(&mut Vec::new(), &mut all);
        }
        let mut bound = Vec::new();
        self.labels.values().for_each(|f| binders(f, &mut bound));
        all.retain(|v| !bound.contains(v));
        all
    }

    /// Rewrites every label formula. `f` must preserve holes and binders.
    pub fn map_labels(&self, f: impl Fn(&Formula) -> Formula) -> Ur {
        let labels = self.labels.iter().map(|(l, phi)| (*l, f(phi))).collect();
        Ur { labels, ..self.clone() }
    }

    /// Adds constraints and re-closes.
    pub fn refine(&self, extra: impl IntoIterator<Item = (Node, Node)>) -> Result<Ur, UrError> {
        let declared: BTreeSet<(Node, Node)> = self.declared.iter().copied().chain(extra).collect();
        Ur::with_top(self.labels.clone(), declared, self.top, self.span)
    }

    /// The sub-UR made of `keep` below the hole `top`, with the closed
    /// constraints restricted to the retained elements.
    pub fn restrict(&self, keep: &BTreeSet<LabelId>, top: HoleId) -> Result<Ur, UrError> {
        let labels: BTreeMap<LabelId, Formula> =
            self.labels.iter().filter(|(l, _)| keep.contains(l)).map(|(l, f)| (*l, f.clone())).collect();
        let mut holes: BTreeSet<HoleId> = labels.values().flat_map(|f| f.holes()).collect();
        holes.insert(top);
        let retained = |n: &Node| match n {
            Node::Label(l) => keep.contains(l),
            Node::Hole(h) => holes.contains(h),
        };
        let structural = |a: &Node, b: &Node| match (a, b) {
            (Node::Hole(h), Node::Label(l)) => labels.get(l).is_some_and(|f| f.holes().contains(h)),
            _ => false,
        };
        let declared: Vec<(Node, Node)> = self
            .order
            .pairs()
            .into_iter()
            .filter(|(a, b)| a != b && retained(a) && retained(b) && !structural(a, b))
            .collect();
        Ur::with_top(labels, declared, top, self.span)
    }

    fn tree_parents(&self, inst: &Instantiation) -> BTreeMap<Node, Node> {
        let mut parent = BTreeMap::new();
        for (l, f) in &self.labels {
            for h in f.holes() {
                parent.insert(Node::Hole(h), Node::Label(*l));
            }
        }
        for (h, l) in &inst.assignment {
            parent.insert(Node::Label(*l), Node::Hole(*h));
        }
        parent
    }

    /// Ancestor-or-self sets in the plugged tree, or `None` if the plugging
    /// has a cycle or leaves something unreachable from the top hole.
    pub fn plugged_ancestors(&self, inst: &Instantiation) -> Option<BTreeMap<Node, BTreeSet<Node>>> {
        let parent = self.tree_parents(inst);
        let universe: Vec<Node> = self.order.universe().collect();
        let limit = universe.len() + 1;
        let root_ok = |n: Node| {
            n == Node::Hole(self.top)
                || matches!(n, Node::Label(l) if self.labels.get(&l).is_some_and(|f| f.holes() == [self.top] && is_bare_hole(f)))
        };
        let mut out = BTreeMap::new();
        for &n in &universe {
            let mut chain = BTreeSet::from([n]);
            let mut cur = n;
            let mut steps = 0;
            while let Some(&p) = parent.get(&cur) {
                steps += 1;
                if steps > limit || !chain.insert(p) {
                    return None;
                }
                cur = p;
            }
            if !root_ok(cur) {
                return None;
            }
            out.insert(n, chain);
        }
        Some(out)
    }

    /// All instantiations: bijections from holes to pluggable labels whose
    /// plugging is acyclic, satisfies every constraint, and orders every
    /// pair of labels that has a join. Enumerated lexicographically by hole
    /// id, then label id.
    pub fn instantiations(&self) -> Vec<Instantiation> {
        let holes: Vec<HoleId> = self.holes.iter().copied().collect();
        let labels = self.pluggable_labels();
        if holes.len() != labels.len() {
            return Vec::new();
        }
        let label_pairs_with_join: Vec<(LabelId, LabelId)> = {
            let all: Vec<LabelId> = self.labels.keys().copied().collect();
            let mut v = Vec::new();
            for (i, a) in all.iter().enumerate() {
                for b in &all[i + 1..] {
                    if self.order.join(Node::Label(*a), Node::Label(*b)).is_some() {
                        v.push((*a, *b));
                    }
                }
            }
            v
        };
        let owner: BTreeMap<HoleId, LabelId> = self
            .labels
            .iter()
            .flat_map(|(l, f)| f.holes().into_iter().map(move |h| (h, *l)))
            .collect();
        let mut out = Vec::new();
        let mut current = BTreeMap::new();
        let mut used = BTreeSet::new();
        self.search(&holes, 0, &labels, &owner, &mut current, &mut used, &label_pairs_with_join, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        holes: &[HoleId],
        idx: usize,
        labels: &[LabelId],
        owner: &BTreeMap<HoleId, LabelId>,
        current: &mut BTreeMap<HoleId, LabelId>,
        used: &mut BTreeSet<LabelId>,
        joined: &[(LabelId, LabelId)],
        out: &mut Vec<Instantiation>,
    ) {
        if idx == holes.len() {
            let inst = Instantiation { assignment: current.clone() };
            if self.admissible(&inst, joined) {
                out.push(inst);
            }
            return;
        }
        let h = holes[idx];
        for &l in labels {
            if used.contains(&l) || owner.get(&h) == Some(&l) {
                continue;
            }
            // k <= k' is only satisfiable if the label is not forced above the hole.
            if self.order.leq(Node::Hole(h), Node::Label(l)) {
                continue;
            }
            current.insert(h, l);
            used.insert(l);
            self.search(holes, idx + 1, labels, owner, current, used, joined, out);
            used.remove(&l);
            current.remove(&h);
        }
    }

    fn admissible(&self, inst: &Instantiation, joined: &[(LabelId, LabelId)]) -> bool {
        let Some(anc) = self.plugged_ancestors(inst) else {
            return false;
        };
        let satisfied = self.order.pairs().into_iter().all(|(a, b)| a == b || anc[&a].contains(&b));
        if !satisfied {
            return false;
        }
        // closure(Cτ): constraints with each hole replaced by its label.
        let rename = |n: Node| match n {
            Node::Hole(h) => inst.assignment.get(&h).copied().map(Node::Label).unwrap_or(n),
            other => other,
        };
        let mut up: BTreeMap<Node, BTreeSet<Node>> = BTreeMap::new();
        for (a, b) in self.order.pairs() {
            up.entry(rename(a)).or_default().insert(rename(b));
        }
        let reach = |from: Node, to: Node| {
            let mut seen = BTreeSet::from([from]);
            let mut stack = vec![from];
            while let Some(n) = stack.pop() {
                if n == to {
                    return true;
                }
                for &m in up.get(&n).into_iter().flatten() {
                    if seen.insert(m) {
                        stack.push(m);
                    }
                }
            }
            false
        };
        joined.iter().all(|&(a, b)| {
            let (a, b) = (Node::Label(a), Node::Label(b));
            reach(a, b) || reach(b, a)
        })
    }

    /// Applies `σ(τ)` from the top hole until no hole is left.
    pub fn plug(&self, inst: &Instantiation) -> Formula {
        self.plug_from(&Formula::Hole(self.top), inst)
    }

    fn plug_from(&self, f: &Formula, inst: &Instantiation) -> Formula {
        match f {
            Formula::Hole(h) => match inst.assignment.get(h) {
                Some(l) => self.plug_from(&self.labels[l], inst),
                None => f.clone(),
            },
            Formula::Atom(_) | Formula::Ur(_) => f.clone(),
            Formula::Not(a) => Formula::not(self.plug_from(a, inst)),
            Formula::And(a, b) => Formula::and(self.plug_from(a, inst), self.plug_from(b, inst)),
            Formula::Or(a, b) => Formula::or(self.plug_from(a, inst), self.plug_from(b, inst)),
            Formula::Imp(a, b) => Formula::imp(self.plug_from(a, inst), self.plug_from(b, inst)),
            Formula::Forall(v, b) => Formula::forall(v.clone(), self.plug_from(b, inst)),
            Formula::Exists(v, b) => Formula::exists(v.clone(), self.plug_from(b, inst)),
        }
    }

    /// The distinct pluggings, sorted by their printed form.
    pub fn readings(&self) -> Vec<Formula> {
        sorted_unique(self.instantiations().iter().map(|i| self.plug(i)).collect())
    }
}

impl fmt::Display for Ur {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ur { ")?;
        for (i, (l, phi)) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{l}: {phi}")?;
        }
        if !self.declared.is_empty() {
            f.write_str(" ; constraints { ")?;
            for (i, (a, b)) in self.declared.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ; ")?;
                }
                write!(f, "{a} <= {b}")?;
            }
            f.write_str(" }")?;
        }
        f.write_str(" }")
    }
}

/// Free function form of [`Order::join`] on a UR's closed constraints.
pub fn join(ur: &Ur, a: impl Into<Node>, b: impl Into<Node>) -> Option<Node> {
    ur.order.join(a.into(), b.into())
}

pub fn instantiations(ur: &Ur) -> Vec<Instantiation> {
    ur.instantiations()
}

pub fn plug(ur: &Ur, inst: &Instantiation) -> Formula {
    ur.plug(inst)
}

pub(crate) fn sorted_unique(mut v: Vec<Formula>) -> Vec<Formula> {
    let mut keyed: Vec<(String, Formula)> = v.drain(..).map(|f| (f.to_string(), f)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, f)| f).collect()
}

/// Total disambiguations of a u-formula: every UR occurrence is resolved
/// independently. Sorted by printed form, duplicates removed.
pub fn delta(phi: &Formula) -> Vec<Formula> {
    sorted_unique(delta_raw(phi))
}

fn delta_raw(phi: &Formula) -> Vec<Formula> {
    fn product(a: Vec<Formula>, b: Vec<Formula>, k: fn(Formula, Formula) -> Formula) -> Vec<Formula> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in &a {
            for y in &b {
                out.push(k(x.clone(), y.clone()));
            }
        }
        out
    }
    match phi {
        Formula::Atom(_) | Formula::Hole(_) => vec![phi.clone()],
        Formula::Ur(u) => u.readings(),
        Formula::Not(a) => delta_raw(a).into_iter().map(Formula::not).collect(),
        Formula::And(a, b) => product(delta_raw(a), delta_raw(b), Formula::and),
        Formula::Or(a, b) => product(delta_raw(a), delta_raw(b), Formula::or),
        Formula::Imp(a, b) => product(delta_raw(a), delta_raw(b), Formula::imp),
        Formula::Forall(v, b) => delta_raw(b).into_iter().map(|d| Formula::forall(v.clone(), d)).collect(),
        Formula::Exists(v, b) => delta_raw(b).into_iter().map(|d| Formula::exists(v.clone(), d)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::parse_uformula;

    fn l(n: u32) -> Node {
        Node::Label(LabelId(n))
    }

    fn h(n: u32) -> Node {
        Node::Hole(HoleId(n))
    }

    #[test]
    fn closure_of_the_every_man_ur() {
        let ur = fixtures::every_man_ur();
        let pairs = ur.order().pairs();
        assert!(pairs.contains(&(l(3), h(0))));
        for n in ur.order().universe() {
            assert!(pairs.contains(&(n, n)));
        }
    }

    #[test]
    fn closure_of_nothing_is_reflexive() {
        let universe = BTreeSet::from([h(0)]);
        let order = close_constraints(&universe, []).unwrap();
        assert_eq!(order.pairs(), vec![(h(0), h(0))]);
    }

    #[test]
    fn closure_rejects_cycles() {
        let universe = BTreeSet::from([l(1), l(2)]);
        let err = close_constraints(&universe, [(l(1), l(2)), (l(2), l(1))]).unwrap_err();
        assert_eq!(err, UrError::Cycle(l(1), l(2)));
    }

    #[test]
    fn closure_is_idempotent() {
        let ur = fixtures::boy_movie_ur();
        let universe: BTreeSet<Node> = ur.order().universe().collect();
        let again = close_constraints(&universe, ur.order().pairs()).unwrap();
        assert_eq!(&again, ur.order());
    }

    #[test]
    fn joins() {
        let ur = fixtures::every_man_ur();
        assert_eq!(join(&ur, h(1), h(2)), Some(l(3)));
        for n in ur.order().universe() {
            assert_eq!(join(&ur, n, n), Some(n));
        }
        let ex5 = fixtures::man_car_bike_ur();
        assert_eq!(join(&ex5, l(3), l(4)), None);
    }

    #[test]
    fn the_two_instantiations() {
        let ur = fixtures::every_man_ur();
        let got: Vec<String> = ur.instantiations().iter().map(|i| i.to_string()).collect();
        assert_eq!(got, vec!["{#0 := l1, #1 := l2, #2 := l3}", "{#0 := l2, #1 := l3, #2 := l1}"]);
    }

    #[test]
    fn plugging_yields_both_readings() {
        let ur = fixtures::every_man_ur();
        let insts = ur.instantiations();
        assert_eq!(ur.plug(&insts[0]), parse_uformula(fixtures::WEAK_READING).unwrap());
        assert_eq!(ur.plug(&insts[1]), parse_uformula(fixtures::STRONG_READING).unwrap());
    }

    #[test]
    fn forced_single_label() {
        let f = parse_uformula("ur { l1: p ; constraints { l1 <= #0 } }").unwrap();
        let Formula::Ur(ur) = f else { unreachable!() };
        let insts = ur.instantiations();
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].to_string(), "{#0 := l1}");
        assert_eq!(ur.plug(&insts[0]), Formula::prop("p"));
    }

    #[test]
    fn sigma_maps_holes_to_label_formulas() {
        let ur = fixtures::every_man_ur();
        let inst = &ur.instantiations()[0];
        let sigma = inst.sigma(&ur);
        assert_eq!(sigma[&HoleId(2)], ur.labels()[&LabelId(3)]);
    }

    #[test]
    fn unsatisfiable_constraints_give_no_readings() {
        let f = parse_uformula("ur { l0: #0 ; l1: ~#1 ; l2: p ; l3: q ; constraints { l1 <= #0 ; l2 <= #1 ; l3 <= #1 } }")
            .unwrap();
        assert!(delta(&f).is_empty());
    }

    #[test]
    fn delta_of_plain_formula() {
        let f = parse_uformula("p -> q").unwrap();
        assert_eq!(delta(&f), vec![f]);
    }

    #[test]
    fn delta_of_the_every_man_ur() {
        let got: Vec<String> = delta(&fixtures::every_man()).iter().map(|f| f.to_string()).collect();
        assert_eq!(got, vec![fixtures::STRONG_READING, fixtures::WEAK_READING]);
    }

    #[test]
    fn occurrences_disambiguate_independently() {
        let a = fixtures::every_man();
        let f = Formula::imp(Formula::and(a.clone(), Formula::prop("B")), a);
        let ds = delta(&f);
        assert_eq!(ds.len(), 4);
        let [d1, d2] = [fixtures::WEAK_READING, fixtures::STRONG_READING].map(|s| parse_uformula(s).unwrap());
        for x in [&d1, &d2] {
            for y in [&d1, &d2] {
                let want = Formula::imp(Formula::and(x.clone(), Formula::prop("B")), y.clone());
                assert!(ds.contains(&want), "{want}");
            }
        }
    }

    #[test]
    fn restrict_keeps_induced_order() {
        let ur = fixtures::boy_movie_ur();
        let keep = BTreeSet::from([LabelId(2), LabelId(3), LabelId(4)]);
        let sub = ur.restrict(&keep, HoleId(1)).unwrap();
        assert_eq!(sub.top(), HoleId(1));
        assert!(sub.leq(LabelId(4), HoleId(1)));
        assert_eq!(sub.readings().len(), 2);
    }
}
