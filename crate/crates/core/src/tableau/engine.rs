use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::tcup::{daughters, is_definite, negation_resolve, ordered_witnesses, positive_in_all, special_shape};
use super::unify::Subst;
use super::{
    Application, Calculus, Content, ProjectionClosure, ProofResult, ProveError, SearchLimits, Sign, Tableau,
    TableauNode,
};
use crate::syntax::{substitute, substitute_in_place_of_var, Atom, Formula, HoleId, LabelId, Term};
use crate::ur::{Node as UrNode, Ur};

#[derive(Clone, Debug)]
enum Action {
    Alpha,
    Beta,
    Delta,
    Gamma,
    UrInterface,
    HoleInterface,
    Up { label: LabelId, env: BTreeMap<HoleId, Arc<Ur>> },
    WideScope { refined: Arc<Ur> },
    Resolve { left: Option<Arc<Ur>>, right: Option<Arc<Ur>> },
    Total { readings: Vec<Formula> },
}

impl Action {
    fn priority(&self) -> u8 {
        match self {
            Action::Alpha | Action::Delta => 0,
            Action::Beta => 1,
            Action::UrInterface | Action::HoleInterface | Action::Up { .. } => 2,
            Action::WideScope { .. } => 3,
            Action::Resolve { .. } => 4,
            Action::Total { .. } => 5,
            Action::Gamma => 6,
        }
    }
}

#[derive(Clone, Debug)]
struct Branch {
    leaf: usize,
    depth: usize,
    pending: BTreeSet<usize>,
    gammas: BTreeMap<usize, usize>,
    atoms: Vec<(bool, Atom, usize)>,
    /// Compound UR-free, hole-free formulas on the branch.
    compound: Vec<(bool, Formula, usize)>,
    /// Disambiguation choices on the path: split occurrence key, alternative.
    choices: Vec<(u32, usize)>,
    closed: Option<(usize, usize)>,
}

struct Search {
    calculus: Calculus,
    limits: SearchLimits,
    multiplicity: usize,
    nodes: Vec<TableauNode>,
    keys: Vec<u32>,
    /// Logical position of each node: production indices from its root,
    /// skipping interface and disambiguation steps. Rules are scheduled in
    /// this order, so a disambiguated branch evolves like the plain tableau
    /// of the corresponding reading.
    paths: Vec<Vec<u32>>,
    interned: HashMap<(u32, u32), u32>,
    applications: Vec<Application>,
    next_var: usize,
    next_skolem: u32,
    reserved: BTreeSet<String>,
    cache: HashMap<usize, Option<Action>>,
    limit_reached: bool,
}

type Children = Vec<(Option<usize>, Vec<(Sign, Content)>)>;

const ROOT_KEY: u32 = u32::MAX;

fn binders(f: &Formula, out: &mut Vec<String>) {
    if let Formula::Forall(v, _) | Formula::Exists(v, _) = f {
        out.push(v.clone());
    }
    f.children().into_iter().for_each(|c| binders(c, out));
}

fn max_skolem(f: &Formula) -> Option<u32> {
    fn term(t: &Term) -> Option<u32> {
        match t {
            Term::Skolem(n, args) => args.iter().filter_map(term).max().max(Some(*n)),
            _ => None,
        }
    }
    match f {
        Formula::Atom(a) => a.args.iter().filter_map(term).max(),
        Formula::Ur(u) => u.labels().values().filter_map(max_skolem).max(),
        _ => f.children().into_iter().filter_map(max_skolem).max(),
    }
}

/// Replaces hole `h` in `f` by `by`.
fn fill(f: &Formula, h: HoleId, by: &Formula) -> Formula {
    match f {
        Formula::Hole(g) if *g == h => by.clone(),
        Formula::Atom(_) | Formula::Hole(_) | Formula::Ur(_) => f.clone(),
        Formula::Not(a) => Formula::not(fill(a, h, by)),
        Formula::And(a, b) => Formula::and(fill(a, h, by), fill(b, h, by)),
        Formula::Or(a, b) => Formula::or(fill(a, h, by), fill(b, h, by)),
        Formula::Imp(a, b) => Formula::imp(fill(a, h, by), fill(b, h, by)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), fill(b, h, by)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), fill(b, h, by)),
    }
}

fn restrict_env(f: &Formula, env: &BTreeMap<HoleId, Arc<Ur>>) -> BTreeMap<HoleId, Arc<Ur>> {
    f.holes().into_iter().filter_map(|h| env.get(&h).map(|u| (h, u.clone()))).collect()
}

/// Sub-URs for the holes of `l` when plugging `l` into the top hole fixes
/// which labels go under which hole. `None` if it does not.
fn split_env(u: &Ur, l: LabelId) -> Option<BTreeMap<HoleId, Arc<Ur>>> {
    let phi = u.formula(l)?;
    let holes = phi.holes();
    let others: Vec<LabelId> = u.pluggable_labels().into_iter().filter(|o| *o != l).collect();
    if holes.is_empty() {
        return others.is_empty().then(BTreeMap::new);
    }
    let mut groups: BTreeMap<HoleId, BTreeSet<LabelId>> = holes.iter().map(|h| (*h, BTreeSet::new())).collect();
    for o in others {
        let under: Vec<HoleId> = holes.iter().copied().filter(|h| u.leq(o, *h)).collect();
        if under.len() != 1 {
            return None;
        }
        groups.get_mut(&under[0]).unwrap().insert(o);
    }
    let mut env = BTreeMap::new();
    for (h, g) in groups {
        env.insert(h, Arc::new(u.restrict(&g, h).ok()?));
    }
    let want: BTreeSet<String> = u
        .instantiations()
        .iter()
        .filter(|i| i.label_at(u.top()) == Some(l))
        .map(|i| u.plug(i).to_string())
        .collect();
    let mut got = vec![phi.clone()];
    for (h, sub) in &env {
        let readings = sub.readings();
        got = got.iter().flat_map(|f| readings.iter().map(move |r| fill(f, *h, r))).collect();
    }
    let got: BTreeSet<String> = got.iter().map(|f| f.to_string()).collect();
    (want == got).then_some(env)
}

/// The restrictor `χ1` of a special formula.
fn restrictor(phi: &Formula) -> Option<&Formula> {
    match phi {
        Formula::Forall(_, b) => match &**b {
            Formula::Imp(a, _) => Some(a),
            _ => None,
        },
        Formula::Exists(_, b) => match &**b {
            Formula::And(a, _) => Some(a),
            _ => None,
        },
        _ => None,
    }
}

/// A daughter of the top hole that may be given widest scope: a special
/// universal under `T_u` (an existential under `F_u`) that is definite,
/// positive in every reading, and whose restrictor mentions no variable
/// bound by another label.
fn wide_scope(u: &Ur, sign: Sign) -> Option<Arc<Ur>> {
    let ds = daughters(u);
    if ds.len() < 2 {
        return None;
    }
    for l in ds {
        let phi = u.formula(l)?;
        let wanted = if sign.is_true() { 1 } else { 3 };
        if special_shape(phi) != Some(wanted) {
            continue;
        }
        let binder = match phi {
            Formula::Forall(v, _) | Formula::Exists(v, _) => v,
            _ => continue,
        };
        let restr_ok = restrictor(phi)
            .is_some_and(|r| r.free_variables().iter().all(|v| v == binder || !u.binds(v)));
        if !restr_ok || !is_definite(u, l).definite || !positive_in_all(u, l) {
            continue;
        }
        let [h] = phi.holes()[..] else { continue };
        let others = u.pluggable_labels().into_iter().filter(|o| *o != l);
        let Ok(refined) = u.refine(others.map(|o| (UrNode::Label(o), UrNode::Hole(h)))) else { continue };
        if refined.instantiations().is_empty() {
            continue;
        }
        return Some(Arc::new(refined));
    }
    None
}

fn resolution(u: &Ur, sign: Sign) -> Option<(Option<Arc<Ur>>, Option<Arc<Ur>>)> {
    let quantifiers: Vec<LabelId> = u
        .labels()
        .iter()
        .filter(|(_, f)| matches!(f, Formula::Forall(..) | Formula::Exists(..)) && !f.holes().is_empty())
        .map(|(l, _)| *l)
        .filter(|l| !is_definite(u, *l).definite)
        .collect();
    let matching = |l: &LabelId| {
        let f = u.formula(*l).unwrap();
        special_shape(f) == Some(if sign.is_true() { 1 } else { 3 })
    };
    let ordered = quantifiers.iter().filter(|l| matching(l)).chain(quantifiers.iter().filter(|l| !matching(l)));
    for &lj in ordered {
        for lm in ordered_witnesses(u, lj) {
            let Ok((left, right)) = negation_resolve(u, lj, lm) else { continue };
            let keep = |s: Option<Ur>| s.filter(|s| !s.instantiations().is_empty()).map(Arc::new);
            let (left, right) = (keep(left), keep(right));
            if left.is_some() || right.is_some() {
                return Some((left, right));
            }
        }
    }
    None
}

impl Search {
    fn new(calculus: Calculus, limits: SearchLimits, multiplicity: usize, roots: &[(bool, Formula)]) -> Search {
        let mut reserved = Vec::new();
        roots.iter().for_each(|(_, f)| f.all_variable_names(&mut reserved));
        let next_skolem = roots.iter().filter_map(|(_, f)| max_skolem(f)).max().map_or(0, |n| n + 1);
        Search {
            calculus,
            limits,
            multiplicity,
            nodes: Vec::new(),
            keys: Vec::new(),
            paths: Vec::new(),
            interned: HashMap::new(),
            applications: Vec::new(),
            next_var: 1,
            next_skolem,
            reserved: reserved.into_iter().collect(),
            cache: HashMap::new(),
            limit_reached: false,
        }
    }

    fn intern(&mut self, parent: u32, j: u32) -> u32 {
        let next = self.interned.len() as u32;
        *self.interned.entry((parent, j)).or_insert(next)
    }

    fn formula_sign(&self, positive: bool, f: &Formula) -> Sign {
        let s = if positive { Sign::T } else { Sign::F };
        if self.calculus == Calculus::Tcu && !f.is_ur_free() {
            s.underspecified()
        } else {
            s
        }
    }

    fn fresh_var(&mut self) -> Term {
        loop {
            let name = format!("X{}", self.next_var);
            self.next_var += 1;
            if !self.reserved.contains(&name) {
                return Term::Var(name);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn append(
        &mut self,
        br: &mut Branch,
        sign: Sign,
        content: Content,
        rule: Option<String>,
        premise: Option<usize>,
        disambiguation: Option<usize>,
        key: u32,
        path: Vec<u32>,
    ) -> usize {
        let id = self.nodes.len();
        let parent = if self.nodes.is_empty() { None } else { Some(br.leaf) };
        if let Content::Formula { formula, .. } = &content {
            let pos = sign.is_true();
            if !formula.is_atom() && formula.is_hole_free() && formula.is_ur_free() {
                // T φ and F φ always close atomically, so the branch is closed now.
                if br.closed.is_none() {
                    if let Some((_, _, other)) = br.compound.iter().find(|(p, g, _)| *p != pos && g == formula) {
                        br.closed = Some(if pos { (id, *other) } else { (*other, id) });
                    }
                }
                br.compound.push((pos, formula.clone(), id));
            }
            match formula {
                Formula::Atom(a) => {
                    let pos = sign.is_true();
                    if br.closed.is_none() {
                        if let Some((_, _, other)) = br.atoms.iter().find(|(p, b, _)| *p != pos && b == a) {
                            br.closed = Some(if pos { (id, *other) } else { (*other, id) });
                        }
                    }
                    br.atoms.push((pos, a.clone(), id));
                }
                Formula::Forall(..) if sign.is_true() => {
                    br.gammas.insert(id, 0);
                }
                Formula::Exists(..) if !sign.is_true() => {
                    br.gammas.insert(id, 0);
                }
                _ => {
                    br.pending.insert(id);
                }
            }
        } else {
            br.pending.insert(id);
        }
        self.nodes.push(TableauNode { id, parent, sign, content, rule, premise, disambiguation });
        self.keys.push(key);
        self.paths.push(path);
        br.leaf = id;
        br.depth += 1;
        id
    }

    fn analyze(&mut self, id: usize) -> Result<Option<Action>, ProveError> {
        if let Some(a) = self.cache.get(&id) {
            return Ok(a.clone());
        }
        let node = &self.nodes[id];
        let pos = node.sign.is_true();
        let action = match &node.content {
            Content::Formula { formula, .. } => match formula {
                Formula::Atom(_) => None,
                Formula::Hole(_) => Some(Action::HoleInterface),
                Formula::Ur(u) => match self.calculus {
                    Calculus::Tc => return Err(ProveError::UrInClassical),
                    Calculus::Tcu => Some(Action::Total { readings: nonempty_readings(u)? }),
                    Calculus::Tcup => Some(Action::UrInterface),
                },
                Formula::Not(_) => Some(Action::Alpha),
                Formula::And(..) => Some(if pos { Action::Alpha } else { Action::Beta }),
                Formula::Or(..) => Some(if pos { Action::Beta } else { Action::Alpha }),
                Formula::Imp(..) => Some(if pos { Action::Beta } else { Action::Alpha }),
                Formula::Forall(..) => Some(if pos { Action::Gamma } else { Action::Delta }),
                Formula::Exists(..) => Some(if pos { Action::Delta } else { Action::Gamma }),
            },
            Content::Focus(u) => {
                let u = u.clone();
                let sign = node.sign;
                Some(focus_action(&u, sign)?)
            }
        };
        self.cache.insert(id, action.clone());
        Ok(action)
    }

    /// A focused UR all of whose readings occur on the branch with the
    /// opposite sign: disambiguating it closes every alternative at once.
    /// Every reading of the UR at `id` already occurs with the opposite sign.
    /// A focus is then totally disambiguated at once; a UR leaf first gets
    /// its interface rule so that happens before any branching.
    fn covered(&self, br: &Branch, id: usize) -> Option<Action> {
        let node = &self.nodes[id];
        let (u, interface) = match &node.content {
            Content::Focus(u) => (u, false),
            Content::Formula { formula: Formula::Ur(u), env } if env.is_empty() => match self.calculus {
                Calculus::Tc => return None,
                Calculus::Tcu => (u, false),
                Calculus::Tcup => (u, true),
            },
            _ => return None,
        };
        let pos = node.sign.is_true();
        let readings = u.readings();
        let atoms = atoms_as_formulas(br);
        let hit = |r: &Formula| br.compound.iter().chain(&atoms).any(|(p, g, _)| *p != pos && g == r);
        if readings.is_empty() || !readings.iter().all(hit) {
            return None;
        }
        Some(if interface { Action::UrInterface } else { Action::Total { readings } })
    }

    fn select(&mut self, br: &Branch) -> Result<Option<(usize, Action)>, ProveError> {
        for &id in &br.pending {
            if let Some(a) = self.covered(br, id) {
                return Ok(Some((id, a)));
            }
        }
        let mut best: Option<(u8, usize, Action)> = None;
        for &id in &br.pending {
            if let Some(a) = self.analyze(id)? {
                let p = a.priority();
                let better = best
                    .as_ref()
                    .is_none_or(|(bp, bid, _)| (p, &self.paths[id], id) < (*bp, &self.paths[*bid], *bid));
                if better {
                    best = Some((p, id, a));
                }
            }
        }
        if let Some((_, id, a)) = best {
            return Ok(Some((id, a)));
        }
        let next = br.gammas.iter().filter(|(_, &c)| c < self.multiplicity).min_by_key(|(&id, &c)| (c, &self.paths[id], id));
        match next {
            Some((&id, _)) => Ok(Some((id, Action::Gamma))),
            None => {
                if !br.gammas.is_empty() {
                    self.limit_reached = true;
                }
                Ok(None)
            }
        }
    }

    fn rule_name(sign: Sign, action: &Action, formula: Option<&Formula>) -> String {
        let sym = match action {
            Action::Alpha | Action::Beta | Action::Delta | Action::Gamma => match formula {
                Some(Formula::Not(_)) => "¬",
                Some(Formula::And(..)) => "∧",
                Some(Formula::Or(..)) => "∨",
                Some(Formula::Imp(..)) => "→",
                Some(Formula::Forall(..)) => "∀",
                Some(Formula::Exists(..)) => "∃",
                _ => "?",
            },
            Action::UrInterface => "UR",
            Action::HoleInterface => "h",
            Action::Up { .. } => "↑",
            Action::WideScope { .. } => {
                if sign.is_true() {
                    "∀"
                } else {
                    "∃"
                }
            }
            Action::Resolve { .. } => "π",
            Action::Total { .. } => "UR",
        };
        format!("{sign}:{sym}")
    }

    fn subst_in(&self, f: &Formula, env: &BTreeMap<HoleId, Arc<Ur>>, v: &str, t: &Term) -> Content {
        let formula = substitute(f, v, t);
        let env = env
            .iter()
            .map(|(h, u)| {
                let u = if u.binds(v) { u.clone() } else { Arc::new(u.map_labels(|g| substitute_in_place_of_var(g, v, t))) };
                (*h, u)
            })
            .collect();
        Content::Formula { formula, env }
    }

    fn expand(&mut self, id: usize, action: &Action) -> Result<Children, ProveError> {
        let node = self.nodes[id].clone();
        let sign = node.sign;
        let pos = sign.is_true();
        let one = |items: Vec<(Sign, Content)>| vec![(None, items)];
        let out = match (&node.content, action) {
            (Content::Formula { formula, env }, Action::Alpha | Action::Beta) => {
                let mk = |p: bool, f: &Formula| (self.formula_sign(p, f), Content::Formula { formula: f.clone(), env: restrict_env(f, env) });
                match (formula, action) {
                    (Formula::Not(a), _) => one(vec![mk(!pos, a)]),
                    (Formula::And(a, b), Action::Alpha) => one(vec![mk(true, a), mk(true, b)]),
                    (Formula::Or(a, b), Action::Alpha) => one(vec![mk(false, a), mk(false, b)]),
                    (Formula::Imp(a, b), Action::Alpha) => one(vec![mk(true, a), mk(false, b)]),
                    (Formula::Or(a, b), _) => vec![(None, vec![mk(true, a)]), (None, vec![mk(true, b)])],
                    (Formula::And(a, b), _) => vec![(None, vec![mk(false, a)]), (None, vec![mk(false, b)])],
                    (Formula::Imp(a, b), _) => vec![(None, vec![mk(false, a)]), (None, vec![mk(true, b)])],
                    _ => unreachable!("connective rule on {formula}"),
                }
            }
            (Content::Formula { formula, env }, Action::Delta | Action::Gamma) => {
                let (Formula::Forall(v, body) | Formula::Exists(v, body)) = formula else {
                    unreachable!("quantifier rule on {formula}")
                };
                let t = if matches!(action, Action::Gamma) {
                    self.fresh_var()
                } else {
                    let mut args = formula.free_variables();
                    let mut bound = Vec::new();
                    binders(formula, &mut bound);
                    for u in env.values() {
                        for x in u.free_variables() {
                            if !bound.contains(&x) && !args.contains(&x) {
                                args.push(x);
                            }
                        }
                    }
                    let n = self.next_skolem;
                    self.next_skolem += 1;
                    Term::Skolem(n, args.into_iter().map(Term::Var).collect())
                };
                let content = self.subst_in(body, &restrict_env(body, env), v, &t);
                let s = match &content {
                    Content::Formula { formula, .. } => self.formula_sign(pos, formula),
                    Content::Focus(_) => sign,
                };
                one(vec![(s, content)])
            }
            (Content::Formula { .. }, Action::UrInterface) => {
                let Content::Formula { formula: Formula::Ur(u), .. } = &node.content else { unreachable!() };
                if u.instantiations().is_empty() {
                    return Err(empty(u));
                }
                one(vec![(sign.underspecified(), Content::Focus(u.clone()))])
            }
            (Content::Formula { formula: Formula::Hole(h), env }, Action::HoleInterface) => {
                let u = env.get(h).ok_or(ProveError::HoleOutsideUr)?;
                one(vec![(sign.underspecified(), Content::Focus(u.clone()))])
            }
            (Content::Focus(u), Action::Up { label, env }) => {
                let mut f = u.formula(*label).expect("daughter label").clone();
                let mut env = env.clone();
                // Sub-URs with a single reading are plugged right away.
                let resolved: Vec<(HoleId, Formula)> = env
                    .iter()
                    .filter_map(|(h, sub)| match &sub.readings()[..] {
                        [only] => Some((*h, only.clone())),
                        _ => None,
                    })
                    .collect();
                for (h, r) in resolved {
                    f = fill(&f, h, &r);
                    env.remove(&h);
                }
                one(vec![(sign.classical(), Content::Formula { formula: f, env })])
            }
            (Content::Focus(_), Action::WideScope { refined }) => one(vec![(sign, Content::Focus(refined.clone()))]),
            (Content::Focus(_), Action::Resolve { left, right }) => [left, right]
                .into_iter()
                .enumerate()
                .filter_map(|(i, s)| s.as_ref().map(|u| (Some(i), vec![(sign, Content::Focus(u.clone()))])))
                .collect(),
            (_, Action::Total { readings }) => readings
                .iter()
                .enumerate()
                .map(|(i, d)| (Some(i), vec![(self.formula_sign(pos, d), Content::formula(d.clone()))]))
                .collect(),
            _ => unreachable!("rule does not match node content"),
        };
        Ok(out)
    }

    fn run(mut self, roots: &[(bool, Formula)]) -> Result<(Tableau, bool, bool), ProveError> {
        for (_, f) in roots {
            if !f.is_hole_free() {
                return Err(ProveError::HoleOutsideUr);
            }
            if self.calculus == Calculus::Tc && !f.is_ur_free() {
                return Err(ProveError::UrInClassical);
            }
        }
        let mut br = Branch {
            leaf: 0,
            depth: 0,
            pending: BTreeSet::new(),
            gammas: BTreeMap::new(),
            atoms: Vec::new(),
            compound: Vec::new(),
            choices: Vec::new(),
            closed: None,
        };
        for (i, (pos, f)) in roots.iter().enumerate() {
            let key = self.intern(ROOT_KEY, i as u32);
            let sign = self.formula_sign(*pos, f);
            self.append(&mut br, sign, Content::formula(f.clone()), None, None, None, key, vec![i as u32]);
        }
        let mut stack = vec![br];
        let mut finished = Vec::new();
        'branches: while let Some(mut br) = stack.pop() {
            loop {
                if br.closed.is_some() {
                    break;
                }
                if self.nodes.len() >= self.limits.max_nodes || br.depth >= self.limits.max_depth {
                    self.limit_reached = true;
                    break;
                }
                let Some((id, action)) = self.select(&br)? else { break };
                if matches!(action, Action::Gamma) {
                    *br.gammas.get_mut(&id).unwrap() += 1;
                } else {
                    br.pending.remove(&id);
                }
                let uses = br.gammas.get(&id).copied().unwrap_or(0) as u32;
                let formula = match &self.nodes[id].content {
                    Content::Formula { formula, .. } => Some(formula.clone()),
                    Content::Focus(_) => None,
                };
                let rule = Self::rule_name(self.nodes[id].sign, &action, formula.as_ref());
                let children = self.expand(id, &action)?;
                let source = self.keys[id];
                let splitting = matches!(action, Action::Resolve { .. } | Action::Total { .. });
                let transparent = splitting
                    || matches!(
                        action,
                        Action::UrInterface | Action::HoleInterface | Action::Up { .. } | Action::WideScope { .. }
                    );
                let parent_path = self.paths[id].clone();
                let extend = |j: u32| {
                    let mut p = parent_path.clone();
                    if !transparent {
                        p.push(j);
                    }
                    p
                };
                let mut app = Application { rule: rule.clone(), premise: id, children: Vec::new() };
                if children.len() == 1 && !splitting {
                    let mut ids = Vec::new();
                    for (pos, (sign, content)) in children.into_iter().next().unwrap().1.into_iter().enumerate() {
                        let key = self.intern(source, 1000 * uses + pos as u32);
                        let j = if matches!(action, Action::Gamma) { uses } else { pos as u32 };
                        ids.push(self.append(&mut br, sign, content, Some(rule.clone()), Some(id), None, key, extend(j)));
                    }
                    app.children.push(ids);
                    self.applications.push(app);
                    continue;
                }
                let mut made = Vec::new();
                for (b, (dis, items)) in children.into_iter().enumerate() {
                    let mut child = br.clone();
                    if let Some(i) = dis {
                        child.choices.push((source, i));
                    }
                    let mut ids = Vec::new();
                    for (pos, (sign, content)) in items.into_iter().enumerate() {
                        let j = match dis {
                            Some(i) => 100 * i as u32 + pos as u32,
                            None => 10 * b as u32 + pos as u32,
                        };
                        let key = self.intern(source, j);
                        let d = if pos == 0 { dis } else { None };
                        let path = extend(b as u32);
                        ids.push(self.append(&mut child, sign, content, Some(rule.clone()), Some(id), d, key, path));
                    }
                    app.children.push(ids);
                    made.push(child);
                }
                self.applications.push(app);
                stack.extend(made.into_iter().rev());
                continue 'branches;
            }
            finished.push(br);
        }
        let (closures, unify_limit) = self.close(&finished);
        let tableau = Tableau {
            calculus: self.calculus,
            nodes: self.nodes,
            applications: self.applications,
            closures: closures.clone().unwrap_or_default(),
            multiplicity: self.multiplicity,
        };
        Ok((tableau, closures.is_some(), self.limit_reached || unify_limit))
    }

    fn atom(&self, id: usize) -> &Atom {
        match &self.nodes[id].content {
            Content::Formula { formula: Formula::Atom(a), .. } => a,
            _ => unreachable!("closing node is not an atom"),
        }
    }

    /// Closes every consistent choice of disambiguations with its own
    /// unifier. Returns the closures if all succeed, and whether a search
    /// cap was hit.
    fn close(&self, finished: &[Branch]) -> (Option<Vec<ProjectionClosure>>, bool) {
        let mut steps = 0usize;
        let mut projections = Vec::new();
        let mut leaves: Vec<&Branch> = finished.iter().collect();
        leaves.sort_by_key(|b| b.leaf);
        let mut capped = false;
        enumerate(&leaves, &mut BTreeMap::new(), &mut projections, self.limits.max_projections, &mut capped);
        if capped {
            return (None, true);
        }
        let mut out = Vec::new();
        for proj in projections {
            match self.close_projection(&proj, &mut steps) {
                Some(c) => out.push(c),
                None => return (None, steps >= self.limits.max_unify_steps),
            }
        }
        (Some(out), false)
    }

    fn close_projection(&self, leaves: &[&Branch], steps: &mut usize) -> Option<ProjectionClosure> {
        let mut fixed = Vec::new();
        let mut open: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
        for b in leaves {
            if let Some((t, f)) = b.closed {
                fixed.push((b.leaf, t, f));
                continue;
            }
            let mut cands = Vec::new();
            for (p, a, i) in &b.atoms {
                if !*p {
                    continue;
                }
                for (q, c, j) in &b.atoms {
                    if !*q && Subst::new().unify_atoms(a, c) {
                        cands.push((*i, *j));
                    }
                }
            }
            if cands.is_empty() {
                return None;
            }
            open.push((b.leaf, cands));
        }
        open.sort_by_key(|(leaf, c)| (c.len(), *leaf));
        let (subst, chosen) = self.search(&open, steps)?;
        let mut all = fixed;
        all.extend(chosen);
        all.sort();
        Some(ProjectionClosure { leaves: all, unifier: subst.solved() })
    }

    /// Backtracking search for one substitution closing every open leaf.
    /// A leaf that is already closed under the current substitution is
    /// taken without alternatives, since that choice adds no bindings.
    fn search(&self, open: &[(usize, Vec<(usize, usize)>)], steps: &mut usize) -> Option<(Subst, Vec<(usize, usize, usize)>)> {
        // Frame i: next candidate of leaf i to try, substitution before leaf i.
        let mut frames: Vec<(usize, Subst)> = vec![(0, Subst::new())];
        let mut chosen: Vec<(usize, usize, usize)> = Vec::new();
        loop {
            let i = frames.len() - 1;
            if i == open.len() {
                let (_, s) = frames.pop().unwrap();
                return Some((s, chosen));
            }
            let (leaf, cands) = &open[i];
            let (next, base) = &mut frames[i];
            let mut pushed = None;
            if *next == 0 {
                let free = cands
                    .iter()
                    .find(|(t, f)| base.resolve_atom(self.atom(*t)) == base.resolve_atom(self.atom(*f)));
                if let Some(&(t, f)) = free {
                    *next = cands.len();
                    pushed = Some((base.clone(), (*leaf, t, f)));
                }
            }
            while pushed.is_none() && *next < cands.len() {
                let (t, f) = cands[*next];
                *next += 1;
                *steps += 1;
                if *steps >= self.limits.max_unify_steps {
                    return None;
                }
                let mut s = base.clone();
                if s.unify_atoms(self.atom(t), self.atom(f)) {
                    pushed = Some((s, (*leaf, t, f)));
                }
            }
            match pushed {
                Some((s, c)) => {
                    chosen.truncate(i);
                    chosen.push(c);
                    frames.push((0, s));
                }
                None => {
                    frames.pop();
                    if frames.is_empty() {
                        return None;
                    }
                }
            }
        }
    }
}

fn atoms_as_formulas(br: &Branch) -> Vec<(bool, Formula, usize)> {
    br.atoms.iter().map(|(p, a, i)| (*p, Formula::Atom(a.clone()), *i)).collect()
}

fn empty(u: &Ur) -> ProveError {
    ProveError::EmptyDisambiguation { span: u.span(), ur: u.to_string() }
}

fn nonempty_readings(u: &Ur) -> Result<Vec<Formula>, ProveError> {
    let r = u.readings();
    if r.is_empty() {
        Err(empty(u))
    } else {
        Ok(r)
    }
}

fn focus_action(u: &Ur, sign: Sign) -> Result<Action, ProveError> {
    let ds = daughters(u);
    if ds.is_empty() {
        return Err(empty(u));
    }
    if ds.len() == 1 {
        let l = *ds.iter().next().unwrap();
        if let Some(env) = split_env(u, l) {
            return Ok(Action::Up { label: l, env });
        }
    }
    if let Some(refined) = wide_scope(u, sign) {
        return Ok(Action::WideScope { refined });
    }
    if let Some((left, right)) = resolution(u, sign) {
        return Ok(Action::Resolve { left, right });
    }
    Ok(Action::Total { readings: nonempty_readings(u)? })
}

/// Leaf sets of every consistent assignment of alternatives to split
/// occurrences.
fn enumerate<'a>(
    leaves: &[&'a Branch],
    assignment: &mut BTreeMap<u32, usize>,
    out: &mut Vec<Vec<&'a Branch>>,
    cap: usize,
    capped: &mut bool,
) {
    if *capped {
        return;
    }
    let consistent = |b: &&Branch| b.choices.iter().all(|(k, i)| assignment.get(k).is_none_or(|j| j == i));
    let live: Vec<&Branch> = leaves.iter().copied().filter(consistent).collect();
    let pending = live.iter().find_map(|b| b.choices.iter().find(|(k, _)| !assignment.contains_key(k)).copied());
    match pending {
        None => {
            if out.len() >= cap {
                *capped = true;
            } else {
                out.push(live);
            }
        }
        Some((key, _)) => {
            let alternatives: BTreeSet<usize> =
                live.iter().flat_map(|b| b.choices.iter().filter(|(k, _)| *k == key).map(|(_, i)| *i)).collect();
            for i in alternatives {
                assignment.insert(key, i);
                enumerate(&live, assignment, out, cap, capped);
                assignment.remove(&key);
            }
        }
    }
}

/// Builds a tableau from signed root formulas (`true` = `T`) and searches
/// for a closed one, deepening the γ-multiplicity from 1 to the limit.
pub fn prove_roots(calculus: Calculus, roots: &[(bool, Formula)], limits: SearchLimits) -> Result<ProofResult, ProveError> {
    let top = limits.gamma_multiplicity.max(1);
    let mut last = None;
    for m in 1..=top {
        let (tableau, proved, limit) = Search::new(calculus, limits, m, roots).run(roots)?;
        if proved {
            return Ok(ProofResult::Proved(tableau));
        }
        if !limit {
            return Ok(ProofResult::NotProved { tableau, limit_reached: false });
        }
        last = Some(tableau);
    }
    Ok(ProofResult::NotProved { tableau: last.expect("at least one round"), limit_reached: true })
}

#[cfg(test)]
mod tests {
    use super::super::{prove, prove_tc, prove_tc_sequent};
    use super::*;
    use crate::fixtures;
    use crate::syntax::parse_uformula;

    fn f(s: &str) -> Formula {
        parse_uformula(s).unwrap()
    }

    fn lim() -> SearchLimits {
        SearchLimits::default()
    }

    #[test]
    fn classical_basics() {
        assert!(prove_tc(&f("p -> p"), lim()).unwrap().is_proved());
        assert!(prove_tc(&f("p | ~p"), lim()).unwrap().is_proved());
        let r = prove_tc(&f("p -> q"), lim()).unwrap();
        assert!(!r.is_proved());
        assert!(!r.limit_reached());
        let socrates = prove_tc_sequent(
            &[f("forall x. (man(x) -> mortal(x))"), f("man(socrates)")],
            &f("mortal(socrates)"),
            lim(),
        )
        .unwrap();
        assert!(socrates.is_proved());
    }

    #[test]
    fn quantifier_order() {
        let strong = f(fixtures::STRONG_READING);
        let weak = f(fixtures::WEAK_READING);
        assert!(prove_tc_sequent(&[strong.clone()], &weak, lim()).unwrap().is_proved());
        let back = prove_tc_sequent(&[weak], &strong, lim()).unwrap();
        assert!(!back.is_proved());
        assert!(back.limit_reached());
    }

    #[test]
    fn urs_are_rejected_classically() {
        assert_eq!(prove_tc(&fixtures::every_man(), lim()), Err(ProveError::UrInClassical));
    }

    #[test]
    fn ur_consequences() {
        let weak = f(fixtures::WEAK_READING);
        let strong = f(fixtures::STRONG_READING);
        for calc in [Calculus::Tcu, Calculus::Tcup] {
            // Every reading entails the weak one, the weak one entails not every reading.
            assert!(prove(calc, &[fixtures::every_man()], &weak, lim()).unwrap().is_proved(), "{calc}");
            assert!(prove(calc, &[strong.clone()], &fixtures::every_man(), lim()).unwrap().is_proved(), "{calc}");
            assert!(!prove(calc, &[weak.clone()], &fixtures::every_man(), lim()).unwrap().is_proved(), "{calc}");
            // Two occurrences of one UR may be read differently.
            assert!(
                !prove(calc, &[fixtures::every_man()], &fixtures::every_man(), lim()).unwrap().is_proved(),
                "{calc}"
            );
        }
    }

    #[test]
    fn ambiguity_can_stay_unresolved() {
        let a = fixtures::INDEPENDENT;
        let phi = f(&format!("{a} & q -> q"));
        let r = prove(Calculus::Tcup, &[], &phi, lim()).unwrap();
        assert!(r.is_proved());
        assert_eq!(r.tableau().total_disambiguations(), 0);
        assert!(prove(Calculus::Tcu, &[], &phi, lim()).unwrap().is_proved());
        for calc in [Calculus::Tcu, Calculus::Tcup] {
            let back = f(&format!("{a} & q -> {a}"));
            assert!(!prove(calc, &[], &back, lim()).unwrap().is_proved(), "{calc}");
            let one = f(&format!("q & {a} -> ~exists y. (r(y) & s(y))"));
            assert!(!prove(calc, &[], &one, lim()).unwrap().is_proved(), "{calc}");
            let either = f(&format!("{a} -> (~exists y. (r(y) & s(y))) | exists y. (r(y) & ~s(y))"));
            assert!(prove(calc, &[], &either, lim()).unwrap().is_proved(), "{calc}");
        }
    }

    #[test]
    fn first_rules_on_the_boy_movie_ur() {
        let r = prove_roots(Calculus::Tcup, &[(true, fixtures::boy_movie())], lim()).unwrap();
        let t = r.tableau();
        let shown: Vec<String> = [0, 1, 2, 4, 5, 6, 7, 8]
            .into_iter()
            .map(|i| &t.nodes[i])
            .map(|n| format!("{} {} {}", n.sign, n.content, n.rule.as_deref().unwrap_or("-")))
            .collect();
        assert_eq!(
            shown,
            [
                format!("T {} -", fixtures::boy_movie()),
                "T_u #0 T:UR".to_string(),
                "T_u #0 T_u:π".to_string(),
                "T_u #0 T_u:∀".to_string(),
                "T forall x. (boy(x) -> #1) T_u:↑".to_string(),
                "T boy(X1) -> #1 T:∀".to_string(),
                "F boy(X1) T:→".to_string(),
                "T #1 T:→".to_string(),
            ]
        );
        assert_eq!(t.nodes[7].parent, t.nodes[8].parent);
        assert_eq!(t.nodes[2].disambiguation, Some(0));
        assert_eq!(t.nodes[3].disambiguation, Some(1));
    }

    #[test]
    fn deterministic() {
        let phi = f(&format!("{} -> {}", fixtures::BOY_MOVIE, fixtures::BOY_MOVIE));
        let a = prove(Calculus::Tcup, &[], &phi, lim()).unwrap();
        let b = prove(Calculus::Tcup, &[], &phi, lim()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tableau().to_ndjson(), b.tableau().to_ndjson());
    }

    #[test]
    fn empty_ur_is_an_error() {
        let u = f("ur { l0: #0 ; l1: p ; l2: q ; constraints { l1 <= #0 ; l2 <= #0 } }");
        assert!(prove(Calculus::Tcu, &[], &u, lim()).is_err());
    }
}
