//! A second, deliberately naive disambiguator: tries every bijection from
//! holes to labels and checks the conditions on an explicit relation matrix.
//! It reads only the raw parts of a UR.

use std::collections::BTreeSet;

use crate::syntax::{Formula, HoleId, LabelId};
use crate::ur::{Node, Ur};

struct Raw {
    nodes: Vec<Node>,
    /// `below[i][j]`: node i is at or below node j in the reflexive-transitive closure.
    below: Vec<Vec<bool>>,
    pairs: Vec<(usize, usize)>,
    labels: Vec<(LabelId, Formula)>,
    holes: Vec<HoleId>,
    top: HoleId,
}

impl Raw {
    fn new(u: &Ur) -> Raw {
        let labels: Vec<(LabelId, Formula)> = u.labels().iter().map(|(l, f)| (*l, f.clone())).collect();
        let holes: Vec<HoleId> = u.holes().iter().copied().collect();
        let nodes: Vec<Node> =
            labels.iter().map(|(l, _)| Node::Label(*l)).chain(holes.iter().map(|h| Node::Hole(*h))).collect();
        let ix = |n: &Node| nodes.iter().position(|m| m == n).expect("constraint on a known node");
        let mut pairs = Vec::new();
        for (a, b) in u.declared() {
            pairs.push((ix(a), ix(b)));
        }
        for (l, f) in &labels {
            for h in f.holes() {
                pairs.push((ix(&Node::Hole(h)), ix(&Node::Label(*l))));
            }
        }
        let n = nodes.len();
        let mut below = vec![vec![false; n]; n];
        for (i, row) in below.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &pairs {
            below[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if below[i][k] {
                    for j in 0..n {
                        if below[k][j] {
                            below[i][j] = true;
                        }
                    }
                }
            }
        }
        Raw { nodes, below, pairs, labels, holes, top: u.top() }
    }

    fn index(&self, n: Node) -> usize {
        self.nodes.iter().position(|m| *m == n).unwrap()
    }

    /// Label pairs whose set of common lower bounds has exactly one maximal element.
    fn joined_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        for a in 0..self.labels.len() {
            for b in a + 1..self.labels.len() {
                let common: Vec<usize> = (0..n).filter(|&k| self.below[k][a] && self.below[k][b]).collect();
                let maximal = common
                    .iter()
                    .filter(|&&k| !common.iter().any(|&m| m != k && self.below[k][m]))
                    .count();
                if maximal == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn owner(&self, h: HoleId) -> Option<usize> {
        self.labels.iter().position(|(_, f)| f.holes().contains(&h))
    }

    fn admissible(&self, assign: &[(HoleId, usize)], joined: &[(usize, usize)]) -> bool {
        let n = self.nodes.len();
        // Tree parents: a hole's parent is its owner, a plugged label's parent is its hole.
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for h in &self.holes {
            if let Some(o) = self.owner(*h) {
                parent[self.index(Node::Hole(*h))] = Some(o);
            }
        }
        for &(h, l) in assign {
            parent[l] = Some(self.index(Node::Hole(h)));
        }
        let top = self.index(Node::Hole(self.top));
        let mut anc = vec![vec![false; n]; n];
        for i in 0..n {
            let mut cur = i;
            let mut steps = 0;
            anc[i][i] = true;
            while let Some(p) = parent[cur] {
                steps += 1;
                if steps > n || anc[i][p] {
                    return false;
                }
                anc[i][p] = true;
                cur = p;
            }
            if cur != top && !(self.is_bare(cur) && self.labels[cur].1 == Formula::Hole(self.top)) {
                return false;
            }
        }
        if !self.pairs.iter().all(|&(a, b)| anc[a][b]) {
            return false;
        }
        let rename = |i: usize| match self.nodes[i] {
            Node::Hole(h) => assign.iter().find(|(g, _)| *g == h).map_or(i, |(_, l)| *l),
            Node::Label(_) => i,
        };
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &self.pairs {
            reach[rename(a)][rename(b)] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        joined.iter().all(|&(a, b)| reach[a][b] || reach[b][a])
    }

    fn is_bare(&self, i: usize) -> bool {
        i < self.labels.len() && matches!(self.labels[i].1, Formula::Hole(_))
    }

    fn fill(&self, f: &Formula, assign: &[(HoleId, usize)]) -> Formula {
        match f {
            Formula::Hole(h) => {
                let (_, l) = assign.iter().find(|(g, _)| g == h).expect("every hole is plugged");
                self.fill(&self.labels[*l].1, assign)
            }
            Formula::Atom(_) | Formula::Ur(_) => f.clone(),
            Formula::Not(a) => Formula::not(self.fill(a, assign)),
            Formula::And(a, b) => Formula::and(self.fill(a, assign), self.fill(b, assign)),
            Formula::Or(a, b) => Formula::or(self.fill(a, assign), self.fill(b, assign)),
            Formula::Imp(a, b) => Formula::imp(self.fill(a, assign), self.fill(b, assign)),
            Formula::Forall(v, b) => Formula::forall(v.clone(), self.fill(b, assign)),
            Formula::Exists(v, b) => Formula::exists(v.clone(), self.fill(b, assign)),
        }
    }
}

fn permutations(items: &[usize], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for &i in items {
        if !cur.contains(&i) {
            cur.push(i);
            permutations(items, k, cur, out);
            cur.pop();
        }
    }
}

/// Readings of one UR, sorted by printed form, duplicates removed.
pub fn readings(u: &Ur) -> Vec<Formula> {
    let raw = Raw::new(u);
    let pluggable: Vec<usize> = (0..raw.labels.len()).filter(|&i| !raw.is_bare(i)).collect();
    if pluggable.len() != raw.holes.len() {
        return Vec::new();
    }
    let joined = raw.joined_pairs();
    let mut perms = Vec::new();
    permutations(&pluggable, raw.holes.len(), &mut Vec::new(), &mut perms);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in perms {
        let assign: Vec<(HoleId, usize)> = raw.holes.iter().copied().zip(p).collect();
        if raw.admissible(&assign, &joined) {
            let f = raw.fill(&Formula::Hole(raw.top), &assign);
            if seen.insert(f.to_string()) {
                out.push(f);
            }
        }
    }
    out.sort_by_key(|f| f.to_string());
    out
}

/// Total disambiguations of a u-formula: every combination of readings of
/// its URs, sorted by printed form.
pub fn delta(phi: &Formula) -> Vec<Formula> {
    let combine = |xs: Vec<Formula>, ys: Vec<Formula>, k: &dyn Fn(Formula, Formula) -> Formula| {
        let mut out = Vec::new();
        for x in &xs {
            for y in &ys {
                out.push(k(x.clone(), y.clone()));
            }
        }
        out
    };
    let mut out = match phi {
        Formula::Atom(_) | Formula::Hole(_) => vec![phi.clone()],
        Formula::Ur(u) => readings(u).iter().flat_map(delta).collect(),
        Formula::Not(a) => delta(a).into_iter().map(Formula::not).collect(),
        Formula::And(a, b) => combine(delta(a), delta(b), &Formula::and),
        Formula::Or(a, b) => combine(delta(a), delta(b), &Formula::or),
        Formula::Imp(a, b) => combine(delta(a), delta(b), &Formula::imp),
        Formula::Forall(v, b) => delta(b).into_iter().map(|d| Formula::forall(v.clone(), d)).collect(),
        Formula::Exists(v, b) => delta(b).into_iter().map(|d| Formula::exists(v.clone(), d)).collect(),
    };
    out.sort_by_key(|f| f.to_string());
    out.dedup_by(|a, b| a.to_string() == b.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::parse_uformula;

    fn strings(fs: &[Formula]) -> Vec<String> {
        fs.iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn every_man_has_its_two_readings() {
        let got = strings(&readings(&fixtures::every_man_ur()));
        let mut want = vec![
            parse_uformula(fixtures::STRONG_READING).unwrap().to_string(),
            parse_uformula(fixtures::WEAK_READING).unwrap().to_string(),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn boy_movie_has_six() {
        assert_eq!(readings(&fixtures::boy_movie_ur()).len(), 6);
    }

    #[test]
    fn products_over_connectives() {
        let a = fixtures::INDEPENDENT;
        let f = parse_uformula(&format!("{a} & {a}")).unwrap();
        assert_eq!(delta(&f).len(), 4);
        let g = parse_uformula(&format!("p | ~{a}")).unwrap();
        assert_eq!(delta(&g).len(), 2);
        assert_eq!(delta(&parse_uformula("p -> q").unwrap()).len(), 1);
    }

    #[test]
    fn too_many_labels_for_the_holes() {
        let Formula::Ur(u) = parse_uformula("ur { l0: #0 ; l1: p ; l2: q ; constraints { l1 <= #0 ; l2 <= #0 } }").unwrap()
        else {
            unreachable!()
        };
        assert!(readings(&u).is_empty());
    }
}
