use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{
    render_explanation, Assertion, Conflict, Derivation, Inference, OntologyNetwork, PendingPair,
    PreFill, Rule, Support,
};
use crate::task::Verdict;
use crate::union_find::UnionFind;

/// Equivalence classes of one assertion set, with the graph kept around for
/// shortest support paths.
#[derive(Debug)]
pub struct Closure<'n> {
    net: &'n OntologyNetwork,
    eqs: Vec<Assertion>,
    neqs: HashMap<(String, String), Assertion>,
    index: HashMap<String, usize>,
    names: Vec<String>,
    adj: Vec<Vec<(usize, usize)>>,
    root: Vec<usize>,
    members: HashMap<usize, Vec<usize>>,
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

type Candidate = (usize, Rule, Vec<Support>);

impl<'n> Closure<'n> {
    pub(super) fn new(
        net: &'n OntologyNetwork,
        dataset_id: Option<&str>,
        extra: Option<&Assertion>,
    ) -> Self {
        let in_scope = |a: &&Assertion| dataset_id.is_none_or(|d| a.dataset_id == d);
        let mut eqs = Vec::new();
        let mut neqs = HashMap::new();
        for a in net.assertions().iter().filter(in_scope).chain(extra) {
            match a.value {
                Verdict::Equivalent => eqs.push(a.clone()),
                Verdict::NotEquivalent => {
                    neqs.entry(unordered(&a.source, &a.target))
                        .or_insert_with(|| a.clone());
                }
            }
        }

        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut node = |iri: &str, names: &mut Vec<String>| {
            *index.entry(iri.to_string()).or_insert_with(|| {
                names.push(iri.to_string());
                names.len() - 1
            })
        };
        let mut edges = Vec::with_capacity(eqs.len());
        for a in &eqs {
            let s = node(&a.source, &mut names);
            let t = node(&a.target, &mut names);
            edges.push((s, t));
        }

        let mut adj = vec![Vec::new(); names.len()];
        let mut uf = UnionFind::new(names.len());
        for (i, &(s, t)) in edges.iter().enumerate() {
            if s != t {
                adj[s].push((t, i));
                adj[t].push((s, i));
            }
            uf.union(s, t);
        }
        // deterministic BFS: neighbours by IRI, then assertion order
        for list in &mut adj {
            list.sort_by(|a, b| names[a.0].cmp(&names[b.0]).then(a.1.cmp(&b.1)));
        }
        let root: Vec<usize> = (0..names.len()).map(|i| uf.find(i)).collect();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &r) in root.iter().enumerate() {
            members.entry(r).or_default().push(i);
        }
        for m in members.values_mut() {
            m.sort_by(|a, b| names[*a].cmp(&names[*b]));
        }

        Closure {
            net,
            eqs,
            neqs,
            index,
            names,
            adj,
            root,
            members,
        }
    }

    /// Entities equivalent to `iri`, excluding itself, in IRI order.
    pub fn equivalents(&self, iri: &str) -> Vec<&str> {
        let Some(&i) = self.index.get(iri) else {
            return Vec::new();
        };
        self.members[&self.root[i]]
            .iter()
            .filter(|&&m| m != i)
            .map(|&m| self.names[m].as_str())
            .collect()
    }

    pub fn same_class(&self, a: &str, b: &str) -> bool {
        a == b
            || matches!((self.index.get(a), self.index.get(b)),
                (Some(&x), Some(&y)) if self.root[x] == self.root[y])
    }

    /// BFS predecessor map from `from`: node → (previous node, assertion).
    fn bfs(&self, from: usize) -> HashMap<usize, (usize, usize)> {
        let mut prev = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = vec![false; self.names.len()];
        seen[from] = true;
        while let Some(cur) = queue.pop_front() {
            for &(n, e) in &self.adj[cur] {
                if !seen[n] {
                    seen[n] = true;
                    prev.insert(n, (cur, e));
                    queue.push_back(n);
                }
            }
        }
        prev
    }

    /// Assertions along the BFS tree path from the BFS origin to `to`,
    /// starting at the origin's end.
    fn path(&self, prev: &HashMap<usize, (usize, usize)>, to: usize) -> Vec<Support> {
        let mut out = Vec::new();
        let mut cur = to;
        while let Some(&(p, e)) = prev.get(&cur) {
            out.push(Support::Assertion(self.eqs[e].clone()));
            cur = p;
        }
        out.reverse();
        out
    }

    fn self_support(&self, i: usize) -> Option<Support> {
        let name = &self.names[i];
        self.eqs
            .iter()
            .find(|a| &a.source == name && &a.target == name)
            .map(|a| Support::Assertion(a.clone()))
    }

    pub fn derive_equivalent(&self, a: &str, b: &str) -> Option<Derivation> {
        if !self.same_class(a, b) {
            return None;
        }
        let (ia, ib) = (self.index[a], self.index[b]);
        let supports = if ia == ib {
            vec![self.self_support(ia)?]
        } else {
            self.path(&self.bfs(ia), ib)
        };
        let rule = (supports.len() > 1).then_some(Rule::TransitiveEquivalence);
        Some(Derivation { rule, supports })
    }

    pub fn asserted_not_equivalent(&self, a: &str, b: &str) -> Option<&Assertion> {
        self.neqs.get(&unordered(a, b))
    }

    /// Best `NotEquivalent` derivation through the negative rules.
    pub fn derive_by_rules(&self, pair: &PendingPair, one_to_one: bool) -> Option<Derivation> {
        let mut best: Option<Candidate> = None;
        let mut offer = |c: Candidate| {
            if best.as_ref().is_none_or(|b| (c.0, c.1, &c.2) < (b.0, b.1, &b.2)) {
                best = Some(c);
            }
        };
        let (w, v) = (pair.source.as_str(), pair.target.as_str());

        // z ≢ y from x ≡ y, in both orientations of the pair
        for (z, y) in [(w, v), (v, w)] {
            let Some(&iy) = self.index.get(y) else {
                continue;
            };
            let mut tree = None;
            for x in self.equivalents(y) {
                let related = self.net.strictly_related(z, x);
                let disjoint = self.net.disjoint(z, x);
                if !related && !disjoint {
                    continue;
                }
                let tree = tree.get_or_insert_with(|| self.bfs(iy));
                let mut eq_path = self.path(tree, self.index[x]);
                eq_path.reverse();
                if related {
                    if let Some(h) = self.net.hierarchy_path(z, x) {
                        let mut s = eq_path.clone();
                        s.extend(h);
                        offer((s.len(), Rule::SubsumptionNegativity, s));
                    }
                }
                if disjoint {
                    let mut s = eq_path;
                    s.push(Support::Disjoint {
                        x: z.to_string(),
                        y: x.to_string(),
                    });
                    offer((s.len(), Rule::Disjointedness, s));
                }
            }
        }

        if one_to_one {
            if let Some(scope) = self.net.dataset(&pair.dataset_id) {
                let (ow, ov) = if self.net.declares(&scope.ontology_a, w) {
                    (&scope.ontology_a, &scope.ontology_b)
                } else {
                    (&scope.ontology_b, &scope.ontology_a)
                };
                // another entity of w's ontology is ≡ v, or of v's ontology ≡ w
                for (anchor, other, home) in [(v, w, ow), (w, v, ov)] {
                    let Some(&ia) = self.index.get(anchor) else {
                        continue;
                    };
                    let mut tree = None;
                    for x in self.equivalents(anchor) {
                        if x == other || !self.net.declares(home, x) {
                            continue;
                        }
                        let tree = tree.get_or_insert_with(|| self.bfs(ia));
                        let s = self.path(tree, self.index[x]);
                        offer((s.len(), Rule::OneToOneNegativity, s));
                    }
                }
            }
        }
        best.map(|(_, rule, supports)| Derivation {
            rule: Some(rule),
            supports,
        })
    }

    /// Any `NotEquivalent` derivation, an asserted one first.
    pub fn derive_not_equivalent(&self, pair: &PendingPair, one_to_one: bool) -> Option<Derivation> {
        if let Some(a) = self.asserted_not_equivalent(&pair.source, &pair.target) {
            return Some(Derivation {
                rule: None,
                supports: vec![Support::Assertion(a.clone())],
            });
        }
        self.derive_by_rules(pair, one_to_one)
    }

    pub(super) fn evaluate(&self, p: &PendingPair, one_to_one: bool, out: &mut Inference) {
        let eq = self.derive_equivalent(&p.source, &p.target);
        let neq = self.derive_by_rules(p, one_to_one);
        match (eq, neq) {
            (Some(eq), neq) if neq.is_some() || self.asserted_not_equivalent(&p.source, &p.target).is_some() => {
                let not_equivalent = self
                    .derive_not_equivalent(p, one_to_one)
                    .or(neq)
                    .expect("checked above");
                out.conflicts.push(Conflict {
                    pair_id: p.id.clone(),
                    source: p.source.clone(),
                    target: p.target.clone(),
                    equivalent: eq,
                    not_equivalent,
                });
            }
            (Some(eq), _) => out.prefills.push(self.prefill(p, Verdict::Equivalent, Rule::TransitiveEquivalence, eq.supports)),
            (None, Some(neq)) => {
                let rule = neq.rule.expect("rule derivations carry a rule");
                out.prefills.push(self.prefill(p, Verdict::NotEquivalent, rule, neq.supports));
            }
            (None, None) => {}
        }
    }

    fn prefill(&self, p: &PendingPair, value: Verdict, rule: Rule, supports: Vec<Support>) -> PreFill {
        PreFill {
            explanation: render_explanation(self.net, value, rule, &supports),
            pair_id: p.id.clone(),
            source: p.source.clone(),
            target: p.target.clone(),
            dataset_id: p.dataset_id.clone(),
            value,
            rule,
            supports,
        }
    }

    /// Pairs inside the class of `iri` that are both equivalent and
    /// not-equivalent, as `(a, b, rule)` with `a < b`.
    pub(super) fn component_conflicts(
        &self,
        iri: &str,
        one_to_one: bool,
    ) -> Vec<(String, String, Option<Rule>)> {
        let Some(&i) = self.index.get(iri) else {
            return Vec::new();
        };
        let class: Vec<&str> = self.members[&self.root[i]]
            .iter()
            .map(|&m| self.names[m].as_str())
            .collect();
        let mut out: BTreeMap<(String, String), Option<Rule>> = BTreeMap::new();
        for (k, &a) in class.iter().enumerate() {
            for &b in &class[k + 1..] {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                let mut probes = vec![PendingPair::new("", a, b, "")];
                if one_to_one {
                    for scope in self.net.datasets() {
                        let crosses = |x: &str, y: &str| {
                            self.net.declares(&scope.ontology_a, x)
                                && self.net.declares(&scope.ontology_b, y)
                        };
                        if crosses(a, b) || crosses(b, a) {
                            probes.push(PendingPair::new("", a, b, &scope.id));
                        }
                    }
                }
                for probe in &probes {
                    let use_r4 = one_to_one && !probe.dataset_id.is_empty();
                    if let Some(d) = self.derive_not_equivalent(probe, use_r4) {
                        out.entry((a.to_string(), b.to_string())).or_insert(d.rule);
                        break;
                    }
                }
            }
        }
        out.into_iter().map(|((a, b), r)| (a, b, r)).collect()
    }
}
