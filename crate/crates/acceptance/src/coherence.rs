//! Pre-fill inference by repeated rule application over explicit fact
//! sets. Entities are plain indices; each belongs to one ontology.

use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleName {
    Transitive,
    Subsumption,
    Disjoint,
    OneToOne,
}

#[derive(Debug, Clone)]
pub struct Net {
    /// Ontology of each entity.
    pub owner: Vec<usize>,
    /// Direct `(child, parent)` edges.
    pub subclass: Vec<(usize, usize)>,
    pub disjoint: Vec<(usize, usize)>,
    /// `(ontology_a, ontology_b)` per dataset.
    pub datasets: Vec<(usize, usize)>,
    /// `(source, target, equivalent, dataset)`.
    pub assertions: Vec<(usize, usize, bool, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pending {
    pub source: usize,
    pub target: usize,
    pub dataset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Found {
    Equivalent,
    /// Every rule able to derive the negative.
    NotEquivalent(BTreeSet<RuleName>),
    Conflict,
}

struct Facts {
    eq: BTreeSet<(usize, usize)>,
    below: BTreeSet<(usize, usize)>,
    neq: BTreeSet<(usize, usize)>,
}

fn saturate(pairs: &mut BTreeSet<(usize, usize)>) {
    loop {
        let mut new = Vec::new();
        for &(x, y) in pairs.iter() {
            for &(y2, z) in pairs.range((y, 0)..=(y, usize::MAX)) {
                debug_assert_eq!(y, y2);
                if !pairs.contains(&(x, z)) {
                    new.push((x, z));
                }
            }
        }
        if new.is_empty() {
            return;
        }
        pairs.extend(new);
    }
}

fn facts(net: &Net, scope: Option<usize>) -> Facts {
    let mut eq = BTreeSet::new();
    let mut neq = BTreeSet::new();
    for e in 0..net.owner.len() {
        eq.insert((e, e));
    }
    for &(s, t, equivalent, d) in &net.assertions {
        if scope.is_some_and(|sc| sc != d) {
            continue;
        }
        let set = if equivalent { &mut eq } else { &mut neq };
        set.insert((s, t));
        set.insert((t, s));
    }
    saturate(&mut eq);
    let mut below: BTreeSet<(usize, usize)> = net.subclass.iter().copied().collect();
    saturate(&mut below);
    Facts { eq, below, neq }
}

fn negatives(net: &Net, f: &Facts, p: Pending, one_to_one: bool) -> BTreeSet<RuleName> {
    let mut rules = BTreeSet::new();
    let disjoint = |a: usize, b: usize| net.disjoint.contains(&(a, b)) || net.disjoint.contains(&(b, a));
    for (z, y) in [(p.source, p.target), (p.target, p.source)] {
        for &(x, y2) in &f.eq {
            if y2 != y {
                continue;
            }
            if z != x && (f.below.contains(&(z, x)) || f.below.contains(&(x, z))) {
                rules.insert(RuleName::Subsumption);
            }
            if disjoint(z, x) {
                rules.insert(RuleName::Disjoint);
            }
        }
    }
    if one_to_one {
        let (oa, ob) = net.datasets[p.dataset];
        let (ow, ov) = if net.owner[p.source] == oa { (oa, ob) } else { (ob, oa) };
        for (anchor, other, home) in [(p.target, p.source, ow), (p.source, p.target, ov)] {
            for x in 0..net.owner.len() {
                if x != other && net.owner[x] == home && f.eq.contains(&(x, anchor)) {
                    rules.insert(RuleName::OneToOne);
                }
            }
        }
    }
    rules
}

/// What should be reported for each pending pair.
pub fn infer(net: &Net, pending: &[Pending], one_to_one: bool, cross_dataset: bool) -> Vec<Option<Found>> {
    let shared = cross_dataset.then(|| facts(net, None));
    let scoped: Vec<Facts> = if cross_dataset {
        Vec::new()
    } else {
        (0..net.datasets.len()).map(|d| facts(net, Some(d))).collect()
    };
    pending
        .iter()
        .map(|&p| {
            let f = shared.as_ref().unwrap_or_else(|| &scoped[p.dataset]);
            let eq = f.eq.contains(&(p.source, p.target));
            let neg = negatives(net, f, p, one_to_one);
            let asserted_neq = f.neq.contains(&(p.source, p.target));
            match (eq, neg.is_empty()) {
                (true, false) => Some(Found::Conflict),
                (true, true) if asserted_neq => Some(Found::Conflict),
                (true, true) => Some(Found::Equivalent),
                (false, false) => Some(Found::NotEquivalent(neg)),
                (false, true) => None,
            }
        })
        .collect()
}
