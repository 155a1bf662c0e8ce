//! Coherence reasoning over an ontology network.
//!
//! The network is the union of a domain's ontologies and one annotator's
//! current equivalence assertions. A forward-chaining closure over four
//! rules turns those assertions into pre-filled decisions for pairs the
//! annotator has not answered yet:
//!
//! | rule | premises | conclusion |
//! |------|----------|------------|
//! | `TransitiveEquivalence` | x≡y, y≡z | x≡z |
//! | `SubsumptionNegativity` | x≡y, z ⊏ x or x ⊏ z | z≢y |
//! | `Disjointedness` | x≡y, Disjoint(z, x) | z≢y |
//! | `OneToOneNegativity` | x≡y (one-to-one task) | w≢y, x≢v for w≠x, v≠y |
//!
//! Equivalence is only produced by the first rule, so the closure is the
//! connected components of the asserted equivalences; the negative rules are
//! then evaluated once against those components. Every derivation keeps a
//! minimal support set (shortest equivalence path plus the axioms used),
//! which is what the explanation text and retraction work from.

mod closure;
mod explain;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::Ontology;
use crate::task::{PairId, Verdict};

pub use closure::Closure;
pub use explain::{render_explanation, render_support};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    TransitiveEquivalence,
    SubsumptionNegativity,
    Disjointedness,
    OneToOneNegativity,
}

impl Rule {
    pub const ALL: [Rule; 4] = [
        Rule::TransitiveEquivalence,
        Rule::SubsumptionNegativity,
        Rule::Disjointedness,
        Rule::OneToOneNegativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::TransitiveEquivalence => "TransitiveEquivalence",
            Rule::SubsumptionNegativity => "SubsumptionNegativity",
            Rule::Disjointedness => "Disjointedness",
            Rule::OneToOneNegativity => "OneToOneNegativity",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssertionSource {
    UserDecision,
    Inferred,
}

/// An equivalence judgement taken as a fact by the reasoner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assertion {
    pub source: String,
    pub target: String,
    pub value: Verdict,
    pub origin: AssertionSource,
    pub dataset_id: String,
}

impl Assertion {
    pub fn user(source: &str, target: &str, value: Verdict, dataset_id: &str) -> Self {
        Assertion {
            source: source.to_string(),
            target: target.to_string(),
            value,
            origin: AssertionSource::UserDecision,
            dataset_id: dataset_id.to_string(),
        }
    }

    pub fn equivalent(source: &str, target: &str, dataset_id: &str) -> Self {
        Assertion::user(source, target, Verdict::Equivalent, dataset_id)
    }

    pub fn not_equivalent(source: &str, target: &str, dataset_id: &str) -> Self {
        Assertion::user(source, target, Verdict::NotEquivalent, dataset_id)
    }
}

/// The two ontologies a dataset aligns, by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetScope {
    pub id: String,
    pub ontology_a: String,
    pub ontology_b: String,
}

impl DatasetScope {
    pub fn new(id: &str, ontology_a: &str, ontology_b: &str) -> Self {
        DatasetScope {
            id: id.to_string(),
            ontology_a: ontology_a.to_string(),
            ontology_b: ontology_b.to_string(),
        }
    }
}

/// A premise of a derivation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    Assertion(Assertion),
    Subclass { child: String, parent: String },
    Disjoint { x: String, y: String },
}

/// How one conclusion was reached. `rule` is `None` when the conclusion is
/// itself an asserted fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: Option<Rule>,
    pub supports: Vec<Support>,
}

/// A decision inferred for a pending pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreFill {
    pub pair_id: PairId,
    pub source: String,
    pub target: String,
    pub dataset_id: String,
    pub value: Verdict,
    pub rule: Rule,
    pub supports: Vec<Support>,
    pub explanation: String,
}

/// A pending pair for which both values are derivable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub pair_id: PairId,
    pub source: String,
    pub target: String,
    pub equivalent: Derivation,
    pub not_equivalent: Derivation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inference {
    pub prefills: Vec<PreFill>,
    pub conflicts: Vec<Conflict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefillSettings {
    /// Enables `OneToOneNegativity` for the pending pairs.
    pub one_to_one: bool,
    /// Lets assertions from every dataset of the domain participate; when
    /// off, a pending pair only sees assertions from its own dataset.
    pub cross_dataset: bool,
}

impl Default for PrefillSettings {
    fn default() -> Self {
        PrefillSettings {
            one_to_one: true,
            cross_dataset: true,
        }
    }
}

/// A pair awaiting a decision, with the dataset it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PendingPair {
    pub id: PairId,
    pub source: String,
    pub target: String,
    pub dataset_id: String,
}

impl PendingPair {
    pub fn new(id: impl Into<String>, source: &str, target: &str, dataset_id: &str) -> Self {
        PendingPair {
            id: PairId::new(id),
            source: source.to_string(),
            target: target.to_string(),
            dataset_id: dataset_id.to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("assertion ({e1}, {e2}) references an entity outside the network")]
    DanglingAssertion { e1: String, e2: String },
}

/// Ontologies of one domain plus assertions, with hierarchy indexes.
#[derive(Debug, Clone)]
pub struct OntologyNetwork {
    ontologies: BTreeMap<String, Ontology>,
    datasets: BTreeMap<String, DatasetScope>,
    assertions: Vec<Assertion>,
    home: HashMap<String, String>,
    parents: HashMap<String, Vec<String>>,
    children: HashMap<String, Vec<String>>,
    ancestors: HashMap<String, HashSet<String>>,
}

/// Builds the network, indexing the merged class hierarchy. Entities are
/// identified by IRI across ontologies. Exact duplicate assertions are
/// collapsed.
pub fn build_network(
    ontologies: impl IntoIterator<Item = Ontology>,
    datasets: impl IntoIterator<Item = DatasetScope>,
    assertions: impl IntoIterator<Item = Assertion>,
) -> Result<OntologyNetwork, NetworkError> {
    let ontologies: BTreeMap<String, Ontology> =
        ontologies.into_iter().map(|o| (o.id.clone(), o)).collect();
    let mut net = OntologyNetwork {
        datasets: datasets.into_iter().map(|d| (d.id.clone(), d)).collect(),
        assertions: Vec::new(),
        home: HashMap::new(),
        parents: HashMap::new(),
        children: HashMap::new(),
        ancestors: HashMap::new(),
        ontologies,
    };
    net.index_hierarchy();
    net.add_assertions(assertions)?;
    Ok(net)
}

impl OntologyNetwork {
    fn index_hierarchy(&mut self) {
        for o in self.ontologies.values() {
            for e in o.entities() {
                self.home.entry(e.iri.clone()).or_insert_with(|| o.id.clone());
            }
            for (child, parent) in o.subclass_edges() {
                self.parents.entry(child.clone()).or_default().push(parent.clone());
                self.children.entry(parent.clone()).or_default().push(child.clone());
            }
        }
        for list in self.parents.values_mut().chain(self.children.values_mut()) {
            list.sort();
            list.dedup();
        }
        let entities: Vec<String> = self.home.keys().cloned().collect();
        for iri in entities {
            let mut seen = HashSet::new();
            let mut stack = vec![iri.clone()];
            while let Some(cur) = stack.pop() {
                for p in self.parents.get(&cur).into_iter().flatten() {
                    if p != &iri && seen.insert(p.clone()) {
                        stack.push(p.clone());
                    }
                }
            }
            self.ancestors.insert(iri, seen);
        }
    }

    /// Adds assertions after checking that both entities resolve.
    pub fn add_assertions(
        &mut self,
        assertions: impl IntoIterator<Item = Assertion>,
    ) -> Result<(), NetworkError> {
        let mut seen: BTreeSet<Assertion> = self.assertions.iter().cloned().collect();
        for a in assertions {
            if !self.home.contains_key(&a.source) || !self.home.contains_key(&a.target) {
                return Err(NetworkError::DanglingAssertion {
                    e1: a.source,
                    e2: a.target,
                });
            }
            if seen.insert(a.clone()) {
                self.assertions.push(a);
            }
        }
        Ok(())
    }

    /// A copy of the network without `removed`.
    pub fn without(&self, removed: &Assertion) -> OntologyNetwork {
        let mut next = self.clone();
        next.assertions.retain(|a| a != removed);
        next
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn ontologies(&self) -> impl Iterator<Item = &Ontology> {
        self.ontologies.values()
    }

    pub fn dataset(&self, id: &str) -> Option<&DatasetScope> {
        self.datasets.get(id)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &DatasetScope> {
        self.datasets.values()
    }

    pub fn contains_entity(&self, iri: &str) -> bool {
        self.home.contains_key(iri)
    }

    /// Id of the (first) ontology declaring `iri`.
    pub fn home_of(&self, iri: &str) -> Option<&str> {
        self.home.get(iri).map(String::as_str)
    }

    pub fn declares(&self, ontology_id: &str, iri: &str) -> bool {
        self.ontologies
            .get(ontology_id)
            .is_some_and(|o| o.contains(iri))
    }

    /// `z` is a strict sub- or superclass of `x`.
    pub fn strictly_related(&self, z: &str, x: &str) -> bool {
        z != x
            && (self.ancestors.get(z).is_some_and(|a| a.contains(x))
                || self.ancestors.get(x).is_some_and(|a| a.contains(z)))
    }

    pub fn disjoint(&self, x: &str, y: &str) -> bool {
        self.ontologies.values().any(|o| o.are_disjoint(x, y))
    }

    /// Shortest chain of direct subclass edges linking `z` and `x`, in
    /// either direction.
    pub fn hierarchy_path(&self, z: &str, x: &str) -> Option<Vec<Support>> {
        if self.ancestors.get(z).is_some_and(|a| a.contains(x)) {
            self.directed_path(z, x, &self.parents, false)
        } else if self.ancestors.get(x).is_some_and(|a| a.contains(z)) {
            self.directed_path(z, x, &self.children, true)
        } else {
            None
        }
    }

    fn directed_path(
        &self,
        from: &str,
        to: &str,
        next: &HashMap<String, Vec<String>>,
        downward: bool,
    ) -> Option<Vec<Support>> {
        let mut prev: HashMap<&str, &str> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        let mut seen: HashSet<&str> = HashSet::from([from]);
        while let Some(cur) = queue.pop_front() {
            if cur == to {
                break;
            }
            for n in next.get(cur).into_iter().flatten() {
                if seen.insert(n.as_str()) {
                    prev.insert(n.as_str(), cur);
                    queue.push_back(n.as_str());
                }
            }
        }
        if !seen.contains(to) {
            return None;
        }
        let mut steps = Vec::new();
        let mut cur = to;
        while cur != from {
            let p = prev[cur];
            let (child, parent) = if downward { (cur, p) } else { (p, cur) };
            steps.push(Support::Subclass {
                child: child.to_string(),
                parent: parent.to_string(),
            });
            cur = p;
        }
        steps.reverse();
        Some(steps)
    }

    /// Direct relatives for display: ancestors and descendants up to `depth`.
    pub fn neighbourhood(&self, iri: &str, depth: usize) -> (Vec<String>, Vec<String>) {
        let walk = |next: &HashMap<String, Vec<String>>| {
            let mut out = Vec::new();
            let mut frontier = vec![iri.to_string()];
            for _ in 0..depth {
                let mut nf = Vec::new();
                for cur in &frontier {
                    for n in next.get(cur).into_iter().flatten() {
                        if !out.contains(n) {
                            out.push(n.clone());
                            nf.push(n.clone());
                        }
                    }
                }
                frontier = nf;
            }
            out
        };
        (walk(&self.parents), walk(&self.children))
    }

    fn scoped_closure(&self, dataset_id: Option<&str>, extra: Option<&Assertion>) -> Closure<'_> {
        Closure::new(self, dataset_id, extra)
    }
}

/// Derives pre-fills for `pending`. Seeds must not be passed here.
///
/// A pending pair gets a pre-fill when exactly one value is derivable; when
/// both are, it gets a [`Conflict`] instead. Output is sorted by pair id.
pub fn infer_prefills(
    network: &OntologyNetwork,
    pending: &[PendingPair],
    settings: PrefillSettings,
) -> Inference {
    let mut inference = Inference::default();
    let mut by_scope: BTreeMap<Option<&str>, Vec<&PendingPair>> = BTreeMap::new();
    for p in pending {
        let scope = (!settings.cross_dataset).then_some(p.dataset_id.as_str());
        by_scope.entry(scope).or_default().push(p);
    }
    for (scope, pairs) in by_scope {
        let closure = network.scoped_closure(scope, None);
        for p in pairs {
            closure.evaluate(p, settings.one_to_one, &mut inference);
        }
    }
    inference.prefills.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    inference.conflicts.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    inference
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CoherenceVerdict {
    Pass,
    Fail {
        rule: Option<Rule>,
        source: String,
        target: String,
    },
}

impl CoherenceVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CoherenceVerdict::Pass)
    }
}

/// Tests whether asserting `source ≡ target` (in `dataset_id`) is coherent
/// with the network: it fails when the rules then derive `NotEquivalent`
/// for the pair itself, or when the merge creates a pair with both values
/// that was not already conflicting.
pub fn coherence_check(
    network: &OntologyNetwork,
    source: &str,
    target: &str,
    dataset_id: &str,
    settings: PrefillSettings,
) -> CoherenceVerdict {
    let scope = (!settings.cross_dataset).then_some(dataset_id);
    let candidate = Assertion {
        source: source.to_string(),
        target: target.to_string(),
        value: Verdict::Equivalent,
        origin: AssertionSource::Inferred,
        dataset_id: dataset_id.to_string(),
    };
    let after = network.scoped_closure(scope, Some(&candidate));
    let probe = PendingPair::new("", source, target, dataset_id);
    if let Some(d) = after.derive_not_equivalent(&probe, settings.one_to_one) {
        return CoherenceVerdict::Fail {
            rule: d.rule,
            source: source.to_string(),
            target: target.to_string(),
        };
    }
    let before = network.scoped_closure(scope, None);
    let already: HashSet<(String, String)> = before
        .component_conflicts(source, settings.one_to_one)
        .into_iter()
        .chain(before.component_conflicts(target, settings.one_to_one))
        .map(|(a, b, _)| (a, b))
        .collect();
    for (a, b, rule) in after.component_conflicts(source, settings.one_to_one) {
        if !already.contains(&(a.clone(), b.clone())) {
            return CoherenceVerdict::Fail {
                rule,
                source: a,
                target: b,
            };
        }
    }
    CoherenceVerdict::Pass
}

/// Pre-fills from `previous` that no longer hold once `removed` is gone.
///
/// Only pre-fills whose support mentions `removed` are re-derived against
/// `network` (which must already exclude it); the result equals rebuilding
/// from scratch and dropping every pre-fill that is not re-derived with the
/// same value. Pre-fills the annotator confirmed are decisions, not
/// pre-fills, so they are never in `previous`.
pub fn retract_dependents(
    removed: &Assertion,
    previous: &[PreFill],
    network: &OntologyNetwork,
    settings: PrefillSettings,
) -> Vec<PreFill> {
    let affected: Vec<&PreFill> = previous
        .iter()
        .filter(|p| {
            p.supports
                .iter()
                .any(|s| matches!(s, Support::Assertion(a) if a == removed))
        })
        .collect();
    if affected.is_empty() {
        return Vec::new();
    }
    let pending: Vec<PendingPair> = affected
        .iter()
        .map(|p| PendingPair {
            id: p.pair_id.clone(),
            source: p.source.clone(),
            target: p.target.clone(),
            dataset_id: p.dataset_id.clone(),
        })
        .collect();
    let rebuilt = infer_prefills(network, &pending, settings);
    let still: HashMap<&PairId, Verdict> = rebuilt
        .prefills
        .iter()
        .map(|p| (&p.pair_id, p.value))
        .collect();
    affected
        .into_iter()
        .filter(|p| still.get(&p.pair_id) != Some(&p.value))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests;
