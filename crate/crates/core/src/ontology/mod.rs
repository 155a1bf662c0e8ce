//! In-memory model of ontologies, alignments, datasets and domains.
//!
//! Ontologies are restricted to named classes, strict subclass edges and
//! pairwise disjointness. Alignments only carry equivalence cells.

mod json;
mod oaei;
mod tsv;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use json::{alignment_to_json, ontology_to_json};

/// Position of a syntax problem in an input document (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextPos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for TextPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parse error at {pos}: {message}")]
    Parse { pos: TextPos, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unsupported relation {relation:?} between {entity1} and {entity2}")]
    UnsupportedRelation {
        relation: String,
        entity1: String,
        entity2: String,
    },
    #[error("document is not valid UTF-8: {0}")]
    Encoding(String),
}

impl ModelError {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        ModelError::Parse {
            pos: TextPos { line, column },
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OntologyFormat {
    CanonicalJson,
    SimpleTsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignmentFormat {
    CanonicalJson,
    OaeiRdfSubset,
}

/// Short name of an IRI: the fragment after the last `#` or `/`.
pub fn local_name(iri: &str) -> &str {
    match iri.rfind(['#', '/']) {
        Some(idx) => &iri[idx + 1..],
        None => iri,
    }
}

/// A named class of one ontology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRef {
    pub ontology_id: String,
    pub iri: String,
    pub local_name: String,
    pub labels: Vec<String>,
    pub description: Option<String>,
}

impl EntityRef {
    pub fn new(ontology_id: impl Into<String>, iri: impl Into<String>) -> Self {
        let iri = iri.into();
        EntityRef {
            ontology_id: ontology_id.into(),
            local_name: local_name(&iri).to_string(),
            iri,
            labels: Vec::new(),
            description: None,
        }
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.labels = labels.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    /// First label if present, else the local name.
    pub fn display_name(&self) -> &str {
        self.labels
            .first()
            .map(String::as_str)
            .unwrap_or(&self.local_name)
    }
}

/// An ontology restricted to classes, strict subclass edges and disjointness.
///
/// The value may be constructed in an invalid state so that
/// [`validate_ontology`] can report on it; the parsers only ever return
/// ontologies for which the report is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    pub id: String,
    entities: BTreeMap<String, EntityRef>,
    subclass_edges: BTreeSet<(String, String)>,
    disjoint_pairs: BTreeSet<(String, String)>,
}

impl Ontology {
    pub fn new(id: impl Into<String>) -> Self {
        Ontology {
            id: id.into(),
            entities: BTreeMap::new(),
            subclass_edges: BTreeSet::new(),
            disjoint_pairs: BTreeSet::new(),
        }
    }

    /// Adds a class. Returns `false` if the IRI was already declared.
    pub fn add_entity(&mut self, mut entity: EntityRef) -> bool {
        if self.entities.contains_key(&entity.iri) {
            return false;
        }
        entity.ontology_id = self.id.clone();
        self.entities.insert(entity.iri.clone(), entity);
        true
    }

    /// Convenience for building fixtures: adds a class with the given labels.
    pub fn add_class<S: AsRef<str>>(&mut self, iri: &str, labels: &[S]) -> &mut Self {
        let entity = EntityRef::new(self.id.clone(), iri)
            .with_labels(labels.iter().map(|l| l.as_ref().to_string()));
        self.add_entity(entity);
        self
    }

    pub fn add_subclass(&mut self, child: &str, parent: &str) -> &mut Self {
        self.subclass_edges
            .insert((child.to_string(), parent.to_string()));
        self
    }

    /// Stores the pair in both orientations.
    pub fn add_disjoint(&mut self, x: &str, y: &str) -> &mut Self {
        self.disjoint_pairs.insert((x.to_string(), y.to_string()));
        self.disjoint_pairs.insert((y.to_string(), x.to_string()));
        self
    }

    pub fn entity(&self, iri: &str) -> Option<&EntityRef> {
        self.entities.get(iri)
    }

    pub fn contains(&self, iri: &str) -> bool {
        self.entities.contains_key(iri)
    }

    pub fn entities(&self) -> impl Iterator<Item = &EntityRef> {
        self.entities.values()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn subclass_edges(&self) -> &BTreeSet<(String, String)> {
        &self.subclass_edges
    }

    /// Disjoint pairs, stored in both orientations.
    pub fn disjoint_pairs(&self) -> &BTreeSet<(String, String)> {
        &self.disjoint_pairs
    }

    /// Each unordered disjoint pair once, smaller IRI first.
    pub fn disjoint_unordered(&self) -> impl Iterator<Item = (&str, &str)> {
        self.disjoint_pairs
            .iter()
            .filter(|(x, y)| x <= y)
            .map(|(x, y)| (x.as_str(), y.as_str()))
    }

    pub fn are_disjoint(&self, x: &str, y: &str) -> bool {
        self.disjoint_pairs
            .contains(&(x.to_string(), y.to_string()))
    }

    pub fn direct_parents<'a>(&'a self, iri: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.subclass_edges
            .iter()
            .filter(move |(c, _)| c == iri)
            .map(|(_, p)| p.as_str())
    }

    pub fn direct_children<'a>(&'a self, iri: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.subclass_edges
            .iter()
            .filter(move |(_, p)| p == iri)
            .map(|(c, _)| c.as_str())
    }

    pub fn parse(bytes: &[u8], format: OntologyFormat) -> Result<Ontology, ModelError> {
        parse_ontology(bytes, format)
    }

    /// Returns an error naming the first violated invariant, if any.
    pub(crate) fn into_validated(self) -> Result<Ontology, ModelError> {
        let report = validate_ontology(&self);
        match report.findings.first() {
            None => Ok(self),
            Some(finding) => Err(ModelError::Validation(finding.to_string())),
        }
    }
}

/// One violated ontology invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    DanglingEdge { child: String, parent: String },
    Cycle { members: Vec<String> },
    ReflexiveDisjoint { iri: String },
    DanglingDisjoint { x: String, y: String },
    AsymmetricDisjoint { x: String, y: String },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DanglingEdge { child, parent } => {
                write!(f, "subclass edge ({child}, {parent}) references an undeclared entity")
            }
            Finding::Cycle { members } => {
                write!(f, "strict subclass cycle through [{}]", members.join(", "))
            }
            Finding::ReflexiveDisjoint { iri } => write!(f, "{iri} is declared disjoint with itself"),
            Finding::DanglingDisjoint { x, y } => {
                write!(f, "disjointness ({x}, {y}) references an undeclared entity")
            }
            Finding::AsymmetricDisjoint { x, y } => {
                write!(f, "disjointness ({x}, {y}) is not stored symmetrically")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Lists every violated invariant of `o`. Cycles are reported once per
/// strongly connected component (or self-loop), members sorted.
pub fn validate_ontology(o: &Ontology) -> ValidationReport {
    let mut findings = Vec::new();

    for (child, parent) in &o.subclass_edges {
        if !o.contains(child) || !o.contains(parent) {
            findings.push(Finding::DanglingEdge {
                child: child.clone(),
                parent: parent.clone(),
            });
        }
    }

    findings.extend(
        subclass_cycles(o)
            .into_iter()
            .map(|members| Finding::Cycle { members }),
    );

    for (x, y) in &o.disjoint_pairs {
        if x == y {
            findings.push(Finding::ReflexiveDisjoint { iri: x.clone() });
            continue;
        }
        if x < y && (!o.contains(x) || !o.contains(y)) {
            findings.push(Finding::DanglingDisjoint {
                x: x.clone(),
                y: y.clone(),
            });
        }
        if !o.disjoint_pairs.contains(&(y.clone(), x.clone())) {
            findings.push(Finding::AsymmetricDisjoint {
                x: x.clone(),
                y: y.clone(),
            });
        }
    }

    ValidationReport { findings }
}

fn subclass_cycles(o: &Ontology) -> Vec<Vec<String>> {
    use petgraph::graphmap::DiGraphMap;

    let mut graph: DiGraphMap<&str, ()> = DiGraphMap::new();
    for (child, parent) in &o.subclass_edges {
        graph.add_edge(child.as_str(), parent.as_str(), ());
    }
    let mut cycles: Vec<Vec<String>> = petgraph::algo::tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut members: Vec<String> = scc.into_iter().map(str::to_string).collect();
            members.sort();
            members
        })
        .collect();
    cycles.sort();
    cycles
}

pub fn parse_ontology(bytes: &[u8], format: OntologyFormat) -> Result<Ontology, ModelError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ModelError::Encoding(e.to_string()))?;
    let ontology = match format {
        OntologyFormat::CanonicalJson => json::parse_ontology(text)?,
        OntologyFormat::SimpleTsv => tsv::parse_ontology(text)?,
    };
    ontology.into_validated()
}

/// The only supported mapping relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Equivalence,
}

impl Relation {
    pub fn parse(symbol: &str, entity1: &str, entity2: &str) -> Result<Relation, ModelError> {
        match symbol.trim() {
            "=" => Ok(Relation::Equivalence),
            other => Err(ModelError::UnsupportedRelation {
                relation: other.to_string(),
                entity1: entity1.to_string(),
                entity2: entity2.to_string(),
            }),
        }
    }
}

/// Identity of a cell: `(source IRI, target IRI)`, compared exactly.
pub type CellKey = (String, String);

/// One equivalence correspondence. Entities are held by IRI and resolved
/// against the ontologies of the enclosing alignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingCell {
    pub source: String,
    pub target: String,
    pub relation: Relation,
    pub measure: f64,
}

impl MappingCell {
    pub fn new(source: impl Into<String>, target: impl Into<String>, measure: f64) -> Self {
        MappingCell {
            source: source.into(),
            target: target.into(),
            relation: Relation::Equivalence,
            measure,
        }
    }

    pub fn key(&self) -> CellKey {
        (self.source.clone(), self.target.clone())
    }
}

/// A set of equivalence cells between two ontologies, keyed by entity pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Alignment {
    pub source_ontology_id: String,
    pub target_ontology_id: String,
    cells: BTreeMap<CellKey, MappingCell>,
}

impl Alignment {
    pub fn new(source_ontology_id: impl Into<String>, target_ontology_id: impl Into<String>) -> Self {
        Alignment {
            source_ontology_id: source_ontology_id.into(),
            target_ontology_id: target_ontology_id.into(),
            cells: BTreeMap::new(),
        }
    }

    /// Inserts a cell; on a duplicate entity pair the higher measure wins.
    pub fn insert(&mut self, cell: MappingCell) {
        match self.cells.get_mut(&cell.key()) {
            Some(existing) if existing.measure >= cell.measure => {}
            Some(existing) => *existing = cell,
            None => {
                self.cells.insert(cell.key(), cell);
            }
        }
    }

    pub fn with_cell(mut self, source: &str, target: &str, measure: f64) -> Self {
        self.insert(MappingCell::new(source, target, measure));
        self
    }

    pub fn cells(&self) -> impl Iterator<Item = &MappingCell> {
        self.cells.values()
    }

    pub fn get(&self, source: &str, target: &str) -> Option<&MappingCell> {
        self.cells.get(&(source.to_string(), target.to_string()))
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.get(source, target).is_some()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Fills in missing ontology ids (e.g. from OAEI files without
    /// `onto1`/`onto2`) and checks that present ids match.
    pub fn bind(&mut self, source_id: &str, target_id: &str) -> Result<(), ModelError> {
        for (declared, expected, side) in [
            (&mut self.source_ontology_id, source_id, "source"),
            (&mut self.target_ontology_id, target_id, "target"),
        ] {
            if declared.is_empty() {
                *declared = expected.to_string();
            } else if declared != expected {
                return Err(ModelError::Validation(format!(
                    "alignment {side} ontology is {declared:?}, expected {expected:?}"
                )));
            }
        }
        Ok(())
    }

    /// Checks that every cell entity is declared in the given ontologies.
    pub fn check_resolves(&self, source: &Ontology, target: &Ontology) -> Result<(), ModelError> {
        if self.source_ontology_id != source.id || self.target_ontology_id != target.id {
            return Err(ModelError::Validation(format!(
                "alignment binds ({}, {}) but ontologies are ({}, {})",
                self.source_ontology_id, self.target_ontology_id, source.id, target.id
            )));
        }
        for cell in self.cells() {
            if !source.contains(&cell.source) {
                return Err(ModelError::Validation(format!(
                    "cell source {} is not declared in {}",
                    cell.source, source.id
                )));
            }
            if !target.contains(&cell.target) {
                return Err(ModelError::Validation(format!(
                    "cell target {} is not declared in {}",
                    cell.target, target.id
                )));
            }
        }
        Ok(())
    }

    pub fn parse(bytes: &[u8], format: AlignmentFormat) -> Result<Alignment, ModelError> {
        parse_alignment(bytes, format)
    }
}

pub(crate) fn check_measure(measure: f64, e1: &str, e2: &str) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&measure) {
        Ok(measure)
    } else {
        Err(ModelError::Validation(format!(
            "measure {measure} of cell ({e1}, {e2}) is outside [0, 1]"
        )))
    }
}

pub fn parse_alignment(bytes: &[u8], format: AlignmentFormat) -> Result<Alignment, ModelError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ModelError::Encoding(e.to_string()))?;
    match format {
        AlignmentFormat::CanonicalJson => json::parse_alignment(text),
        AlignmentFormat::OaeiRdfSubset => oaei::parse_alignment(text),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Open,
    #[default]
    Closed,
}

/// Acceptance threshold on the vote share, within `[0.5, 1.0]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub const MAJORITY: Threshold = Threshold(0.5);

    pub fn new(value: f64) -> Result<Threshold, ModelError> {
        if (0.5..=1.0).contains(&value) {
            Ok(Threshold(value))
        } else {
            Err(ModelError::Validation(format!(
                "confidence threshold {value} is outside [0.5, 1.0]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::MAJORITY
    }
}

impl TryFrom<f64> for Threshold {
    type Error = ModelError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Threshold::new(value)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

/// Two ontologies plus their reference alignment.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub id: String,
    pub domain_id: String,
    pub ontology_a: Ontology,
    pub ontology_b: Ontology,
    pub reference: Alignment,
    pub status: Status,
    pub threshold: Threshold,
}

impl Dataset {
    /// Builds a dataset, binding and resolving the reference against the
    /// two ontologies. New datasets start closed with a 0.5 threshold.
    pub fn new(
        id: impl Into<String>,
        domain_id: impl Into<String>,
        ontology_a: Ontology,
        ontology_b: Ontology,
        mut reference: Alignment,
    ) -> Result<Dataset, ModelError> {
        reference.bind(&ontology_a.id, &ontology_b.id)?;
        reference.check_resolves(&ontology_a, &ontology_b)?;
        Ok(Dataset {
            id: id.into(),
            domain_id: domain_id.into(),
            ontology_a,
            ontology_b,
            reference,
            status: Status::Closed,
            threshold: Threshold::default(),
        })
    }
}

/// A named group of datasets sharing one ontology network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainGroup {
    pub id: String,
    pub name: String,
    pub datasets: Vec<String>,
    pub status: Status,
}

impl DomainGroup {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        DomainGroup {
            id: id.into(),
            name: name.into(),
            datasets: Vec::new(),
            status: Status::Closed,
        }
    }

    /// Returns `false` if the dataset is already listed.
    pub fn add_dataset(&mut self, dataset_id: &str) -> bool {
        if self.datasets.iter().any(|d| d == dataset_id) {
            return false;
        }
        self.datasets.push(dataset_id.to_string());
        true
    }
}
