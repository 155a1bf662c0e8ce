//! Request and response bodies.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crowdval_core::coherence::Rule;
use crowdval_core::revision::Origin;
use crowdval_core::{AlignmentFormat, Decision, OntologyFormat, PairKind, Status, TaskSettings};

use crate::model::{Role, UserView};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterUser {
    pub display_name: String,
    #[serde(default)]
    pub roles: BTreeSet<Role>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Registered {
    pub user: UserView,
    pub token: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Consent {
    pub consent: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateDomain {
    pub name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigureDomain {
    pub status: Status,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OntologyFile {
    pub format: OntologyFormat,
    pub content: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignmentFile {
    pub format: AlignmentFormat,
    pub content: String,
}

/// The three files are optional here so that a missing one is reported as
/// a bad request rather than a JSON error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UploadDataset {
    pub domain_id: String,
    pub name: String,
    pub ontology_a: Option<OntologyFile>,
    pub ontology_b: Option<OntologyFile>,
    pub reference: Option<AlignmentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetView {
    pub id: String,
    pub domain_id: String,
    pub ontology_a: String,
    pub ontology_b: String,
    pub reference_size: usize,
    pub status: Status,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigureDataset {
    pub threshold: Option<f64>,
    pub status: Option<Status>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterMatcher {
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub developer_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitAlignment {
    pub dataset_id: String,
    pub alignment: Option<AlignmentFile>,
    #[serde(default)]
    pub settings: TaskSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub id: String,
    pub matcher_id: String,
    pub matcher_name: String,
    pub dataset_id: String,
    pub domain_id: String,
    pub pair_count: usize,
    pub status: Status,
}

/// Developer view after an upload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskCreated {
    pub task: TaskSummary,
    pub settings: TaskSettings,
    pub disputed: usize,
    pub seeds: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    #[default]
    Annotate,
    Develop,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ViewQuery {
    #[serde(default)]
    pub view: View,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AsOfQuery {
    pub as_of: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityView {
    pub iri: String,
    pub ontology_id: String,
    pub local_name: String,
    pub labels: Vec<String>,
    pub description: Option<String>,
    pub ancestors: Vec<String>,
    pub descendants: Vec<String>,
    pub axioms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefillView {
    pub value: Decision,
    pub rule: Rule,
    pub explanation: String,
}

/// What an annotator sees for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorPair {
    pub id: String,
    pub source: EntityView,
    pub target: EntityView,
    pub decision: Decision,
    pub origin: Option<Origin>,
    pub prefill: Option<PrefillView>,
}

/// What the matcher's developers and administrators see for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeveloperPair {
    pub id: String,
    pub source: EntityView,
    pub target: EntityView,
    #[serde(flatten)]
    pub kind: PairKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitDecision {
    pub value: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefilledPair {
    pub pair_id: String,
    pub prefill: PrefillView,
}

/// Reply to a decision. Deliberately says nothing about trust or which
/// scores were recomputed, since that would reveal seed pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecorded {
    pub seq: u64,
    pub timestamp: String,
    pub pair_id: String,
    pub value: Decision,
    pub complete: bool,
    pub prefills_added: Vec<PrefilledPair>,
    pub prefills_retracted: Vec<String>,
}
