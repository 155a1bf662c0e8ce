//! Core of the crowdsourced ontology-matching validation platform.
//!
//! The crate partitions matcher output against a reference alignment,
//! generates hidden seed pairs that measure annotator trustworthiness,
//! aggregates equivalence votes with trust weights, pre-fills decisions
//! through a small forward-chaining coherence reasoner, and keeps every
//! decision in an append-only, timestamped revision log.

pub mod coherence;
pub mod diff;
pub mod lexical;
pub mod ontology;
pub mod revision;
pub mod seeds;
pub mod task;
pub mod trust;
pub mod union_find;

pub use diff::{partition_mappings, MappingPartition};
pub use ontology::{
    parse_alignment, parse_ontology, validate_ontology, Alignment, AlignmentFormat, Dataset,
    DomainGroup, EntityRef, MappingCell, ModelError, Ontology, OntologyFormat, Status, Threshold,
};
pub use task::{AnnotationPair, Decision, PairId, PairKind, TaskId, TaskSettings, UserId};
