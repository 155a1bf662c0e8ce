//! Reference/matcher difference: which mappings need human validation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{Alignment, CellKey, MappingCell};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("incompatible alignments: reference binds ({ref_source}, {ref_target}), matcher binds ({matcher_source}, {matcher_target})")]
pub struct IncompatibleAlignments {
    pub ref_source: String,
    pub ref_target: String,
    pub matcher_source: String,
    pub matcher_target: String,
}

/// Split of `R ∪ A` by entity pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MappingPartition {
    /// `A ∩ R`; cells are taken from the reference.
    pub non_disputed: BTreeMap<CellKey, MappingCell>,
    /// `R − A`.
    pub reference_only: BTreeMap<CellKey, MappingCell>,
    /// `A − R`.
    pub matcher_only: BTreeMap<CellKey, MappingCell>,
}

impl MappingPartition {
    pub fn disputed_len(&self) -> usize {
        self.reference_only.len() + self.matcher_only.len()
    }

    pub fn contains_any(&self, key: &CellKey) -> bool {
        self.non_disputed.contains_key(key)
            || self.reference_only.contains_key(key)
            || self.matcher_only.contains_key(key)
    }
}

/// Partitions by exact `(source IRI, target IRI)` identity. Measures are
/// ignored. Both alignments must bind the same ontology pair in the same
/// orientation.
pub fn partition_mappings(
    reference: &Alignment,
    matcher: &Alignment,
) -> Result<MappingPartition, IncompatibleAlignments> {
    if reference.source_ontology_id != matcher.source_ontology_id
        || reference.target_ontology_id != matcher.target_ontology_id
    {
        return Err(IncompatibleAlignments {
            ref_source: reference.source_ontology_id.clone(),
            ref_target: reference.target_ontology_id.clone(),
            matcher_source: matcher.source_ontology_id.clone(),
            matcher_target: matcher.target_ontology_id.clone(),
        });
    }

    let mut partition = MappingPartition::default();
    for cell in reference.cells() {
        let bucket = if matcher.contains(&cell.source, &cell.target) {
            &mut partition.non_disputed
        } else {
            &mut partition.reference_only
        };
        bucket.insert(cell.key(), cell.clone());
    }
    for cell in matcher.cells() {
        if !reference.contains(&cell.source, &cell.target) {
            partition.matcher_only.insert(cell.key(), cell.clone());
        }
    }
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(m: &BTreeMap<CellKey, MappingCell>) -> Vec<(&str, &str)> {
        m.keys().map(|(a, b)| (a.as_str(), b.as_str())).collect()
    }

    #[test]
    fn identical_alignments_have_no_disputes() {
        let r = Alignment::new("s", "t").with_cell("a1", "b1", 1.0);
        let p = partition_mappings(&r, &r.clone()).unwrap();
        assert_eq!(keys(&p.non_disputed), vec![("a1", "b1")]);
        assert_eq!(p.disputed_len(), 0);
    }

    #[test]
    fn mixed_case() {
        let r = Alignment::new("s", "t")
            .with_cell("a1", "b1", 1.0)
            .with_cell("a2", "b2", 1.0);
        let a = Alignment::new("s", "t")
            .with_cell("a1", "b1", 0.4)
            .with_cell("a3", "b3", 0.9);
        let p = partition_mappings(&r, &a).unwrap();
        assert_eq!(keys(&p.non_disputed), vec![("a1", "b1")]);
        assert_eq!(keys(&p.reference_only), vec![("a2", "b2")]);
        assert_eq!(keys(&p.matcher_only), vec![("a3", "b3")]);
        // measure comes from the reference
        assert_eq!(p.non_disputed.values().next().unwrap().measure, 1.0);
    }

    #[test]
    fn empty_reference() {
        let r = Alignment::new("s", "t");
        let a = Alignment::new("s", "t").with_cell("a1", "b1", 1.0);
        let p = partition_mappings(&r, &a).unwrap();
        assert!(p.non_disputed.is_empty() && p.reference_only.is_empty());
        assert_eq!(keys(&p.matcher_only), vec![("a1", "b1")]);
    }

    #[test]
    fn orientation_mismatch_rejected() {
        let r = Alignment::new("s", "t");
        let a = Alignment::new("t", "s");
        assert!(partition_mappings(&r, &a).is_err());
    }
}
