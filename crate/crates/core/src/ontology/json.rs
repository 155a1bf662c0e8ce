//! Canonical JSON encoding of ontologies and alignments.

use serde::{Deserialize, Serialize};

use super::{check_measure, Alignment, EntityRef, MappingCell, ModelError, Ontology, Relation};

#[derive(Debug, Default, Serialize, Deserialize)]
struct OntologyDoc {
    #[serde(default)]
    id: String,
    #[serde(default)]
    entities: Vec<EntityDoc>,
    #[serde(default)]
    subclass: Vec<(String, String)>,
    #[serde(default)]
    disjoint: Vec<(String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntityDoc {
    iri: String,
    #[serde(default)]
    labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct AlignmentDoc {
    #[serde(default)]
    source: String,
    #[serde(default)]
    target: String,
    #[serde(default)]
    cells: Vec<CellDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CellDoc {
    e1: Option<String>,
    e2: Option<String>,
    #[serde(default = "default_relation")]
    relation: String,
    #[serde(default = "default_measure")]
    measure: f64,
}

fn default_relation() -> String {
    "=".to_string()
}

fn default_measure() -> f64 {
    1.0
}

fn from_json<T: for<'de> Deserialize<'de> + Default>(text: &str) -> Result<T, ModelError> {
    if text.trim().is_empty() {
        return Ok(T::default());
    }
    serde_json::from_str(text).map_err(|e| ModelError::parse(e.line(), e.column(), e.to_string()))
}

pub(super) fn parse_ontology(text: &str) -> Result<Ontology, ModelError> {
    let doc: OntologyDoc = from_json(text)?;
    let mut ontology = Ontology::new(doc.id);
    for e in doc.entities {
        if e.iri.is_empty() {
            return Err(ModelError::Validation("entity with empty iri".into()));
        }
        let mut entity = EntityRef::new(ontology.id.clone(), e.iri.clone()).with_labels(e.labels);
        entity.description = e.description;
        if !ontology.add_entity(entity) {
            return Err(ModelError::Validation(format!("duplicate entity iri {}", e.iri)));
        }
    }
    for (child, parent) in &doc.subclass {
        ontology.add_subclass(child, parent);
    }
    for (x, y) in &doc.disjoint {
        ontology.add_disjoint(x, y);
    }
    Ok(ontology)
}

pub(super) fn parse_alignment(text: &str) -> Result<Alignment, ModelError> {
    let doc: AlignmentDoc = from_json(text)?;
    let mut alignment = Alignment::new(doc.source, doc.target);
    for (idx, cell) in doc.cells.into_iter().enumerate() {
        let (Some(e1), Some(e2)) = (cell.e1, cell.e2) else {
            return Err(ModelError::parse(0, 0, format!("cell #{idx} lacks e1 or e2")));
        };
        let relation = Relation::parse(&cell.relation, &e1, &e2)?;
        let measure = check_measure(cell.measure, &e1, &e2)?;
        alignment.insert(MappingCell {
            source: e1,
            target: e2,
            relation,
            measure,
        });
    }
    Ok(alignment)
}

/// Serializes an ontology to the canonical JSON format (pretty-printed,
/// entities ordered by IRI, each disjoint pair written once).
pub fn ontology_to_json(o: &Ontology) -> String {
    let doc = OntologyDoc {
        id: o.id.clone(),
        entities: o
            .entities()
            .map(|e| EntityDoc {
                iri: e.iri.clone(),
                labels: e.labels.clone(),
                description: e.description.clone(),
            })
            .collect(),
        subclass: o.subclass_edges().iter().cloned().collect(),
        disjoint: o
            .disjoint_unordered()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("ontology document serializes")
}

pub fn alignment_to_json(a: &Alignment) -> String {
    let doc = AlignmentDoc {
        source: a.source_ontology_id.clone(),
        target: a.target_ontology_id.clone(),
        cells: a
            .cells()
            .map(|c| CellDoc {
                e1: Some(c.source.clone()),
                e2: Some(c.target.clone()),
                relation: "=".into(),
                measure: c.measure,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("alignment document serializes")
}

#[cfg(test)]
mod tests {
    use super::super::{parse_alignment, parse_ontology, AlignmentFormat, OntologyFormat};
    use super::*;

    const ABC: &str = r#"{
        "id": "conf",
        "extra": {"ignored": true},
        "entities": [
            {"iri": "http://x/conf#A", "labels": ["Alpha", "First"]},
            {"iri": "http://x/conf#B", "labels": ["Beta"], "description": "second"},
            {"iri": "http://x/conf#C"}
        ],
        "subclass": [["http://x/conf#B", "http://x/conf#A"], ["http://x/conf#C", "http://x/conf#A"]],
        "disjoint": [["http://x/conf#B", "http://x/conf#C"]]
    }"#;

    #[test]
    fn three_class_document_field_by_field() {
        let o = parse_ontology(ABC.as_bytes(), OntologyFormat::CanonicalJson).unwrap();
        assert_eq!(o.id, "conf");
        assert_eq!(o.entity_count(), 3);
        assert_eq!(o.subclass_edges().len(), 2);
        assert_eq!(o.disjoint_unordered().count(), 1);
        assert!(o.are_disjoint("http://x/conf#B", "http://x/conf#C"));
        assert!(o.are_disjoint("http://x/conf#C", "http://x/conf#B"));
        let a = o.entity("http://x/conf#A").unwrap();
        assert_eq!(a.labels, vec!["Alpha", "First"]);
        assert_eq!(a.local_name, "A");
        assert_eq!(a.ontology_id, "conf");
        assert_eq!(
            o.entity("http://x/conf#B").unwrap().description.as_deref(),
            Some("second")
        );
    }

    #[test]
    fn empty_document_is_empty_ontology() {
        for doc in ["", "{}", "  \n"] {
            let o = parse_ontology(doc.as_bytes(), OntologyFormat::CanonicalJson).unwrap();
            assert_eq!(o.entity_count(), 0);
            assert!(o.subclass_edges().is_empty());
        }
    }

    #[test]
    fn self_edge_is_validation_error() {
        let doc = r#"{"id":"o","entities":[{"iri":"A"}],"subclass":[["A","A"]]}"#;
        let err = parse_ontology(doc.as_bytes(), OntologyFormat::CanonicalJson).unwrap_err();
        assert!(matches!(err, ModelError::Validation(ref m) if m.contains("cycle")), "{err}");
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_ontology(b"{\n  \"id\": \"o\",\n  oops\n}", OntologyFormat::CanonicalJson)
            .unwrap_err();
        match err {
            ModelError::Parse { pos, .. } => assert_eq!(pos.line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_iri_rejected() {
        let doc = r#"{"id":"o","entities":[{"iri":"A"},{"iri":"A"}]}"#;
        assert!(matches!(
            parse_ontology(doc.as_bytes(), OntologyFormat::CanonicalJson),
            Err(ModelError::Validation(_))
        ));
    }

    #[test]
    fn alignment_cells_dedup_and_reject() {
        let doc = r#"{"source":"s","target":"t","cells":[
            {"e1":"a1","e2":"b1","relation":"=","measure":0.8},
            {"e1":"a1","e2":"b1","relation":"=","measure":1.0}
        ]}"#;
        let a = parse_alignment(doc.as_bytes(), AlignmentFormat::CanonicalJson).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.get("a1", "b1").unwrap().measure, 1.0);

        let lt = r#"{"cells":[{"e1":"a","e2":"b","relation":"<","measure":1.0}]}"#;
        assert!(matches!(
            parse_alignment(lt.as_bytes(), AlignmentFormat::CanonicalJson),
            Err(ModelError::UnsupportedRelation { .. })
        ));
        let out = r#"{"cells":[{"e1":"a","e2":"b","measure":1.5}]}"#;
        assert!(matches!(
            parse_alignment(out.as_bytes(), AlignmentFormat::CanonicalJson),
            Err(ModelError::Validation(_))
        ));
        let missing = r#"{"cells":[{"e1":"a","measure":0.5}]}"#;
        assert!(matches!(
            parse_alignment(missing.as_bytes(), AlignmentFormat::CanonicalJson),
            Err(ModelError::Parse { .. })
        ));
    }

    #[test]
    fn empty_alignment() {
        let a = parse_alignment(br#"{"source":"s","target":"t","cells":[]}"#, AlignmentFormat::CanonicalJson)
            .unwrap();
        assert!(a.is_empty());
    }
}
