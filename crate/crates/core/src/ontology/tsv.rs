//! Line-oriented tab-separated ontology format.
//!
//! ```text
//! # comment
//! id        conference
//! class     http://x/conf#Paper   Paper|Article   optional description
//! subclass  http://x/conf#Poster  http://x/conf#Paper
//! disjoint  http://x/conf#Paper   http://x/conf#Person
//! ```
//!
//! Labels are `|`-separated. Unknown record kinds are skipped.

use super::{EntityRef, ModelError, Ontology};

pub(super) fn parse_ontology(text: &str) -> Result<Ontology, ModelError> {
    let mut id = String::new();
    let mut classes = Vec::new();
    let mut subclass = Vec::new();
    let mut disjoint = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let need = |n: usize| -> Result<(), ModelError> {
            if cols.len() < n || cols[..n].iter().any(|c| c.is_empty()) {
                Err(ModelError::parse(
                    line_no,
                    line.len() + 1,
                    format!("{} record needs {} non-empty columns", cols[0], n - 1),
                ))
            } else {
                Ok(())
            }
        };
        match cols[0] {
            "id" => {
                need(2)?;
                id = cols[1].to_string();
            }
            "class" => {
                need(2)?;
                let labels: Vec<String> = cols
                    .get(2)
                    .map(|l| {
                        l.split('|')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(str::to_string)
                            .collect()
                    })
                    .unwrap_or_default();
                let description = cols.get(3).filter(|d| !d.is_empty()).map(|d| d.to_string());
                classes.push((line_no, cols[1].to_string(), labels, description));
            }
            "subclass" => {
                need(3)?;
                subclass.push((cols[1].to_string(), cols[2].to_string()));
            }
            "disjoint" => {
                need(3)?;
                disjoint.push((cols[1].to_string(), cols[2].to_string()));
            }
            _ => {}
        }
    }

    let mut ontology = Ontology::new(id);
    for (line_no, iri, labels, description) in classes {
        let mut entity = EntityRef::new(ontology.id.clone(), iri.clone()).with_labels(labels);
        entity.description = description;
        if !ontology.add_entity(entity) {
            return Err(ModelError::Validation(format!(
                "duplicate entity iri {iri} on line {line_no}"
            )));
        }
    }
    for (child, parent) in &subclass {
        ontology.add_subclass(child, parent);
    }
    for (x, y) in &disjoint {
        ontology.add_disjoint(x, y);
    }
    Ok(ontology)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_ontology, OntologyFormat};
    use super::*;

    #[test]
    fn parses_records_and_skips_unknown() {
        let text = "# test\nid\tconf\nclass\tA\tAlpha|First\tthe root\nclass\tB\tBeta\nclass\tC\n\
                    subclass\tB\tA\nsubclass\tC\tA\ndisjoint\tB\tC\nproperty\tignored\n";
        let o = parse_ontology(text.as_bytes(), OntologyFormat::SimpleTsv).unwrap();
        assert_eq!(o.id, "conf");
        assert_eq!(o.entity_count(), 3);
        assert_eq!(o.entity("A").unwrap().labels, vec!["Alpha", "First"]);
        assert_eq!(o.entity("A").unwrap().description.as_deref(), Some("the root"));
        assert_eq!(o.subclass_edges().len(), 2);
        assert!(o.are_disjoint("C", "B"));
    }

    #[test]
    fn short_record_reports_line() {
        let err = parse_ontology(b"id\to\nclass\tA\nsubclass\tA\n", OntologyFormat::SimpleTsv)
            .unwrap_err();
        match err {
            ModelError::Parse { pos, .. } => assert_eq!(pos.line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_empty_ontology() {
        let o = parse_ontology(b"", OntologyFormat::SimpleTsv).unwrap();
        assert_eq!(o.entity_count(), 0);
    }

    #[test]
    fn cycle_rejected() {
        let text = "class\tA\nclass\tB\nsubclass\tA\tB\nsubclass\tB\tA\n";
        assert!(matches!(
            parse_ontology(text.as_bytes(), OntologyFormat::SimpleTsv),
            Err(ModelError::Validation(_))
        ));
    }
}
