//! Tolerant reader for the OAEI Alignment RDF/XML format.
//!
//! Only `Cell` elements are interpreted: `entity1`/`entity2` (as
//! `rdf:resource` or text), `relation` (default `=`) and `measure`
//! (default 1.0). Namespaces are ignored and elements are matched by local
//! name. `onto1`/`onto2` are not used; the alignment is left unbound so the
//! caller can bind it to its own ontology ids.

use roxmltree::{Document, Node};

use super::{check_measure, Alignment, MappingCell, ModelError, Relation};

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
}

fn resource_or_text(node: Node<'_, '_>) -> Option<String> {
    let attr = node
        .attributes()
        .find(|a| a.name() == "resource" || a.name() == "about")
        .map(|a| a.value().trim().to_string());
    attr.or_else(|| node.text().map(|t| t.trim().to_string()))
        .filter(|s| !s.is_empty())
}

pub(super) fn parse_alignment(text: &str) -> Result<Alignment, ModelError> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        ModelError::parse(pos.row as usize, pos.col as usize, e.to_string())
    })?;

    let mut alignment = Alignment::new("", "");
    for cell in doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "Cell")
    {
        let pos = doc.text_pos_at(cell.range().start);
        let missing = |what: &str| {
            ModelError::parse(pos.row as usize, pos.col as usize, format!("Cell without {what}"))
        };
        let e1 = child(cell, "entity1")
            .and_then(resource_or_text)
            .ok_or_else(|| missing("entity1"))?;
        let e2 = child(cell, "entity2")
            .and_then(resource_or_text)
            .ok_or_else(|| missing("entity2"))?;
        let relation = child(cell, "relation")
            .and_then(|n| n.text())
            .unwrap_or("=");
        let relation = Relation::parse(relation, &e1, &e2)?;
        let measure = match child(cell, "measure").and_then(|n| n.text()) {
            None => 1.0,
            Some(t) => t.trim().parse::<f64>().map_err(|_| {
                ModelError::parse(
                    pos.row as usize,
                    pos.col as usize,
                    format!("measure {t:?} is not a number"),
                )
            })?,
        };
        let measure = check_measure(measure, &e1, &e2)?;
        alignment.insert(MappingCell {
            source: e1,
            target: e2,
            relation,
            measure,
        });
    }
    Ok(alignment)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_alignment as parse, AlignmentFormat};
    use super::*;

    fn wrap(cells: &str) -> String {
        format!(
            r#"<?xml version='1.0' encoding='utf-8' standalone='no'?>
<rdf:RDF xmlns='http://knowledgeweb.semanticweb.org/heterogeneity/alignment#'
         xmlns:rdf='http://www.w3.org/1999/02/22-rdf-syntax-ns#'
         xmlns:xsd='http://www.w3.org/2001/XMLSchema#'>
<Alignment>
  <xml>yes</xml>
  <level>0</level>
  <type>**</type>
  <onto1><Ontology rdf:about="http://cmt"><location>http://cmt</location></Ontology></onto1>
  <onto2><Ontology rdf:about="http://conference"/></onto2>
  {cells}
</Alignment>
</rdf:RDF>"#
        )
    }

    fn cell(e1: &str, e2: &str, rel: &str, measure: &str) -> String {
        format!(
            r#"<map><Cell>
      <entity1 rdf:resource='{e1}'/>
      <entity2 rdf:resource='{e2}'/>
      <relation>{rel}</relation>
      <measure rdf:datatype='xsd:float'>{measure}</measure>
    </Cell></map>"#
        )
    }

    #[test]
    fn reads_cells_and_dedups() {
        let doc = wrap(&format!(
            "{}{}{}",
            cell("http://cmt#Paper", "http://conference#Paper", "=", "0.8"),
            cell("http://cmt#Paper", "http://conference#Paper", "=", "1.0"),
            cell("http://cmt#Author", "http://conference#Author", "=", "0.9"),
        ));
        let a = parse(doc.as_bytes(), AlignmentFormat::OaeiRdfSubset).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.get("http://cmt#Paper", "http://conference#Paper").unwrap().measure, 1.0);
        assert!(a.source_ontology_id.is_empty());
    }

    #[test]
    fn zero_cells() {
        let a = parse(wrap("").as_bytes(), AlignmentFormat::OaeiRdfSubset).unwrap();
        assert!(a.is_empty());
    }

    #[test]
    fn subsumption_relation_rejected() {
        let doc = wrap(&cell("http://cmt#A", "http://conference#B", "&lt;", "1.0"));
        assert!(matches!(
            parse(doc.as_bytes(), AlignmentFormat::OaeiRdfSubset),
            Err(ModelError::UnsupportedRelation { ref relation, .. }) if relation == "<"
        ));
    }

    #[test]
    fn missing_entity_is_parse_error_with_position() {
        let doc = wrap("<map><Cell><entity1 rdf:resource='a'/><relation>=</relation></Cell></map>");
        match parse(doc.as_bytes(), AlignmentFormat::OaeiRdfSubset) {
            Err(ModelError::Parse { pos, message }) => {
                assert!(message.contains("entity2"));
                assert_eq!(pos.line, 11);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn measure_out_of_range() {
        let doc = wrap(&cell("a", "b", "=", "1.2"));
        assert!(matches!(
            parse(doc.as_bytes(), AlignmentFormat::OaeiRdfSubset),
            Err(ModelError::Validation(_))
        ));
    }

    #[test]
    fn malformed_xml() {
        assert!(matches!(
            parse(b"<rdf:RDF><Cell>", AlignmentFormat::OaeiRdfSubset),
            Err(ModelError::Parse { .. })
        ));
    }

    #[test]
    fn text_entities_and_defaults() {
        let doc = wrap("<map><Cell><entity1>a</entity1><entity2>b</entity2></Cell></map>");
        let a = parse(doc.as_bytes(), AlignmentFormat::OaeiRdfSubset).unwrap();
        assert_eq!(a.get("a", "b").unwrap().measure, 1.0);
    }
}
