use super::{OntologyNetwork, Rule, Support};
use crate::ontology::local_name;
use crate::task::Verdict;

fn display(net: &OntologyNetwork, iri: &str) -> String {
    match net.home_of(iri) {
        Some(o) => format!("{o}:{}", local_name(iri)),
        None => iri.to_string(),
    }
}

/// One premise in text form: `A ≡ B [dataset]`, `D ⊑ A`, `D ⊓ A ⊑ ⊥`.
pub fn render_support(net: &OntologyNetwork, support: &Support) -> String {
    match support {
        Support::Assertion(a) => {
            let rel = match a.value {
                Verdict::Equivalent => "≡",
                Verdict::NotEquivalent => "≢",
            };
            format!(
                "{} {rel} {} [{}]",
                display(net, &a.source),
                display(net, &a.target),
                a.dataset_id
            )
        }
        Support::Subclass { child, parent } => {
            format!("{} ⊑ {}", display(net, child), display(net, parent))
        }
        Support::Disjoint { x, y } => format!("{} ⊓ {} ⊑ ⊥", display(net, x), display(net, y)),
    }
}

/// `<value> inferred by <rule>: s1; s2; ...`
pub fn render_explanation(
    net: &OntologyNetwork,
    value: Verdict,
    rule: Rule,
    supports: &[Support],
) -> String {
    let parts: Vec<String> = supports.iter().map(|s| render_support(net, s)).collect();
    format!("{value} inferred by {rule}: {}", parts.join("; "))
}
