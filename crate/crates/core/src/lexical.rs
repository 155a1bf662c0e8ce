//! Lexical similarity used to split seed pairs into trivial and non-trivial.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::EntityRef;

pub const DEFAULT_TRIVIAL_SIMILARITY: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("entity {iri} has neither a local name nor a label")]
pub struct MissingLexicalForm {
    pub iri: String,
}

/// Splits camel case (`PaperAbstract` → `Paper`, `Abstract`; `XMLFile` →
/// `XML`, `File`) and treats `_`, `-` and whitespace as separators.
pub fn tokens(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if c.is_uppercase() && !cur.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                out.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Case-folded concatenation of [`tokens`].
pub fn normalize(s: &str) -> String {
    tokens(s).concat().to_lowercase()
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - lev(a, b) / max(|a|, |b|)` over characters; 1.0 for two empty strings.
pub fn normalized_similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

fn lexical_forms(e: &EntityRef) -> Result<Vec<String>, MissingLexicalForm> {
    let forms: Vec<String> = std::iter::once(e.local_name.as_str())
        .chain(e.labels.iter().map(String::as_str))
        .map(normalize)
        .filter(|f| !f.is_empty())
        .collect();
    if forms.is_empty() {
        Err(MissingLexicalForm { iri: e.iri.clone() })
    } else {
        Ok(forms)
    }
}

/// Highest normalized similarity over all (name or label) × (name or label)
/// combinations of the two entities.
pub fn max_similarity(e1: &EntityRef, e2: &EntityRef) -> Result<f64, MissingLexicalForm> {
    let left = lexical_forms(e1)?;
    let right = lexical_forms(e2)?;
    let mut best = 0.0f64;
    for l in &left {
        for r in &right {
            best = best.max(normalized_similarity(l, r));
        }
    }
    Ok(best)
}

/// Classifies a pair as trivial iff its best lexical similarity is at least
/// `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrivialityClassifier {
    pub threshold: f64,
}

impl Default for TrivialityClassifier {
    fn default() -> Self {
        TrivialityClassifier {
            threshold: DEFAULT_TRIVIAL_SIMILARITY,
        }
    }
}

impl TrivialityClassifier {
    pub fn classify(&self, e1: &EntityRef, e2: &EntityRef) -> Result<Difficulty, MissingLexicalForm> {
        Ok(if max_similarity(e1, e2)? >= self.threshold {
            Difficulty::Trivial
        } else {
            Difficulty::Nontrivial
        })
    }
}

/// [`TrivialityClassifier::classify`] with the default 0.9 threshold.
pub fn classify_triviality(e1: &EntityRef, e2: &EntityRef) -> Result<Difficulty, MissingLexicalForm> {
    TrivialityClassifier::default().classify(e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(iri: &str) -> EntityRef {
        EntityRef::new("o", iri)
    }

    #[test]
    fn camel_case_split() {
        assert_eq!(tokens("PaperAbstract"), vec!["Paper", "Abstract"]);
        assert_eq!(tokens("Abstract_of_Paper"), vec!["Abstract", "of", "Paper"]);
        assert_eq!(tokens("XMLFile"), vec!["XML", "File"]);
        assert_eq!(tokens("has-Author 2"), vec!["has", "Author", "2"]);
        assert_eq!(normalize("Session_Chair"), "sessionchair");
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("chair", "sessionchair"), 7);
    }

    #[test]
    fn case_fold_identity_is_trivial() {
        assert_eq!(
            classify_triviality(&named("http://a#Paper"), &named("http://b#paper")).unwrap(),
            Difficulty::Trivial
        );
    }

    #[test]
    fn chair_vs_session_chair_is_nontrivial() {
        // 1 - 7/12
        let s = max_similarity(&named("http://a#Chair"), &named("http://b#SessionChair")).unwrap();
        assert!((s - 5.0 / 12.0).abs() < 1e-12);
        assert_eq!(
            classify_triviality(&named("http://a#Chair"), &named("http://b#SessionChair")).unwrap(),
            Difficulty::Nontrivial
        );
    }

    #[test]
    fn labels_participate() {
        let a = named("http://a#C001").with_labels(["Conference Paper"]);
        let b = named("http://b#X9").with_labels(["conference_paper"]);
        assert_eq!(classify_triviality(&a, &b).unwrap(), Difficulty::Trivial);
    }

    #[test]
    fn missing_forms() {
        let empty = named("http://a#");
        assert_eq!(
            classify_triviality(&empty, &named("http://b#X")),
            Err(MissingLexicalForm {
                iri: "http://a#".into()
            })
        );
    }
}
