//! Identifiers, decisions and annotation pairs shared across modules.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::seeds::SeedLabel;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

string_id!(UserId);
string_id!(TaskId);
string_id!(
    /// Opaque pair identifier; never encodes whether the pair is a seed.
    PairId
);

/// An annotator's answer for one pair. `NA` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Decision {
    Equivalent,
    NotEquivalent,
    #[default]
    #[serde(rename = "NA")]
    NA,
}

impl Decision {
    pub fn is_na(self) -> bool {
        self == Decision::NA
    }

    pub fn verdict(self) -> Option<Verdict> {
        match self {
            Decision::Equivalent => Some(Verdict::Equivalent),
            Decision::NotEquivalent => Some(Verdict::NotEquivalent),
            Decision::NA => None,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Equivalent => "Equivalent",
            Decision::NotEquivalent => "NotEquivalent",
            Decision::NA => "NA",
        })
    }
}

/// A definite equivalence judgement (gold answers, assertions, pre-fills).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
}

impl Verdict {
    pub fn negate(self) -> Verdict {
        match self {
            Verdict::Equivalent => Verdict::NotEquivalent,
            Verdict::NotEquivalent => Verdict::Equivalent,
        }
    }
}

impl From<Verdict> for Decision {
    fn from(v: Verdict) -> Decision {
        match v {
            Verdict::Equivalent => Decision::Equivalent,
            Verdict::NotEquivalent => Decision::NotEquivalent,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Decision::from(*self).fmt(f)
    }
}

/// Which side of the reference/matcher difference a disputed pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisputeSide {
    /// In the reference only (R − A).
    ReferenceOnly,
    /// In the matcher output only (A − R).
    MatcherOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairKind {
    Disputed { side: DisputeSide },
    Seed(SeedLabel),
}

/// One unit of annotation work inside a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationPair {
    pub id: PairId,
    pub source: String,
    pub target: String,
    pub kind: PairKind,
}

impl AnnotationPair {
    pub fn is_seed(&self) -> bool {
        matches!(self.kind, PairKind::Seed(_))
    }

    pub fn seed(&self) -> Option<&SeedLabel> {
        match &self.kind {
            PairKind::Seed(label) => Some(label),
            PairKind::Disputed { .. } => None,
        }
    }

    pub fn dispute_side(&self) -> Option<DisputeSide> {
        match self.kind {
            PairKind::Disputed { side } => Some(side),
            PairKind::Seed(_) => None,
        }
    }
}

/// Per-task switches for the quality-assurance mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSettings {
    #[serde(default = "yes")]
    pub trust_enabled: bool,
    #[serde(default = "yes")]
    pub prefill_enabled: bool,
    #[serde(default = "yes")]
    pub one_to_one: bool,
}

fn yes() -> bool {
    true
}

impl Default for TaskSettings {
    fn default() -> Self {
        TaskSettings {
            trust_enabled: true,
            prefill_enabled: true,
            one_to_one: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_wire_names() {
        assert_eq!(serde_json::to_string(&Decision::NA).unwrap(), "\"NA\"");
        assert_eq!(
            serde_json::from_str::<Decision>("\"NotEquivalent\"").unwrap(),
            Decision::NotEquivalent
        );
        assert_eq!(Decision::default(), Decision::NA);
    }

    #[test]
    fn settings_default_on() {
        let s: TaskSettings = serde_json::from_str("{\"trust_enabled\": false}").unwrap();
        assert!(!s.trust_enabled && s.prefill_enabled && s.one_to_one);
    }
}
