//! Catalog objects persisted as one JSON document.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crowdval_core::revision::TaskLedger;
use crowdval_core::{DomainGroup, Status, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Administrator,
    Developer,
    Annotator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub id: String,
    pub display_name: String,
    pub roles: BTreeSet<Role>,
    pub consent: bool,
    pub token: String,
}

impl User {
    pub fn has(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }
}

/// A user as returned by the API (no token).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserView {
    pub id: String,
    pub display_name: String,
    pub roles: BTreeSet<Role>,
    pub consent: bool,
}

impl From<&User> for UserView {
    fn from(u: &User) -> Self {
        UserView {
            id: u.id.clone(),
            display_name: u.display_name.clone(),
            roles: u.roles.clone(),
            consent: u.consent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matcher {
    pub id: String,
    pub name: String,
    pub description: String,
    pub developer_ids: BTreeSet<String>,
}

/// Dataset files kept in canonical JSON so they can be re-parsed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub domain_id: String,
    pub ontology_a: String,
    pub ontology_b: String,
    pub reference: String,
    pub status: Status,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    pub matcher_id: String,
    pub dataset_id: String,
    pub ledger: TaskLedger,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Counters {
    pub users: u64,
    pub domains: u64,
    pub matchers: u64,
    pub tasks: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Catalog {
    pub users: BTreeMap<String, User>,
    pub domains: BTreeMap<String, DomainGroup>,
    pub datasets: BTreeMap<String, DatasetRecord>,
    pub matchers: BTreeMap<String, Matcher>,
    pub tasks: BTreeMap<String, TaskRecord>,
    pub counters: Counters,
}
