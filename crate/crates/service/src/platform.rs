//! Role-gated operations over the catalog and task ledgers.

use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{DateTime, Utc};

use crowdval_core::coherence::{build_network, infer_prefills, DatasetScope, OntologyNetwork, PrefillSettings};
use crowdval_core::ontology::{alignment_to_json, local_name, ontology_to_json, Ontology};
use crowdval_core::revision::{DecisionEvent, Origin, PrefillChanges, Snapshot, TaskLedger};
use crowdval_core::seeds::{forge_task_pairs, SeedConfig};
use crowdval_core::{
    parse_alignment, parse_ontology, partition_mappings, Alignment, AlignmentFormat, AnnotationPair,
    Dataset, Decision, DomainGroup, OntologyFormat, PairId, Status, TaskId, Threshold, UserId,
};

use crate::api::*;
use crate::error::ApiError;
use crate::model::{Catalog, DatasetRecord, Matcher, Role, TaskRecord, User, UserView};
use crate::store::Store;

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(Utc::now)
}

pub struct Platform {
    catalog: Catalog,
    datasets: BTreeMap<String, Dataset>,
    store: Store,
    rng_seed: u64,
    clock: Clock,
}

const HIERARCHY_DEPTH: usize = 2;

impl Platform {
    /// Loads persisted state (if any) and replays every task's event log.
    pub fn open(store: Store, rng_seed: u64, clock: Clock) -> Result<Self, ApiError> {
        let (mut catalog, mut events) = store.load()?;
        let mut datasets = BTreeMap::new();
        for rec in catalog.datasets.values() {
            datasets.insert(rec.id.clone(), dataset_from_record(rec)?);
        }
        for task in catalog.tasks.values_mut() {
            task.ledger.reindex();
            task.ledger.restore(events.remove(&task.id).unwrap_or_default())?;
        }
        Ok(Platform {
            catalog,
            datasets,
            store,
            rng_seed,
            clock,
        })
    }

    pub fn in_memory(rng_seed: u64, clock: Clock) -> Self {
        Platform::open(Store::memory(), rng_seed, clock).expect("memory store cannot fail")
    }

    pub fn authenticate(&self, token: Option<&str>) -> Result<User, ApiError> {
        let token = token.ok_or(ApiError::Unauthorized)?;
        self.catalog
            .users
            .values()
            .find(|u| u.token == token)
            .cloned()
            .ok_or(ApiError::Unauthorized)
    }

    fn save(&self) -> Result<(), ApiError> {
        self.store.save_catalog(&self.catalog)
    }

    fn require_admin(caller: &User) -> Result<(), ApiError> {
        if caller.has(Role::Administrator) {
            Ok(())
        } else {
            Err(ApiError::forbidden("administrator role required"))
        }
    }

    fn require_annotator(caller: &User) -> Result<(), ApiError> {
        if !caller.has(Role::Annotator) {
            return Err(ApiError::forbidden("annotator role required"));
        }
        if !caller.consent {
            return Err(ApiError::forbidden("consent has not been given"));
        }
        Ok(())
    }

    // ---- users ----

    /// The first registered user becomes an administrator. Later requests
    /// for the administrator role need an administrator caller.
    pub fn register_user(&mut self, caller: Option<&User>, req: RegisterUser) -> Result<Registered, ApiError> {
        if req.display_name.trim().is_empty() {
            return Err(ApiError::BadRequest("display_name must not be empty".into()));
        }
        let mut roles = req.roles;
        if self.catalog.users.is_empty() {
            roles.insert(Role::Administrator);
        } else if roles.contains(&Role::Administrator) && !caller.is_some_and(|c| c.has(Role::Administrator)) {
            return Err(ApiError::forbidden("only administrators may grant the administrator role"));
        }
        self.catalog.counters.users += 1;
        let id = format!("u{}", self.catalog.counters.users);
        let token = format!("{:032x}", rand::random::<u128>());
        let user = User {
            id: id.clone(),
            display_name: req.display_name,
            roles,
            consent: false,
            token: token.clone(),
        };
        let view = UserView::from(&user);
        self.catalog.users.insert(id, user);
        self.save()?;
        Ok(Registered { user: view, token })
    }

    pub fn set_consent(&mut self, caller: &User, user_id: &str, consent: bool) -> Result<UserView, ApiError> {
        if !self.catalog.users.contains_key(user_id) {
            return Err(ApiError::not_found("user", user_id));
        }
        if caller.id != user_id {
            return Err(ApiError::forbidden("consent can only be given by the user"));
        }
        let user = self.catalog.users.get_mut(user_id).expect("checked");
        user.consent = consent;
        let view = UserView::from(&*user);
        self.save()?;
        Ok(view)
    }

    // ---- domains and datasets ----

    pub fn register_domain(&mut self, caller: &User, req: CreateDomain) -> Result<DomainGroup, ApiError> {
        Self::require_admin(caller)?;
        let name = req.name.trim();
        if name.is_empty() {
            return Err(ApiError::BadRequest("domain name must not be empty".into()));
        }
        if self.catalog.domains.values().any(|d| d.name == name) {
            return Err(ApiError::Conflict(format!("domain {name:?} already exists")));
        }
        self.catalog.counters.domains += 1;
        let domain = DomainGroup::new(format!("d{}", self.catalog.counters.domains), name);
        self.catalog.domains.insert(domain.id.clone(), domain.clone());
        self.save()?;
        Ok(domain)
    }

    pub fn configure_domain(&mut self, caller: &User, id: &str, req: ConfigureDomain) -> Result<DomainGroup, ApiError> {
        Self::require_admin(caller)?;
        let domain = self
            .catalog
            .domains
            .get_mut(id)
            .ok_or_else(|| ApiError::not_found("domain", id))?;
        domain.status = req.status;
        let domain = domain.clone();
        self.sync_task_status();
        self.save()?;
        Ok(domain)
    }

    pub fn upload_dataset(&mut self, caller: &User, req: UploadDataset) -> Result<DatasetView, ApiError> {
        Self::require_admin(caller)?;
        let (Some(fa), Some(fb), Some(fr)) = (req.ontology_a, req.ontology_b, req.reference) else {
            return Err(ApiError::BadRequest(
                "ontology_a, ontology_b and reference files are all required".into(),
            ));
        };
        let name = req.name.trim().to_string();
        if name.is_empty() {
            return Err(ApiError::BadRequest("dataset name must not be empty".into()));
        }
        if !self.catalog.domains.contains_key(&req.domain_id) {
            return Err(ApiError::not_found("domain", &req.domain_id));
        }
        if self.catalog.datasets.contains_key(&name) {
            return Err(ApiError::Conflict(format!("dataset {name:?} already exists")));
        }
        let a = parse_ontology(fa.content.as_bytes(), fa.format)?;
        let b = parse_ontology(fb.content.as_bytes(), fb.format)?;
        let reference = parse_alignment(fr.content.as_bytes(), fr.format)?;
        check_binding(&reference, &a, &b)?;
        let dataset = Dataset::new(&name, &req.domain_id, a, b, reference)?;
        let record = DatasetRecord {
            id: name.clone(),
            domain_id: req.domain_id.clone(),
            ontology_a: ontology_to_json(&dataset.ontology_a),
            ontology_b: ontology_to_json(&dataset.ontology_b),
            reference: alignment_to_json(&dataset.reference),
            status: dataset.status,
            threshold: dataset.threshold,
        };
        self.catalog
            .domains
            .get_mut(&req.domain_id)
            .expect("checked")
            .add_dataset(&name);
        self.catalog.datasets.insert(name.clone(), record);
        self.datasets.insert(name.clone(), dataset);
        self.save()?;
        Ok(self.dataset_view(&name))
    }

    fn dataset_view(&self, id: &str) -> DatasetView {
        let d = &self.datasets[id];
        DatasetView {
            id: d.id.clone(),
            domain_id: d.domain_id.clone(),
            ontology_a: d.ontology_a.id.clone(),
            ontology_b: d.ontology_b.id.clone(),
            reference_size: d.reference.len(),
            status: d.status,
            threshold: d.threshold.value(),
        }
    }

    pub fn configure_dataset(&mut self, caller: &User, id: &str, req: ConfigureDataset) -> Result<DatasetView, ApiError> {
        Self::require_admin(caller)?;
        if !self.datasets.contains_key(id) {
            return Err(ApiError::not_found("dataset", id));
        }
        let threshold = req
            .threshold
            .map(|t| Threshold::new(t).map_err(|e| ApiError::BadRequest(e.to_string())))
            .transpose()?;
        let (d, rec) = (
            self.datasets.get_mut(id).expect("checked"),
            self.catalog.datasets.get_mut(id).expect("in sync"),
        );
        if let Some(t) = threshold {
            d.threshold = t;
            rec.threshold = t;
        }
        if let Some(s) = req.status {
            d.status = s;
            rec.status = s;
        }
        self.sync_task_status();
        self.save()?;
        Ok(self.dataset_view(id))
    }

    fn dataset_open(&self, dataset_id: &str) -> bool {
        let Some(d) = self.datasets.get(dataset_id) else {
            return false;
        };
        d.status == Status::Open
            && self
                .catalog
                .domains
                .get(&d.domain_id)
                .is_some_and(|g| g.status == Status::Open)
    }

    /// Task ledgers mirror their dataset's threshold and open state.
    fn sync_task_status(&mut self) {
        let open: BTreeMap<String, (bool, Threshold)> = self
            .datasets
            .iter()
            .map(|(id, d)| (id.clone(), (self.dataset_open(id), d.threshold)))
            .collect();
        for t in self.catalog.tasks.values_mut() {
            let (is_open, threshold) = open[&t.dataset_id];
            t.ledger.status = if is_open { Status::Open } else { Status::Closed };
            t.ledger.threshold = threshold;
        }
    }

    // ---- matchers and tasks ----

    pub fn register_matcher(&mut self, caller: &User, req: RegisterMatcher) -> Result<Matcher, ApiError> {
        if !caller.has(Role::Developer) {
            return Err(ApiError::forbidden("developer role required"));
        }
        if req.name.trim().is_empty() || req.description.trim().is_empty() {
            return Err(ApiError::BadRequest("matcher name and description are required".into()));
        }
        let mut developer_ids = req.developer_ids;
        developer_ids.insert(caller.id.clone());
        for d in &developer_ids {
            let Some(u) = self.catalog.users.get(d) else {
                return Err(ApiError::not_found("user", d));
            };
            if !u.has(Role::Developer) {
                return Err(ApiError::BadRequest(format!("user {d} is not a developer")));
            }
        }
        self.catalog.counters.matchers += 1;
        let matcher = Matcher {
            id: format!("m{}", self.catalog.counters.matchers),
            name: req.name,
            description: req.description,
            developer_ids,
        };
        self.catalog.matchers.insert(matcher.id.clone(), matcher.clone());
        self.save()?;
        Ok(matcher)
    }

    fn owns(&self, caller: &User, matcher_id: &str) -> bool {
        self.catalog
            .matchers
            .get(matcher_id)
            .is_some_and(|m| m.developer_ids.contains(&caller.id))
    }

    pub fn submit_alignment(&mut self, caller: &User, matcher_id: &str, req: SubmitAlignment) -> Result<TaskCreated, ApiError> {
        if !self.catalog.matchers.contains_key(matcher_id) {
            return Err(ApiError::not_found("matcher", matcher_id));
        }
        if !self.owns(caller, matcher_id) {
            return Err(ApiError::forbidden("only the matcher's developers may submit alignments"));
        }
        let Some(file) = req.alignment else {
            return Err(ApiError::BadRequest("alignment file is required".into()));
        };
        let dataset = self
            .datasets
            .get(&req.dataset_id)
            .ok_or_else(|| ApiError::not_found("dataset", &req.dataset_id))?;
        let mut alignment = parse_alignment(file.content.as_bytes(), file.format)?;
        check_binding(&alignment, &dataset.ontology_a, &dataset.ontology_b)?;
        alignment.bind(&dataset.ontology_a.id, &dataset.ontology_b.id)?;
        alignment.check_resolves(&dataset.ontology_a, &dataset.ontology_b)?;
        let partition = partition_mappings(&dataset.reference, &alignment)?;

        let existing = self
            .catalog
            .tasks
            .values()
            .find(|t| t.matcher_id == matcher_id && t.dataset_id == req.dataset_id)
            .map(|t| (t.id.clone(), t.ledger.events().is_empty()));
        let task_id = match existing {
            Some((_, false)) => {
                return Err(ApiError::Conflict(
                    "a task for this matcher and dataset already has decisions".into(),
                ))
            }
            Some((id, true)) => id,
            None => {
                self.catalog.counters.tasks += 1;
                format!("t{}", self.catalog.counters.tasks)
            }
        };
        let ordinal: u64 = task_id[1..].parse().unwrap_or(0);
        let forged = forge_task_pairs(
            &partition,
            (&dataset.ontology_a, &dataset.ontology_b),
            req.settings,
            &SeedConfig::default(),
            &task_id,
            self.rng_seed.wrapping_add(ordinal),
        )
        .map_err(|e| ApiError::Validation(e.to_string()))?;
        let mut settings = req.settings;
        settings.trust_enabled = forged.trust_enabled;
        let seeds = forged.pairs.iter().filter(|p| p.is_seed()).count();
        let disputed = forged.pairs.len() - seeds;
        let mut ledger = TaskLedger::new(
            TaskId::new(&task_id),
            &req.dataset_id,
            forged.pairs,
            settings,
            dataset.threshold,
        );
        ledger.status = if self.dataset_open(&req.dataset_id) { Status::Open } else { Status::Closed };
        self.store.clear_events(&task_id)?;
        self.catalog.tasks.insert(
            task_id.clone(),
            TaskRecord {
                id: task_id.clone(),
                matcher_id: matcher_id.to_string(),
                dataset_id: req.dataset_id.clone(),
                ledger,
                warnings: forged.warnings.clone(),
            },
        );
        self.save()?;
        Ok(TaskCreated {
            task: self.summary(&self.catalog.tasks[&task_id]),
            settings,
            disputed,
            seeds,
            warnings: forged.warnings,
        })
    }

    fn summary(&self, t: &TaskRecord) -> TaskSummary {
        TaskSummary {
            id: t.id.clone(),
            matcher_id: t.matcher_id.clone(),
            matcher_name: self.catalog.matchers[&t.matcher_id].name.clone(),
            dataset_id: t.dataset_id.clone(),
            domain_id: self.datasets[&t.dataset_id].domain_id.clone(),
            pair_count: t.ledger.pairs().len(),
            status: t.ledger.status,
        }
    }

    pub fn list_tasks(&self, caller: &User, view: View) -> Result<Vec<TaskSummary>, ApiError> {
        let tasks = self.catalog.tasks.values();
        Ok(match view {
            View::Annotate => {
                Self::require_annotator(caller)?;
                tasks
                    .filter(|t| !self.owns(caller, &t.matcher_id) && self.dataset_open(&t.dataset_id))
                    .map(|t| self.summary(t))
                    .collect()
            }
            View::Develop => {
                if !caller.has(Role::Developer) && !caller.has(Role::Administrator) {
                    return Err(ApiError::forbidden("developer or administrator role required"));
                }
                tasks
                    .filter(|t| caller.has(Role::Administrator) || self.owns(caller, &t.matcher_id))
                    .map(|t| self.summary(t))
                    .collect()
            }
        })
    }

    fn task(&self, id: &str) -> Result<&TaskRecord, ApiError> {
        self.catalog.tasks.get(id).ok_or_else(|| ApiError::not_found("task", id))
    }

    fn check_can_annotate(&self, caller: &User, task: &TaskRecord) -> Result<(), ApiError> {
        Self::require_annotator(caller)?;
        if self.owns(caller, &task.matcher_id) {
            return Err(ApiError::forbidden("annotating tasks of your own matcher is not allowed"));
        }
        Ok(())
    }

    fn check_can_develop(&self, caller: &User, task: &TaskRecord) -> Result<(), ApiError> {
        if caller.has(Role::Administrator) || self.owns(caller, &task.matcher_id) {
            Ok(())
        } else {
            Err(ApiError::forbidden("only the matcher's developers or administrators"))
        }
    }

    fn entity_view(&self, ontology: &Ontology, iri: &str) -> EntityView {
        let entity = ontology.entity(iri);
        let walk = |up: bool| {
            let mut out: Vec<String> = Vec::new();
            let mut frontier = vec![iri.to_string()];
            for _ in 0..HIERARCHY_DEPTH {
                let mut next = Vec::new();
                for cur in &frontier {
                    let step: Vec<&str> = if up {
                        ontology.direct_parents(cur).collect()
                    } else {
                        ontology.direct_children(cur).collect()
                    };
                    for n in step {
                        if !out.iter().any(|o| o == n) {
                            out.push(n.to_string());
                            next.push(n.to_string());
                        }
                    }
                }
                frontier = next;
            }
            out
        };
        let mut axioms: Vec<String> = ontology
            .subclass_edges()
            .iter()
            .filter(|(c, p)| c == iri || p == iri)
            .map(|(c, p)| format!("{} ⊑ {}", local_name(c), local_name(p)))
            .collect();
        axioms.extend(
            ontology
                .disjoint_unordered()
                .filter(|(x, y)| *x == iri || *y == iri)
                .map(|(x, y)| format!("{} ⊓ {} ⊑ ⊥", local_name(x), local_name(y))),
        );
        EntityView {
            iri: iri.to_string(),
            ontology_id: ontology.id.clone(),
            local_name: local_name(iri).to_string(),
            labels: entity.map(|e| e.labels.clone()).unwrap_or_default(),
            description: entity.and_then(|e| e.description.clone()),
            ancestors: walk(true),
            descendants: walk(false),
            axioms,
        }
    }

    fn entity_pair(&self, task: &TaskRecord, pair: &AnnotationPair) -> (EntityView, EntityView) {
        let d = &self.datasets[&task.dataset_id];
        (
            self.entity_view(&d.ontology_a, &pair.source),
            self.entity_view(&d.ontology_b, &pair.target),
        )
    }

    pub fn fetch_pairs_annotator(&self, caller: &User, task_id: &str) -> Result<Vec<AnnotatorPair>, ApiError> {
        let task = self.task(task_id)?;
        self.check_can_annotate(caller, task)?;
        if !self.dataset_open(&task.dataset_id) {
            return Err(ApiError::forbidden("task is not open for annotation"));
        }
        let me = UserId::new(&caller.id);
        let board = task.ledger.board(None);
        let mine = board.get(&me);
        Ok(task
            .ledger
            .pairs()
            .iter()
            .map(|p| {
                let (source, target) = self.entity_pair(task, p);
                let entry = mine.and_then(|m| m.get(&p.id));
                let prefill = entry.and_then(|e| match (e.origin, e.rule, &e.explanation) {
                    (Origin::Prefill, Some(rule), Some(explanation)) if !e.value.is_na() => Some(PrefillView {
                        value: e.value,
                        rule,
                        explanation: explanation.clone(),
                    }),
                    _ => None,
                });
                AnnotatorPair {
                    id: p.id.to_string(),
                    source,
                    target,
                    decision: entry.map_or(Decision::NA, |e| e.value),
                    origin: entry.map(|e| e.origin),
                    prefill,
                }
            })
            .collect())
    }

    pub fn fetch_pairs_developer(&self, caller: &User, task_id: &str) -> Result<Vec<DeveloperPair>, ApiError> {
        let task = self.task(task_id)?;
        self.check_can_develop(caller, task)?;
        Ok(task
            .ledger
            .pairs()
            .iter()
            .map(|p| {
                let (source, target) = self.entity_pair(task, p);
                DeveloperPair {
                    id: p.id.to_string(),
                    source,
                    target,
                    kind: p.kind.clone(),
                }
            })
            .collect())
    }

    fn now_after(&self, ledger: &TaskLedger) -> DateTime<Utc> {
        let now = (self.clock)();
        ledger.events().last().map_or(now, |e| now.max(e.timestamp))
    }

    pub fn submit_decision(
        &mut self,
        caller: &User,
        task_id: &str,
        pair_id: &str,
        value: Decision,
    ) -> Result<DecisionRecorded, ApiError> {
        let task = self.task(task_id)?;
        self.check_can_annotate(caller, task)?;
        let pid = PairId::new(pair_id);
        if task.ledger.pair(&pid).is_none() {
            return Err(ApiError::not_found("pair", pair_id));
        }
        let now = self.now_after(&task.ledger);
        let me = UserId::new(&caller.id);
        let task = self.catalog.tasks.get_mut(task_id).expect("checked");
        let event = task.ledger.record_decision(&me, &pid, value, Origin::Manual, now)?;
        self.store.append_events(task_id, std::slice::from_ref(&event))?;

        let dataset_id = task.dataset_id.clone();
        let changes = self.refresh_prefills(&me, &dataset_id)?;
        let ledger = &self.catalog.tasks[task_id].ledger;
        let complete = ledger
            .pairs()
            .iter()
            .all(|p| !ledger.current_decision(&me, &p.id, None).is_na());
        let mine = changes.get(task_id).cloned().unwrap_or_default();
        Ok(DecisionRecorded {
            seq: event.seq,
            timestamp: event.timestamp.to_rfc3339(),
            pair_id: pair_id.to_string(),
            value,
            complete,
            prefills_added: mine
                .added
                .into_iter()
                .map(|p| PrefilledPair {
                    pair_id: p.pair_id.to_string(),
                    prefill: PrefillView {
                        value: p.value.into(),
                        rule: p.rule,
                        explanation: p.explanation,
                    },
                })
                .collect(),
            prefills_retracted: mine.retracted.into_iter().map(|p| p.to_string()).collect(),
        })
    }

    fn domain_network(&self, domain_id: &str, user: &UserId) -> Result<OntologyNetwork, ApiError> {
        let mut ontologies: BTreeMap<String, Ontology> = BTreeMap::new();
        let mut scopes = Vec::new();
        for d in self.datasets.values().filter(|d| d.domain_id == domain_id) {
            for o in [&d.ontology_a, &d.ontology_b] {
                ontologies.entry(o.id.clone()).or_insert_with(|| o.clone());
            }
            scopes.push(DatasetScope::new(&d.id, &d.ontology_a.id, &d.ontology_b.id));
        }
        let assertions: Vec<_> = self
            .catalog
            .tasks
            .values()
            .filter(|t| self.datasets[&t.dataset_id].domain_id == domain_id)
            .flat_map(|t| t.ledger.manual_assertions(user))
            .collect();
        build_network(ontologies.into_values(), scopes, assertions).map_err(|e| ApiError::Validation(e.to_string()))
    }

    /// Re-derives the user's pre-fills in every open, pre-fill-enabled
    /// task of the domain they take part in.
    fn refresh_prefills(&mut self, user: &UserId, dataset_id: &str) -> Result<BTreeMap<String, PrefillChanges>, ApiError> {
        let domain_id = self.datasets[dataset_id].domain_id.clone();
        let network = self.domain_network(&domain_id, user)?;
        let targets: Vec<String> = self
            .catalog
            .tasks
            .values()
            .filter(|t| {
                self.datasets[&t.dataset_id].domain_id == domain_id
                    && t.ledger.settings.prefill_enabled
                    && t.ledger.status == Status::Open
                    && t.ledger.participants().contains(user)
            })
            .map(|t| t.id.clone())
            .collect();
        let mut out = BTreeMap::new();
        for id in targets {
            let ledger = &self.catalog.tasks[&id].ledger;
            let pending = ledger.pending_for(user);
            let settings = PrefillSettings {
                one_to_one: ledger.settings.one_to_one,
                cross_dataset: true,
            };
            let inference = infer_prefills(&network, &pending, settings);
            let now = self.now_after(ledger);
            let ledger = &mut self.catalog.tasks.get_mut(&id).expect("listed").ledger;
            let before = ledger.events().len();
            let changes = ledger.apply_prefills(user, &inference, now)?;
            let new: Vec<DecisionEvent> = ledger.events()[before..].to_vec();
            self.store.append_events(&id, &new)?;
            out.insert(id, changes);
        }
        Ok(out)
    }

    pub fn task_results(&self, caller: &User, task_id: &str, as_of: Option<&str>) -> Result<Snapshot, ApiError> {
        let task = self.task(task_id)?;
        self.check_can_develop(caller, task)?;
        let as_of = as_of
            .map(|s| {
                DateTime::parse_from_rfc3339(s)
                    .map(|t| t.with_timezone(&Utc))
                    .map_err(|e| ApiError::BadRequest(format!("as_of: {e}")))
            })
            .transpose()?;
        let mut snap = task.ledger.decision_snapshot(as_of);
        if !caller.has(Role::Administrator) {
            snap.trust.clear();
        }
        Ok(snap)
    }
}

fn check_binding(alignment: &Alignment, a: &Ontology, b: &Ontology) -> Result<(), ApiError> {
    let mismatch = |declared: &str, expected: &str| !declared.is_empty() && declared != expected;
    if mismatch(&alignment.source_ontology_id, &a.id) || mismatch(&alignment.target_ontology_id, &b.id) {
        return Err(ApiError::IncompatibleAlignments(format!(
            "alignment binds ({}, {}) but the dataset ontologies are ({}, {})",
            alignment.source_ontology_id, alignment.target_ontology_id, a.id, b.id
        )));
    }
    Ok(())
}

fn dataset_from_record(rec: &DatasetRecord) -> Result<Dataset, ApiError> {
    let a = parse_ontology(rec.ontology_a.as_bytes(), OntologyFormat::CanonicalJson)?;
    let b = parse_ontology(rec.ontology_b.as_bytes(), OntologyFormat::CanonicalJson)?;
    let r = parse_alignment(rec.reference.as_bytes(), AlignmentFormat::CanonicalJson)?;
    let mut d = Dataset::new(&rec.id, &rec.domain_id, a, b, r)?;
    d.status = rec.status;
    d.threshold = rec.threshold;
    Ok(d)
}
