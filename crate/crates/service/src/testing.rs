//! In-process client, a small conference fixture and the declared access
//! matrix. Used by this crate's integration tests and the acceptance suite.

use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{DateTime, TimeZone, Utc};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use crate::platform::{Clock, Platform};
use crate::routes::{app, AppState};

/// A clock that moves one second forward on every reading.
pub fn stepping_clock(start: DateTime<Utc>) -> Clock {
    let t = Arc::new(AtomicI64::new(start.timestamp()));
    Arc::new(move || {
        let s = t.fetch_add(1, Ordering::SeqCst);
        Utc.timestamp_opt(s, 0).single().expect("in range")
    })
}

pub fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).single().expect("valid")
}

#[derive(Clone)]
pub struct Client {
    router: Router,
}

impl Client {
    pub fn new(platform: Platform) -> Client {
        Client {
            router: app(AppState::new(platform)),
        }
    }

    pub async fn call(&self, method: &str, path: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(path);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string())),
            None => req.body(Body::empty()),
        }
        .expect("valid request");
        let resp = self.router.clone().oneshot(req).await.expect("infallible");
        let status = resp.status();
        let bytes = resp.into_body().collect().await.expect("body").to_bytes();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, value)
    }

    pub async fn ok(&self, method: &str, path: &str, token: Option<&str>, body: Option<Value>) -> Value {
        let (s, v) = self.call(method, path, token, body).await;
        assert!(s.is_success(), "{method} {path} -> {s}: {v}");
        v
    }
}

const A: &str = "http://cmt#";
const B: &str = "http://ekaw#";

pub fn iri_a(local: &str) -> String {
    format!("{A}{local}")
}

pub fn iri_b(local: &str) -> String {
    format!("{B}{local}")
}

fn entities(base: &str, names: &[&str]) -> Vec<Value> {
    names
        .iter()
        .map(|n| json!({ "iri": format!("{base}{n}"), "labels": [n.to_lowercase()] }))
        .collect()
}

pub fn ontology_a() -> Value {
    json!({
        "id": "cmt",
        "entities": entities(A, &["Person", "Author", "Reviewer", "Paper", "Review", "Conference"]),
        "subclass": [[iri_a("Author"), iri_a("Person")], [iri_a("Reviewer"), iri_a("Person")]],
        "disjoint": [],
    })
}

pub fn ontology_b() -> Value {
    json!({
        "id": "ekaw",
        "entities": entities(B, &["Person", "Author", "Reviewer", "Paper", "Review", "Event"]),
        "subclass": [[iri_b("Author"), iri_b("Person")], [iri_b("Reviewer"), iri_b("Person")]],
        "disjoint": [[iri_b("Paper"), iri_b("Person")]],
    })
}

fn alignment(pairs: &[(&str, &str)]) -> Value {
    let cells: Vec<Value> = pairs
        .iter()
        .map(|(s, t)| json!({ "e1": iri_a(s), "e2": iri_b(t) }))
        .collect();
    json!({ "source": "cmt", "target": "ekaw", "cells": cells })
}

pub fn reference() -> Value {
    alignment(&[
        ("Person", "Person"),
        ("Author", "Author"),
        ("Paper", "Paper"),
        ("Reviewer", "Reviewer"),
        ("Review", "Review"),
    ])
}

/// Agrees with the reference on three cells, misses two and adds two.
pub fn matcher_output() -> Value {
    alignment(&[
        ("Person", "Person"),
        ("Author", "Author"),
        ("Paper", "Paper"),
        ("Conference", "Event"),
        ("Review", "Reviewer"),
    ])
}

fn file(format: &str, v: &Value) -> Value {
    json!({ "format": format, "content": v.to_string() })
}

pub fn dataset_body(domain_id: &str, name: &str) -> Value {
    json!({
        "domain_id": domain_id,
        "name": name,
        "ontology_a": file("canonical-json", &ontology_a()),
        "ontology_b": file("canonical-json", &ontology_b()),
        "reference": file("canonical-json", &reference()),
    })
}

pub fn submission_body(dataset_id: &str, settings: Value) -> Value {
    json!({
        "dataset_id": dataset_id,
        "alignment": file("canonical-json", &matcher_output()),
        "settings": settings,
    })
}

/// Who a test user is, as far as access control is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PersonaSpec {
    pub admin: bool,
    pub developer: bool,
    pub annotator: bool,
    pub consent: bool,
    /// Listed as a developer of the fixture matcher. Implies `developer`.
    pub owner: bool,
}

impl PersonaSpec {
    pub const fn new(admin: bool, developer: bool, annotator: bool, consent: bool, owner: bool) -> Self {
        PersonaSpec {
            admin,
            developer: developer || owner,
            annotator,
            consent,
            owner,
        }
    }

    fn roles(&self) -> Vec<&'static str> {
        let mut r = Vec::new();
        if self.admin {
            r.push("administrator");
        }
        if self.developer {
            r.push("developer");
        }
        if self.annotator {
            r.push("annotator");
        }
        r
    }
}

#[derive(Debug, Clone)]
pub struct Persona {
    pub id: String,
    pub token: String,
    pub spec: PersonaSpec,
}

/// A platform with one open domain, one dataset, one matcher and its task.
pub struct World {
    pub client: Client,
    pub admin: Persona,
    /// Registers the matcher and submits its alignment.
    pub owner: Persona,
    pub personas: Vec<Persona>,
    pub domain_id: String,
    pub dataset_id: String,
    pub matcher_id: String,
    pub task_id: String,
}

impl World {
    pub async fn new(platform: Platform, specs: &[PersonaSpec], settings: Value) -> World {
        let client = Client::new(platform);
        let reg = client
            .ok("POST", "/users", None, Some(json!({ "display_name": "root" })))
            .await;
        let admin = Persona {
            id: reg["user"]["id"].as_str().unwrap().into(),
            token: reg["token"].as_str().unwrap().into(),
            spec: PersonaSpec::new(true, false, false, false, false),
        };
        let owner = register(&client, &admin.token, "owner", PersonaSpec::new(false, true, false, false, true)).await;
        let mut personas = Vec::new();
        for (i, spec) in specs.iter().enumerate() {
            personas.push(register(&client, &admin.token, &format!("p{i}"), *spec).await);
        }
        let d = client
            .ok("POST", "/domains", Some(&admin.token), Some(json!({ "name": "conference" })))
            .await;
        let domain_id = d["id"].as_str().unwrap().to_string();
        client
            .ok("PATCH", &format!("/domains/{domain_id}"), Some(&admin.token), Some(json!({ "status": "open" })))
            .await;
        let ds = client
            .ok("POST", "/datasets", Some(&admin.token), Some(dataset_body(&domain_id, "cmt-ekaw")))
            .await;
        let dataset_id = ds["id"].as_str().unwrap().to_string();
        client
            .ok("PATCH", &format!("/datasets/{dataset_id}"), Some(&admin.token), Some(json!({ "status": "open" })))
            .await;
        let co_owners: Vec<&str> = personas
            .iter()
            .filter(|p| p.spec.owner)
            .map(|p| p.id.as_str())
            .collect();
        let m = client
            .ok(
                "POST",
                "/matchers",
                Some(&owner.token),
                Some(json!({ "name": "lexmatch", "description": "string matcher", "developer_ids": co_owners })),
            )
            .await;
        let matcher_id = m["id"].as_str().unwrap().to_string();
        let t = client
            .ok(
                "POST",
                &format!("/matchers/{matcher_id}/alignments"),
                Some(&owner.token),
                Some(submission_body(&dataset_id, settings)),
            )
            .await;
        let task_id = t["task"]["id"].as_str().unwrap().to_string();
        World {
            client,
            admin,
            owner,
            personas,
            domain_id,
            dataset_id,
            matcher_id,
            task_id,
        }
    }

    pub async fn default(platform: Platform, specs: &[PersonaSpec]) -> World {
        World::new(platform, specs, json!({})).await
    }

    /// Developer view of the task's pairs.
    pub async fn develop_pairs(&self) -> Vec<Value> {
        let v = self
            .client
            .ok("GET", &format!("/tasks/{}/pairs?view=develop", self.task_id), Some(&self.admin.token), None)
            .await;
        v.as_array().unwrap().clone()
    }

    pub async fn pair_id(&self, source: &str, target: &str) -> Option<String> {
        self.develop_pairs()
            .await
            .into_iter()
            .find(|p| p["source"]["iri"] == iri_a(source) && p["target"]["iri"] == iri_b(target))
            .map(|p| p["id"].as_str().unwrap().to_string())
    }
}

async fn register(client: &Client, admin_token: &str, name: &str, spec: PersonaSpec) -> Persona {
    let reg = client
        .ok(
            "POST",
            "/users",
            Some(admin_token),
            Some(json!({ "display_name": name, "roles": spec.roles() })),
        )
        .await;
    let id = reg["user"]["id"].as_str().unwrap().to_string();
    let token = reg["token"].as_str().unwrap().to_string();
    if spec.consent {
        client
            .ok("POST", &format!("/users/{id}/consent"), Some(&token), Some(json!({ "consent": true })))
            .await;
    }
    Persona { id, token, spec }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    RegisterUser,
    RegisterAdmin,
    ConsentSelf,
    ConsentOther,
    CreateDomain,
    ConfigureDomain,
    UploadDataset,
    ConfigureDataset,
    RegisterMatcher,
    SubmitAlignment,
    ListAnnotate,
    ListDevelop,
    PairsAnnotate,
    PairsDevelop,
    Decide,
    Results,
}

impl Endpoint {
    pub const ALL: [Endpoint; 16] = [
        Endpoint::RegisterUser,
        Endpoint::RegisterAdmin,
        Endpoint::ConsentSelf,
        Endpoint::ConsentOther,
        Endpoint::CreateDomain,
        Endpoint::ConfigureDomain,
        Endpoint::UploadDataset,
        Endpoint::ConfigureDataset,
        Endpoint::RegisterMatcher,
        Endpoint::SubmitAlignment,
        Endpoint::ListAnnotate,
        Endpoint::ListDevelop,
        Endpoint::PairsAnnotate,
        Endpoint::PairsDevelop,
        Endpoint::Decide,
        Endpoint::Results,
    ];
}

/// The declared matrix: whether an authenticated caller may use `e`.
pub fn allowed(p: PersonaSpec, e: Endpoint) -> bool {
    use Endpoint::*;
    let annotates = p.annotator && p.consent;
    match e {
        RegisterUser | ConsentSelf => true,
        ConsentOther => false,
        RegisterAdmin | CreateDomain | ConfigureDomain | UploadDataset | ConfigureDataset => p.admin,
        RegisterMatcher => p.developer,
        SubmitAlignment => p.owner,
        ListAnnotate => annotates,
        ListDevelop => p.developer || p.admin,
        PairsAnnotate | Decide => annotates && !p.owner,
        PairsDevelop | Results => p.owner || p.admin,
    }
}

/// Expected status for a caller, `None` meaning anonymous.
pub fn expected_status(p: Option<PersonaSpec>, e: Endpoint) -> StatusCode {
    match p {
        None if e == Endpoint::RegisterUser => StatusCode::CREATED,
        None if e == Endpoint::RegisterAdmin => StatusCode::FORBIDDEN,
        None => StatusCode::UNAUTHORIZED,
        Some(p) if allowed(p, e) => success_status(e),
        Some(_) => StatusCode::FORBIDDEN,
    }
}

fn success_status(e: Endpoint) -> StatusCode {
    use Endpoint::*;
    match e {
        RegisterUser | RegisterAdmin | CreateDomain | UploadDataset | RegisterMatcher | SubmitAlignment => {
            StatusCode::CREATED
        }
        _ => StatusCode::OK,
    }
}

/// Issues one well-formed request to `e` as `caller`, so that only access
/// control decides the outcome.
pub async fn probe(world: &World, caller: Option<&Persona>, e: Endpoint) -> (StatusCode, Value) {
    use Endpoint::*;
    let c = &world.client;
    let token = caller.map(|p| p.token.as_str());
    let task = &world.task_id;
    match e {
        RegisterUser => c.call("POST", "/users", token, Some(json!({ "display_name": "new" }))).await,
        RegisterAdmin => {
            let body = json!({ "display_name": "boss", "roles": ["administrator"] });
            c.call("POST", "/users", token, Some(body)).await
        }
        ConsentSelf => {
            let id = caller.map_or("u1", |p| p.id.as_str());
            c.call("POST", &format!("/users/{id}/consent"), token, Some(json!({ "consent": true }))).await
        }
        ConsentOther => {
            let path = format!("/users/{}/consent", world.owner.id);
            c.call("POST", &path, token, Some(json!({ "consent": true }))).await
        }
        CreateDomain => c.call("POST", "/domains", token, Some(json!({ "name": "probe" }))).await,
        ConfigureDomain => {
            let path = format!("/domains/{}", world.domain_id);
            c.call("PATCH", &path, token, Some(json!({ "status": "open" }))).await
        }
        UploadDataset => {
            let body = dataset_body(&world.domain_id, "probe-ds");
            c.call("POST", "/datasets", token, Some(body)).await
        }
        ConfigureDataset => {
            let path = format!("/datasets/{}", world.dataset_id);
            c.call("PATCH", &path, token, Some(json!({ "threshold": 0.6 }))).await
        }
        RegisterMatcher => {
            let body = json!({ "name": "probe", "description": "probe matcher" });
            c.call("POST", "/matchers", token, Some(body)).await
        }
        SubmitAlignment => {
            let path = format!("/matchers/{}/alignments", world.matcher_id);
            c.call("POST", &path, token, Some(submission_body(&world.dataset_id, json!({})))).await
        }
        ListAnnotate => c.call("GET", "/tasks?view=annotate", token, None).await,
        ListDevelop => c.call("GET", "/tasks?view=develop", token, None).await,
        PairsAnnotate => c.call("GET", &format!("/tasks/{task}/pairs?view=annotate"), token, None).await,
        PairsDevelop => c.call("GET", &format!("/tasks/{task}/pairs?view=develop"), token, None).await,
        Decide => {
            let path = format!("/tasks/{task}/pairs/{task}-1/decision");
            c.call("POST", &path, token, Some(json!({ "value": "Equivalent" }))).await
        }
        Results => c.call("GET", &format!("/tasks/{task}/results"), token, None).await,
    }
}

/// Every combination of role flags, consent and matcher ownership.
pub fn all_persona_specs() -> Vec<PersonaSpec> {
    let mut out = Vec::new();
    for bits in 0u8..32 {
        let b = |i: u8| bits & (1 << i) != 0;
        let spec = PersonaSpec::new(b(0), b(1), b(2), b(3), b(4));
        if !out.contains(&spec) {
            out.push(spec);
        }
    }
    out
}
