//! Router and handlers. Every handler authenticates first, then parses the
//! body, so anonymous callers always get 401.

use std::sync::{Arc, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::Serialize;

use crowdval_core::revision::Snapshot;
use crowdval_core::DomainGroup;

use crate::api::*;
use crate::error::ApiError;
use crate::model::{Matcher, User, UserView};
use crate::platform::Platform;

pub struct AppState {
    platform: RwLock<Platform>,
}

impl AppState {
    pub fn new(platform: Platform) -> Arc<AppState> {
        Arc::new(AppState {
            platform: RwLock::new(platform),
        })
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Platform> {
        self.platform.read().unwrap_or_else(|p| p.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, Platform> {
        self.platform.write().unwrap_or_else(|p| p.into_inner())
    }
}

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn app(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/users", post(register_user))
        .route("/users/{id}/consent", post(set_consent))
        .route("/domains", post(create_domain))
        .route("/domains/{id}", patch(configure_domain))
        .route("/datasets", post(upload_dataset))
        .route("/datasets/{id}", patch(configure_dataset))
        .route("/matchers", post(register_matcher))
        .route("/matchers/{id}/alignments", post(submit_alignment))
        .route("/tasks", get(list_tasks))
        .route("/tasks/{id}/pairs", get(fetch_pairs))
        .route("/tasks/{id}/pairs/{pid}/decision", post(submit_decision))
        .route("/tasks/{id}/results", get(results))
        .with_state(state)
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

fn caller(state: &AppState, headers: &HeaderMap) -> Result<User, ApiError> {
    state.read().authenticate(bearer(headers))
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    b.map(|Json(v)| v).map_err(|e| ApiError::BadRequest(e.body_text()))
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(v)| v).map_err(|e| ApiError::BadRequest(e.body_text()))
}

fn created<T: Serialize>(v: T) -> (StatusCode, Json<T>) {
    (StatusCode::CREATED, Json(v))
}

async fn register_user(
    State(s): Shared,
    headers: HeaderMap,
    req: Result<Json<RegisterUser>, JsonRejection>,
) -> Result<(StatusCode, Json<Registered>), ApiError> {
    let who = match bearer(&headers) {
        Some(_) => Some(caller(&s, &headers)?),
        None => None,
    };
    let req = body(req)?;
    Ok(created(s.write().register_user(who.as_ref(), req)?))
}

async fn set_consent(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    req: Result<Json<Consent>, JsonRejection>,
) -> ApiResult<UserView> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(Json(s.write().set_consent(&who, &id, req.consent)?))
}

async fn create_domain(
    State(s): Shared,
    headers: HeaderMap,
    req: Result<Json<CreateDomain>, JsonRejection>,
) -> Result<(StatusCode, Json<DomainGroup>), ApiError> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(created(s.write().register_domain(&who, req)?))
}

async fn configure_domain(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    req: Result<Json<ConfigureDomain>, JsonRejection>,
) -> ApiResult<DomainGroup> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(Json(s.write().configure_domain(&who, &id, req)?))
}

async fn upload_dataset(
    State(s): Shared,
    headers: HeaderMap,
    req: Result<Json<UploadDataset>, JsonRejection>,
) -> Result<(StatusCode, Json<DatasetView>), ApiError> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(created(s.write().upload_dataset(&who, req)?))
}

async fn configure_dataset(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    req: Result<Json<ConfigureDataset>, JsonRejection>,
) -> ApiResult<DatasetView> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(Json(s.write().configure_dataset(&who, &id, req)?))
}

async fn register_matcher(
    State(s): Shared,
    headers: HeaderMap,
    req: Result<Json<RegisterMatcher>, JsonRejection>,
) -> Result<(StatusCode, Json<Matcher>), ApiError> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(created(s.write().register_matcher(&who, req)?))
}

async fn submit_alignment(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    req: Result<Json<SubmitAlignment>, JsonRejection>,
) -> Result<(StatusCode, Json<TaskCreated>), ApiError> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(created(s.write().submit_alignment(&who, &id, req)?))
}

async fn list_tasks(
    State(s): Shared,
    headers: HeaderMap,
    q: Result<Query<ViewQuery>, QueryRejection>,
) -> ApiResult<Vec<TaskSummary>> {
    let who = caller(&s, &headers)?;
    let q = query(q)?;
    Ok(Json(s.read().list_tasks(&who, q.view)?))
}

async fn fetch_pairs(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    q: Result<Query<ViewQuery>, QueryRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let who = caller(&s, &headers)?;
    let q = query(q)?;
    let platform = s.read();
    let value = match q.view {
        View::Annotate => serde_json::to_value(platform.fetch_pairs_annotator(&who, &id)?),
        View::Develop => serde_json::to_value(platform.fetch_pairs_developer(&who, &id)?),
    };
    value.map(Json).map_err(|e| ApiError::Storage(e.to_string()))
}

async fn submit_decision(
    State(s): Shared,
    headers: HeaderMap,
    Path((id, pid)): Path<(String, String)>,
    req: Result<Json<SubmitDecision>, JsonRejection>,
) -> ApiResult<DecisionRecorded> {
    let who = caller(&s, &headers)?;
    let req = body(req)?;
    Ok(Json(s.write().submit_decision(&who, &id, &pid, req.value)?))
}

async fn results(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    q: Result<Query<AsOfQuery>, QueryRejection>,
) -> ApiResult<Snapshot> {
    let who = caller(&s, &headers)?;
    let q = query(q)?;
    Ok(Json(s.read().task_results(&who, &id, q.as_of.as_deref())?))
}
