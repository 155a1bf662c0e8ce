//! HTTP service for crowd validation of ontology alignments.

pub mod api;
pub mod config;
pub mod error;
pub mod model;
pub mod platform;
pub mod routes;
pub mod store;
pub mod testing;

pub use config::Config;
pub use error::ApiError;
pub use platform::{system_clock, Clock, Platform};
pub use routes::{app, AppState};
