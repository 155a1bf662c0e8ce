//! File persistence: `catalog.json` plus one NDJSON event log per task.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crowdval_core::revision::{events_from_ndjson, events_to_ndjson, DecisionEvent};

use crate::error::ApiError;
use crate::model::Catalog;

/// `None` keeps everything in memory (tests).
#[derive(Debug, Clone)]
pub struct Store {
    dir: Option<PathBuf>,
}

impl Store {
    pub fn memory() -> Self {
        Store { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let dir = dir.into();
        fs::create_dir_all(dir.join("events"))?;
        Ok(Store { dir: Some(dir) })
    }

    fn events_path(dir: &Path, task_id: &str) -> PathBuf {
        dir.join("events").join(format!("{task_id}.ndjson"))
    }

    pub fn load(&self) -> Result<(Catalog, BTreeMap<String, Vec<DecisionEvent>>), ApiError> {
        let Some(dir) = &self.dir else {
            return Ok(Default::default());
        };
        let path = dir.join("catalog.json");
        if !path.exists() {
            return Ok(Default::default());
        }
        let catalog: Catalog = serde_json::from_slice(&fs::read(&path)?)
            .map_err(|e| ApiError::Storage(format!("{}: {e}", path.display())))?;
        let mut events = BTreeMap::new();
        for id in catalog.tasks.keys() {
            let p = Self::events_path(dir, id);
            let log = if p.exists() {
                events_from_ndjson(&fs::read_to_string(&p)?)?
            } else {
                Vec::new()
            };
            events.insert(id.clone(), log);
        }
        Ok((catalog, events))
    }

    /// Writes the catalog through a temporary file and a rename.
    pub fn save_catalog(&self, catalog: &Catalog) -> Result<(), ApiError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let tmp = dir.join("catalog.json.tmp");
        let bytes = serde_json::to_vec_pretty(catalog).map_err(|e| ApiError::Storage(e.to_string()))?;
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, dir.join("catalog.json"))?;
        Ok(())
    }

    pub fn append_events(&self, task_id: &str, events: &[DecisionEvent]) -> Result<(), ApiError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        if events.is_empty() {
            return Ok(());
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(Self::events_path(dir, task_id))?;
        f.write_all(events_to_ndjson(events).as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn clear_events(&self, task_id: &str) -> Result<(), ApiError> {
        if let Some(dir) = &self.dir {
            let p = Self::events_path(dir, task_id);
            if p.exists() {
                fs::remove_file(p)?;
            }
        }
        Ok(())
    }
}
