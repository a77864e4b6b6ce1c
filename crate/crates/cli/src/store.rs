//! The on-disk record store: one JSON file mapping content ids to
//! eigensystem records. Ids are truncated content hashes, so importing
//! the same mathematical object twice is idempotent regardless of where
//! the file came from, and the map is ordered so the file is byte-stable
//! under re-saving.

use crate::records::{record_id, validate, EigensystemRecord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const STORE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Store {
    pub schema_version: u32,
    pub records: BTreeMap<String, EigensystemRecord>,
}

impl Default for Store {
    fn default() -> Self {
        Store {
            schema_version: STORE_SCHEMA_VERSION,
            records: BTreeMap::new(),
        }
    }
}

impl Store {
    /// Read a store file; a missing file is an empty store. Every entry
    /// is re-validated and re-hashed, so a corrupted or hand-edited file
    /// fails loudly instead of silently feeding bad coefficients onward.
    pub fn load(path: &Path) -> Result<Store, String> {
        if !path.exists() {
            return Ok(Store::default());
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
        let store: Store = serde_json::from_str(&text)
            .map_err(|e| format!("{} is not a valid store file: {}", path.display(), e))?;
        if store.schema_version != STORE_SCHEMA_VERSION {
            return Err(format!(
                "{} has store schema {} (this build reads {})",
                path.display(),
                store.schema_version,
                STORE_SCHEMA_VERSION
            ));
        }
        for (id, rec) in &store.records {
            validate(rec).map_err(|e| format!("store entry {}: {}", id, e))?;
            let actual = record_id(rec);
            if actual != *id {
                return Err(format!(
                    "store entry {} does not match its content (hashes to {})",
                    id, actual
                ));
            }
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), String> {
        let mut text = serde_json::to_string_pretty(self).expect("store serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {}", path.display(), e))
    }

    /// Insert by content id. An id already present keeps its existing
    /// record (first provenance wins). Returns the id and whether the
    /// record was new.
    pub fn insert(&mut self, rec: EigensystemRecord) -> (String, bool) {
        let id = record_id(&rec);
        let newly = !self.records.contains_key(&id);
        self.records.entry(id.clone()).or_insert(rec);
        (id, newly)
    }

    pub fn get(&self, id: &str) -> Option<&EigensystemRecord> {
        self.records.get(id)
    }
}
