//! The acronym dictionary: curated entries, cached AI definitions and a
//! queue of user contributions, persisted as JSON lines.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::GlossaryError;
use crate::matcher::KeySet;
use crate::text::fold_str;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Curated,
    AiCached,
    PendingContribution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub key: String,
    pub expansion: String,
    pub definition: String,
    pub origin: Origin,
}

impl GlossaryEntry {
    pub fn new(
        key: impl Into<String>,
        expansion: impl Into<String>,
        definition: impl Into<String>,
        origin: Origin,
    ) -> Self {
        GlossaryEntry {
            key: key.into(),
            expansion: expansion.into(),
            definition: definition.into(),
            origin,
        }
    }

    fn validate(&self) -> Result<(), GlossaryError> {
        for (field, value) in [
            ("key", &self.key),
            ("expansion", &self.expansion),
            ("definition", &self.definition),
        ] {
            if value.trim().is_empty() {
                return Err(GlossaryError::ValidationFailed(format!("{field} is empty")));
            }
        }
        Ok(())
    }
}

/// Read/write access to a glossary, local or remote.
pub trait GlossaryClient: Send + Sync {
    /// Visible keys only; no definitions.
    fn list_keys(&self) -> Result<KeySet, GlossaryError>;
    /// `Ok(None)` when the key is absent.
    fn get_entry(&self, key: &str) -> Result<Option<GlossaryEntry>, GlossaryError>;
    fn upsert_cached(&self, entry: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError>;
}

impl<T: GlossaryClient + ?Sized> GlossaryClient for Arc<T> {
    fn list_keys(&self) -> Result<KeySet, GlossaryError> {
        (**self).list_keys()
    }
    fn get_entry(&self, key: &str) -> Result<Option<GlossaryEntry>, GlossaryError> {
        (**self).get_entry(key)
    }
    fn upsert_cached(&self, entry: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError> {
        (**self).upsert_cached(entry)
    }
}

/// One line of the store file.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    key: String,
    expansion: String,
    definition: String,
    origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Snapshot {
    /// Visible entries keyed by folded key.
    entries: BTreeMap<String, GlossaryEntry>,
    pending: BTreeMap<u64, GlossaryEntry>,
    next_id: u64,
}

impl Snapshot {
    fn insert_visible(&mut self, mut entry: GlossaryEntry) -> GlossaryEntry {
        let folded = fold_str(&entry.key);
        if let Some(existing) = self.entries.get(&folded) {
            entry.key = existing.key.clone();
        }
        self.entries.insert(folded, entry.clone());
        entry
    }

    fn to_jsonl(&self) -> String {
        let mut records: Vec<Record> = self
            .entries
            .values()
            .map(|e| Record {
                key: e.key.clone(),
                expansion: e.expansion.clone(),
                definition: e.definition.clone(),
                origin: e.origin,
                id: None,
            })
            .chain(self.pending.iter().map(|(id, e)| Record {
                key: e.key.clone(),
                expansion: e.expansion.clone(),
                definition: e.definition.clone(),
                origin: Origin::PendingContribution,
                id: Some(*id),
            }))
            .collect();
        records.sort_by(|a, b| {
            sort_key(&a.key)
                .cmp(&sort_key(&b.key))
                .then(a.id.cmp(&b.id))
        });
        let mut out = String::new();
        for r in records {
            out.push_str(&serde_json::to_string(&r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    fn from_jsonl(text: &str) -> Result<Self, GlossaryError> {
        let mut snap = Snapshot {
            next_id: 1,
            ..Snapshot::default()
        };
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |reason: String| GlossaryError::Corrupt {
                line: line_no,
                reason,
            };
            let r: Record = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
            let entry = GlossaryEntry::new(r.key, r.expansion, r.definition, r.origin);
            entry.validate().map_err(|e| corrupt(e.to_string()))?;
            match (r.origin, r.id) {
                (Origin::PendingContribution, Some(id)) => {
                    if snap.pending.insert(id, entry).is_some() {
                        return Err(corrupt(format!("duplicate contribution id {id}")));
                    }
                    snap.next_id = snap.next_id.max(id + 1);
                }
                (Origin::PendingContribution, None) => {
                    return Err(corrupt("pending contribution without id".into()))
                }
                _ => {
                    let folded = fold_str(&entry.key);
                    if snap.entries.insert(folded, entry).is_some() {
                        return Err(corrupt("duplicate key".into()));
                    }
                }
            }
        }
        Ok(snap)
    }
}

fn sort_key(key: &str) -> (String, &str) {
    (fold_str(key), key)
}

/// Shared glossary store. Readers see immutable snapshots; writers are
/// serialized and persist before the new snapshot becomes visible.
#[derive(Debug)]
pub struct GlossaryStore {
    current: RwLock<Arc<Snapshot>>,
    write_lock: Mutex<()>,
    path: Option<PathBuf>,
}

/// Bundled seed dictionary (JSON lines).
pub const SEED_JSONL: &str = include_str!("../data/seed_glossary.jsonl");

/// Pending contribution as listed for review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: u64,
    #[serde(flatten)]
    pub entry: GlossaryEntry,
}

impl GlossaryStore {
    pub fn empty() -> Self {
        Self::from_snapshot(
            Snapshot {
                next_id: 1,
                ..Snapshot::default()
            },
            None,
        )
    }

    /// In-memory store holding the bundled seed dictionary.
    pub fn seeded() -> Self {
        Self::from_jsonl(SEED_JSONL).expect("bundled seed dictionary is valid")
    }

    pub fn from_jsonl(text: &str) -> Result<Self, GlossaryError> {
        Ok(Self::from_snapshot(Snapshot::from_jsonl(text)?, None))
    }

    pub fn from_entries(entries: impl IntoIterator<Item = GlossaryEntry>) -> Result<Self, GlossaryError> {
        let mut snap = Snapshot {
            next_id: 1,
            ..Snapshot::default()
        };
        for e in entries {
            e.validate()?;
            if e.origin == Origin::PendingContribution {
                return Err(GlossaryError::ValidationFailed(
                    "pending entries must be submitted as contributions".into(),
                ));
            }
            snap.insert_visible(e);
        }
        Ok(Self::from_snapshot(snap, None))
    }

    fn from_snapshot(snap: Snapshot, path: Option<PathBuf>) -> Self {
        GlossaryStore {
            current: RwLock::new(Arc::new(snap)),
            write_lock: Mutex::new(()),
            path,
        }
    }

    /// Load the store at `path`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, GlossaryError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| GlossaryError::StoreUnavailable(format!("{}: {e}", path.display())))?;
        Ok(Self::from_snapshot(
            Snapshot::from_jsonl(&text)?,
            Some(path.to_path_buf()),
        ))
    }

    /// Load `path`, creating it from the seed dictionary when it does not
    /// exist yet.
    pub fn open_or_seed(path: impl AsRef<Path>) -> Result<Self, GlossaryError> {
        let path = path.as_ref();
        if path.exists() {
            return Self::load(path);
        }
        let store = Self::seeded().with_path(path);
        store.save()?;
        Ok(store)
    }

    /// Attach a persistence path; later writes go to it.
    pub fn with_path(mut self, path: impl AsRef<Path>) -> Self {
        self.path = Some(path.as_ref().to_path_buf());
        self
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("glossary lock poisoned").clone()
    }

    /// Write the current snapshot to the persistence path (no-op without one).
    pub fn save(&self) -> Result<(), GlossaryError> {
        let snap = self.snapshot();
        self.persist(&snap)
    }

    fn persist(&self, snap: &Snapshot) -> Result<(), GlossaryError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let io = |e: std::io::Error| GlossaryError::StoreUnavailable(format!("{}: {e}", path.display()));
        let tmp = path.with_extension("jsonl.tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            f.write_all(snap.to_jsonl().as_bytes()).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        fs::rename(&tmp, path).map_err(io)
    }

    /// Apply `f` to a copy of the snapshot, persist, then publish.
    fn write<T>(
        &self,
        f: impl FnOnce(&mut Snapshot) -> Result<T, GlossaryError>,
    ) -> Result<T, GlossaryError> {
        let _guard = self.write_lock.lock().expect("glossary writer lock poisoned");
        let mut next = (*self.snapshot()).clone();
        let out = f(&mut next)?;
        self.persist(&next)?;
        *self.current.write().expect("glossary lock poisoned") = Arc::new(next);
        Ok(out)
    }

    /// Visible keys, sorted case-insensitively.
    pub fn list_keys(&self) -> KeySet {
        KeySet::new(self.snapshot().entries.values().map(|e| e.key.clone()))
    }

    pub fn get_entry(&self, key: &str) -> Result<GlossaryEntry, GlossaryError> {
        self.snapshot()
            .entries
            .get(&fold_str(key))
            .cloned()
            .ok_or_else(|| GlossaryError::NotFound(key.to_string()))
    }

    pub fn len(&self) -> usize {
        self.snapshot().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All visible entries, sorted by key.
    pub fn entries(&self) -> Vec<GlossaryEntry> {
        self.snapshot().entries.values().cloned().collect()
    }

    pub fn pending(&self) -> Vec<Contribution> {
        self.snapshot()
            .pending
            .iter()
            .map(|(id, e)| Contribution {
                id: *id,
                entry: e.clone(),
            })
            .collect()
    }

    /// Entries whose key, expansion or definition contains `query`
    /// (case-insensitive). Key-prefix hits rank first, then key-substring,
    /// then expansion/definition hits; ties by key.
    pub fn search(&self, query: &str, limit: NonZeroUsize) -> Vec<GlossaryEntry> {
        search_entries(self.snapshot().entries.values(), query, limit)
    }

    /// Store an AI-generated definition. Never replaces a curated entry;
    /// replaces an earlier cached one.
    pub fn upsert_cached(&self, entry: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError> {
        if entry.origin != Origin::AiCached {
            return Err(GlossaryError::ValidationFailed(
                "cached entries must have origin ai_cached".into(),
            ));
        }
        entry.validate()?;
        self.write(|snap| {
            if let Some(existing) = snap.entries.get(&fold_str(&entry.key)) {
                if existing.origin == Origin::Curated {
                    return Err(GlossaryError::ConflictCurated(existing.key.clone()));
                }
            }
            Ok(snap.insert_visible(entry))
        })
    }

    /// Queue a suggested or corrected definition for review.
    pub fn submit_contribution(&self, mut entry: GlossaryEntry) -> Result<u64, GlossaryError> {
        entry.validate()?;
        entry.origin = Origin::PendingContribution;
        self.write(|snap| {
            let id = snap.next_id.max(1);
            snap.next_id = id + 1;
            snap.pending.insert(id, entry);
            Ok(id)
        })
    }

    /// Publish a pending contribution as a curated entry, replacing any
    /// existing entry for the key.
    pub fn approve_contribution(&self, id: u64) -> Result<GlossaryEntry, GlossaryError> {
        self.write(|snap| {
            let mut entry = snap
                .pending
                .remove(&id)
                .ok_or(GlossaryError::UnknownContribution(id))?;
            entry.origin = Origin::Curated;
            Ok(snap.insert_visible(entry))
        })
    }
}

impl PartialEq for GlossaryStore {
    fn eq(&self, other: &Self) -> bool {
        *self.snapshot() == *other.snapshot()
    }
}

impl GlossaryStore {
    pub fn to_jsonl(&self) -> String {
        self.snapshot().to_jsonl()
    }
}

impl GlossaryClient for GlossaryStore {
    fn list_keys(&self) -> Result<KeySet, GlossaryError> {
        Ok(GlossaryStore::list_keys(self))
    }

    fn get_entry(&self, key: &str) -> Result<Option<GlossaryEntry>, GlossaryError> {
        match GlossaryStore::get_entry(self, key) {
            Ok(e) => Ok(Some(e)),
            Err(GlossaryError::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn upsert_cached(&self, entry: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError> {
        GlossaryStore::upsert_cached(self, entry)
    }
}

/// Ranking shared by the store and any client-side mirror of it.
pub fn search_entries<'a>(
    entries: impl IntoIterator<Item = &'a GlossaryEntry>,
    query: &str,
    limit: NonZeroUsize,
) -> Vec<GlossaryEntry> {
    let q = fold_str(query);
    let mut hits: Vec<(u8, &GlossaryEntry)> = entries
        .into_iter()
        .filter_map(|e| {
            let key = fold_str(&e.key);
            let tier = if key.starts_with(&q) {
                0
            } else if key.contains(&q) {
                1
            } else if fold_str(&e.expansion).contains(&q) || fold_str(&e.definition).contains(&q) {
                2
            } else {
                return None;
            };
            Some((tier, e))
        })
        .collect();
    hits.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| sort_key(&a.1.key).cmp(&sort_key(&b.1.key)))
    });
    hits.into_iter()
        .take(limit.get())
        .map(|(_, e)| e.clone())
        .collect()
}
