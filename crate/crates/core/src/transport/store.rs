//! Key and record persistence.
//!
//! The server store holds only cloud keys and ciphertexts, keyed by client
//! id; secret keys live exclusively in the client's own key directory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::gates::{BackendKind, CloudKey, KeyTriple, ParamInfo, ParamSet, SecretKey};
use crate::matcher::EncVector;

/// One enrollment as the server keeps it: no plaintext biometric data.
pub struct ServerRecord {
    pub client_id: String,
    pub cloud_key: CloudKey,
    pub template: EncVector,
}

pub trait RecordStore: Send + Sync {
    /// Stores a new record; enrolling an existing id is an error.
    fn insert(&self, record: ServerRecord) -> Result<()>;
    fn get(&self, client_id: &str) -> Result<Option<Arc<ServerRecord>>>;
    fn contains(&self, client_id: &str) -> Result<bool> {
        Ok(self.get(client_id)?.is_some())
    }
    fn client_ids(&self) -> Result<Vec<String>>;
}

/// In-memory store for tests and benches.
#[derive(Default)]
pub struct MemoryStore {
    records: RwLock<HashMap<String, Arc<ServerRecord>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        MemoryStore::default()
    }
}

impl RecordStore for MemoryStore {
    fn insert(&self, record: ServerRecord) -> Result<()> {
        let mut map = self.records.write().expect("store poisoned");
        if map.contains_key(&record.client_id) {
            return Err(Error::DuplicateClient(record.client_id));
        }
        map.insert(record.client_id.clone(), Arc::new(record));
        Ok(())
    }

    fn get(&self, client_id: &str) -> Result<Option<Arc<ServerRecord>>> {
        Ok(self.records.read().expect("store poisoned").get(client_id).cloned())
    }

    fn client_ids(&self) -> Result<Vec<String>> {
        Ok(self.records.read().expect("store poisoned").keys().cloned().collect())
    }
}

const CLOUD_KEY_FILE: &str = "cloud.key";
const TEMPLATE_FILE: &str = "template.bin";
const SECRET_KEY_FILE: &str = "secret.key";
const PARAMS_FILE: &str = "params.cfg";

/// Directory-backed store: one subdirectory per client under
/// `<root>/records/`, with loaded records cached in memory.
pub struct DirStore {
    root: PathBuf,
    cache: RwLock<HashMap<String, Arc<ServerRecord>>>,
}

impl DirStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(root.join("records"))?;
        Ok(DirStore { root, cache: RwLock::new(HashMap::new()) })
    }

    fn record_dir(&self, client_id: &str) -> Result<PathBuf> {
        // ids become directory names; keep them tame
        if client_id.is_empty()
            || !client_id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::BadConfig(format!(
                "client id `{client_id}` must be ascii alphanumeric, `-` or `_`"
            )));
        }
        Ok(self.root.join("records").join(client_id))
    }
}

impl RecordStore for DirStore {
    fn insert(&self, record: ServerRecord) -> Result<()> {
        let dir = self.record_dir(&record.client_id)?;
        if dir.exists() {
            return Err(Error::DuplicateClient(record.client_id));
        }
        let staging = dir.with_extension("tmp");
        if staging.exists() {
            std::fs::remove_dir_all(&staging)?;
        }
        std::fs::create_dir_all(&staging)?;
        std::fs::write(staging.join(CLOUD_KEY_FILE), record.cloud_key.to_blob())?;
        std::fs::write(staging.join(TEMPLATE_FILE), record.template.to_bytes())?;
        std::fs::rename(&staging, &dir)?;
        let mut cache = self.cache.write().expect("cache poisoned");
        cache.insert(record.client_id.clone(), Arc::new(record));
        Ok(())
    }

    fn get(&self, client_id: &str) -> Result<Option<Arc<ServerRecord>>> {
        if let Some(hit) = self.cache.read().expect("cache poisoned").get(client_id) {
            return Ok(Some(hit.clone()));
        }
        let dir = self.record_dir(client_id)?;
        if !dir.exists() {
            return Ok(None);
        }
        let cloud_key = CloudKey::from_blob(&std::fs::read(dir.join(CLOUD_KEY_FILE))?)?;
        let template = EncVector::from_bytes(&std::fs::read(dir.join(TEMPLATE_FILE))?)?;
        let record =
            Arc::new(ServerRecord { client_id: client_id.to_string(), cloud_key, template });
        let mut cache = self.cache.write().expect("cache poisoned");
        Ok(Some(cache.entry(client_id.to_string()).or_insert(record).clone()))
    }

    fn client_ids(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in std::fs::read_dir(self.root.join("records"))? {
            let entry = entry?;
            if entry.file_type()?.is_dir() {
                if let Some(name) = entry.file_name().to_str() {
                    ids.push(name.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

/// Writes a key triple into a client key directory.
pub fn save_client_keys(dir: &Path, keys: &KeyTriple) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(SECRET_KEY_FILE), keys.secret.to_blob())?;
    std::fs::write(dir.join(CLOUD_KEY_FILE), keys.cloud.to_blob())?;
    let params = format!(
        "backend={}\nparams={}\nsecurity_bits={}\n",
        keys.params.backend.as_str(),
        match keys.params.set {
            ParamSet::Default => "default",
            ParamSet::Test => "test",
            ParamSet::TfheLib => "tfhe-lib",
        },
        keys.params.security_bits
    );
    std::fs::write(dir.join(PARAMS_FILE), params)?;
    Ok(())
}

/// Loads a key triple saved by [`save_client_keys`].
pub fn load_client_keys(dir: &Path) -> Result<KeyTriple> {
    let secret = SecretKey::from_blob(&std::fs::read(dir.join(SECRET_KEY_FILE))?)?;
    let cloud = CloudKey::from_blob(&std::fs::read(dir.join(CLOUD_KEY_FILE))?)?;
    if secret.key_id() != cloud.key_id() {
        return Err(Error::KeyMismatch);
    }
    let mut backend = secret.backend();
    let mut set = ParamSet::Default;
    if let Ok(text) = std::fs::read_to_string(dir.join(PARAMS_FILE)) {
        for line in text.lines() {
            match line.split_once('=') {
                Some(("backend", v)) => backend = v.trim().parse::<BackendKind>()?,
                Some(("params", v)) => set = v.trim().parse::<ParamSet>()?,
                _ => {}
            }
        }
    }
    if backend != secret.backend() {
        return Err(Error::BackendMismatch {
            local: secret.backend().as_str(),
            peer: backend.as_str(),
        });
    }
    Ok(KeyTriple {
        secret,
        cloud,
        params: ParamInfo { backend, set, security_bits: set.security_bits() },
    })
}
