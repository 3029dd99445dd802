//! Shared fixtures for unit tests. FHE key generation is expensive, so one
//! triple is generated per test binary and reused.

use std::sync::OnceLock;

use crate::gates::{keygen, BackendKind, KeyTriple, ParamSet};

pub(crate) fn clear_keys() -> &'static KeyTriple {
    static KEYS: OnceLock<KeyTriple> = OnceLock::new();
    KEYS.get_or_init(|| keygen(BackendKind::Clear, ParamSet::Default))
}

pub(crate) fn fhe_keys() -> &'static KeyTriple {
    static KEYS: OnceLock<KeyTriple> = OnceLock::new();
    KEYS.get_or_init(|| keygen(BackendKind::Fhe, ParamSet::Default))
}
