//! Shared fixtures for the criterion benchmarks. The benchmarks run on the
//! clear backend so they finish in seconds; the real-backend tables come
//! from `hembio bench`.

use hembio_core::arith::EncWord;
use hembio_core::gates::{keygen, BackendKind, KeyTriple, ParamSet};
use hembio_core::matcher::{encrypt_vector, BiometricVector, EncVector};

pub fn clear_keys() -> KeyTriple {
    keygen(BackendKind::Clear, ParamSet::Default)
}

pub fn word(keys: &KeyTriple, value: u64, width: u16) -> EncWord {
    EncWord::encrypt(&keys.secret, value, width).expect("in-range value")
}

pub fn vector(keys: &KeyTriple, components: Vec<u32>, w: u16) -> EncVector {
    let v = BiometricVector::new(components, 1 << w).expect("in-range components");
    encrypt_vector(&keys.secret, &v, w).expect("encryptable vector")
}
