//! Cleartext mock backend.
//!
//! Bits are stored in the open; a random nonce makes serialized ciphertexts
//! of equal bits differ, mirroring the probabilistic encryption of the real
//! backend. Key checks are structural (a shared random fingerprint), not
//! cryptographic.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct ClearSecretKey {
    key_id: u64,
    /// Filler so a serialized mock secret key has key-like entropy; also
    /// what the transcript privacy audit scans for.
    salt: [u8; 32],
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct ClearCloudKey {
    key_id: u64,
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct ClearBit {
    pub(crate) bit: bool,
    nonce: u64,
}

pub(crate) fn keygen(key_id: u64) -> (ClearSecretKey, ClearCloudKey) {
    let mut salt = [0u8; 32];
    rand::Rng::fill(&mut rand::thread_rng(), &mut salt[..]);
    (ClearSecretKey { key_id, salt }, ClearCloudKey { key_id })
}

impl ClearSecretKey {
    pub(crate) fn encrypt(&self, bit: bool) -> ClearBit {
        ClearBit { bit, nonce: fresh_nonce() }
    }

    pub(crate) fn decrypt(&self, c: &ClearBit) -> Result<bool> {
        // The outer key_id check already ran.
        let _ = self.key_id;
        Ok(c.bit)
    }
}

impl ClearCloudKey {
    pub(crate) fn eval(&self, f: impl FnOnce() -> bool) -> ClearBit {
        ClearBit { bit: f(), nonce: fresh_nonce() }
    }
}

impl ClearBit {
    pub(crate) fn trivial(bit: bool) -> ClearBit {
        ClearBit { bit, nonce: 0 }
    }
}

fn fresh_nonce() -> u64 {
    // 0 is reserved for trivial (constant) ciphertexts.
    loop {
        let n = rand::random::<u64>();
        if n != 0 {
            return n;
        }
    }
}
