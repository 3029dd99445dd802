//! Boolean gate evaluation over encrypted bits.
//!
//! Two backends share one interface: a real gate-bootstrapping FHE backend
//! (TFHE) and a cleartext mock backend used for fast protocol-level testing.
//! The scheme is symmetric: the secret key encrypts and decrypts, the cloud
//! key evaluates gates. Every ciphertext carries the fingerprint of the key
//! triple that produced it so that cross-key mixing is rejected.

mod blob;
mod clear;
mod fhe;

pub use blob::{BlobKind, BLOB_MAGIC, BLOB_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use clear::{ClearBit, ClearCloudKey, ClearSecretKey};

/// Which gate-evaluation backend a key triple (and everything derived from
/// it) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    /// Cleartext mock: bits in the open, gates evaluated directly.
    Clear,
    /// Gate-bootstrapped FHE.
    Fhe,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Clear => "clear",
            BackendKind::Fhe => "fhe",
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(BackendKind::Clear),
            1 => Ok(BackendKind::Fhe),
            other => Err(Error::Malformed(format!("unknown backend tag {other}"))),
        }
    }

    pub fn tag(&self) -> u8 {
        match self {
            BackendKind::Clear => 0,
            BackendKind::Fhe => 1,
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clear" => Ok(BackendKind::Clear),
            "fhe" => Ok(BackendKind::Fhe),
            other => Err(Error::BadConfig(format!("unknown backend `{other}`"))),
        }
    }
}

/// Security parameter selection for key generation.
///
/// `Default` and `Test` both map to the FHE library's standard 128-bit
/// parameter sets (there is no insecure shortcut; `Test` picks the variant
/// with the cheaper bootstrap ordering). `TfheLib` mirrors the original
/// TFHE library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamSet {
    Default,
    Test,
    TfheLib,
}

impl ParamSet {
    /// Claimed security level of the underlying scheme, in bits.
    pub fn security_bits(&self) -> u16 {
        match self {
            ParamSet::Default | ParamSet::Test => 128,
            ParamSet::TfheLib => 110,
        }
    }
}

impl std::str::FromStr for ParamSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(ParamSet::Default),
            "test" => Ok(ParamSet::Test),
            "tfhe-lib" => Ok(ParamSet::TfheLib),
            other => Err(Error::UnsupportedParams(other.to_string())),
        }
    }
}

/// Backend parameters recorded alongside a generated key triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamInfo {
    pub backend: BackendKind,
    pub set: ParamSet,
    pub security_bits: u16,
}

/// Decryption/encryption capability. Client-held, never sent on the wire.
#[derive(Clone, Serialize, Deserialize)]
pub struct SecretKey {
    key_id: u64,
    inner: SecretKeyInner,
}

#[derive(Clone, Serialize, Deserialize)]
enum SecretKeyInner {
    Clear(ClearSecretKey),
    Fhe(Box<tfhe::boolean::client_key::ClientKey>),
}

/// Gate-evaluation capability. Shared with the server at registration; it
/// cannot decrypt.
#[derive(Clone, Serialize, Deserialize)]
pub struct CloudKey {
    key_id: u64,
    inner: CloudKeyInner,
}

#[derive(Clone, Serialize, Deserialize)]
enum CloudKeyInner {
    Clear(ClearCloudKey),
    Fhe(Box<tfhe::boolean::server_key::ServerKey>),
}

/// A matched secret/cloud key pair plus the parameters it was generated
/// under.
#[derive(Clone)]
pub struct KeyTriple {
    pub secret: SecretKey,
    pub cloud: CloudKey,
    pub params: ParamInfo,
}

/// A ciphertext encrypting one bit.
#[derive(Clone, Serialize, Deserialize)]
pub struct EncBit {
    key_id: u64,
    inner: EncBitInner,
}

#[derive(Clone, Serialize, Deserialize)]
enum EncBitInner {
    Clear(ClearBit),
    Fhe(tfhe::boolean::ciphertext::Ciphertext),
}

/// Borrow of a cloud key through which all gate evaluation runs.
#[derive(Clone, Copy)]
pub struct BackendHandle<'k> {
    key: &'k CloudKey,
}

/// Generates a fresh key triple for the requested backend.
///
/// Repeated calls return independent keys; ciphertexts from different
/// triples cannot be mixed.
pub fn keygen(backend: BackendKind, set: ParamSet) -> KeyTriple {
    let key_id = rand::random::<u64>();
    let (secret, cloud) = match backend {
        BackendKind::Clear => {
            let (sk, ck) = clear::keygen(key_id);
            (SecretKeyInner::Clear(sk), CloudKeyInner::Clear(ck))
        }
        BackendKind::Fhe => {
            let (sk, ck) = fhe::keygen(set);
            (SecretKeyInner::Fhe(Box::new(sk)), CloudKeyInner::Fhe(Box::new(ck)))
        }
    };
    KeyTriple {
        secret: SecretKey { key_id, inner: secret },
        cloud: CloudKey { key_id, inner: cloud },
        params: ParamInfo { backend, set, security_bits: set.security_bits() },
    }
}

impl SecretKey {
    pub fn key_id(&self) -> u64 {
        self.key_id
    }

    pub fn backend(&self) -> BackendKind {
        match self.inner {
            SecretKeyInner::Clear(_) => BackendKind::Clear,
            SecretKeyInner::Fhe(_) => BackendKind::Fhe,
        }
    }

    /// Encrypts one bit. Encryption is probabilistic: re-encrypting the same
    /// bit yields a different serialized ciphertext.
    pub fn encrypt_bit(&self, bit: bool) -> EncBit {
        let inner = match &self.inner {
            SecretKeyInner::Clear(sk) => EncBitInner::Clear(sk.encrypt(bit)),
            SecretKeyInner::Fhe(cks) => EncBitInner::Fhe(cks.encrypt(bit)),
        };
        EncBit { key_id: self.key_id, inner }
    }

    /// Decrypts a bit produced under this key. Mixing keys yields
    /// `Error::KeyMismatch` (the ⊥ outcome).
    pub fn decrypt_bit(&self, bit: &EncBit) -> Result<bool> {
        if bit.key_id != self.key_id {
            return Err(Error::KeyMismatch);
        }
        match (&self.inner, &bit.inner) {
            (SecretKeyInner::Clear(sk), EncBitInner::Clear(c)) => sk.decrypt(c),
            (SecretKeyInner::Fhe(cks), EncBitInner::Fhe(ct)) => Ok(cks.decrypt(ct)),
            _ => Err(Error::KeyMismatch),
        }
    }
}

impl CloudKey {
    pub fn key_id(&self) -> u64 {
        self.key_id
    }

    pub fn backend(&self) -> BackendKind {
        match self.inner {
            CloudKeyInner::Clear(_) => BackendKind::Clear,
            CloudKeyInner::Fhe(_) => BackendKind::Fhe,
        }
    }

    pub fn handle(&self) -> BackendHandle<'_> {
        BackendHandle { key: self }
    }
}

impl EncBit {
    pub fn key_id(&self) -> u64 {
        self.key_id
    }

    pub fn backend(&self) -> BackendKind {
        match self.inner {
            EncBitInner::Clear(_) => BackendKind::Clear,
            EncBitInner::Fhe(_) => BackendKind::Fhe,
        }
    }
}

macro_rules! binary_gate {
    ($(#[$doc:meta])* $name:ident, $clear_op:expr, $fhe_method:ident) => {
        $(#[$doc])*
        pub fn $name(&self, a: &EncBit, b: &EncBit) -> Result<EncBit> {
            self.check(a)?;
            self.check(b)?;
            let inner = match (&self.key.inner, &a.inner, &b.inner) {
                (CloudKeyInner::Clear(ck), EncBitInner::Clear(x), EncBitInner::Clear(y)) => {
                    EncBitInner::Clear(ck.eval(|| $clear_op(x.bit, y.bit)))
                }
                (CloudKeyInner::Fhe(sks), EncBitInner::Fhe(x), EncBitInner::Fhe(y)) => {
                    use tfhe::boolean::prelude::BinaryBooleanGates;
                    EncBitInner::Fhe(sks.$fhe_method(x, y))
                }
                _ => return Err(Error::KeyMismatch),
            };
            Ok(EncBit { key_id: self.key.key_id, inner })
        }
    };
}

impl<'k> BackendHandle<'k> {
    pub fn kind(&self) -> BackendKind {
        self.key.backend()
    }

    pub fn key_id(&self) -> u64 {
        self.key.key_id
    }

    fn check(&self, bit: &EncBit) -> Result<()> {
        if bit.key_id != self.key.key_id {
            return Err(Error::KeyMismatch);
        }
        Ok(())
    }

    binary_gate!(and, |x: bool, y: bool| x && y, and);
    binary_gate!(or, |x: bool, y: bool| x || y, or);
    binary_gate!(xor, |x: bool, y: bool| x ^ y, xor);
    binary_gate!(xnor, |x: bool, y: bool| !(x ^ y), xnor);

    /// NOT is noise-free on both backends.
    pub fn not(&self, a: &EncBit) -> Result<EncBit> {
        self.check(a)?;
        let inner = match (&self.key.inner, &a.inner) {
            (CloudKeyInner::Clear(ck), EncBitInner::Clear(x)) => {
                EncBitInner::Clear(ck.eval(|| !x.bit))
            }
            (CloudKeyInner::Fhe(sks), EncBitInner::Fhe(x)) => EncBitInner::Fhe(sks.not(x)),
            _ => return Err(Error::KeyMismatch),
        };
        Ok(EncBit { key_id: self.key.key_id, inner })
    }

    /// Ciphertext-domain selector: decrypts to `on_true` when `sel` is 1,
    /// `on_false` otherwise.
    pub fn mux(&self, sel: &EncBit, on_true: &EncBit, on_false: &EncBit) -> Result<EncBit> {
        self.check(sel)?;
        self.check(on_true)?;
        self.check(on_false)?;
        let inner = match (&self.key.inner, &sel.inner, &on_true.inner, &on_false.inner) {
            (
                CloudKeyInner::Clear(ck),
                EncBitInner::Clear(s),
                EncBitInner::Clear(t),
                EncBitInner::Clear(f),
            ) => EncBitInner::Clear(ck.eval(|| if s.bit { t.bit } else { f.bit })),
            (
                CloudKeyInner::Fhe(sks),
                EncBitInner::Fhe(s),
                EncBitInner::Fhe(t),
                EncBitInner::Fhe(f),
            ) => EncBitInner::Fhe(sks.mux(s, t, f)),
            _ => return Err(Error::KeyMismatch),
        };
        Ok(EncBit { key_id: self.key.key_id, inner })
    }

    /// Noiseless encryption of a known bit, usable in gate evaluation
    /// without the secret key. The server injects thresholds, carries and
    /// challenge tokens this way.
    pub fn constant(&self, bit: bool) -> EncBit {
        let inner = match &self.key.inner {
            CloudKeyInner::Clear(_) => EncBitInner::Clear(ClearBit::trivial(bit)),
            CloudKeyInner::Fhe(sks) => EncBitInner::Fhe(sks.trivial_encrypt(bit)),
        };
        EncBit { key_id: self.key.key_id, inner }
    }
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SecretKey")
            .field("backend", &self.backend().as_str())
            .field("key_id", &format_args!("{:016x}", self.key_id))
            .finish()
    }
}

impl std::fmt::Debug for CloudKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CloudKey")
            .field("backend", &self.backend().as_str())
            .field("key_id", &format_args!("{:016x}", self.key_id))
            .finish()
    }
}

impl std::fmt::Debug for EncBit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EncBit")
            .field("backend", &self.backend().as_str())
            .field("key_id", &format_args!("{:016x}", self.key_id))
            .finish()
    }
}

// Gate evaluation must be callable concurrently against one shared cloud key.
const _: () = {
    const fn assert_sync_send<T: Sync + Send>() {}
    assert_sync_send::<CloudKey>();
    assert_sync_send::<EncBit>();
    assert_sync_send::<SecretKey>();
};
