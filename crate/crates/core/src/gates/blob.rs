//! Versioned binary blobs for keys and ciphertexts.
//!
//! Layout: 8-byte magic (`HEMB` + PNG-style line-ending guard), version
//! `u16` big-endian, kind `u8`, then a backend-defined payload that
//! round-trips bit-exactly.

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{CloudKey, EncBit, SecretKey};
use crate::error::{Error, Result};

pub const BLOB_MAGIC: [u8; 8] = *b"HEMB\r\n\x1a\n";
pub const BLOB_VERSION: u16 = 1;

const HEADER_LEN: usize = 8 + 2 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum BlobKind {
    SecretKey = 1,
    CloudKey = 2,
    EncBit = 3,
}

impl BlobKind {
    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1 => Ok(BlobKind::SecretKey),
            2 => Ok(BlobKind::CloudKey),
            3 => Ok(BlobKind::EncBit),
            other => Err(Error::Malformed(format!("unknown blob kind {other}"))),
        }
    }
}

fn encode<T: Serialize>(kind: BlobKind, value: &T) -> Vec<u8> {
    let payload = bincode::serialize(value).expect("in-memory serialization cannot fail");
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&BLOB_MAGIC);
    out.extend_from_slice(&BLOB_VERSION.to_be_bytes());
    out.push(kind as u8);
    out.extend_from_slice(&payload);
    out
}

fn decode<T: DeserializeOwned>(kind: BlobKind, raw: &[u8]) -> Result<T> {
    if raw.len() < HEADER_LEN {
        return Err(Error::Malformed("blob shorter than header".into()));
    }
    if raw[..8] != BLOB_MAGIC {
        return Err(Error::Malformed("bad magic".into()));
    }
    let version = u16::from_be_bytes([raw[8], raw[9]]);
    if version != BLOB_VERSION {
        return Err(Error::Malformed(format!("unsupported blob version {version}")));
    }
    let got = BlobKind::from_tag(raw[10])?;
    if got != kind {
        return Err(Error::Malformed(format!("expected {kind:?} blob, found {got:?}")));
    }
    bincode::deserialize(&raw[HEADER_LEN..])
        .map_err(|e| Error::Malformed(format!("payload decode: {e}")))
}

impl SecretKey {
    pub fn to_blob(&self) -> Vec<u8> {
        encode(BlobKind::SecretKey, self)
    }

    pub fn from_blob(raw: &[u8]) -> Result<Self> {
        decode(BlobKind::SecretKey, raw)
    }
}

impl CloudKey {
    pub fn to_blob(&self) -> Vec<u8> {
        encode(BlobKind::CloudKey, self)
    }

    pub fn from_blob(raw: &[u8]) -> Result<Self> {
        decode(BlobKind::CloudKey, raw)
    }
}

impl EncBit {
    pub fn to_blob(&self) -> Vec<u8> {
        encode(BlobKind::EncBit, self)
    }

    pub fn from_blob(raw: &[u8]) -> Result<Self> {
        decode(BlobKind::EncBit, raw)
    }
}
