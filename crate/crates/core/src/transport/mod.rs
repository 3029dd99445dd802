//! Wire protocol, persistence and the TCP daemon.
//!
//! Frames are binary and length-prefixed (ciphertext payloads run to
//! megabytes): `u32` big-endian length covering the type byte and payload,
//! a `u8` message type, then a type-specific body. All integers on the wire
//! are big-endian; ciphertext blobs are opaque.

mod config;
mod frame;
mod net;
mod server;
mod store;

pub use config::{hembio_home, RunConfig, DEFAULT_MAX_FRAME};
pub use frame::{decode_frame, encode_frame, read_message, write_message, MessageType};
pub use net::{remote_auth, remote_register};
pub use server::{serve, Server, ServerHandle};
pub use store::{
    load_client_keys, save_client_keys, DirStore, MemoryStore, RecordStore, ServerRecord,
};

use crate::error::{Error, Result};
use crate::gates::{BackendKind, CloudKey};
use crate::matcher::EncVector;
use crate::protocol::{EncToken, TerminationReason, Verdict};

/// Codes carried by `ERROR` frames (failures outside a session).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireErrorCode {
    DuplicateClient,
    BackendMismatch,
    Malformed,
    DimensionMismatch,
    FrameTooLarge,
    Internal,
}

impl WireErrorCode {
    pub fn tag(&self) -> u8 {
        match self {
            WireErrorCode::DuplicateClient => 1,
            WireErrorCode::BackendMismatch => 2,
            WireErrorCode::Malformed => 3,
            WireErrorCode::DimensionMismatch => 4,
            WireErrorCode::FrameTooLarge => 5,
            WireErrorCode::Internal => 6,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            1 => WireErrorCode::DuplicateClient,
            2 => WireErrorCode::BackendMismatch,
            3 => WireErrorCode::Malformed,
            4 => WireErrorCode::DimensionMismatch,
            5 => WireErrorCode::FrameTooLarge,
            6 => WireErrorCode::Internal,
            other => return Err(Error::Malformed(format!("bad error code {other}"))),
        })
    }

    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::DuplicateClient(_) => WireErrorCode::DuplicateClient,
            Error::BackendMismatch { .. } => WireErrorCode::BackendMismatch,
            Error::DimensionMismatch { .. } | Error::WidthMismatch { .. } => {
                WireErrorCode::DimensionMismatch
            }
            Error::Malformed(_) | Error::Wire(_) => WireErrorCode::Malformed,
            Error::FrameTooLarge { .. } => WireErrorCode::FrameTooLarge,
            _ => WireErrorCode::Internal,
        }
    }
}

/// Tagged wire envelope for the whole protocol.
#[derive(Debug, Clone)]
pub enum Message {
    Register {
        client_id: String,
        backend: BackendKind,
        cloud_key: CloudKey,
        template: EncVector,
    },
    RegisterOk,
    AuthInit {
        client_id: String,
        sample: EncVector,
    },
    Challenge {
        session_id: u64,
        token_ct: EncToken,
    },
    Response {
        session_id: u64,
        token: Vec<u8>,
    },
    Result {
        session_id: u64,
        verdict: Verdict,
    },
    Terminate {
        session_id: u64,
        reason: TerminationReason,
    },
    Error {
        code: WireErrorCode,
        detail: String,
    },
}

impl Message {
    pub fn kind(&self) -> MessageType {
        match self {
            Message::Register { .. } => MessageType::Register,
            Message::RegisterOk => MessageType::RegisterOk,
            Message::AuthInit { .. } => MessageType::AuthInit,
            Message::Challenge { .. } => MessageType::Challenge,
            Message::Response { .. } => MessageType::Response,
            Message::Result { .. } => MessageType::Result,
            Message::Terminate { .. } => MessageType::Terminate,
            Message::Error { .. } => MessageType::Error,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        self.kind().as_str()
    }
}
