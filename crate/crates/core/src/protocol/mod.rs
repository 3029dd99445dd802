//! The stateful challenge-response protocol.
//!
//! Registration stores an encrypted template and the evaluation key with
//! the server. Each authentication then runs four steps: the client sends
//! an encrypted sample; the server evaluates the match predicate blindly,
//! draws two fresh tokens and answers with a ciphertext that decrypts to
//! exactly one of them; the client decrypts and returns the token; the
//! server compares and issues its verdict. The server never learns the
//! match bit before the client reveals the token, and a token is only ever
//! valid for the single session it was drawn for.

mod client;
mod server;

pub mod audit;

pub use client::ClientIdentity;
pub use server::{
    ServerConfig, ServerEngine, SessionSnapshot, Stage, VerifyOutcome, DEFAULT_LAMBDA_BITS,
    DEFAULT_SESSION_TTL,
};

use serde::{Deserialize, Serialize};

use crate::arith::Reader;
use crate::error::{Error, Result};
use crate::gates::{BackendHandle, EncBit, SecretKey};
use crate::transport::Message;

/// Final verdict carried by an [`IdToken`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Reject,
    Accept,
}

impl Verdict {
    pub fn tag(&self) -> u8 {
        match self {
            Verdict::Reject => 0x00,
            Verdict::Accept => 0x01,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0x00 => Ok(Verdict::Reject),
            0x01 => Ok(Verdict::Accept),
            other => Err(Error::Malformed(format!("bad verdict byte {other:#04x}"))),
        }
    }
}

/// The artifact a completed verification issues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdToken {
    pub verdict: Verdict,
    pub session_id: u64,
    pub issued_at: std::time::SystemTime,
}

/// Why a session ended without a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    UnknownClient,
    TokenMismatch,
    SessionExpired,
    UnknownSession,
    StageViolation,
    MalformedRequest,
    BackendMismatch,
    DimensionMismatch,
}

impl TerminationReason {
    pub fn tag(&self) -> u8 {
        match self {
            TerminationReason::UnknownClient => 1,
            TerminationReason::TokenMismatch => 2,
            TerminationReason::SessionExpired => 3,
            TerminationReason::UnknownSession => 4,
            TerminationReason::StageViolation => 5,
            TerminationReason::MalformedRequest => 6,
            TerminationReason::BackendMismatch => 7,
            TerminationReason::DimensionMismatch => 8,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            1 => TerminationReason::UnknownClient,
            2 => TerminationReason::TokenMismatch,
            3 => TerminationReason::SessionExpired,
            4 => TerminationReason::UnknownSession,
            5 => TerminationReason::StageViolation,
            6 => TerminationReason::MalformedRequest,
            7 => TerminationReason::BackendMismatch,
            8 => TerminationReason::DimensionMismatch,
            other => return Err(Error::Malformed(format!("bad reason byte {other}"))),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::UnknownClient => "unknown-client",
            TerminationReason::TokenMismatch => "token-mismatch",
            TerminationReason::SessionExpired => "expired-session",
            TerminationReason::UnknownSession => "unknown-session",
            TerminationReason::StageViolation => "stage-violation",
            TerminationReason::MalformedRequest => "malformed-request",
            TerminationReason::BackendMismatch => "backend-mismatch",
            TerminationReason::DimensionMismatch => "dimension-mismatch",
        }
    }
}

/// How one authentication attempt ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Issued(IdToken),
    Terminated(TerminationReason),
}

impl Outcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, Outcome::Issued(IdToken { verdict: Verdict::Accept, .. }))
    }

    pub fn is_reject(&self) -> bool {
        matches!(self, Outcome::Issued(IdToken { verdict: Verdict::Reject, .. }))
    }
}

/// Ciphertext of a challenge token: λ encrypted bits, LSB-first within each
/// byte, byte 0 first.
#[derive(Debug, Clone)]
pub struct EncToken {
    bits: Vec<EncBit>,
}

fn token_bit(bytes: &[u8], i: usize) -> bool {
    (bytes[i / 8] >> (i % 8)) & 1 == 1
}

impl EncToken {
    /// Evaluates the token-selection function bitwise: each output bit is
    /// `MUX(b, r1_i, r0_i)` over noiseless encodings of the token bits.
    /// For a boolean selector this coincides pointwise with the arithmetic
    /// form `(1 - b)·r0 + b·r1`.
    pub fn eval_g(
        handle: &BackendHandle<'_>,
        b: &EncBit,
        r0: &[u8],
        r1: &[u8],
    ) -> Result<EncToken> {
        if r0.len() != r1.len() || r0.is_empty() {
            return Err(Error::BadConfig("token lengths differ".into()));
        }
        let bits: Result<Vec<EncBit>> = (0..r0.len() * 8)
            .map(|i| {
                let t = handle.constant(token_bit(r1, i));
                let f = handle.constant(token_bit(r0, i));
                handle.mux(b, &t, &f)
            })
            .collect();
        Ok(EncToken { bits: bits? })
    }

    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[EncBit] {
        &self.bits
    }

    /// Reassembles a token ciphertext from bits (λ must stay a multiple of
    /// 8). Used by tamper tests to model in-flight modification.
    pub fn from_bits(bits: Vec<EncBit>) -> Result<Self> {
        if bits.is_empty() || !bits.len().is_multiple_of(8) {
            return Err(Error::Malformed("token bit count must be a positive multiple of 8".into()));
        }
        Ok(EncToken { bits })
    }

    /// Decrypts back to token bytes. Fails on any key mismatch.
    pub fn decrypt(&self, sk: &SecretKey) -> Result<Vec<u8>> {
        let mut out = vec![0u8; self.bits.len() / 8];
        for (i, bit) in self.bits.iter().enumerate() {
            if sk.decrypt_bit(bit)? {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        Ok(out)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.bits.len() as u16).to_be_bytes());
        for bit in &self.bits {
            let blob = bit.to_blob();
            out.extend_from_slice(&(blob.len() as u32).to_be_bytes());
            out.extend_from_slice(&blob);
        }
        out
    }

    pub fn from_bytes(raw: &[u8]) -> Result<Self> {
        let mut r = Reader::new(raw);
        let n = r.u16()?;
        let mut bits = Vec::with_capacity(n as usize);
        for _ in 0..n {
            bits.push(crate::gates::EncBit::from_blob(r.bytes()?)?);
        }
        r.finish()?;
        EncToken::from_bits(bits)
    }
}

/// Drives one full authentication against an in-process engine and returns
/// the outcome the client observes.
pub fn run_protocol(
    client: &ClientIdentity,
    engine: &ServerEngine,
    sample: &crate::matcher::BiometricVector,
) -> Result<Outcome> {
    run_steps(client, engine, sample, None)
}

/// Same as [`run_protocol`] but records every frame either side would see
/// on the wire into `transcript`.
pub fn run_protocol_recorded(
    client: &ClientIdentity,
    engine: &ServerEngine,
    sample: &crate::matcher::BiometricVector,
    transcript: &mut audit::Transcript,
) -> Result<Outcome> {
    run_steps(client, engine, sample, Some(transcript))
}

fn run_steps(
    client: &ClientIdentity,
    engine: &ServerEngine,
    sample: &crate::matcher::BiometricVector,
    mut transcript: Option<&mut audit::Transcript>,
) -> Result<Outcome> {
    let w = engine.config().match_cfg.w;
    let init = client.auth_init_message(sample, w)?;
    if let Some(t) = transcript.as_deref_mut() {
        t.record_to_server(&init)?;
    }
    let challenge = engine.handle(&init);
    if let Some(t) = transcript.as_deref_mut() {
        t.record_to_client(&challenge)?;
    }
    match challenge {
        Message::Challenge { .. } => {}
        Message::Terminate { reason, .. } => return Ok(Outcome::Terminated(reason)),
        Message::Error { detail, .. } => return Err(Error::Wire(detail)),
        other => return Err(Error::Wire(format!("unexpected reply {}", other.kind_str()))),
    }
    let response = client.response_for(&challenge)?;
    if let Some(t) = transcript.as_deref_mut() {
        t.record_to_server(&response)?;
    }
    let result = engine.handle(&response);
    if let Some(t) = transcript {
        t.record_to_client(&result)?;
    }
    match result {
        Message::Result { session_id, verdict } => Ok(Outcome::Issued(IdToken {
            verdict,
            session_id,
            issued_at: std::time::SystemTime::now(),
        })),
        Message::Terminate { reason, .. } => Ok(Outcome::Terminated(reason)),
        Message::Error { detail, .. } => Err(Error::Wire(detail)),
        other => Err(Error::Wire(format!("unexpected reply {}", other.kind_str()))),
    }
}
