//! Server side: registration, blind challenge construction and token
//! verification.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime};

use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{EncToken, IdToken, TerminationReason, Verdict};
use crate::error::{Error, Result};
use crate::gates::{BackendKind, CloudKey};
use crate::matcher::{match_f, EncVector, MatchConfig};
use crate::transport::{Message, RecordStore, ServerRecord, WireErrorCode};

/// Server-side policy: matching parameters, token length, session lifetime
/// and the expected backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerConfig {
    pub match_cfg: MatchConfig,
    /// Token length λ in bits; a security parameter independent of the
    /// vector length.
    pub lambda_bits: u16,
    pub session_ttl: Duration,
    pub backend: BackendKind,
}

pub const DEFAULT_LAMBDA_BITS: u16 = 128;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(120);

impl ServerConfig {
    pub fn new(match_cfg: MatchConfig, backend: BackendKind) -> Self {
        ServerConfig {
            match_cfg,
            lambda_bits: DEFAULT_LAMBDA_BITS,
            session_ttl: DEFAULT_SESSION_TTL,
            backend,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.match_cfg.validate()?;
        if self.lambda_bits == 0 || !self.lambda_bits.is_multiple_of(8) || self.lambda_bits > 1024 {
            return Err(Error::BadConfig(format!(
                "token length {} must be a multiple of 8 in 8..=1024",
                self.lambda_bits
            )));
        }
        Ok(())
    }

    fn token_bytes(&self) -> usize {
        self.lambda_bits as usize / 8
    }
}

/// Per-session server state between challenge and verification.
///
/// Holds nothing derived from the match bit: both tokens are kept whether
/// or not the sample matched, so the stored state is identical in shape for
/// matching and non-matching runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: u64,
    pub client_id: String,
    pub r0: Vec<u8>,
    pub r1: Vec<u8>,
    pub stage: Stage,
    pub created_at: SystemTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    AwaitResponse,
    Done,
}

enum SessionSlot {
    Active(SessionSnapshot),
    /// One-shot enforcement: a consumed or expired session leaves a
    /// tombstone so a second response is a stage violation, not an unknown
    /// session.
    Consumed(SystemTime),
    Expired(SystemTime),
}

/// What a verification attempt produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Issued(IdToken),
    Terminated(TerminationReason),
}

type Clock = Arc<dyn Fn() -> SystemTime + Send + Sync>;

/// The server state machine. Thread-safe: sessions and the RNG sit behind
/// mutexes, gate evaluation shares the immutable cloud keys.
pub struct ServerEngine {
    config: ServerConfig,
    records: Arc<dyn RecordStore>,
    sessions: Mutex<HashMap<u64, SessionSlot>>,
    rng: Mutex<StdRng>,
    clock: Clock,
}

impl ServerEngine {
    pub fn new(config: ServerConfig, records: Arc<dyn RecordStore>) -> Result<Self> {
        config.validate()?;
        Ok(ServerEngine {
            config,
            records,
            sessions: Mutex::new(HashMap::new()),
            rng: Mutex::new(StdRng::from_entropy()),
            clock: Arc::new(SystemTime::now),
        })
    }

    /// Pins the session RNG; used by tests that need reproducible tokens
    /// and session ids.
    pub fn with_rng_seed(mut self, seed: u64) -> Self {
        self.rng = Mutex::new(StdRng::seed_from_u64(seed));
        self
    }

    /// Pins the clock; used by expiry and state-audit tests.
    pub fn with_clock(mut self, clock: impl Fn() -> SystemTime + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    /// Stores a new enrollment. The template stays encrypted; the cloud key
    /// cannot decrypt it.
    pub fn register(
        &self,
        client_id: &str,
        cloud_key: CloudKey,
        template: EncVector,
    ) -> Result<()> {
        if client_id.is_empty() {
            return Err(Error::BadConfig("empty client id".into()));
        }
        if cloud_key.backend() != self.config.backend {
            return Err(Error::BackendMismatch {
                local: self.config.backend.as_str(),
                peer: cloud_key.backend().as_str(),
            });
        }
        if template.len() != self.config.match_cfg.n {
            return Err(Error::DimensionMismatch {
                expected: self.config.match_cfg.n,
                got: template.len(),
            });
        }
        if template.width() != self.config.match_cfg.w {
            return Err(Error::WidthMismatch {
                left: self.config.match_cfg.w,
                right: template.width(),
            });
        }
        if template.key_id() != cloud_key.key_id() {
            return Err(Error::KeyMismatch);
        }
        self.records.insert(ServerRecord { client_id: client_id.to_string(), cloud_key, template })
    }

    /// Step 2: evaluates the match predicate blindly, draws fresh distinct
    /// tokens, stores the session and returns the challenge ciphertext.
    pub fn challenge(&self, client_id: &str, sample: &EncVector) -> Result<(u64, EncToken)> {
        let record = self
            .records
            .get(client_id)?
            .ok_or_else(|| Error::UnknownClient(client_id.to_string()))?;
        let handle = record.cloud_key.handle();
        let matched = match_f(&handle, sample, &record.template, &self.config.match_cfg)?;

        let (session_id, r0, r1) = {
            let mut rng = self.rng.lock().expect("rng poisoned");
            let mut r0 = vec![0u8; self.config.token_bytes()];
            let mut r1 = vec![0u8; self.config.token_bytes()];
            rng.fill_bytes(&mut r0);
            // resample until distinct; equal tokens would make the verdict
            // ambiguous
            loop {
                rng.fill_bytes(&mut r1);
                if r1 != r0 {
                    break;
                }
            }
            (rng.gen::<u64>(), r0, r1)
        };

        let token_ct = EncToken::eval_g(&handle, &matched, &r0, &r1)?;

        let now = (self.clock)();
        let state = SessionSnapshot {
            session_id,
            client_id: client_id.to_string(),
            r0,
            r1,
            stage: Stage::AwaitResponse,
            created_at: now,
        };
        let mut sessions = self.sessions.lock().expect("sessions poisoned");
        self.sweep(&mut sessions, now);
        sessions.insert(session_id, SessionSlot::Active(state));
        Ok((session_id, token_ct))
    }

    /// Step 4: compares the revealed token and issues the verdict. The
    /// session is destroyed no matter which branch is taken.
    pub fn verify(&self, session_id: u64, token: &[u8]) -> VerifyOutcome {
        let now = (self.clock)();
        let mut sessions = self.sessions.lock().expect("sessions poisoned");
        let state = match sessions.remove(&session_id) {
            None => return VerifyOutcome::Terminated(TerminationReason::UnknownSession),
            Some(slot @ SessionSlot::Consumed(_)) => {
                sessions.insert(session_id, slot);
                return VerifyOutcome::Terminated(TerminationReason::StageViolation);
            }
            Some(slot @ SessionSlot::Expired(_)) => {
                sessions.insert(session_id, slot);
                return VerifyOutcome::Terminated(TerminationReason::SessionExpired);
            }
            Some(SessionSlot::Active(state)) => {
                sessions.insert(session_id, SessionSlot::Consumed(now));
                state
            }
        };
        if now.duration_since(state.created_at).unwrap_or_default() > self.config.session_ttl {
            sessions.insert(session_id, SessionSlot::Expired(now));
            return VerifyOutcome::Terminated(TerminationReason::SessionExpired);
        }
        drop(sessions);
        if token == &state.r1[..] {
            VerifyOutcome::Issued(IdToken { verdict: Verdict::Accept, session_id, issued_at: now })
        } else if token == &state.r0[..] {
            VerifyOutcome::Issued(IdToken { verdict: Verdict::Reject, session_id, issued_at: now })
        } else {
            VerifyOutcome::Terminated(TerminationReason::TokenMismatch)
        }
    }

    /// Test/audit access to a stored session.
    pub fn session_snapshot(&self, session_id: u64) -> Option<SessionSnapshot> {
        let sessions = self.sessions.lock().expect("sessions poisoned");
        match sessions.get(&session_id) {
            Some(SessionSlot::Active(s)) => Some(s.clone()),
            _ => None,
        }
    }

    pub fn active_sessions(&self) -> usize {
        let sessions = self.sessions.lock().expect("sessions poisoned");
        sessions.values().filter(|s| matches!(s, SessionSlot::Active(_))).count()
    }

    fn sweep(&self, sessions: &mut HashMap<u64, SessionSlot>, now: SystemTime) {
        let ttl = self.config.session_ttl;
        // expire stale active sessions in place, then drop tombstones that
        // outlived a second TTL window
        let stale: Vec<u64> = sessions
            .iter()
            .filter_map(|(id, slot)| match slot {
                SessionSlot::Active(s)
                    if now.duration_since(s.created_at).unwrap_or_default() > ttl =>
                {
                    Some(*id)
                }
                _ => None,
            })
            .collect();
        for id in stale {
            sessions.insert(id, SessionSlot::Expired(now));
        }
        sessions.retain(|_, slot| match slot {
            SessionSlot::Active(_) => true,
            SessionSlot::Consumed(t) | SessionSlot::Expired(t) => {
                now.duration_since(*t).unwrap_or_default() <= ttl
            }
        });
    }

    /// Message-level dispatcher shared by the in-process runner and the
    /// TCP daemon.
    pub fn handle(&self, msg: &Message) -> Message {
        match msg {
            Message::Register { client_id, backend, cloud_key, template } => {
                if *backend != self.config.backend {
                    return Message::Error {
                        code: WireErrorCode::BackendMismatch,
                        detail: format!(
                            "server runs backend `{}`",
                            self.config.backend.as_str()
                        ),
                    };
                }
                match self.register(client_id, cloud_key.clone(), template.clone()) {
                    Ok(()) => Message::RegisterOk,
                    Err(e) => Message::Error { code: WireErrorCode::from_error(&e), detail: e.to_string() },
                }
            }
            Message::AuthInit { client_id, sample } => match self.challenge(client_id, sample) {
                Ok((session_id, token_ct)) => Message::Challenge { session_id, token_ct },
                Err(e) => Message::Terminate { session_id: 0, reason: termination_for(&e) },
            },
            Message::Response { session_id, token } => match self.verify(*session_id, token) {
                VerifyOutcome::Issued(token) => {
                    Message::Result { session_id: token.session_id, verdict: token.verdict }
                }
                VerifyOutcome::Terminated(reason) => {
                    Message::Terminate { session_id: *session_id, reason }
                }
            },
            other => Message::Error {
                code: WireErrorCode::Malformed,
                detail: format!("unexpected {} message", other.kind_str()),
            },
        }
    }
}

fn termination_for(e: &Error) -> TerminationReason {
    match e {
        Error::UnknownClient(_) => TerminationReason::UnknownClient,
        Error::DimensionMismatch { .. } | Error::WidthMismatch { .. } => {
            TerminationReason::DimensionMismatch
        }
        Error::BackendMismatch { .. } => TerminationReason::BackendMismatch,
        _ => TerminationReason::MalformedRequest,
    }
}

impl std::fmt::Debug for ServerEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ServerEngine")
            .field("config", &self.config)
            .field("active_sessions", &self.active_sessions())
            .finish()
    }
}
