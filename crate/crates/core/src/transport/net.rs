//! Client-side network operations.

use std::net::{TcpStream, ToSocketAddrs};

use super::frame::{read_message, write_message};
use super::Message;
use crate::error::{Error, Result};
use crate::matcher::BiometricVector;
use crate::protocol::{ClientIdentity, IdToken, Outcome};

/// Enrolls a client over the wire.
pub fn remote_register(
    addr: impl ToSocketAddrs,
    identity: &ClientIdentity,
    template: &BiometricVector,
    w: u16,
    max_frame: u64,
) -> Result<()> {
    let mut stream = TcpStream::connect(addr)?;
    write_message(&mut stream, &identity.register_message(template, w)?)?;
    match read_message(&mut stream, max_frame)? {
        Message::RegisterOk => Ok(()),
        Message::Error { detail, .. } => Err(Error::Wire(detail)),
        other => Err(Error::Wire(format!("unexpected reply {}", other.kind_str()))),
    }
}

/// Runs one full authentication over the wire and returns the outcome.
pub fn remote_auth(
    addr: impl ToSocketAddrs,
    identity: &ClientIdentity,
    sample: &BiometricVector,
    w: u16,
    max_frame: u64,
) -> Result<Outcome> {
    let mut stream = TcpStream::connect(addr)?;
    write_message(&mut stream, &identity.auth_init_message(sample, w)?)?;
    let challenge = read_message(&mut stream, max_frame)?;
    match &challenge {
        Message::Challenge { .. } => {}
        Message::Terminate { reason, .. } => return Ok(Outcome::Terminated(*reason)),
        Message::Error { detail, .. } => return Err(Error::Wire(detail.clone())),
        other => return Err(Error::Wire(format!("unexpected reply {}", other.kind_str()))),
    }
    let response = identity.response_for(&challenge)?;
    write_message(&mut stream, &response)?;
    match read_message(&mut stream, max_frame)? {
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
