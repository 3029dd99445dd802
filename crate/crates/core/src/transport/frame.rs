//! Frame codec: `length (u32 BE, = 1 + payload) | type (u8) | payload`.

use std::io::{Read, Write};

use super::{Message, WireErrorCode};
use crate::arith::Reader;
use crate::error::{Error, Result};
use crate::gates::{BackendKind, CloudKey};
use crate::matcher::EncVector;
use crate::protocol::{EncToken, TerminationReason, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MessageType {
    Register = 1,
    RegisterOk = 2,
    AuthInit = 3,
    Challenge = 4,
    Response = 5,
    Result = 6,
    Terminate = 7,
    Error = 8,
}

impl MessageType {
    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            1 => MessageType::Register,
            2 => MessageType::RegisterOk,
            3 => MessageType::AuthInit,
            4 => MessageType::Challenge,
            5 => MessageType::Response,
            6 => MessageType::Result,
            7 => MessageType::Terminate,
            8 => MessageType::Error,
            other => return Err(Error::Wire(format!("unknown message type {other}"))),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MessageType::Register => "REGISTER",
            MessageType::RegisterOk => "REGISTER_OK",
            MessageType::AuthInit => "AUTH_INIT",
            MessageType::Challenge => "CHALLENGE",
            MessageType::Response => "RESPONSE",
            MessageType::Result => "RESULT",
            MessageType::Terminate => "TERMINATE",
            MessageType::Error => "ERROR",
        }
    }
}

fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u16).to_be_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn read_str(r: &mut Reader<'_>) -> Result<String> {
    let len = r.u16()? as usize;
    let mut s = Vec::with_capacity(len);
    for _ in 0..len {
        s.push(r.u8()?);
    }
    String::from_utf8(s).map_err(|_| Error::Wire("id is not utf-8".into()))
}

fn payload(msg: &Message) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    match msg {
        Message::Register { client_id, backend, cloud_key, template } => {
            put_str(&mut out, client_id);
            out.push(backend.tag());
            put_bytes(&mut out, &cloud_key.to_blob());
            put_bytes(&mut out, &template.to_bytes());
        }
        Message::RegisterOk => {}
        Message::AuthInit { client_id, sample } => {
            put_str(&mut out, client_id);
            put_bytes(&mut out, &sample.to_bytes());
        }
        Message::Challenge { session_id, token_ct } => {
            out.extend_from_slice(&session_id.to_be_bytes());
            put_bytes(&mut out, &token_ct.to_bytes());
        }
        Message::Response { session_id, token } => {
            out.extend_from_slice(&session_id.to_be_bytes());
            put_bytes(&mut out, token);
        }
        Message::Result { session_id, verdict } => {
            out.extend_from_slice(&session_id.to_be_bytes());
            out.push(verdict.tag());
        }
        Message::Terminate { session_id, reason } => {
            out.extend_from_slice(&session_id.to_be_bytes());
            out.push(reason.tag());
        }
        Message::Error { code, detail } => {
            out.push(code.tag());
            put_str(&mut out, detail);
        }
    }
    Ok(out)
}

/// Serializes a message into one complete frame.
pub fn encode_frame(msg: &Message) -> Result<Vec<u8>> {
    let body = payload(msg)?;
    let mut out = Vec::with_capacity(5 + body.len());
    out.extend_from_slice(&(body.len() as u32 + 1).to_be_bytes());
    out.push(msg.kind() as u8);
    out.extend_from_slice(&body);
    Ok(out)
}

/// Parses one complete frame produced by [`encode_frame`].
pub fn decode_frame(raw: &[u8]) -> Result<Message> {
    if raw.len() < 5 {
        return Err(Error::Wire("frame shorter than header".into()));
    }
    let len = u32::from_be_bytes(raw[..4].try_into().unwrap()) as usize;
    if len != raw.len() - 4 {
        return Err(Error::Wire(format!("length field {len} disagrees with frame size")));
    }
    decode_body(raw[4], &raw[5..])
}

fn decode_body(type_tag: u8, body: &[u8]) -> Result<Message> {
    let kind = MessageType::from_tag(type_tag)?;
    let mut r = Reader::new(body);
    let msg = match kind {
        MessageType::Register => {
            let client_id = read_str(&mut r)?;
            let backend = BackendKind::from_tag(r.u8()?)?;
            let cloud_key = CloudKey::from_blob(r.bytes()?)?;
            let template = EncVector::from_bytes(r.bytes()?)?;
            Message::Register { client_id, backend, cloud_key, template }
        }
        MessageType::RegisterOk => Message::RegisterOk,
        MessageType::AuthInit => {
            let client_id = read_str(&mut r)?;
            let sample = EncVector::from_bytes(r.bytes()?)?;
            Message::AuthInit { client_id, sample }
        }
        MessageType::Challenge => {
            let session_id = r.u64()?;
            let token_ct = EncToken::from_bytes(r.bytes()?)?;
            Message::Challenge { session_id, token_ct }
        }
        MessageType::Response => {
            let session_id = r.u64()?;
            let token = r.bytes()?.to_vec();
            Message::Response { session_id, token }
        }
        MessageType::Result => {
            let session_id = r.u64()?;
            let verdict = Verdict::from_tag(r.u8()?)?;
            Message::Result { session_id, verdict }
        }
        MessageType::Terminate => {
            let session_id = r.u64()?;
            let reason = TerminationReason::from_tag(r.u8()?)?;
            Message::Terminate { session_id, reason }
        }
        MessageType::Error => {
            let code = WireErrorCode::from_tag(r.u8()?)?;
            let detail = read_str(&mut r)?;
            Message::Error { code, detail }
        }
    };
    r.finish()?;
    Ok(msg)
}

/// Reads one frame from a stream, enforcing the frame size limit.
pub fn read_message(stream: &mut impl Read, max_frame: u64) -> Result<Message> {
    let mut len_buf = [0u8; 4];
    stream.read_exact(&mut len_buf)?;
    let len = u32::from_be_bytes(len_buf) as u64;
    if len == 0 {
        return Err(Error::Wire("zero-length frame".into()));
    }
    if len > max_frame {
        return Err(Error::FrameTooLarge { got: len, limit: max_frame });
    }
    let mut body = vec![0u8; len as usize];
    stream.read_exact(&mut body)?;
    decode_body(body[0], &body[1..])
}

/// Writes one frame to a stream.
pub fn write_message(stream: &mut impl Write, msg: &Message) -> Result<()> {
    let frame = encode_frame(msg)?;
    stream.write_all(&frame)?;
    stream.flush()?;
    Ok(())
}
