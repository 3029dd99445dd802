//! Client side: enrollment and the per-authentication message flow.

use crate::error::{Error, Result};
use crate::gates::KeyTriple;
use crate::matcher::{encrypt_vector, BiometricVector};
use crate::transport::Message;

/// A client's long-lived identity: its name and key triple. The secret key
/// never leaves this struct; only the cloud key is ever serialized into a
/// message.
pub struct ClientIdentity {
    pub client_id: String,
    pub keys: KeyTriple,
}

impl ClientIdentity {
    pub fn new(client_id: impl Into<String>, keys: KeyTriple) -> Self {
        ClientIdentity { client_id: client_id.into(), keys }
    }

    /// Enrollment message: client id, the evaluation key and the encrypted
    /// template. The cleartext template is dropped by the caller once this
    /// returns.
    pub fn register_message(&self, template: &BiometricVector, w: u16) -> Result<Message> {
        let encrypted = encrypt_vector(&self.keys.secret, template, w)?;
        Ok(Message::Register {
            client_id: self.client_id.clone(),
            backend: self.keys.params.backend,
            cloud_key: self.keys.cloud.clone(),
            template: encrypted,
        })
    }

    /// Step 1: a fresh encrypted sample.
    pub fn auth_init_message(&self, sample: &BiometricVector, w: u16) -> Result<Message> {
        let encrypted = encrypt_vector(&self.keys.secret, sample, w)?;
        Ok(Message::AuthInit { client_id: self.client_id.clone(), sample: encrypted })
    }

    /// Step 3: decrypts the challenge ciphertext and reveals the token. A
    /// decryption failure aborts; no response is produced.
    pub fn response_for(&self, challenge: &Message) -> Result<Message> {
        let Message::Challenge { session_id, token_ct } = challenge else {
            return Err(Error::Wire(format!(
                "expected CHALLENGE, got {}",
                challenge.kind_str()
            )));
        };
        let token = token_ct.decrypt(&self.keys.secret)?;
        Ok(Message::Response { session_id: *session_id, token })
    }
}

impl std::fmt::Debug for ClientIdentity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClientIdentity")
            .field("client_id", &self.client_id)
            .field("backend", &self.keys.params.backend.as_str())
            .finish()
    }
}
