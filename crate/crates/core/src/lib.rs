//! Biometric authentication over gate-bootstrapped homomorphic encryption.
//!
//! A client encrypts biometric feature vectors bit by bit; the server
//! matches a fresh sample against the enrolled template entirely in the
//! ciphertext domain (squared Euclidean distance against a threshold) and
//! authenticates the client through a challenge token it can only recover
//! by decryption. The crate is layered bottom-up:
//!
//! - [`gates`]: encrypted bits, key management and boolean gate evaluation,
//!   with a real FHE backend and a cleartext mock behind one interface;
//! - [`arith`]: ripple-carry adders, two's complement, absolute value,
//!   magnitude subtraction, schoolbook multiplication and comparison over
//!   encrypted words;
//! - [`matcher`]: encrypted distance metrics and the threshold predicate;
//! - [`protocol`]: the registration and challenge-response state machines;
//! - [`transport`]: length-prefixed binary framing, key/record stores and
//!   the TCP server;
//! - [`oracle`]: cleartext reference implementations every encrypted path
//!   is tested against;
//! - [`bench`]: the timing harness for the operation and protocol tables.

pub mod arith;
pub mod bench;
pub mod error;
pub mod gates;
pub mod matcher;
pub mod oracle;
pub mod protocol;
pub mod transport;
pub mod vectors;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use gates::{keygen, BackendKind, CloudKey, EncBit, KeyTriple, ParamSet, SecretKey};
