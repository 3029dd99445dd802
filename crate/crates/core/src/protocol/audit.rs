//! Transcript capture and the honest-but-curious privacy audit.
//!
//! The audit records every frame as it would appear on the wire and scans
//! the server-visible side for cleartext leakage: contiguous component
//! encodings of the template or sample, and windows of the serialized
//! secret key. Patterns are at least eight bytes (two components) so that
//! structural zero bytes in headers cannot produce false hits.

use crate::error::Result;
use crate::matcher::BiometricVector;
use crate::transport::{encode_frame, Message};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ClientToServer,
    ServerToClient,
}

#[derive(Debug, Clone)]
pub struct TranscriptFrame {
    pub direction: Direction,
    pub bytes: Vec<u8>,
}

/// Every frame exchanged during one or more protocol runs.
#[derive(Debug, Default)]
pub struct Transcript {
    pub frames: Vec<TranscriptFrame>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn record_to_server(&mut self, msg: &Message) -> Result<()> {
        self.record(Direction::ClientToServer, msg)
    }

    pub fn record_to_client(&mut self, msg: &Message) -> Result<()> {
        self.record(Direction::ServerToClient, msg)
    }

    fn record(&mut self, direction: Direction, msg: &Message) -> Result<()> {
        self.frames.push(TranscriptFrame { direction, bytes: encode_frame(msg)? });
        Ok(())
    }

    /// Everything the server sees: frames it receives plus frames it sends.
    pub fn server_visible(&self) -> impl Iterator<Item = &[u8]> {
        self.frames.iter().map(|f| f.bytes.as_slice())
    }

    /// True if `needle` occurs in any server-visible frame.
    pub fn leaks(&self, needle: &[u8]) -> bool {
        self.server_visible().any(|frame| find(frame, needle))
    }
}

/// Naive substring search; frames are scanned individually so a pattern
/// can never straddle a frame boundary.
pub fn find(haystack: &[u8], needle: &[u8]) -> bool {
    if needle.is_empty() || haystack.len() < needle.len() {
        return false;
    }
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// Little-endian encodings of every run of `min_components` consecutive
/// components, plus the full component array: the byte patterns a naive
/// plaintext leak would contain.
pub fn component_patterns(v: &BiometricVector, min_components: usize) -> Vec<Vec<u8>> {
    let encoded: Vec<u8> = v.components().iter().flat_map(|c| c.to_le_bytes()).collect();
    let window = min_components * 4;
    let mut patterns: Vec<Vec<u8>> = encoded
        .chunks(4)
        .collect::<Vec<_>>()
        .windows(min_components)
        .map(|chunk| chunk.concat())
        .collect();
    if encoded.len() > window {
        patterns.push(encoded);
    }
    patterns
}

/// Evenly spaced windows of a serialized secret key, long enough that a
/// chance collision is out of the question.
pub fn key_patterns(secret_blob: &[u8], window: usize, count: usize) -> Vec<Vec<u8>> {
    if secret_blob.len() <= window {
        return vec![secret_blob.to_vec()];
    }
    let step = (secret_blob.len() - window) / count.max(1);
    (0..count)
        .map(|i| {
            let start = (i * step.max(1)).min(secret_blob.len() - window);
            secret_blob[start..start + window].to_vec()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_locates_substrings() {
        assert!(find(b"abcdef", b"cde"));
        assert!(!find(b"abcdef", b"xyz"));
        assert!(!find(b"ab", b"abc"));
        assert!(!find(b"abc", b""));
    }

    #[test]
    fn component_patterns_cover_consecutive_runs() {
        let v = BiometricVector::new(vec![1, 2, 3, 4], 256).unwrap();
        let pats = component_patterns(&v, 2);
        // three 2-component windows plus the full array
        assert_eq!(pats.len(), 4);
        assert_eq!(pats[0], vec![1, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(pats[3].len(), 16);
    }

    #[test]
    fn key_patterns_are_in_bounds() {
        let blob: Vec<u8> = (0..200u8).collect();
        for p in key_patterns(&blob, 16, 8) {
            assert_eq!(p.len(), 16);
            assert!(find(&blob, &p));
        }
    }
}
