//! Encrypted biometric distance computation and the match predicate.
//!
//! Vectors are `n` components in `Z_m`, each encrypted as a `w`-bit word.
//! The squared Euclidean distance accumulates `(y_i - x_i)^2` into a word
//! wide enough that the sum cannot wrap; the match predicate compares it,
//! boundary inclusive, against a threshold the server injects as noiseless
//! constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{nbit_add, nbit_gt, nbit_mult, nbit_sub, EncWord, Reader};
use crate::error::{Error, Result};
use crate::gates::{BackendHandle, EncBit, SecretKey};

/// Cleartext feature vector: `n` components, each in `[0, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiometricVector {
    components: Vec<u32>,
    modulus: u32,
}

impl BiometricVector {
    pub fn new(components: Vec<u32>, modulus: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::BadConfig(format!("modulus {modulus} is too small")));
        }
        if let Some(&bad) = components.iter().find(|&&c| c >= modulus) {
            return Err(Error::ComponentRange { value: bad, modulus });
        }
        Ok(BiometricVector { components, modulus })
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Componentwise encryption of a [`BiometricVector`].
#[derive(Debug, Clone)]
pub struct EncVector {
    words: Vec<EncWord>,
    width: u16,
}

impl EncVector {
    pub fn from_words(words: Vec<EncWord>) -> Result<Self> {
        let first = words.first().ok_or(Error::BadConfig("empty vector".into()))?;
        let width = first.width();
        let key_id = first.key_id();
        if words.iter().any(|w| w.width() != width) {
            return Err(Error::WidthMismatch { left: width, right: 0 });
        }
        if words.iter().any(|w| w.key_id() != key_id) {
            return Err(Error::KeyMismatch);
        }
        Ok(EncVector { words, width })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn words(&self) -> &[EncWord] {
        &self.words
    }

    pub fn key_id(&self) -> u64 {
        self.words[0].key_id()
    }

    /// Wire encoding: `n` u16, width u8, then length-prefixed word
    /// encodings.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.words.len() as u16).to_be_bytes());
        out.push(self.width as u8);
        for word in &self.words {
            let bytes = word.to_bytes();
            out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn from_bytes(raw: &[u8]) -> Result<Self> {
        let mut r = Reader::new(raw);
        let vec = Self::read_from(&mut r)?;
        r.finish()?;
        Ok(vec)
    }

    pub(crate) fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let n = r.u16()?;
        let width = r.u8()? as u16;
        if n == 0 {
            return Err(Error::Malformed("empty vector".into()));
        }
        let mut words = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let bytes = r.bytes()?;
            let word = EncWord::from_bytes(bytes)?;
            if word.width() != width {
                return Err(Error::Malformed("word width disagrees with header".into()));
            }
            words.push(word);
        }
        EncVector::from_words(words)
    }
}

/// Matching parameters: vector length `n`, component width `w`, component
/// modulus `m <= 2^w`, and the clear threshold the server holds.
///
/// The accumulator width is `2w + ceil(log2 n)`, so the distance sum cannot
/// overflow for any pair of in-range vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub n: usize,
    pub w: u16,
    pub modulus: u32,
    pub threshold: u64,
    /// Evaluate per-component terms on the rayon pool. Accumulation order
    /// stays fixed either way.
    pub parallel: bool,
}

pub const DEFAULT_VECTOR_LEN: usize = 128;
pub const DEFAULT_COMPONENT_WIDTH: u16 = 8;

impl MatchConfig {
    pub fn new(n: usize, w: u16, threshold: u64) -> Result<Self> {
        if w == 0 || w > 16 {
            return Err(Error::BadWidth(w));
        }
        let modulus = 1u32 << w;
        let cfg = MatchConfig { n, w, modulus, threshold, parallel: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > u16::MAX as usize {
            return Err(Error::BadConfig(format!("vector length {} out of range", self.n)));
        }
        if self.w == 0 || self.w > 16 {
            return Err(Error::BadWidth(self.w));
        }
        if self.modulus < 2 || (self.modulus as u64) > (1u64 << self.w) {
            return Err(Error::BadConfig(format!(
                "modulus {} does not fit in {} bits",
                self.modulus, self.w
            )));
        }
        let acc = self.acc_width();
        if acc > 64 {
            return Err(Error::BadConfig("accumulator width exceeds 64 bits".into()));
        }
        if acc < 64 && self.threshold >> acc != 0 {
            return Err(Error::BadConfig(format!(
                "threshold {} does not fit in the {}-bit accumulator",
                self.threshold, acc
            )));
        }
        Ok(())
    }

    /// Width of the squared-distance accumulator: `2w + ceil(log2 n)`.
    pub fn acc_width(&self) -> u16 {
        2 * self.w + ceil_log2(self.n)
    }

    /// Width of the Manhattan accumulator: `w + ceil(log2 n)`.
    pub fn manhattan_width(&self) -> u16 {
        self.w + ceil_log2(self.n)
    }
}

fn ceil_log2(n: usize) -> u16 {
    debug_assert!(n > 0);
    (usize::BITS - (n - 1).leading_zeros()) as u16
}

/// Encrypts every component into a `width`-bit word.
pub fn encrypt_vector(sk: &SecretKey, v: &BiometricVector, width: u16) -> Result<EncVector> {
    if (v.modulus() as u64) > (1u64 << width) {
        return Err(Error::BadConfig(format!(
            "modulus {} does not fit in {width} bits",
            v.modulus()
        )));
    }
    let words: Result<Vec<EncWord>> =
        v.components().iter().map(|&c| EncWord::encrypt(sk, c as u64, width)).collect();
    EncVector::from_words(words?)
}

pub fn decrypt_vector(sk: &SecretKey, v: &EncVector, modulus: u32) -> Result<BiometricVector> {
    let components: Result<Vec<u32>> =
        v.words().iter().map(|w| w.decrypt(sk).map(|x| x as u32)).collect();
    BiometricVector::new(components?, modulus)
}

fn check_pair(x: &EncVector, y: &EncVector, cfg: &MatchConfig) -> Result<()> {
    if x.len() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, got: x.len() });
    }
    if y.len() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, got: y.len() });
    }
    if x.width() != cfg.w || y.width() != cfg.w {
        return Err(Error::WidthMismatch { left: x.width(), right: y.width() });
    }
    if x.key_id() != y.key_id() {
        return Err(Error::KeyMismatch);
    }
    Ok(())
}

/// One distance term, zero-extended to the accumulator width.
fn term(
    handle: &BackendHandle<'_>,
    x: &EncWord,
    y: &EncWord,
    acc_width: u16,
    squared: bool,
) -> Result<EncWord> {
    let d = nbit_sub(handle, y, x)?;
    let t = if squared { nbit_mult(handle, &d, &d)? } else { d };
    t.zero_extend(handle, acc_width)
}

fn accumulate(
    handle: &BackendHandle<'_>,
    x: &EncVector,
    y: &EncVector,
    cfg: &MatchConfig,
    acc_width: u16,
    squared: bool,
) -> Result<EncWord> {
    check_pair(x, y, cfg)?;
    let terms: Result<Vec<EncWord>> = if cfg.parallel {
        x.words()
            .par_iter()
            .zip(y.words().par_iter())
            .map(|(xi, yi)| term(handle, xi, yi, acc_width, squared))
            .collect()
    } else {
        x.words()
            .iter()
            .zip(y.words())
            .map(|(xi, yi)| term(handle, xi, yi, acc_width, squared))
            .collect()
    };
    // Left fold in component order; the final carry is dropped at the
    // accumulator width, where it can never fire.
    let mut acc = EncWord::constant(handle, 0, acc_width)?;
    for t in terms? {
        acc = nbit_add(handle, &acc, &t)?.truncate(acc_width);
    }
    Ok(acc)
}

/// Squared Euclidean distance `Σ (y_i - x_i)^2` as an accumulator-width
/// word.
pub fn squared_euclidean(
    handle: &BackendHandle<'_>,
    x: &EncVector,
    y: &EncVector,
    cfg: &MatchConfig,
) -> Result<EncWord> {
    accumulate(handle, x, y, cfg, cfg.acc_width(), true)
}

/// Manhattan distance `Σ |y_i - x_i|`; the subtraction circuit already
/// returns magnitudes, so no separate absolute value is needed.
pub fn manhattan(
    handle: &BackendHandle<'_>,
    x: &EncVector,
    y: &EncVector,
    cfg: &MatchConfig,
) -> Result<EncWord> {
    accumulate(handle, x, y, cfg, cfg.manhattan_width(), false)
}

/// The match predicate: an encrypted 1 iff the squared distance is at most
/// the threshold. Computed as NOT(distance > threshold) with the threshold
/// injected as noiseless constants.
pub fn match_f(
    handle: &BackendHandle<'_>,
    sample: &EncVector,
    template: &EncVector,
    cfg: &MatchConfig,
) -> Result<EncBit> {
    let d2 = squared_euclidean(handle, sample, template, cfg)?;
    let bound = EncWord::constant(handle, cfg.threshold, cfg.acc_width())?;
    let above = nbit_gt(handle, &d2, &bound)?;
    handle.not(&above)
}

#[cfg(test)]
mod tests;
