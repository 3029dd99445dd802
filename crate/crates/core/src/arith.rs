//! Encrypted integer arithmetic and comparison circuits over [`EncWord`]s.
//!
//! Every operation is a pure transformation built from the gate layer:
//! ripple-carry addition, width-preserving two's complement, sign-mask
//! absolute value, magnitude subtraction, shift-and-add multiplication and
//! an LSB-to-MSB comparator chain. Carries are injected as noiseless
//! constants so the evaluating party never needs the encryption key.
//!
//! Width discipline: addition widens by one (the final carry becomes the
//! MSB), multiplication doubles the width, everything else preserves it.

use crate::error::{Error, Result};
use crate::gates::{BackendHandle, EncBit, SecretKey};

/// Fixed-width, LSB-first vector of encrypted bits.
///
/// The unsigned value is `Σ 2^i · dec(bits[i])`; the signed reading is two's
/// complement.
#[derive(Debug, Clone)]
pub struct EncWord {
    bits: Vec<EncBit>,
}

impl EncWord {
    /// Builds a word from LSB-first bits, all under one key.
    pub fn from_bits(bits: Vec<EncBit>) -> Result<Self> {
        if bits.is_empty() || bits.len() > u16::MAX as usize {
            return Err(Error::BadWidth(bits.len().min(u16::MAX as usize) as u16));
        }
        let key_id = bits[0].key_id();
        if bits.iter().any(|b| b.key_id() != key_id) {
            return Err(Error::KeyMismatch);
        }
        Ok(EncWord { bits })
    }

    pub fn width(&self) -> u16 {
        self.bits.len() as u16
    }

    pub fn bits(&self) -> &[EncBit] {
        &self.bits
    }

    pub fn bit(&self, i: u16) -> &EncBit {
        &self.bits[i as usize]
    }

    pub fn key_id(&self) -> u64 {
        self.bits[0].key_id()
    }

    /// Encrypts `value` into a `width`-bit word.
    pub fn encrypt(sk: &SecretKey, value: u64, width: u16) -> Result<Self> {
        check_width(width)?;
        if width < 64 && value >> width != 0 {
            return Err(Error::BadConfig(format!("{value} does not fit in {width} bits")));
        }
        let bits = (0..width).map(|i| sk.encrypt_bit((value >> i) & 1 == 1)).collect();
        Ok(EncWord { bits })
    }

    pub fn decrypt(&self, sk: &SecretKey) -> Result<u64> {
        check_width(self.width())?;
        let mut value = 0u64;
        for (i, bit) in self.bits.iter().enumerate() {
            value |= (sk.decrypt_bit(bit)? as u64) << i;
        }
        Ok(value)
    }

    /// A noiseless word holding a known constant; how the server encodes
    /// its threshold and challenge tokens.
    pub fn constant(handle: &BackendHandle<'_>, value: u64, width: u16) -> Result<Self> {
        check_width(width)?;
        if width < 64 && value >> width != 0 {
            return Err(Error::BadConfig(format!("{value} does not fit in {width} bits")));
        }
        let bits = (0..width).map(|i| handle.constant((value >> i) & 1 == 1)).collect();
        Ok(EncWord { bits })
    }

    /// Pads with trivial zero bits up to `width`.
    pub fn zero_extend(&self, handle: &BackendHandle<'_>, width: u16) -> Result<Self> {
        if width < self.width() {
            return Err(Error::BadWidth(width));
        }
        let mut bits = self.bits.clone();
        bits.extend((self.width()..width).map(|_| handle.constant(false)));
        Ok(EncWord { bits })
    }

    pub(crate) fn truncate(mut self, width: u16) -> Self {
        debug_assert!(width as usize <= self.bits.len());
        self.bits.truncate(width as usize);
        self
    }

    /// Wire encoding: width `u16` big-endian, then length-prefixed bit
    /// blobs, LSB first.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.width().to_be_bytes());
        for bit in &self.bits {
            let blob = bit.to_blob();
            out.extend_from_slice(&(blob.len() as u32).to_be_bytes());
            out.extend_from_slice(&blob);
        }
        out
    }

    pub fn from_bytes(raw: &[u8]) -> Result<Self> {
        let mut cursor = Reader::new(raw);
        let word = Self::read_from(&mut cursor)?;
        cursor.finish()?;
        Ok(word)
    }

    pub(crate) fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let width = r.u16()?;
        check_width(width)?;
        let mut bits = Vec::with_capacity(width as usize);
        for _ in 0..width {
            let blob = r.bytes()?;
            bits.push(EncBit::from_blob(blob)?);
        }
        EncWord::from_bits(bits)
    }
}

fn check_width(width: u16) -> Result<()> {
    if width == 0 || width > 64 {
        return Err(Error::BadWidth(width));
    }
    Ok(())
}

fn check_same_width(a: &EncWord, b: &EncWord) -> Result<()> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch { left: a.width(), right: b.width() });
    }
    Ok(())
}

/// Full adder over encrypted bits: sum is the 3-way XOR, the carry the
/// XOR-of-ANDs majority.
pub fn one_bit_add(
    handle: &BackendHandle<'_>,
    a: &EncBit,
    b: &EncBit,
    carry_in: &EncBit,
) -> Result<(EncBit, EncBit)> {
    let sum = handle.xor(&handle.xor(a, b)?, carry_in)?;
    let ab = handle.and(a, b)?;
    let ac = handle.and(a, carry_in)?;
    let bc = handle.and(b, carry_in)?;
    let carry = handle.xor(&handle.xor(&ab, &ac)?, &bc)?;
    Ok((sum, carry))
}

fn ripple_add(
    handle: &BackendHandle<'_>,
    a: &EncWord,
    b: &EncWord,
    carry_in: EncBit,
) -> Result<EncWord> {
    check_same_width(a, b)?;
    let mut bits = Vec::with_capacity(a.width() as usize + 1);
    let mut carry = carry_in;
    for i in 0..a.width() {
        let (sum, next) = one_bit_add(handle, a.bit(i), b.bit(i), &carry)?;
        bits.push(sum);
        carry = next;
    }
    bits.push(carry);
    EncWord::from_bits(bits)
}

/// Ripple-carry addition. The output is one bit wider than the inputs; the
/// initial carry is a trivial zero.
pub fn nbit_add(handle: &BackendHandle<'_>, a: &EncWord, b: &EncWord) -> Result<EncWord> {
    ripple_add(handle, a, b, handle.constant(false))
}

/// Width-preserving two's complement: XOR every bit with constant one, add
/// one, drop the carry.
pub fn twos_complement(handle: &BackendHandle<'_>, a: &EncWord) -> Result<EncWord> {
    let one = handle.constant(true);
    let flipped: Result<Vec<EncBit>> = a.bits().iter().map(|b| handle.xor(b, &one)).collect();
    let flipped = EncWord::from_bits(flipped?)?;
    let one_word = EncWord::constant(handle, 1, a.width())?;
    Ok(nbit_add(handle, &flipped, &one_word)?.truncate(a.width()))
}

/// Absolute value of a two's-complement word: broadcast the sign bit into a
/// mask, add it, XOR with it. The minimum word has no representable
/// magnitude and is returned unchanged.
pub fn abs_value(handle: &BackendHandle<'_>, a: &EncWord) -> Result<EncWord> {
    let w = a.width();
    let msb = a.bit(w - 1);
    let mask = EncWord::from_bits(vec![msb.clone(); w as usize])?;
    let sum = nbit_add(handle, a, &mask)?.truncate(w);
    let bits: Result<Vec<EncBit>> =
        (0..w).map(|i| handle.xor(sum.bit(i), mask.bit(i))).collect();
    EncWord::from_bits(bits?)
}

/// Magnitude of the difference `|a - b|`.
///
/// Adds `a` to the two's complement of `b` — the complement's +1 rides in
/// as the initial carry, which keeps the `2^w` term that a width-truncated
/// `twos(0)` would lose. The final carry then selects, branch-free through
/// AND/OR masking, between the raw sum (when it is the true difference)
/// and its two's complement (when it went negative).
pub fn nbit_sub(handle: &BackendHandle<'_>, a: &EncWord, b: &EncWord) -> Result<EncWord> {
    check_same_width(a, b)?;
    let w = a.width();
    let one = handle.constant(true);
    let flipped: Result<Vec<EncBit>> = b.bits().iter().map(|x| handle.xor(x, &one)).collect();
    let full = ripple_add(handle, a, &EncWord::from_bits(flipped?)?, handle.constant(true))?;
    let carry = full.bit(w).clone();
    let tmp = full.truncate(w);
    let not_carry = handle.not(&carry)?;
    let masked_neg: Result<Vec<EncBit>> =
        tmp.bits().iter().map(|t| handle.and(t, &not_carry)).collect();
    let negated = twos_complement(handle, &EncWord::from_bits(masked_neg?)?)?;
    let bits: Result<Vec<EncBit>> = (0..w)
        .map(|i| {
            let kept = handle.and(tmp.bit(i), &carry)?;
            handle.or(negated.bit(i), &kept)
        })
        .collect();
    EncWord::from_bits(bits?)
}

/// Shift-and-add product of two unsigned words, twice the input width.
///
/// Row `i` holds `a_j AND b_i` at position `i + j`; rows are folded into a
/// running sum in index order so transcripts stay reproducible. The final
/// carry of each accumulation is dropped: it cannot fire within `2w` bits.
pub fn nbit_mult(handle: &BackendHandle<'_>, a: &EncWord, b: &EncWord) -> Result<EncWord> {
    check_same_width(a, b)?;
    let w = a.width();
    check_width(2 * w)?;
    let mut acc = EncWord::constant(handle, 0, 2 * w)?;
    for i in 0..w {
        let mut row = Vec::with_capacity(2 * w as usize);
        for pos in 0..2 * w {
            if pos >= i && pos < i + w {
                row.push(handle.and(a.bit(pos - i), b.bit(i))?);
            } else {
                row.push(handle.constant(false));
            }
        }
        acc = nbit_add(handle, &acc, &EncWord::from_bits(row)?)?.truncate(2 * w);
    }
    Ok(acc)
}

/// Comparator cell: pass the carry through when the bits agree, otherwise
/// the answer is `a`.
pub fn one_bit_comp(
    handle: &BackendHandle<'_>,
    a: &EncBit,
    b: &EncBit,
    carry: &EncBit,
) -> Result<EncBit> {
    let eq = handle.xnor(a, b)?;
    handle.mux(&eq, carry, a)
}

/// Strict unsigned `a > b`: chain the comparator cell from LSB to MSB with
/// a trivial-zero initial carry, so ties come out 0.
pub fn nbit_gt(handle: &BackendHandle<'_>, a: &EncWord, b: &EncWord) -> Result<EncBit> {
    check_same_width(a, b)?;
    let mut carry = handle.constant(false);
    for i in 0..a.width() {
        carry = one_bit_comp(handle, a.bit(i), b.bit(i), &carry)?;
    }
    Ok(carry)
}

/// Minimal cursor for the hand-rolled wire encodings.
pub(crate) struct Reader<'a> {
    raw: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(raw: &'a [u8]) -> Self {
        Reader { raw, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.raw.len() {
            return Err(Error::Malformed("truncated encoding".into()));
        }
        let out = &self.raw[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A `u32`-length-prefixed byte run.
    pub(crate) fn bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.pos != self.raw.len() {
            return Err(Error::Malformed("trailing bytes".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
