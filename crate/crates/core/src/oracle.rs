//! Cleartext reference implementations of every circuit, metric and token
//! construction.
//!
//! Two independent paths are kept on purpose: the `plain_*` functions mirror
//! the circuit structure bit for bit (ripple carries, shift-and-add
//! products, masked complement selection), while [`native`] computes the
//! same quantities with machine arithmetic. A disagreement between the two
//! localizes a bug to circuit translation; a disagreement between `plain_*`
//! and the encrypted ops localizes it to gate evaluation.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// An unsigned integer pinned to an explicit bit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClearWord {
    value: u64,
    width: u16,
}

impl ClearWord {
    pub fn new(value: u64, width: u16) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::BadWidth(width));
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::BadConfig(format!("{value} does not fit in {width} bits")));
        }
        Ok(ClearWord { value, width })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn bit(&self, i: u16) -> bool {
        debug_assert!(i < self.width);
        (self.value >> i) & 1 == 1
    }

    fn from_bits(bits: &[bool]) -> Self {
        debug_assert!(!bits.is_empty() && bits.len() <= 64);
        let mut value = 0u64;
        for (i, b) in bits.iter().enumerate() {
            value |= (*b as u64) << i;
        }
        ClearWord { value, width: bits.len() as u16 }
    }

    /// Two's-complement reading of the stored bits.
    pub fn to_signed(&self) -> i64 {
        if self.bit(self.width - 1) {
            self.value as i64 - (1i64 << self.width)
        } else {
            self.value as i64
        }
    }
}

/// Full adder: `(sum, carry_out)` with the carry as the 3-input majority.
pub fn plain_one_bit_add(a: bool, b: bool, carry_in: bool) -> (bool, bool) {
    let sum = a ^ b ^ carry_in;
    let carry = (a && b) ^ (a && carry_in) ^ (b && carry_in);
    (sum, carry)
}

/// Ripple-carry addition; the result is one bit wider than the inputs, the
/// final carry becoming the MSB.
pub fn plain_add(a: ClearWord, b: ClearWord) -> ClearWord {
    assert_eq!(a.width, b.width, "oracle add: width mismatch");
    let mut bits = Vec::with_capacity(a.width as usize + 1);
    let mut carry = false;
    for i in 0..a.width {
        let (s, c) = plain_one_bit_add(a.bit(i), b.bit(i), carry);
        bits.push(s);
        carry = c;
    }
    bits.push(carry);
    ClearWord::from_bits(&bits)
}

/// Width-preserving two's complement: flip every bit, add one, truncate.
pub fn plain_twos(a: ClearWord) -> ClearWord {
    let flipped: Vec<bool> = (0..a.width).map(|i| !a.bit(i)).collect();
    let one = ClearWord::new(1, a.width).unwrap();
    let sum = plain_add(ClearWord::from_bits(&flipped), one);
    truncate(sum, a.width)
}

/// Absolute value of a two's-complement word via the sign-mask identity
/// `(a + mask) ^ mask`. The minimum word (e.g. 1000 at width 4) has no
/// positive counterpart and comes back unchanged.
pub fn plain_abs(a: ClearWord) -> ClearWord {
    let msb = a.bit(a.width - 1);
    let mask = ClearWord::from_bits(&vec![msb; a.width as usize]);
    let sum = truncate(plain_add(a, mask), a.width);
    let bits: Vec<bool> = (0..a.width).map(|i| sum.bit(i) ^ mask.bit(i)).collect();
    ClearWord::from_bits(&bits)
}

/// Magnitude of the difference: add the complement with the +1 as the
/// initial carry, then select between the raw sum and its two's complement
/// with the final carry as the mask. Routing the +1 through the carry
/// keeps the `2^w` term that a width-truncated `twos(0)` drops.
pub fn plain_sub(a: ClearWord, b: ClearWord) -> ClearWord {
    assert_eq!(a.width, b.width, "oracle sub: width mismatch");
    let w = a.width;
    let mut bits = Vec::with_capacity(w as usize + 1);
    let mut carry = true;
    for i in 0..w {
        let (s, c) = plain_one_bit_add(a.bit(i), !b.bit(i), carry);
        bits.push(s);
        carry = c;
    }
    bits.push(carry);
    let full = ClearWord::from_bits(&bits);
    let borrow_free = full.bit(w); // final carry: 1 when a >= b
    let tmp = truncate(full, w);
    let var = ClearWord::from_bits(&vec![borrow_free; w as usize]);
    let masked_neg: Vec<bool> = (0..w).map(|i| tmp.bit(i) && !var.bit(i)).collect();
    let negated = plain_twos(ClearWord::from_bits(&masked_neg));
    let bits: Vec<bool> =
        (0..w).map(|i| negated.bit(i) || (tmp.bit(i) && var.bit(i))).collect();
    ClearWord::from_bits(&bits)
}

/// Shift-and-add product, twice the input width.
pub fn plain_mult(a: ClearWord, b: ClearWord) -> ClearWord {
    assert_eq!(a.width, b.width, "oracle mult: width mismatch");
    let w = a.width;
    assert!(2 * w <= 64, "product width exceeds 64 bits");
    let mut acc = ClearWord::new(0, 2 * w).unwrap();
    for i in 0..w {
        let mut row = vec![false; 2 * w as usize];
        for j in 0..w {
            row[(i + j) as usize] = a.bit(j) && b.bit(i);
        }
        acc = truncate(plain_add(acc, ClearWord::from_bits(&row)), 2 * w);
    }
    acc
}

/// Bit comparator cell: propagate the carry on equal bits, else take `a`.
pub fn plain_one_bit_comp(a: bool, b: bool, carry: bool) -> bool {
    if a == b {
        carry
    } else {
        a
    }
}

/// Strict unsigned greater-than via an LSB-to-MSB comparator chain.
pub fn plain_gt(a: ClearWord, b: ClearWord) -> bool {
    assert_eq!(a.width, b.width, "oracle gt: width mismatch");
    let mut carry = false;
    for i in 0..a.width {
        carry = plain_one_bit_comp(a.bit(i), b.bit(i), carry);
    }
    carry
}

fn truncate(a: ClearWord, width: u16) -> ClearWord {
    debug_assert!(width <= a.width);
    let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    ClearWord { value: a.value & mask, width }
}

/// Squared Euclidean distance assembled from the circuit-structured pieces.
pub fn plain_euclid2(x: &[u32], y: &[u32], w: u16, acc_width: u16) -> u64 {
    assert_eq!(x.len(), y.len());
    let mut acc = ClearWord::new(0, acc_width).unwrap();
    for (&xi, &yi) in x.iter().zip(y) {
        let a = ClearWord::new(xi as u64, w).unwrap();
        let b = ClearWord::new(yi as u64, w).unwrap();
        let d = plain_sub(b, a);
        let sq = plain_mult(d, d);
        let ext = ClearWord::new(sq.value, acc_width).unwrap();
        acc = truncate(plain_add(acc, ext), acc_width);
    }
    acc.value
}

/// Manhattan distance from the same pieces.
pub fn plain_manhattan(x: &[u32], y: &[u32], w: u16, acc_width: u16) -> u64 {
    assert_eq!(x.len(), y.len());
    let mut acc = ClearWord::new(0, acc_width).unwrap();
    for (&xi, &yi) in x.iter().zip(y) {
        let a = ClearWord::new(xi as u64, w).unwrap();
        let b = ClearWord::new(yi as u64, w).unwrap();
        let d = plain_sub(b, a);
        let ext = ClearWord::new(d.value, acc_width).unwrap();
        acc = truncate(plain_add(acc, ext), acc_width);
    }
    acc.value
}

/// The match predicate: 1 iff the squared distance is at most the
/// threshold (inclusive boundary).
pub fn plain_f(x: &[u32], y: &[u32], w: u16, acc_width: u16, threshold: u64) -> bool {
    let d2 = plain_euclid2(x, y, w, acc_width);
    let d2w = ClearWord::new(d2, acc_width).unwrap();
    let bw = ClearWord::new(threshold, acc_width).unwrap();
    !plain_gt(d2w, bw)
}

/// Token selection in its literal arithmetic form `(1 - b)·r0 + b·r1`,
/// evaluated over the tokens read as big-endian integers.
pub fn plain_g(b: bool, r0: &[u8], r1: &[u8]) -> Vec<u8> {
    assert_eq!(r0.len(), r1.len());
    let bi = BigUint::from(b as u8);
    let one = BigUint::from(1u8);
    let v0 = BigUint::from_bytes_be(r0);
    let v1 = BigUint::from_bytes_be(r1);
    let out = (&one - &bi) * v0 + bi * v1;
    let mut bytes = out.to_bytes_be();
    while bytes.len() < r0.len() {
        bytes.insert(0, 0);
    }
    bytes
}

/// Plaintext verdict of one full authentication: distance, threshold test,
/// token selection, token comparison.
pub fn plain_protocol_run(
    template: &[u32],
    sample: &[u32],
    w: u16,
    acc_width: u16,
    threshold: u64,
    r0: &[u8],
    r1: &[u8],
) -> bool {
    let b = plain_f(sample, template, w, acc_width, threshold);
    let y = plain_g(b, r0, r1);
    assert!(y == r0 || y == r1, "honest run must yield one of the tokens");
    y == r1
}

/// Machine-arithmetic twins of the circuit-structured functions above.
pub mod native {
    /// `a + b` at full precision (the circuit keeps the carry, so no
    /// truncation).
    pub fn add(a: u64, b: u64) -> u64 {
        a + b
    }

    /// Width-preserving two's complement.
    pub fn twos(a: u64, width: u16) -> u64 {
        a.wrapping_neg() & mask(width)
    }

    /// Absolute value of the two's-complement reading.
    pub fn abs(a: u64, width: u16) -> u64 {
        let signed = if (a >> (width - 1)) & 1 == 1 {
            a as i64 - (1i64 << width)
        } else {
            a as i64
        };
        (signed.unsigned_abs()) & mask(width)
    }

    pub fn sub_magnitude(a: u64, b: u64) -> u64 {
        a.abs_diff(b)
    }

    pub fn mult(a: u64, b: u64) -> u64 {
        a * b
    }

    pub fn gt(a: u64, b: u64) -> bool {
        a > b
    }

    pub fn euclid2(x: &[u32], y: &[u32]) -> u64 {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| {
                let d = (b as i64 - a as i64).unsigned_abs();
                d * d
            })
            .sum()
    }

    pub fn manhattan(x: &[u32], y: &[u32]) -> u64 {
        x.iter().zip(y).map(|(&a, &b)| (b as i64 - a as i64).unsigned_abs()).sum()
    }

    fn mask(width: u16) -> u64 {
        if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_examples() {
        let w = |v: u64| ClearWord::new(v, 4).unwrap();
        // 0011 + 0101 = 01000; 1111 + 0001 wraps into the carry bit
        assert_eq!(plain_add(w(3), w(5)).value(), 8);
        assert_eq!(plain_add(w(15), w(1)).value(), 16);
        assert_eq!(plain_twos(w(0)).value(), 0);
        assert_eq!(plain_twos(w(1)).value(), 0b1111);
        assert_eq!(plain_abs(w(0b0101)).value(), 5);
        assert_eq!(plain_abs(w(0b1011)).value(), 5); // -5 at width 4
        assert_eq!(plain_sub(w(7), w(3)).value(), 4);
        assert_eq!(plain_sub(w(3), w(7)).value(), 4);
        assert_eq!(plain_sub(w(5), w(5)).value(), 0);
        assert_eq!(plain_mult(w(3), w(5)).value(), 15);
        assert!(plain_gt(w(5), w(3)));
        assert!(!plain_gt(w(5), w(5)));
    }

    #[test]
    fn comparator_cell_truth_table() {
        for a in [false, true] {
            for b in [false, true] {
                for c in [false, true] {
                    let expect = if a == b { c } else { a };
                    assert_eq!(plain_one_bit_comp(a, b, c), expect);
                }
            }
        }
    }

    /// The two oracle paths agree exhaustively at width 4 (the minimum word
    /// is excluded from the absolute-value sweep: it has no representable
    /// magnitude and the circuit returns it unchanged).
    #[test]
    fn circuit_path_matches_native_path_w4() {
        for a in 0u64..16 {
            let wa = ClearWord::new(a, 4).unwrap();
            assert_eq!(plain_twos(wa).value(), native::twos(a, 4), "twos({a})");
            if a != 0b1000 {
                assert_eq!(plain_abs(wa).value(), native::abs(a, 4), "abs({a})");
            } else {
                assert_eq!(plain_abs(wa).value(), 0b1000);
            }
            for b in 0u64..16 {
                let wb = ClearWord::new(b, 4).unwrap();
                assert_eq!(plain_add(wa, wb).value(), native::add(a, b), "add({a},{b})");
                assert_eq!(plain_sub(wa, wb).value(), native::sub_magnitude(a, b));
                assert_eq!(plain_mult(wa, wb).value(), native::mult(a, b));
                assert_eq!(plain_gt(wa, wb), native::gt(a, b));
            }
        }
    }

    #[test]
    fn g_arithmetic_form_equals_selection() {
        use rand::RngCore;
        let mut rng = rand::thread_rng();
        for _ in 0..1000 {
            let mut r0 = vec![0u8; 16];
            let mut r1 = vec![0u8; 16];
            rng.fill_bytes(&mut r0);
            rng.fill_bytes(&mut r1);
            assert_eq!(plain_g(false, &r0, &r1), r0);
            assert_eq!(plain_g(true, &r0, &r1), r1);
        }
    }

    #[test]
    fn f_boundary_is_inclusive() {
        let x = vec![10, 20, 30, 40];
        let y = vec![12, 20, 30, 40]; // squared distance 4
        assert!(plain_f(&x, &y, 8, 18, 4));
        assert!(!plain_f(&x, &y, 8, 18, 3));
        assert_eq!(plain_sub(ClearWord::new(3, 4).unwrap(), ClearWord::new(7, 4).unwrap()).value(), 4);
    }

    #[test]
    fn protocol_run_selects_tokens() {
        let r0 = vec![1u8; 16];
        let r1 = vec![2u8; 16];
        let t = vec![5, 5, 5, 5];
        assert!(plain_protocol_run(&t, &t, 8, 18, 0, &r0, &r1));
        let far = vec![200, 200, 200, 200];
        assert!(!plain_protocol_run(&t, &far, 8, 18, 10, &r0, &r1));
    }
}
