use super::*;
use crate::gates::KeyTriple;
use crate::oracle;
use crate::testutil::{clear_keys, fhe_keys};
use proptest::prelude::*;
use rand::Rng;

fn word(k: &KeyTriple, value: u64, width: u16) -> EncWord {
    EncWord::encrypt(&k.secret, value, width).unwrap()
}

fn dec(k: &KeyTriple, w: &EncWord) -> u64 {
    w.decrypt(&k.secret).unwrap()
}

#[test]
fn one_bit_add_frozen_cases() {
    let k = clear_keys();
    let h = k.cloud.handle();
    for (a, b, c, sum, carry) in [
        (false, false, false, false, false),
        (true, true, false, false, true),
        (true, true, true, true, true),
        (true, false, false, true, false),
    ] {
        let (s, co) = one_bit_add(
            &h,
            &k.secret.encrypt_bit(a),
            &k.secret.encrypt_bit(b),
            &k.secret.encrypt_bit(c),
        )
        .unwrap();
        assert_eq!(k.secret.decrypt_bit(&s).unwrap(), sum, "sum({a},{b},{c})");
        assert_eq!(k.secret.decrypt_bit(&co).unwrap(), carry, "carry({a},{b},{c})");
    }
}

#[test]
fn nbit_add_frozen_cases() {
    let k = clear_keys();
    let h = k.cloud.handle();
    let sum = nbit_add(&h, &word(k, 0b0011, 4), &word(k, 0b0101, 4)).unwrap();
    assert_eq!(sum.width(), 5);
    assert_eq!(dec(k, &sum), 8);
    let wrap = nbit_add(&h, &word(k, 0b1111, 4), &word(k, 0b0001, 4)).unwrap();
    assert_eq!(dec(k, &wrap), 0b10000);
}

/// Exhaustive width-4 sweep of every circuit against the oracle.
#[test]
fn exhaustive_w4_matches_oracle() {
    let k = clear_keys();
    let h = k.cloud.handle();
    for a in 0u64..16 {
        let wa = word(k, a, 4);
        let oa = oracle::ClearWord::new(a, 4).unwrap();
        assert_eq!(dec(k, &twos_complement(&h, &wa).unwrap()), oracle::plain_twos(oa).value());
        let abs = abs_value(&h, &wa).unwrap();
        assert_eq!(abs.width(), 4);
        assert_eq!(dec(k, &abs), oracle::plain_abs(oa).value(), "abs({a})");
        for b in 0u64..16 {
            let wb = word(k, b, 4);
            let ob = oracle::ClearWord::new(b, 4).unwrap();
            let sum = nbit_add(&h, &wa, &wb).unwrap();
            assert_eq!(sum.width(), 5);
            assert_eq!(dec(k, &sum), oracle::plain_add(oa, ob).value());
            let diff = nbit_sub(&h, &wa, &wb).unwrap();
            assert_eq!(diff.width(), 4);
            assert_eq!(dec(k, &diff), oracle::plain_sub(oa, ob).value(), "sub({a},{b})");
            let prod = nbit_mult(&h, &wa, &wb).unwrap();
            assert_eq!(prod.width(), 8);
            assert_eq!(dec(k, &prod), oracle::plain_mult(oa, ob).value(), "mult({a},{b})");
            let gt = nbit_gt(&h, &wa, &wb).unwrap();
            assert_eq!(k.secret.decrypt_bit(&gt).unwrap(), oracle::plain_gt(oa, ob));
        }
    }
}

#[test]
fn twos_complement_is_an_involution_w4() {
    let k = clear_keys();
    let h = k.cloud.handle();
    for a in 0u64..16 {
        let wa = word(k, a, 4);
        let back = twos_complement(&h, &twos_complement(&h, &wa).unwrap()).unwrap();
        assert_eq!(dec(k, &back), a);
    }
}

#[test]
fn abs_value_minimum_word_is_fixed_point() {
    // 1000 at width 4 has no positive counterpart; the circuit hands it back.
    let k = clear_keys();
    let h = k.cloud.handle();
    assert_eq!(dec(k, &abs_value(&h, &word(k, 0b1000, 4)).unwrap()), 0b1000);
}

#[test]
fn comparator_cell_exhaustive() {
    let k = clear_keys();
    let h = k.cloud.handle();
    for a in [false, true] {
        for b in [false, true] {
            for c in [false, true] {
                let res = one_bit_comp(
                    &h,
                    &k.secret.encrypt_bit(a),
                    &k.secret.encrypt_bit(b),
                    &k.secret.encrypt_bit(c),
                )
                .unwrap();
                assert_eq!(
                    k.secret.decrypt_bit(&res).unwrap(),
                    oracle::plain_one_bit_comp(a, b, c),
                    "comp({a},{b},{c})"
                );
            }
        }
    }
}

#[test]
fn randomized_w8_w16_match_oracle() {
    let k = clear_keys();
    let h = k.cloud.handle();
    let mut rng = rand::thread_rng();
    for w in [8u16, 16] {
        for _ in 0..200 {
            let a: u64 = rng.gen_range(0..1u64 << w);
            let b: u64 = rng.gen_range(0..1u64 << w);
            let (wa, wb) = (word(k, a, w), word(k, b, w));
            let (oa, ob) = (
                oracle::ClearWord::new(a, w).unwrap(),
                oracle::ClearWord::new(b, w).unwrap(),
            );
            assert_eq!(dec(k, &nbit_add(&h, &wa, &wb).unwrap()), oracle::plain_add(oa, ob).value());
            assert_eq!(dec(k, &nbit_sub(&h, &wa, &wb).unwrap()), oracle::plain_sub(oa, ob).value());
            assert_eq!(
                dec(k, &nbit_mult(&h, &wa, &wb).unwrap()),
                oracle::plain_mult(oa, ob).value()
            );
            assert_eq!(
                k.secret.decrypt_bit(&nbit_gt(&h, &wa, &wb).unwrap()).unwrap(),
                oracle::plain_gt(oa, ob)
            );
            assert_eq!(
                dec(k, &twos_complement(&h, &wa).unwrap()),
                oracle::plain_twos(oa).value()
            );
        }
    }
}

#[test]
fn algebraic_spot_properties() {
    let k = clear_keys();
    let h = k.cloud.handle();
    let mut rng = rand::thread_rng();
    for _ in 0..100 {
        let a: u64 = rng.gen_range(0..256);
        let b: u64 = rng.gen_range(0..256);
        let (wa, wb) = (word(k, a, 8), word(k, b, 8));
        assert_eq!(dec(k, &nbit_add(&h, &wa, &wb).unwrap()), dec(k, &nbit_add(&h, &wb, &wa).unwrap()));
        assert_eq!(dec(k, &nbit_mult(&h, &wa, &wb).unwrap()), dec(k, &nbit_mult(&h, &wb, &wa).unwrap()));
        assert_eq!(dec(k, &nbit_sub(&h, &wa, &wb).unwrap()), dec(k, &nbit_sub(&h, &wb, &wa).unwrap()));
        let gt_ab = k.secret.decrypt_bit(&nbit_gt(&h, &wa, &wb).unwrap()).unwrap();
        let gt_ba = k.secret.decrypt_bit(&nbit_gt(&h, &wb, &wa).unwrap()).unwrap();
        assert!(!(gt_ab && gt_ba));
    }
}

#[test]
fn width_mismatch_is_rejected() {
    let k = clear_keys();
    let h = k.cloud.handle();
    let a = word(k, 3, 4);
    let b = word(k, 3, 5);
    assert!(matches!(nbit_add(&h, &a, &b), Err(Error::WidthMismatch { .. })));
    assert!(matches!(nbit_sub(&h, &a, &b), Err(Error::WidthMismatch { .. })));
    assert!(matches!(nbit_mult(&h, &a, &b), Err(Error::WidthMismatch { .. })));
    assert!(matches!(nbit_gt(&h, &a, &b), Err(Error::WidthMismatch { .. })));
}

#[test]
fn constant_zero_carry_keeps_addition_correct() {
    // The initial carry is a trivial constant; additions stay exact.
    let k = clear_keys();
    let h = k.cloud.handle();
    for (a, b) in [(0u64, 0u64), (9, 6), (15, 15), (1, 14)] {
        let sum = nbit_add(&h, &word(k, a, 4), &word(k, b, 4)).unwrap();
        assert_eq!(dec(k, &sum), a + b);
    }
}

/// A small FHE probe of each circuit; the broad randomized sweeps live in
/// the acceptance suite.
#[test]
fn fhe_smoke_w4() {
    let k = fhe_keys();
    let h = k.cloud.handle();
    let cases = [(11u64, 5u64), (3, 12)];
    for (a, b) in cases {
        let (wa, wb) = (word(k, a, 4), word(k, b, 4));
        assert_eq!(dec(k, &nbit_add(&h, &wa, &wb).unwrap()), a + b);
        assert_eq!(dec(k, &nbit_sub(&h, &wa, &wb).unwrap()), a.abs_diff(b));
        assert_eq!(dec(k, &nbit_mult(&h, &wa, &wb).unwrap()), a * b);
        assert_eq!(
            k.secret.decrypt_bit(&nbit_gt(&h, &wa, &wb).unwrap()).unwrap(),
            a > b
        );
    }
}

#[test]
fn word_encoding_round_trips() {
    let k = clear_keys();
    let w = word(k, 0b1011_0010, 8);
    let bytes = w.to_bytes();
    let back = EncWord::from_bytes(&bytes).unwrap();
    assert_eq!(back.width(), 8);
    assert_eq!(dec(k, &back), 0b1011_0010);
    assert!(EncWord::from_bytes(&bytes[..bytes.len() - 3]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Circuit results agree with the oracle for arbitrary widths 1..=8.
    #[test]
    fn prop_circuits_match_oracle(w in 1u16..=8, a_raw: u64, b_raw: u64) {
        let k = clear_keys();
        let h = k.cloud.handle();
        let mask = (1u64 << w) - 1;
        let (a, b) = (a_raw & mask, b_raw & mask);
        let (wa, wb) = (word(k, a, w), word(k, b, w));
        let (oa, ob) = (
            oracle::ClearWord::new(a, w).unwrap(),
            oracle::ClearWord::new(b, w).unwrap(),
        );
        prop_assert_eq!(dec(k, &nbit_add(&h, &wa, &wb).unwrap()), oracle::plain_add(oa, ob).value());
        prop_assert_eq!(dec(k, &nbit_sub(&h, &wa, &wb).unwrap()), oracle::plain_sub(oa, ob).value());
        prop_assert_eq!(dec(k, &nbit_mult(&h, &wa, &wb).unwrap()), oracle::plain_mult(oa, ob).value());
        prop_assert_eq!(
            k.secret.decrypt_bit(&nbit_gt(&h, &wa, &wb).unwrap()).unwrap(),
            oracle::plain_gt(oa, ob)
        );
    }

    /// Serialized words survive the round trip bit-exactly.
    #[test]
    fn prop_word_round_trip(w in 1u16..=16, v_raw: u64) {
        let k = clear_keys();
        let v = v_raw & ((1u64 << w) - 1);
        let enc = word(k, v, w);
        let bytes = enc.to_bytes();
        let back = EncWord::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(dec(k, &back), v);
    }
}
