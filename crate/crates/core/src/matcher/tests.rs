use super::*;
use crate::oracle;
use crate::testutil::clear_keys;
use crate::vectors::{synthetic_pair, SyntheticSpec};
use rand::Rng;

fn cfg_n8() -> MatchConfig {
    MatchConfig::new(8, 8, 100).unwrap()
}

fn enc(v: &BiometricVector, w: u16) -> EncVector {
    encrypt_vector(&clear_keys().secret, v, w).unwrap()
}

fn random_vec(rng: &mut impl Rng, n: usize, m: u32) -> BiometricVector {
    BiometricVector::new((0..n).map(|_| rng.gen_range(0..m)).collect(), m).unwrap()
}

#[test]
fn accumulator_width_covers_worst_case() {
    let cfg = MatchConfig::new(128, 8, 0).unwrap();
    assert_eq!(cfg.acc_width(), 23);
    assert_eq!(cfg.manhattan_width(), 15);
    let cfg = cfg_n8();
    assert_eq!(cfg.acc_width(), 19);
    // worst case: every component differs by m-1
    let worst = 8u64 * 255 * 255;
    assert!(worst < 1u64 << 19);
}

#[test]
fn zero_distance_for_identical_vectors() {
    let k = clear_keys();
    let cfg = cfg_n8();
    let mut rng = rand::thread_rng();
    let v = random_vec(&mut rng, 8, 256);
    let e = enc(&v, 8);
    let d2 = squared_euclidean(&k.cloud.handle(), &e, &e, &cfg).unwrap();
    assert_eq!(d2.width(), cfg.acc_width());
    assert_eq!(d2.decrypt(&k.secret).unwrap(), 0);
    let man = manhattan(&k.cloud.handle(), &e, &e, &cfg).unwrap();
    assert_eq!(man.decrypt(&k.secret).unwrap(), 0);
}

#[test]
fn single_component_difference() {
    let k = clear_keys();
    let cfg = cfg_n8();
    let x = BiometricVector::new(vec![10, 20, 30, 40, 50, 60, 70, 80], 256).unwrap();
    let mut comps = x.components().to_vec();
    comps[3] += 7;
    let y = BiometricVector::new(comps, 256).unwrap();
    let (ex, ey) = (enc(&x, 8), enc(&y, 8));
    let h = k.cloud.handle();
    assert_eq!(squared_euclidean(&h, &ex, &ey, &cfg).unwrap().decrypt(&k.secret).unwrap(), 49);
    assert_eq!(manhattan(&h, &ex, &ey, &cfg).unwrap().decrypt(&k.secret).unwrap(), 7);
}

/// Randomized agreement with both oracle paths, and symmetry.
#[test]
fn distances_match_oracle_randomized() {
    let k = clear_keys();
    let cfg = cfg_n8();
    let h = k.cloud.handle();
    let mut rng = rand::thread_rng();
    for _ in 0..50 {
        let x = random_vec(&mut rng, 8, 256);
        let y = random_vec(&mut rng, 8, 256);
        let (ex, ey) = (enc(&x, 8), enc(&y, 8));
        let d2 = squared_euclidean(&h, &ex, &ey, &cfg).unwrap().decrypt(&k.secret).unwrap();
        assert_eq!(d2, oracle::native::euclid2(x.components(), y.components()));
        assert_eq!(
            d2,
            oracle::plain_euclid2(x.components(), y.components(), 8, cfg.acc_width())
        );
        let d2_sym = squared_euclidean(&h, &ey, &ex, &cfg).unwrap().decrypt(&k.secret).unwrap();
        assert_eq!(d2, d2_sym);
        let man = manhattan(&h, &ex, &ey, &cfg).unwrap().decrypt(&k.secret).unwrap();
        assert_eq!(man, oracle::native::manhattan(x.components(), y.components()));
    }
}

/// Sequential and parallel evaluation produce identical decryptions.
#[test]
fn parallel_matches_sequential() {
    let k = clear_keys();
    let mut cfg = cfg_n8();
    let h = k.cloud.handle();
    let mut rng = rand::thread_rng();
    let x = random_vec(&mut rng, 8, 256);
    let y = random_vec(&mut rng, 8, 256);
    let (ex, ey) = (enc(&x, 8), enc(&y, 8));
    cfg.parallel = true;
    let par = squared_euclidean(&h, &ex, &ey, &cfg).unwrap().decrypt(&k.secret).unwrap();
    cfg.parallel = false;
    let seq = squared_euclidean(&h, &ex, &ey, &cfg).unwrap().decrypt(&k.secret).unwrap();
    assert_eq!(par, seq);
}

#[test]
fn match_boundary_is_inclusive() {
    let k = clear_keys();
    let h = k.cloud.handle();
    for seed in 0..20u64 {
        let spec = SyntheticSpec { n: 8, w: 8, seed, distance: 1 + (seed % 5) as u32, perturbed: 3 };
        let pair = synthetic_pair(&spec).unwrap();
        let d2 = pair.squared_distance;
        let (es, et) = (enc(&pair.sample, 8), enc(&pair.template, 8));
        let mut cfg = cfg_n8();
        cfg.threshold = d2;
        let hit = match_f(&h, &es, &et, &cfg).unwrap();
        assert!(k.secret.decrypt_bit(&hit).unwrap(), "d2={d2} should match at B=d2");
        cfg.threshold = d2 - 1;
        let miss = match_f(&h, &es, &et, &cfg).unwrap();
        assert!(!k.secret.decrypt_bit(&miss).unwrap(), "d2={d2} must not match at B=d2-1");
    }
}

#[test]
fn identical_vectors_match_at_any_threshold() {
    let k = clear_keys();
    let h = k.cloud.handle();
    let mut rng = rand::thread_rng();
    let v = random_vec(&mut rng, 8, 256);
    let e = enc(&v, 8);
    for threshold in [0u64, 1, 1000] {
        let mut cfg = cfg_n8();
        cfg.threshold = threshold;
        assert!(k.secret.decrypt_bit(&match_f(&h, &e, &e, &cfg).unwrap()).unwrap());
    }
}

/// Sweeping the threshold across the true distance flips the verdict
/// exactly once.
#[test]
fn threshold_monotonicity() {
    let k = clear_keys();
    let h = k.cloud.handle();
    let spec = SyntheticSpec { n: 8, w: 8, seed: 5, distance: 2, perturbed: 2 };
    let pair = synthetic_pair(&spec).unwrap();
    let d2 = pair.squared_distance; // 8
    let (es, et) = (enc(&pair.sample, 8), enc(&pair.template, 8));
    for b in d2.saturating_sub(3)..=d2 + 3 {
        let mut cfg = cfg_n8();
        cfg.threshold = b;
        let hit = k.secret.decrypt_bit(&match_f(&h, &es, &et, &cfg).unwrap()).unwrap();
        assert_eq!(hit, b >= d2, "B={b}, d2={d2}");
    }
}

/// The accumulator never wraps: checked against exact big-integer sums for
/// adversarially large components.
#[test]
fn overflow_freedom() {
    let k = clear_keys();
    let cfg = cfg_n8();
    let h = k.cloud.handle();
    let hi = BiometricVector::new(vec![255; 8], 256).unwrap();
    let lo = BiometricVector::new(vec![0; 8], 256).unwrap();
    let d2 = squared_euclidean(&h, &enc(&lo, 8), &enc(&hi, 8), &cfg)
        .unwrap()
        .decrypt(&k.secret)
        .unwrap();
    let exact: num_bigint::BigUint = (0..8u32).map(|_| num_bigint::BigUint::from(255u32 * 255)).sum();
    assert_eq!(num_bigint::BigUint::from(d2), exact);
}

#[test]
fn dimension_and_key_mismatches_are_rejected() {
    let k = clear_keys();
    let cfg = cfg_n8();
    let h = k.cloud.handle();
    let mut rng = rand::thread_rng();
    let short = random_vec(&mut rng, 4, 256);
    let full = random_vec(&mut rng, 8, 256);
    let (es, ef) = (enc(&short, 8), enc(&full, 8));
    assert!(matches!(
        squared_euclidean(&h, &es, &ef, &cfg),
        Err(Error::DimensionMismatch { .. })
    ));
    let other = crate::gates::keygen(crate::gates::BackendKind::Clear, crate::gates::ParamSet::Default);
    let eo = encrypt_vector(&other.secret, &full, 8).unwrap();
    assert!(matches!(squared_euclidean(&h, &ef, &eo, &cfg), Err(Error::KeyMismatch)));
}

#[test]
fn vector_encoding_round_trips() {
    let k = clear_keys();
    let mut rng = rand::thread_rng();
    let v = random_vec(&mut rng, 8, 256);
    let e = enc(&v, 8);
    let bytes = e.to_bytes();
    let back = EncVector::from_bytes(&bytes).unwrap();
    assert_eq!(back.to_bytes(), bytes);
    assert_eq!(decrypt_vector(&k.secret, &back, 256).unwrap(), v);
}

#[test]
fn component_out_of_modulus_is_rejected() {
    assert!(matches!(
        BiometricVector::new(vec![0, 300], 256),
        Err(Error::ComponentRange { value: 300, modulus: 256 })
    ));
}
