//! Frame codec round-trips and robustness.

use hembio_core::gates::{keygen, BackendKind, ParamSet};
use hembio_core::matcher::encrypt_vector;
use hembio_core::matcher::BiometricVector;
use hembio_core::protocol::{EncToken, TerminationReason, Verdict};
use hembio_core::transport::{decode_frame, encode_frame, Message, WireErrorCode};
use proptest::prelude::*;

fn round_trip(msg: &Message) -> Message {
    let frame = encode_frame(msg).unwrap();
    decode_frame(&frame).unwrap()
}

#[test]
fn register_and_challenge_frames_round_trip() {
    let keys = keygen(BackendKind::Clear, ParamSet::Default);
    let v = BiometricVector::new(vec![1, 2, 3, 250], 256).unwrap();
    let enc = encrypt_vector(&keys.secret, &v, 8).unwrap();

    let msg = Message::Register {
        client_id: "alice-01".into(),
        backend: BackendKind::Clear,
        cloud_key: keys.cloud.clone(),
        template: enc.clone(),
    };
    let Message::Register { client_id, backend, cloud_key, template } = round_trip(&msg) else {
        panic!("wrong kind")
    };
    assert_eq!(client_id, "alice-01");
    assert_eq!(backend, BackendKind::Clear);
    assert_eq!(cloud_key.key_id(), keys.cloud.key_id());
    assert_eq!(template.to_bytes(), enc.to_bytes());

    let msg = Message::AuthInit { client_id: "alice-01".into(), sample: enc.clone() };
    let Message::AuthInit { sample, .. } = round_trip(&msg) else { panic!("wrong kind") };
    assert_eq!(sample.to_bytes(), enc.to_bytes());

    let bit = keys.secret.encrypt_bit(true);
    let token_ct = EncToken::eval_g(&keys.cloud.handle(), &bit, &[7u8; 16], &[9u8; 16]).unwrap();
    let msg = Message::Challenge { session_id: 0xdead_beef, token_ct };
    let Message::Challenge { session_id, token_ct } = round_trip(&msg) else {
        panic!("wrong kind")
    };
    assert_eq!(session_id, 0xdead_beef);
    assert_eq!(token_ct.decrypt(&keys.secret).unwrap(), vec![9u8; 16]);
}

#[test]
fn truncated_and_corrupt_frames_are_rejected() {
    let msg = Message::Response { session_id: 7, token: vec![1, 2, 3] };
    let frame = encode_frame(&msg).unwrap();
    assert!(decode_frame(&frame[..frame.len() - 1]).is_err());
    assert!(decode_frame(&frame[..3]).is_err());
    let mut bad_type = frame.clone();
    bad_type[4] = 99;
    assert!(decode_frame(&bad_type).is_err());
    let mut bad_len = frame;
    bad_len[0] ^= 1;
    assert!(decode_frame(&bad_len).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prop_payload_frames_round_trip(
        session_id: u64,
        token in prop::collection::vec(any::<u8>(), 0..64),
        verdict_accept: bool,
        reason_tag in 1u8..=8,
        code_tag in 1u8..=6,
        detail in "[ -~]{0,80}",
    ) {
        let msgs = [
            Message::Response { session_id, token },
            Message::Result {
                session_id,
                verdict: if verdict_accept { Verdict::Accept } else { Verdict::Reject },
            },
            Message::Terminate {
                session_id,
                reason: TerminationReason::from_tag(reason_tag).unwrap(),
            },
            Message::Error {
                code: WireErrorCode::from_tag(code_tag).unwrap(),
                detail,
            },
            Message::RegisterOk,
        ];
        for msg in msgs {
            let frame = encode_frame(&msg).unwrap();
            let back = decode_frame(&frame).unwrap();
            prop_assert_eq!(encode_frame(&back).unwrap(), frame);
        }
    }
}
