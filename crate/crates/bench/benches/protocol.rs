use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hembio_bench::clear_keys;
use hembio_core::matcher::{encrypt_vector, BiometricVector, MatchConfig};
use hembio_core::protocol::{run_protocol, ClientIdentity, EncToken, ServerConfig, ServerEngine};
use hembio_core::transport::MemoryStore;
use rand::Rng;

fn bench_protocol(c: &mut Criterion) {
    let keys = clear_keys();
    let mut rng = rand::thread_rng();
    let template = BiometricVector::new((0..8).map(|_| rng.gen_range(0..256)).collect(), 256)
        .unwrap();

    let cfg = {
        let mut match_cfg = MatchConfig::new(8, 8, 500).unwrap();
        match_cfg.parallel = false;
        ServerConfig::new(match_cfg, hembio_core::BackendKind::Clear)
    };
    let engine = ServerEngine::new(cfg, Arc::new(MemoryStore::new())).unwrap();
    let client = ClientIdentity::new("bench", keys.clone());
    let enc_t = encrypt_vector(&keys.secret, &template, 8).unwrap();
    engine.register("bench", keys.cloud.clone(), enc_t).unwrap();

    let mut group = c.benchmark_group("protocol_clear");
    group.sample_size(50);
    group.bench_function("end_to_end", |bench| {
        bench.iter(|| run_protocol(&client, &engine, black_box(&template)).unwrap())
    });

    let handle = keys.cloud.handle();
    let bit = keys.secret.encrypt_bit(true);
    let r0 = [0x33u8; 16];
    let r1 = [0x44u8; 16];
    group.bench_function("token_selection", |bench| {
        bench.iter(|| EncToken::eval_g(&handle, black_box(&bit), &r0, &r1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_protocol);
criterion_main!(benches);
