//! Timing harness for the operation and protocol tables.
//!
//! Table 1 covers the arithmetic subroutines and both distance metrics;
//! table 2 covers the match predicate `f`, the token construction `g` and
//! the protocol end to end. Medians are reported over a configurable trial
//! count; a row that exhausts its time budget before producing a single
//! sample is marked TIMEOUT instead of aborting the report. Key generation
//! is never timed; the client's encryption/decryption work is reported as
//! a separate protocol row rather than folded into every figure.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};

use crate::arith::{abs_value, nbit_add, nbit_mult, nbit_sub, twos_complement, EncWord};
use crate::error::{Error, Result};
use crate::gates::{keygen, BackendKind, KeyTriple, ParamSet};
use crate::matcher::{
    encrypt_vector, manhattan, match_f, squared_euclidean, BiometricVector, EncVector, MatchConfig,
};
use crate::protocol::{ClientIdentity, EncToken, ServerConfig, ServerEngine};
use crate::transport::MemoryStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Table1,
    Table2,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Profile::Table1),
            "table2" => Ok(Profile::Table2),
            other => Err(Error::BadConfig(format!("unknown profile `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub backend: BackendKind,
    pub n: usize,
    pub w: u16,
    pub trials: usize,
    pub row_timeout: Duration,
    /// Off by default for timing stability; enables the matcher's
    /// per-component parallelism when set.
    pub parallel: bool,
    pub seed: u64,
}

impl BenchOptions {
    /// Reduced profile: short vectors so the FHE protocol rows complete in
    /// minutes rather than hours.
    pub fn reduced(backend: BackendKind) -> Self {
        let trials = match backend {
            BackendKind::Clear => 1000,
            BackendKind::Fhe => 5,
        };
        BenchOptions {
            backend,
            n: 8,
            w: 8,
            trials,
            row_timeout: Duration::from_secs(3600),
            parallel: false,
            seed: 0xb10b,
        }
    }

    /// The long-run profile at the full vector length.
    pub fn full(backend: BackendKind) -> Self {
        let mut opts = Self::reduced(backend);
        opts.n = crate::matcher::DEFAULT_VECTOR_LEN;
        opts.row_timeout = Duration::from_secs(7 * 24 * 3600);
        opts
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub backend: BackendKind,
    pub n: usize,
    pub w: u16,
    pub trials: usize,
    /// Median wall time; `None` marks a row that timed out.
    pub median_ns: Option<u128>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub profile: Profile,
    pub rows: Vec<BenchRow>,
    pub cores: usize,
    pub cpu: String,
}

impl BenchReport {
    pub fn median(&self, name: &str) -> Option<u128> {
        self.rows.iter().find(|r| r.name == name).and_then(|r| r.median_ns)
    }

    /// CSV with the fixed column set `name,backend,n,w,trials,median_ns`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,backend,n,w,trials,median_ns\n");
        for row in &self.rows {
            let median =
                row.median_ns.map(|ns| ns.to_string()).unwrap_or_else(|| "TIMEOUT".to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.name,
                row.backend.as_str(),
                row.n,
                row.w,
                row.trials,
                median
            ));
        }
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "profile={:?} cpu=\"{}\" cores={}\n",
            self.profile, self.cpu, self.cores
        ));
        out.push_str(&format!(
            "{:<24} {:>8} {:>5} {:>4} {:>7} {:>14}\n",
            "subroutine", "backend", "n", "w", "trials", "median"
        ));
        for row in &self.rows {
            let median =
                row.median_ns.map(format_duration).unwrap_or_else(|| "TIMEOUT".to_string());
            out.push_str(&format!(
                "{:<24} {:>8} {:>5} {:>4} {:>7} {:>14}\n",
                row.name,
                row.backend.as_str(),
                row.n,
                row.w,
                row.trials,
                median
            ));
        }
        out
    }
}

fn format_duration(ns: u128) -> String {
    if ns < 10_000 {
        format!("{ns} ns")
    } else if ns < 10_000_000 {
        format!("{:.1} µs", ns as f64 / 1e3)
    } else if ns < 10_000_000_000 {
        format!("{:.1} ms", ns as f64 / 1e6)
    } else {
        format!("{:.2} s", ns as f64 / 1e9)
    }
}

fn cpu_model() -> String {
    std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|s| s.trim().to_string())
        })
        .unwrap_or_else(|| "unknown".to_string())
}

fn median_of(mut samples: Vec<u128>) -> Option<u128> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_unstable();
    Some(samples[samples.len() / 2])
}

/// Applies `op` to each prepared input under a shared time budget and
/// returns the median latency. The budget is checked between trials (an op
/// in flight is never interrupted); a row whose budget lapses before the
/// first trial reports `None`, rendered as TIMEOUT.
fn time_over<T, R>(
    budget: Duration,
    inputs: Vec<T>,
    mut op: impl FnMut(T) -> Result<R>,
) -> Result<Option<u128>> {
    let clock = Instant::now();
    let mut samples = Vec::with_capacity(inputs.len());
    for input in inputs {
        if clock.elapsed() >= budget {
            break;
        }
        let t0 = Instant::now();
        let out = op(input)?;
        samples.push(t0.elapsed().as_nanos());
        std::hint::black_box(&out);
    }
    Ok(median_of(samples))
}

struct Fixture {
    opts: BenchOptions,
    keys: KeyTriple,
    rng: StdRng,
}

impl Fixture {
    fn new(opts: BenchOptions) -> Self {
        Fixture {
            keys: keygen(opts.backend, ParamSet::Default),
            rng: StdRng::seed_from_u64(opts.seed),
            opts,
        }
    }

    fn word(&mut self) -> EncWord {
        let v = self.rng.gen_range(0..1u64 << self.opts.w);
        EncWord::encrypt(&self.keys.secret, v, self.opts.w).unwrap()
    }

    fn word_pairs(&mut self) -> Vec<(EncWord, EncWord)> {
        (0..self.opts.trials).map(|_| (self.word(), self.word())).collect()
    }

    fn words(&mut self) -> Vec<EncWord> {
        (0..self.opts.trials).map(|_| self.word()).collect()
    }

    fn vector(&mut self) -> BiometricVector {
        let m = 1u32 << self.opts.w;
        BiometricVector::new((0..self.opts.n).map(|_| self.rng.gen_range(0..m)).collect(), m)
            .unwrap()
    }

    fn enc_vector(&mut self) -> EncVector {
        let v = self.vector();
        encrypt_vector(&self.keys.secret, &v, self.opts.w).unwrap()
    }

    fn enc_vector_pairs(&mut self) -> Vec<(EncVector, EncVector)> {
        (0..self.opts.trials).map(|_| (self.enc_vector(), self.enc_vector())).collect()
    }

    fn row(&self, name: &str, median_ns: Option<u128>) -> BenchRow {
        BenchRow {
            name: name.to_string(),
            backend: self.opts.backend,
            n: self.opts.n,
            w: self.opts.w,
            trials: self.opts.trials,
            median_ns,
        }
    }
}

fn report(profile: Profile, rows: Vec<BenchRow>) -> BenchReport {
    BenchReport {
        profile,
        rows,
        cores: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        cpu: cpu_model(),
    }
}

/// Basic-operation table: the arithmetic subroutines and both distance
/// metrics, in cost order.
pub fn run_table1(opts: BenchOptions) -> Result<BenchReport> {
    let mut fx = Fixture::new(opts);
    let keys = fx.keys.clone();
    let handle = keys.cloud.handle();
    let budget = opts.row_timeout;
    let mut cfg = MatchConfig::new(opts.n, opts.w, 0)?;
    cfg.parallel = opts.parallel;

    let mut rows = Vec::new();
    let inputs = fx.word_pairs();
    rows.push(fx.row("nbit_add", time_over(budget, inputs, |(a, b)| nbit_add(&handle, &a, &b))?));
    let inputs = fx.words();
    rows.push(
        fx.row("twos_complement", time_over(budget, inputs, |a| twos_complement(&handle, &a))?),
    );
    let inputs = fx.words();
    rows.push(fx.row("abs_value", time_over(budget, inputs, |a| abs_value(&handle, &a))?));
    let inputs = fx.word_pairs();
    rows.push(fx.row("nbit_sub", time_over(budget, inputs, |(a, b)| nbit_sub(&handle, &a, &b))?));
    let inputs = fx.word_pairs();
    rows.push(fx.row("nbit_mult", time_over(budget, inputs, |(a, b)| nbit_mult(&handle, &a, &b))?));
    let inputs = fx.enc_vector_pairs();
    rows.push(fx.row(
        "manhattan_distance",
        time_over(budget, inputs, |(x, y)| manhattan(&handle, &x, &y, &cfg))?,
    ));
    let inputs = fx.enc_vector_pairs();
    rows.push(fx.row(
        "euclidean_distance",
        time_over(budget, inputs, |(x, y)| squared_euclidean(&handle, &x, &y, &cfg))?,
    ));

    Ok(report(Profile::Table1, rows))
}

/// Protocol table: `f`, `g`, then the protocol with the client's
/// encrypt/decrypt excluded and included.
pub fn run_table2(opts: BenchOptions) -> Result<BenchReport> {
    let mut fx = Fixture::new(opts);
    let keys = fx.keys.clone();
    let handle = keys.cloud.handle();
    let budget = opts.row_timeout;

    let mut match_cfg = MatchConfig::new(opts.n, opts.w, 64)?;
    match_cfg.parallel = opts.parallel;
    let mut server_cfg = ServerConfig::new(match_cfg, opts.backend);
    server_cfg.session_ttl = Duration::from_secs(24 * 3600);

    // the registered test identity every row runs against
    let identity = ClientIdentity::new("bench-subject", keys.clone());
    let engine = Arc::new(ServerEngine::new(server_cfg, Arc::new(MemoryStore::new()))?);
    let template = fx.vector();
    let enc_template = encrypt_vector(&keys.secret, &template, opts.w)?;
    engine.register(&identity.client_id, keys.cloud.clone(), enc_template.clone())?;

    let mut rows = Vec::new();

    let samples: Vec<EncVector> = (0..opts.trials).map(|_| fx.enc_vector()).collect();
    rows.push(fx.row(
        "function_f",
        time_over(budget, samples, |s| match_f(&handle, &s, &enc_template, &match_cfg))?,
    ));

    let lambda_bytes = engine.config().lambda_bits as usize / 8;
    let g_inputs: Vec<(crate::gates::EncBit, Vec<u8>, Vec<u8>)> = (0..opts.trials)
        .map(|_| {
            let bit = keys.secret.encrypt_bit(fx.rng.gen());
            let mut r0 = vec![0u8; lambda_bytes];
            let mut r1 = vec![0u8; lambda_bytes];
            fx.rng.fill_bytes(&mut r0);
            fx.rng.fill_bytes(&mut r1);
            (bit, r0, r1)
        })
        .collect();
    rows.push(fx.row(
        "function_g",
        time_over(budget, g_inputs, |(b, r0, r1)| EncToken::eval_g(&handle, &b, &r0, &r1))?,
    ));

    // protocol rows, both aggregates from the same runs: `protocol_p` is
    // the server-side work (challenge = f + g, then verify), while the
    // `_with_encdec` row also counts the client's encryption of the sample
    // and decryption of the challenge
    {
        let clock = Instant::now();
        let mut server_ns = Vec::with_capacity(opts.trials);
        let mut full_ns = Vec::with_capacity(opts.trials);
        for _ in 0..opts.trials {
            if clock.elapsed() >= budget {
                break;
            }
            let sample = fx.vector();
            let t_enc = Instant::now();
            let enc_sample = encrypt_vector(&keys.secret, &sample, opts.w)?;
            let enc_ns = t_enc.elapsed().as_nanos();
            let t_challenge = Instant::now();
            let (session, token_ct) = engine.challenge("bench-subject", &enc_sample)?;
            let challenge_ns = t_challenge.elapsed().as_nanos();
            let t_dec = Instant::now();
            let token = token_ct.decrypt(&keys.secret)?;
            let dec_ns = t_dec.elapsed().as_nanos();
            let t_verify = Instant::now();
            let outcome = engine.verify(session, &token);
            let verify_ns = t_verify.elapsed().as_nanos();
            std::hint::black_box(&outcome);
            server_ns.push(challenge_ns + verify_ns);
            full_ns.push(enc_ns + challenge_ns + dec_ns + verify_ns);
        }
        rows.push(fx.row("protocol_p", median_of(server_ns)));
        rows.push(fx.row("protocol_p_with_encdec", median_of(full_ns)));
    }

    Ok(report(Profile::Table2, rows))
}

pub fn run_profile(profile: Profile, opts: BenchOptions) -> Result<BenchReport> {
    match profile {
        Profile::Table1 => run_table1(opts),
        Profile::Table2 => run_table2(opts),
    }
}

#[cfg(test)]
mod tests;
