use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use log::info;

use hembio_core::bench::{run_profile, BenchOptions, Profile};
use hembio_core::gates::{keygen as generate_keys, BackendKind, ParamSet};
use hembio_core::protocol::{ClientIdentity, Outcome, ServerEngine};
use hembio_core::transport::{
    hembio_home, load_client_keys, remote_auth, remote_register, save_client_keys, DirStore,
    RunConfig, Server,
};
use hembio_core::vectors::{read_vector, synthetic_pair, write_vector, SyntheticSpec};

pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

#[derive(Args)]
pub struct KeygenArgs {
    /// Directory the key files are written into.
    #[arg(long)]
    out: PathBuf,
    /// Parameter set: default | test | tfhe-lib.
    #[arg(long, default_value = "default")]
    params: String,
    /// Overrides the configured backend.
    #[arg(long)]
    backend: Option<String>,
}

pub fn keygen(args: KeygenArgs, config: &RunConfig) -> Result<()> {
    let set: ParamSet = args.params.parse()?;
    let backend = match args.backend {
        Some(b) => b.parse::<BackendKind>()?,
        None => config.backend,
    };
    info!("generating {} keys ({:?} parameters)", backend.as_str(), set);
    let triple = generate_keys(backend, set);
    save_client_keys(&args.out, &triple)?;
    println!(
        "wrote secret.key and cloud.key to {} (backend={}, {} bits)",
        args.out.display(),
        backend.as_str(),
        triple.params.security_bits
    );
    Ok(())
}

#[derive(Args)]
pub struct GenVectorsArgs {
    /// Vector length.
    #[arg(long)]
    n: usize,
    /// Component width in bits.
    #[arg(long)]
    w: u16,
    /// RNG seed; the same seed reproduces the same pair.
    #[arg(long)]
    seed: u64,
    /// Per-component shift applied to perturbed components.
    #[arg(long)]
    distance: u32,
    /// How many components are shifted (squared distance = distance² · count).
    #[arg(long, default_value_t = 1)]
    perturb: usize,
    /// Output directory for template.vec and sample.vec.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn gen_vectors(args: GenVectorsArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n: args.n,
        w: args.w,
        seed: args.seed,
        distance: args.distance,
        perturbed: args.perturb,
    };
    let pair = synthetic_pair(&spec)?;
    std::fs::create_dir_all(&args.out)?;
    let template_path = args.out.join("template.vec");
    let sample_path = args.out.join("sample.vec");
    write_vector(&template_path, &pair.template, args.w)?;
    write_vector(&sample_path, &pair.sample, args.w)?;
    println!(
        "wrote {} and {} (squared_distance={}, manhattan={})",
        template_path.display(),
        sample_path.display(),
        pair.squared_distance,
        pair.manhattan_distance
    );
    Ok(())
}

#[derive(Args)]
pub struct ServeArgs {
    /// Listen address, e.g. 127.0.0.1:7700 (port 0 picks a free port).
    #[arg(long, default_value = "127.0.0.1:7700")]
    bind: String,
    /// Record store directory; defaults to $HEMBIO_HOME/server.
    #[arg(long)]
    store: Option<PathBuf>,
}

pub fn serve(args: ServeArgs, config: &RunConfig) -> Result<()> {
    let store_dir = args.store.unwrap_or_else(|| hembio_home().join("server"));
    let store = Arc::new(DirStore::open(&store_dir)?);
    let engine = Arc::new(ServerEngine::new(config.server_config()?, store)?);
    info!(
        "serving backend={} n={} w={} lambda={} B={} store={}",
        config.backend.as_str(),
        config.n,
        config.w,
        config.lambda,
        config.threshold,
        store_dir.display()
    );
    let server = Server::bind(args.bind.as_str(), engine, config.max_frame)?;
    // announce the bound address on stdout so scripts can pick up port 0
    println!("listening on {}", server.local_addr()?);
    use std::io::Write;
    std::io::stdout().flush().ok();
    Ok(server.run()?)
}

#[derive(Args)]
pub struct EnrollArgs {
    /// Server address, host:port.
    #[arg(long)]
    server: String,
    /// Client identifier.
    #[arg(long)]
    id: String,
    /// Template vector file.
    #[arg(long)]
    template: PathBuf,
    /// Key directory; defaults to $HEMBIO_HOME/client/<id>.
    #[arg(long)]
    keys: Option<PathBuf>,
}

fn keys_dir(explicit: Option<PathBuf>, id: &str) -> PathBuf {
    explicit.unwrap_or_else(|| hembio_home().join("client").join(id))
}

pub fn enroll(args: EnrollArgs, config: &RunConfig) -> Result<()> {
    let keys = load_client_keys(&keys_dir(args.keys, &args.id))?;
    let (template, w) = read_vector(&args.template)?;
    let identity = ClientIdentity::new(args.id.clone(), keys);
    remote_register(args.server.as_str(), &identity, &template, w, config.max_frame)?;
    println!("enrolled {} ({} components, w={})", args.id, template.len(), w);
    Ok(())
}

#[derive(Args)]
pub struct AuthArgs {
    /// Server address, host:port.
    #[arg(long)]
    server: String,
    /// Client identifier.
    #[arg(long)]
    id: String,
    /// Sample vector file.
    #[arg(long)]
    sample: PathBuf,
    /// Key directory; defaults to $HEMBIO_HOME/client/<id>.
    #[arg(long)]
    keys: Option<PathBuf>,
}

/// Exit code contract: 0 ACCEPT, 1 REJECT, 2 TERMINATED, 3 error.
pub fn auth_exit(args: AuthArgs, config: &RunConfig) -> ExitCode {
    match auth(args, config) {
        Ok(Outcome::Issued(token)) => {
            if token.verdict == hembio_core::protocol::Verdict::Accept {
                println!("ACCEPT");
                ExitCode::SUCCESS
            } else {
                println!("REJECT");
                ExitCode::from(1)
            }
        }
        Ok(Outcome::Terminated(reason)) => {
            println!("TERMINATED({})", reason.as_str());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn auth(args: AuthArgs, config: &RunConfig) -> Result<Outcome> {
    let keys = load_client_keys(&keys_dir(args.keys, &args.id))?;
    let (sample, w) = read_vector(&args.sample)?;
    let identity = ClientIdentity::new(args.id.clone(), keys);
    Ok(remote_auth(args.server.as_str(), &identity, &sample, w, config.max_frame)?)
}

#[derive(Args)]
pub struct BenchArgs {
    /// table1 (basic operations) or table2 (protocol functions).
    #[arg(long)]
    profile: String,
    /// clear or fhe.
    #[arg(long)]
    backend: String,
    /// CSV output path.
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
    /// Use the full n=128 profile (long FHE runs).
    #[arg(long)]
    full: bool,
    /// Enable the matcher's per-component parallelism.
    #[arg(long)]
    parallel: bool,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Per-row time budget in seconds; lapsed rows read TIMEOUT.
    #[arg(long)]
    timeout_secs: Option<u64>,
}

pub fn bench(args: BenchArgs, _config: &RunConfig) -> Result<()> {
    let profile: Profile = args.profile.parse()?;
    let backend: BackendKind = args.backend.parse()?;
    let mut opts =
        if args.full { BenchOptions::full(backend) } else { BenchOptions::reduced(backend) };
    opts.parallel = args.parallel;
    if let Some(trials) = args.trials {
        if trials == 0 {
            bail!("--trials must be positive");
        }
        opts.trials = trials;
    }
    if let Some(secs) = args.timeout_secs {
        opts.row_timeout = Duration::from_secs(secs);
    }
    info!(
        "benchmarking {:?} backend={} n={} w={} trials={}",
        profile,
        backend.as_str(),
        opts.n,
        opts.w,
        opts.trials
    );
    let report = run_profile(profile, opts)?;
    print!("{}", report.render_text());
    std::fs::write(&args.out, report.to_csv())?;
    println!("csv written to {}", args.out.display());
    Ok(())
}
