//! `hembio`: key generation, enrollment, authentication, the server daemon,
//! synthetic vector generation and the benchmark driver.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "hembio", version, about = "Encrypted biometric matching over boolean FHE")]
struct Cli {
    /// Path to a key=value config file (n, w, lambda, b, ttl, backend, ...).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key triple and write it to a directory.
    Keygen(commands::KeygenArgs),
    /// Generate a synthetic template/sample pair at an exact distance.
    GenVectors(commands::GenVectorsArgs),
    /// Run the server daemon.
    Serve(commands::ServeArgs),
    /// Enroll a template with a running server.
    Enroll(commands::EnrollArgs),
    /// Authenticate a sample against a running server.
    Auth(commands::AuthArgs),
    /// Time the operation and protocol tables.
    Bench(commands::BenchArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp_millis()
        .init();
    let cli = Cli::parse();
    let config = match commands::load_config(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let run = match cli.command {
        Command::Keygen(args) => commands::keygen(args, &config),
        Command::GenVectors(args) => commands::gen_vectors(args),
        Command::Serve(args) => commands::serve(args, &config),
        Command::Enroll(args) => commands::enroll(args, &config),
        Command::Auth(args) => return commands::auth_exit(args, &config),
        Command::Bench(args) => commands::bench(args, &config),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
