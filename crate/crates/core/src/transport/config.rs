//! Runtime configuration: a simple `key=value` file shared by the server
//! and the CLI, plus the `HEMBIO_HOME` store location.

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::gates::BackendKind;
use crate::matcher::MatchConfig;
use crate::protocol::ServerConfig;

/// 256 MiB: FHE ciphertexts are large, enrollment frames carry a cloud key.
pub const DEFAULT_MAX_FRAME: u64 = 256 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub w: u16,
    pub lambda: u16,
    pub threshold: u64,
    pub ttl_secs: u64,
    pub backend: BackendKind,
    pub parallel: bool,
    pub max_frame: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: crate::matcher::DEFAULT_VECTOR_LEN,
            w: crate::matcher::DEFAULT_COMPONENT_WIDTH,
            lambda: crate::protocol::DEFAULT_LAMBDA_BITS,
            threshold: 1000,
            ttl_secs: 120,
            backend: BackendKind::Clear,
            parallel: true,
            max_frame: DEFAULT_MAX_FRAME,
        }
    }
}

impl RunConfig {
    /// Parses `key=value` lines; `#` starts a comment, unknown keys are an
    /// error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::BadConfig(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: String| Error::BadConfig(format!("line {}: {e}", lineno + 1));
            match key {
                "n" => cfg.n = value.parse().map_err(|e| bad(format!("n: {e}")))?,
                "w" => cfg.w = value.parse().map_err(|e| bad(format!("w: {e}")))?,
                "lambda" => cfg.lambda = value.parse().map_err(|e| bad(format!("lambda: {e}")))?,
                "b" | "threshold" => {
                    cfg.threshold = value.parse().map_err(|e| bad(format!("threshold: {e}")))?
                }
                "ttl" | "ttl_secs" => {
                    cfg.ttl_secs = value.parse().map_err(|e| bad(format!("ttl: {e}")))?
                }
                "backend" => cfg.backend = value.parse()?,
                "parallel" => {
                    cfg.parallel = value.parse().map_err(|e| bad(format!("parallel: {e}")))?
                }
                "max_frame" => {
                    cfg.max_frame = value.parse().map_err(|e| bad(format!("max_frame: {e}")))?
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn match_config(&self) -> Result<MatchConfig> {
        let mut cfg = MatchConfig::new(self.n, self.w, self.threshold)?;
        cfg.parallel = self.parallel;
        Ok(cfg)
    }

    pub fn server_config(&self) -> Result<ServerConfig> {
        let cfg = ServerConfig {
            match_cfg: self.match_config()?,
            lambda_bits: self.lambda,
            session_ttl: Duration::from_secs(self.ttl_secs),
            backend: self.backend,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Store root: `$HEMBIO_HOME`, or `.hembio` under the working directory.
pub fn hembio_home() -> PathBuf {
    std::env::var_os("HEMBIO_HOME").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".hembio"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::parse("n = 8\nw=8\nb=50 # boundary\nbackend=fhe\n").unwrap();
        assert_eq!(cfg.n, 8);
        assert_eq!(cfg.threshold, 50);
        assert_eq!(cfg.backend, BackendKind::Fhe);
        assert_eq!(cfg.lambda, 128);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::parse("bogus=1").is_err());
        assert!(RunConfig::parse("n 8").is_err());
    }

    #[test]
    fn default_config_validates() {
        RunConfig::default().server_config().unwrap();
    }
}
