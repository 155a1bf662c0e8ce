use std::net::SocketAddr;
use std::path::PathBuf;

use crate::error::ApiError;

/// Server settings read from the environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    pub rng_seed: u64,
}

impl Config {
    pub fn from_env() -> Result<Config, ApiError> {
        Config::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Config, ApiError> {
        let bad = |k: &str, e: String| ApiError::BadRequest(format!("{k}: {e}"));
        let listen = get("CROWDVAL_LISTEN")
            .unwrap_or_else(|| "127.0.0.1:8080".into())
            .parse()
            .map_err(|e: std::net::AddrParseError| bad("CROWDVAL_LISTEN", e.to_string()))?;
        let data_dir = get("CROWDVAL_DATA_DIR").unwrap_or_else(|| "./data".into()).into();
        let rng_seed = get("CROWDVAL_RNG_SEED")
            .map(|s| s.parse::<u64>())
            .transpose()
            .map_err(|e| bad("CROWDVAL_RNG_SEED", e.to_string()))?
            .unwrap_or(42);
        Ok(Config {
            listen,
            data_dir,
            rng_seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = Config::from_lookup(|_| None).unwrap();
        assert_eq!(c.listen.port(), 8080);
        assert_eq!(c.rng_seed, 42);
    }

    #[test]
    fn bad_seed() {
        let r = Config::from_lookup(|k| (k == "CROWDVAL_RNG_SEED").then(|| "x".to_string()));
        assert!(r.is_err());
    }
}
