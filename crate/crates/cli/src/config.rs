use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};

/// Settings from the optional TOML file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub shards: Option<usize>,
    pub memory_budget: Option<u64>,
    pub window: Option<u64>,
    pub digits: Option<u32>,
}

/// Resolved settings: flags over file over environment over defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub shards: usize,
    pub memory_budget: u64,
    pub window: Option<u64>,
    pub digits: Option<u32>,
    pub config_digest: String,
}

pub const ENV_SHARDS: &str = "TWISTSHA_SHARDS";
pub const ENV_MEMORY: &str = "TWISTSHA_MEMORY_BUDGET";

fn env_u64(name: &str) -> Result<Option<u64>> {
    match std::env::var(name) {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("{name}={v:?} is not an integer"))?)),
        Err(_) => Ok(None),
    }
}

impl Settings {
    pub fn resolve(path: Option<&Path>, shards_flag: Option<usize>, memory_flag: Option<u64>) -> Result<Self> {
        let (file, config_digest) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let cfg: FileConfig = toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
                (cfg, format!("{:x}", Sha256::digest(text.as_bytes())))
            }
            None => (FileConfig::default(), String::new()),
        };
        let default_shards = std::thread::available_parallelism().map_or(1, |n| n.get());
        let shards = shards_flag
            .or(file.shards)
            .or(env_u64(ENV_SHARDS)?.map(|n| n as usize))
            .unwrap_or(default_shards);
        let memory_budget = memory_flag
            .or(file.memory_budget)
            .or(env_u64(ENV_MEMORY)?)
            .unwrap_or(2 << 30);
        Ok(Settings {
            shards: shards.max(1),
            memory_budget,
            window: file.window,
            digits: file.digits,
            config_digest,
        })
    }
}
