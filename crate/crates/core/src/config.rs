//! Runtime configuration: a JSON file, then environment overrides.
//!
//! ```json
//! {"udpPort": 9000, "wsPort": 8080, "sieve": "3@0|4@1", "baseMidi": 48,
//!  "bankManifest": "bank.json", "debounce": {"thresholdIterations": 100}}
//! ```
//! Every key is optional. `HOPSCOTCH_UDP_PORT` and `HOPSCOTCH_WS_PORT`
//! override the ports.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::protocol::DEFAULT_UI_PORT;
use crate::engine::{EngineConfig, SoundMode, DEFAULT_BASE_MIDI};
use crate::firmware::DebounceConfig;
use crate::osc::DEFAULT_UDP_PORT;
use crate::sieve::{self, DEFAULT_SIEVE};

pub const ENV_UDP_PORT: &str = "HOPSCOTCH_UDP_PORT";
pub const ENV_WS_PORT: &str = "HOPSCOTCH_WS_PORT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{var}={value:?} is not a port number")]
    Env { var: &'static str, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct Config {
    /// Address both sockets bind to.
    pub host: IpAddr,
    pub udp_port: u16,
    pub ws_port: u16,
    pub sieve: String,
    pub base_midi: u8,
    pub initial_mode: SoundMode,
    pub bank_manifest: Option<PathBuf>,
    pub serial_path: Option<PathBuf>,
    pub debounce: DebounceConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            udp_port: DEFAULT_UDP_PORT,
            ws_port: DEFAULT_UI_PORT,
            sieve: DEFAULT_SIEVE.to_owned(),
            base_midi: DEFAULT_BASE_MIDI,
            initial_mode: SoundMode::Cartoon,
            bank_manifest: None,
            serial_path: None,
            debounce: DebounceConfig::default(),
        }
    }
}

impl Config {
    /// Reads `path`; relative `bankManifest` and `serialPath` entries
    /// resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg: Config = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.bank_manifest, &mut cfg.serial_path].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Applies port overrides from `lookup` (normally `std::env::var`).
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        for (var, port) in [(ENV_UDP_PORT, &mut self.udp_port), (ENV_WS_PORT, &mut self.ws_port)] {
            if let Some(value) = lookup(var) {
                *port = value.trim().parse().map_err(|_| ConfigError::Env { var, value })?;
            }
        }
        Ok(())
    }

    /// Ports must be distinct and nonzero, the sieve must parse.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.udp_port == 0 || self.ws_port == 0 {
            return Err(ConfigError::Invalid("ports must be in 1..=65535".into()));
        }
        if self.udp_port == self.ws_port {
            return Err(ConfigError::Invalid(format!(
                "udpPort and wsPort are both {}",
                self.udp_port
            )));
        }
        if self.base_midi > 127 {
            return Err(ConfigError::Invalid(format!(
                "baseMidi {} outside 0..=127",
                self.base_midi
            )));
        }
        sieve::parse_sieve(&self.sieve).map_err(|e| ConfigError::Invalid(format!("sieve: {e}")))?;
        self.debounce
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("debounce: {e}")))?;
        Ok(())
    }

    pub fn engine_config(&self) -> Result<EngineConfig, ConfigError> {
        let sieve = sieve::parse_sieve(&self.sieve).map_err(|e| ConfigError::Invalid(format!("sieve: {e}")))?;
        Ok(EngineConfig {
            sieve,
            base_midi: self.base_midi,
            initial_mode: self.initial_mode,
            ..EngineConfig::default()
        })
    }

    pub fn udp_addr(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.udp_port)
    }

    pub fn ui_addr(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.ws_port)
    }
}
