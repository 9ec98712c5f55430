//! Hopscotch: an interactive hopscotch mat that turns jumps into sound.
//!
//! Twelve pressure pads and six analog sensors report over OSC
//! ([`osc`]) from a polling controller ([`firmware`]). An [`engine`] maps
//! presses to sound commands in one of three modes, pitching the
//! generative mode through a residue-class [`sieve`]. Sessions are logged,
//! replayed, rendered to audio ([`soundscape`]) and scored ([`metrics`]).
//!
//! [`pipeline::simulate_session`] runs the whole chain offline in virtual
//! time; [`engine::service::serve`] runs it live on sockets.

use thiserror::Error;

pub mod config;
pub mod engine;
pub mod firmware;
pub mod fsutil;
pub mod metrics;
pub mod osc;
pub mod pipeline;
pub mod sieve;
pub mod soundscape;

/// Any library error, tagged with the module it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("osc: {0}")]
    OscEncode(#[from] osc::EncodeError),
    #[error("osc: {0}")]
    OscDecode(#[from] osc::DecodeError),
    #[error("osc: {0}")]
    Slip(#[from] osc::slip::SlipError),
    #[error("firmware: {0}")]
    Firmware(#[from] firmware::FirmwareError),
    #[error("sieve: {0}")]
    Sieve(#[from] sieve::SieveError),
    #[error("engine: {0}")]
    Engine(#[from] engine::EngineError),
    #[error("engine: {0}")]
    Log(#[from] engine::LogError),
    #[error("engine: {0}")]
    Service(#[from] engine::service::ServiceError),
    #[error("soundscape: {0}")]
    Bank(#[from] soundscape::BankError),
    #[error("metrics: {0}")]
    Metrics(#[from] metrics::MetricsError),
    #[error("config: {0}")]
    Config(#[from] config::ConfigError),
    #[error("{module}: {context}: {source}")]
    Io {
        module: &'static str,
        context: String,
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
