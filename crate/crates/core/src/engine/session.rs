//! Session logs: JSON Lines, one record per line.
//!
//! The first line is the header (`"kind": "header"`) carrying the engine
//! settings; every following line is a record whose `kind` is one of
//! `press`, `release`, `mode`, `sensor` or `sound`. Records are
//! time-ordered. Input records (press, release, mode, sensor) are enough to
//! rebuild the sound records, which is what [`replay`] does.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Engine, EngineConfig, EngineUpdate, Pad, SoundCommand, SoundMode};
use crate::firmware::SensorChannel;
use crate::fsutil;
use crate::sieve;

pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SessionHeader {
    pub version: u32,
    pub sieve: String,
    pub base_midi: u8,
    pub initial_mode: SoundMode,
    pub gain_channel: Option<SensorChannel>,
    pub accent_channel: Option<SensorChannel>,
    pub created_ms: u64,
}

impl SessionHeader {
    pub fn new(cfg: &EngineConfig, created_ms: u64) -> Self {
        Self {
            version: LOG_VERSION,
            sieve: cfg.sieve.to_string(),
            base_midi: cfg.base_midi,
            initial_mode: cfg.initial_mode,
            gain_channel: cfg.gain_channel,
            accent_channel: cfg.accent_channel,
            created_ms,
        }
    }

    pub fn engine_config(&self) -> Result<EngineConfig, LogError> {
        let sieve = sieve::parse_sieve(&self.sieve).map_err(|e| LogError::Header(e.to_string()))?;
        Ok(EngineConfig {
            sieve,
            base_midi: self.base_midi,
            initial_mode: self.initial_mode,
            gain_channel: self.gain_channel,
            accent_channel: self.accent_channel,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Press {
        #[serde(rename = "tMs")]
        t_ms: u64,
        pad: Pad,
    },
    Release {
        #[serde(rename = "tMs")]
        t_ms: u64,
        pad: Pad,
    },
    Mode {
        #[serde(rename = "tMs")]
        t_ms: u64,
        mode: SoundMode,
    },
    Sensor {
        #[serde(rename = "tMs")]
        t_ms: u64,
        channel: SensorChannel,
        value: u16,
    },
    Sound(SoundCommand),
}

impl Record {
    pub fn t_ms(&self) -> u64 {
        match self {
            Record::Press { t_ms, .. }
            | Record::Release { t_ms, .. }
            | Record::Mode { t_ms, .. }
            | Record::Sensor { t_ms, .. } => *t_ms,
            Record::Sound(cmd) => cmd.t_ms,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogError {
    #[error("session log is empty")]
    Empty,
    #[error("bad header: {0}")]
    Header(String),
    #[error("record {index}: {reason}")]
    Record { index: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    header: SessionHeader,
    records: Vec<Record>,
}

impl SessionLog {
    pub fn new(header: SessionHeader) -> Self {
        Self {
            header,
            records: Vec::new(),
        }
    }

    pub fn header(&self) -> &SessionHeader {
        &self.header
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub(crate) fn push(&mut self, record: Record) {
        debug_assert!(self.records.last().is_none_or(|r| r.t_ms() <= record.t_ms()));
        self.records.push(record);
    }

    /// Sound commands as recorded live.
    pub fn commands(&self) -> Vec<SoundCommand> {
        self.records
            .iter()
            .filter_map(|r| match r {
                Record::Sound(cmd) => Some(cmd.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct HeaderLine<'a> {
            kind: &'static str,
            #[serde(flatten)]
            header: &'a SessionHeader,
        }
        let header = HeaderLine {
            kind: "header",
            header: &self.header,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, LogError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines.next().ok_or(LogError::Empty)?;
        let mut value: serde_json::Value = serde_json::from_str(first).map_err(|e| LogError::Header(e.to_string()))?;
        let kind = value
            .as_object_mut()
            .and_then(|m| m.remove("kind"))
            .ok_or_else(|| LogError::Header("missing \"kind\"".into()))?;
        if kind != "header" {
            return Err(LogError::Header(format!(
                "first record has kind {kind}, expected \"header\""
            )));
        }
        let header: SessionHeader = serde_json::from_value(value).map_err(|e| LogError::Header(e.to_string()))?;
        if header.version != LOG_VERSION {
            return Err(LogError::Header(format!("unsupported version {}", header.version)));
        }
        header.engine_config()?;

        let mut records = Vec::new();
        let mut last_t = 0;
        for (index, line) in lines.enumerate() {
            let record: Record = serde_json::from_str(line).map_err(|e| LogError::Record {
                index,
                reason: e.to_string(),
            })?;
            if record.t_ms() < last_t {
                return Err(LogError::Record {
                    index,
                    reason: format!("tMs {} earlier than previous record ({last_t})", record.t_ms()),
                });
            }
            last_t = record.t_ms();
            records.push(record);
        }
        Ok(Self { header, records })
    }

    pub fn write_to(&self, path: &Path) -> Result<(), LogError> {
        fsutil::write_atomic(path, self.to_jsonl().as_bytes()).map_err(|e| LogError::Io(e.to_string()))
    }

    pub fn read_from(path: &Path) -> Result<Self, LogError> {
        let text = std::fs::read_to_string(path).map_err(|e| LogError::Io(format!("{}: {e}", path.display())))?;
        Self::from_jsonl(&text)
    }
}

/// Rebuilds the command stream from the log's input records alone.
///
/// A fresh engine configured from the header is fed every press, release,
/// mode and sensor record in order; the recorded sound lines are not
/// consulted. For a log written by the engine the result equals
/// [`SessionLog::commands`].
pub fn replay(log: &SessionLog) -> Result<Vec<SoundCommand>, LogError> {
    let mut engine = Engine::new(log.header.engine_config()?, log.header.created_ms);
    let mut out = Vec::new();
    for record in &log.records {
        let updates = match *record {
            Record::Press { t_ms, pad } => engine.press(pad, t_ms),
            Record::Release { t_ms, pad } => engine.release(pad, t_ms),
            Record::Mode { t_ms, mode } => engine.set_mode(mode, t_ms),
            Record::Sensor { t_ms, channel, value } => engine.apply_sensor(channel, value, t_ms),
            Record::Sound(_) => continue,
        };
        out.extend(updates.into_iter().filter_map(|u| match u {
            EngineUpdate::Sound(cmd) => Some(cmd),
            _ => None,
        }));
    }
    Ok(out)
}
