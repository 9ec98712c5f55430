//! The live event engine.
//!
//! Consumes pad-controller OSC messages and UI commands, tracks the active
//! sound mode and the continuous controls, turns pad presses into
//! [`SoundCommand`]s and records everything into a [`SessionLog`].
//!
//! The engine is single-owner and synchronous. [`service`] wraps it in an
//! event loop fed by UDP, SLIP and socket listeners.

pub mod protocol;
pub mod service;
mod session;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::firmware::{SensorChannel, ADC_MAX};
use crate::osc::{self, OscMessage, PAD_COUNT};
use crate::sieve::{self, PointSet, Sieve, SieveError};

pub use session::{replay, LogError, Record, SessionHeader, SessionLog, LOG_VERSION};

/// Default base note of the generative scale (C3).
pub const DEFAULT_BASE_MIDI: u8 = 48;

/// A pad number in `1..=12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Pad(u8);

impl Pad {
    pub fn new(n: u8) -> Option<Self> {
        (1..=PAD_COUNT).contains(&n).then_some(Pad(n))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based index, for arrays of per-pad state.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = Pad> {
        (1..=PAD_COUNT).map(Pad)
    }
}

impl TryFrom<u8> for Pad {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        Pad::new(n).ok_or_else(|| format!("pad {n} outside 1..=12"))
    }
}

impl From<Pad> for u8 {
    fn from(p: Pad) -> u8 {
        p.0
    }
}

impl fmt::Display for Pad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SoundMode {
    #[default]
    Cartoon,
    Animal,
    Generative,
}

impl SoundMode {
    pub const ALL: [SoundMode; 3] = [SoundMode::Cartoon, SoundMode::Animal, SoundMode::Generative];

    pub fn name(self) -> &'static str {
        match self {
            SoundMode::Cartoon => "cartoon",
            SoundMode::Animal => "animal",
            SoundMode::Generative => "generative",
        }
    }

    /// Prefix of the sound ids this mode produces.
    pub fn sound_prefix(self) -> &'static str {
        match self {
            SoundMode::Cartoon => "cartoon",
            SoundMode::Animal => "animal",
            SoundMode::Generative => "gen",
        }
    }

    pub fn sound_id(self, pad: Pad) -> String {
        format!("{}/{}", self.sound_prefix(), pad)
    }
}

impl fmt::Display for SoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SoundMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cartoon" => Ok(SoundMode::Cartoon),
            "animal" => Ok(SoundMode::Animal),
            "generative" | "gen" => Ok(SoundMode::Generative),
            other => Err(format!("unknown sound mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Press,
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadEvent {
    pub pad: Pad,
    pub edge: Edge,
    pub t_ms: u64,
}

/// A request to sound one voice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SoundCommand {
    pub t_ms: u64,
    pub pad: Pad,
    pub sound_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch: Option<u8>,
    pub gain: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("generative press on pad {pad}: {source}")]
    Generative { pad: Pad, source: SieveError },
    #[error("on_press called with a release event")]
    NotAPress,
}

/// Engine settings that determine the command stream.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub sieve: Sieve,
    pub base_midi: u8,
    pub initial_mode: SoundMode,
    /// Channel driving the master gain (`value / 1023`).
    pub gain_channel: Option<SensorChannel>,
    /// Channel driving the accent (`value / 1023`).
    pub accent_channel: Option<SensorChannel>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            sieve: sieve::parse_sieve(sieve::DEFAULT_SIEVE).expect("default sieve parses"),
            base_midi: DEFAULT_BASE_MIDI,
            initial_mode: SoundMode::Cartoon,
            gain_channel: Some(SensorChannel::Slider),
            accent_channel: Some(SensorChannel::Piezo),
        }
    }
}

/// Snapshot broadcast to UI clients whenever mode or master gain changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineStatus {
    pub mode: SoundMode,
    pub master_gain: f64,
    pub accent: f64,
}

/// Something the engine did in response to an input.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineUpdate {
    Pad(PadEvent),
    Sound(SoundCommand),
    State(EngineStatus),
    Sensor { channel: SensorChannel, value: u16 },
    Ignored,
    Error(EngineError),
}

#[derive(Debug)]
pub struct Engine {
    cfg: EngineConfig,
    scale: Result<PointSet, SieveError>,
    mode: SoundMode,
    master_gain: f64,
    accent: f64,
    held: [bool; PAD_COUNT as usize],
    last_sensor: [Option<u16>; 6],
    last_t: u64,
    unknown_addresses: u64,
    errors: u64,
    log: SessionLog,
}

impl Engine {
    pub fn new(cfg: EngineConfig, created_ms: u64) -> Self {
        let header = SessionHeader::new(&cfg, created_ms);
        Self {
            scale: cfg.sieve.scale(),
            mode: cfg.initial_mode,
            master_gain: 1.0,
            accent: 0.0,
            held: [false; PAD_COUNT as usize],
            last_sensor: [None; 6],
            last_t: 0,
            unknown_addresses: 0,
            errors: 0,
            log: SessionLog::new(header),
            cfg,
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn mode(&self) -> SoundMode {
        self.mode
    }

    pub fn master_gain(&self) -> f64 {
        self.master_gain
    }

    pub fn accent(&self) -> f64 {
        self.accent
    }

    pub fn status(&self) -> EngineStatus {
        EngineStatus {
            mode: self.mode,
            master_gain: self.master_gain,
            accent: self.accent,
        }
    }

    /// Messages at addresses outside the schema.
    pub fn unknown_count(&self) -> u64 {
        self.unknown_addresses
    }

    pub fn error_count(&self) -> u64 {
        self.errors
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    pub fn into_log(self) -> SessionLog {
        self.log
    }

    // Inputs arriving from several listeners may be stamped slightly out of
    // order; the log stays time-ordered by never moving backwards.
    fn clock(&mut self, t_ms: u64) -> u64 {
        self.last_t = self.last_t.max(t_ms);
        self.last_t
    }

    /// Handles one message from the pad controller.
    ///
    /// A `/triggerN` carrying `1` is a completed contact: it becomes a press
    /// followed immediately by the matching release. Sensor channels update
    /// the mapped controls and are logged whenever their value changes.
    pub fn ingest(&mut self, msg: &OscMessage, t_ms: u64) -> Vec<EngineUpdate> {
        let t = self.clock(t_ms);
        if let Some(n) = osc::parse_trigger_address(msg.address()) {
            let pad = Pad(n);
            return match msg.first_int() {
                Some(1) => {
                    let mut out = self.press(pad, t);
                    out.extend(self.release(pad, t));
                    out
                }
                _ => Vec::new(),
            };
        }
        if let Some(channel) = SensorChannel::from_address(msg.address()) {
            let Some(value) = msg
                .first_int()
                .and_then(|v| u16::try_from(v).ok())
                .filter(|&v| v <= ADC_MAX)
            else {
                self.unknown_addresses += 1;
                return vec![EngineUpdate::Ignored];
            };
            return self.apply_sensor(channel, value, t);
        }
        self.unknown_addresses += 1;
        vec![EngineUpdate::Ignored]
    }

    pub fn apply_sensor(&mut self, channel: SensorChannel, value: u16, t_ms: u64) -> Vec<EngineUpdate> {
        let t = self.clock(t_ms);
        let slot = &mut self.last_sensor[channel as usize];
        if *slot == Some(value) {
            return Vec::new();
        }
        *slot = Some(value);
        self.log.push(Record::Sensor {
            t_ms: t,
            channel,
            value,
        });

        let level = f64::from(value) / f64::from(ADC_MAX);
        let mut out = vec![EngineUpdate::Sensor { channel, value }];
        if self.cfg.accent_channel == Some(channel) {
            self.accent = level;
        }
        if self.cfg.gain_channel == Some(channel) && self.master_gain != level {
            self.master_gain = level;
            out.push(EngineUpdate::State(self.status()));
        }
        out
    }

    /// Press edge from any source. A press on a pad that is already held
    /// is ignored, so press and release strictly alternate per pad.
    pub fn press(&mut self, pad: Pad, t_ms: u64) -> Vec<EngineUpdate> {
        let t = self.clock(t_ms);
        if self.held[pad.index()] {
            return vec![EngineUpdate::Ignored];
        }
        self.held[pad.index()] = true;
        self.log.push(Record::Press { t_ms: t, pad });
        let event = PadEvent {
            pad,
            edge: Edge::Press,
            t_ms: t,
        };
        let mut out = vec![EngineUpdate::Pad(event)];
        match self.on_press(event) {
            Ok(cmd) => out.push(EngineUpdate::Sound(cmd)),
            Err(e) => {
                self.errors += 1;
                out.push(EngineUpdate::Error(e));
            }
        }
        out
    }

    pub fn release(&mut self, pad: Pad, t_ms: u64) -> Vec<EngineUpdate> {
        let t = self.clock(t_ms);
        if !self.held[pad.index()] {
            return vec![EngineUpdate::Ignored];
        }
        self.held[pad.index()] = false;
        self.log.push(Record::Release { t_ms: t, pad });
        vec![EngineUpdate::Pad(PadEvent {
            pad,
            edge: Edge::Release,
            t_ms: t,
        })]
    }

    /// Switches the sound mode for all later presses. Re-selecting the
    /// current mode is logged but changes nothing.
    pub fn set_mode(&mut self, mode: SoundMode, t_ms: u64) -> Vec<EngineUpdate> {
        let t = self.clock(t_ms);
        self.mode = mode;
        self.log.push(Record::Mode { t_ms: t, mode });
        vec![EngineUpdate::State(self.status())]
    }

    /// Maps a press to its sound command and appends it to the log.
    ///
    /// Sample modes produce `<mode>/<pad>`; generative mode produces
    /// `gen/<pad>` with the pad's scale degree as pitch. Gain is
    /// `master_gain × (0.5 + 0.5 × accent)`.
    pub fn on_press(&mut self, event: PadEvent) -> Result<SoundCommand, EngineError> {
        if event.edge != Edge::Press {
            return Err(EngineError::NotAPress);
        }
        let pitch = match self.mode {
            SoundMode::Generative => {
                let degree = event.pad.index() as u64;
                let pitch = self
                    .scale
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|scale| sieve::to_pitch_in(scale, degree, self.cfg.base_midi))
                    .map_err(|source| EngineError::Generative { pad: event.pad, source })?;
                Some(pitch)
            }
            SoundMode::Cartoon | SoundMode::Animal => None,
        };
        let cmd = SoundCommand {
            t_ms: event.t_ms,
            pad: event.pad,
            sound_id: self.mode.sound_id(event.pad),
            pitch,
            gain: self.master_gain * (0.5 + 0.5 * self.accent),
        };
        self.log.push(Record::Sound(cmd.clone()));
        Ok(cmd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pad(n: u8) -> Pad {
        Pad::new(n).unwrap()
    }

    fn osc(addr: &str, v: i32) -> OscMessage {
        OscMessage::with_int(addr, v).unwrap()
    }

    fn sounds(updates: &[EngineUpdate]) -> Vec<SoundCommand> {
        updates
            .iter()
            .filter_map(|u| match u {
                EngineUpdate::Sound(c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn trigger_becomes_press_and_release() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        let out = e.ingest(&osc("/trigger3", 1), 100);
        assert_eq!(
            out[0],
            EngineUpdate::Pad(PadEvent {
                pad: pad(3),
                edge: Edge::Press,
                t_ms: 100
            })
        );
        assert_eq!(sounds(&out).len(), 1);
        assert_eq!(
            out.last().unwrap(),
            &EngineUpdate::Pad(PadEvent {
                pad: pad(3),
                edge: Edge::Release,
                t_ms: 100
            })
        );
        assert!(e.ingest(&osc("/trigger3", 0), 150).is_empty());
    }

    #[test]
    fn slider_and_piezo_drive_gain() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        e.ingest(&osc("/Slider_data", 1023), 0);
        assert_eq!(e.master_gain(), 1.0);
        e.ingest(&osc("/Slider_data", 0), 0);
        assert_eq!(e.master_gain(), 0.0);
        e.ingest(&osc("/piezo_data", 1023), 0);
        assert_eq!(e.accent(), 1.0);
        e.ingest(&osc("/bend_data1", 500), 0);
        assert_eq!(e.log().records().len(), 4);
        // repeats are not re-logged
        e.ingest(&osc("/bend_data1", 500), 50);
        assert_eq!(e.log().records().len(), 4);
    }

    #[test]
    fn unknown_addresses_are_counted() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        assert_eq!(e.ingest(&osc("/nope", 1), 0), vec![EngineUpdate::Ignored]);
        e.ingest(&osc("/trigger13", 1), 0);
        e.ingest(&osc("/Slider_data", 5000), 0);
        assert_eq!(e.unknown_count(), 3);
        assert!(e.log().records().is_empty());
    }

    #[test]
    fn mode_selection() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        assert_eq!(e.mode(), SoundMode::Cartoon);
        let first = sounds(&e.press(pad(2), 0));
        e.release(pad(2), 10);
        e.set_mode(SoundMode::Animal, 20);
        let second = sounds(&e.press(pad(2), 30));
        assert_eq!(first[0].sound_id, "cartoon/2");
        assert_eq!(second[0].sound_id, "animal/2");

        e.set_mode(SoundMode::Animal, 40);
        assert_eq!(e.mode(), SoundMode::Animal);
        let modes = e
            .log()
            .records()
            .iter()
            .filter(|r| matches!(r, Record::Mode { .. }))
            .count();
        assert_eq!(modes, 2);
    }

    #[test]
    fn on_press_examples() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        e.set_mode(SoundMode::Animal, 0);
        let cmd = sounds(&e.press(pad(5), 10)).remove(0);
        assert_eq!(cmd.sound_id, "animal/5");
        assert_eq!(cmd.gain, 0.5);
        assert_eq!(cmd.pitch, None);
        assert_eq!(cmd.t_ms, 10);

        e.set_mode(SoundMode::Generative, 20);
        let p1 = sounds(&e.press(pad(1), 30)).remove(0);
        let p7 = sounds(&e.press(pad(7), 30)).remove(0);
        assert_eq!((p1.sound_id.as_str(), p1.pitch), ("gen/1", Some(48)));
        assert_eq!((p7.sound_id.as_str(), p7.pitch), ("gen/7", Some(60)));

        assert_eq!(
            e.on_press(PadEvent {
                pad: pad(1),
                edge: Edge::Release,
                t_ms: 40
            }),
            Err(EngineError::NotAPress)
        );
    }

    #[test]
    fn accent_raises_gain() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        e.apply_sensor(SensorChannel::Slider, 1023, 0);
        e.apply_sensor(SensorChannel::Piezo, 1023, 0);
        assert_eq!(sounds(&e.press(pad(1), 0))[0].gain, 1.0);
    }

    #[test]
    fn empty_scale_logs_press_without_sound() {
        let cfg = EngineConfig {
            sieve: sieve::parse_sieve("2@0&2@1").unwrap(),
            initial_mode: SoundMode::Generative,
            ..EngineConfig::default()
        };
        let mut e = Engine::new(cfg, 0);
        let out = e.press(pad(1), 0);
        assert!(matches!(
            out.last(),
            Some(EngineUpdate::Error(EngineError::Generative { .. }))
        ));
        assert_eq!(e.error_count(), 1);
        assert_eq!(e.log().records(), &[Record::Press { t_ms: 0, pad: pad(1) }]);
    }

    #[test]
    fn held_pad_ignores_repeat_press() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        assert_eq!(sounds(&e.press(pad(4), 0)).len(), 1);
        assert_eq!(e.press(pad(4), 10), vec![EngineUpdate::Ignored]);
        assert_eq!(e.release(pad(9), 10), vec![EngineUpdate::Ignored]);
        e.release(pad(4), 20);
        assert_eq!(sounds(&e.press(pad(4), 30)).len(), 1);
    }

    #[test]
    fn clock_never_goes_backwards() {
        let mut e = Engine::new(EngineConfig::default(), 0);
        e.press(pad(1), 100);
        e.release(pad(1), 90);
        let times: Vec<u64> = e.log().records().iter().map(Record::t_ms).collect();
        assert_eq!(times, vec![100, 100, 100]);
    }

    #[test]
    fn pad_and_mode_parsing() {
        assert!(Pad::new(0).is_none());
        assert!(Pad::new(13).is_none());
        assert_eq!(Pad::all().count(), 12);
        assert_eq!("generative".parse::<SoundMode>(), Ok(SoundMode::Generative));
        assert!("jazz".parse::<SoundMode>().is_err());
        assert_eq!(serde_json::to_string(&SoundMode::Animal).unwrap(), "\"animal\"");
        assert!(serde_json::from_str::<Pad>("13").is_err());
    }
}
