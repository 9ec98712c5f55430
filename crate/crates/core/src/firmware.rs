//! Virtual-time model of the pad controller firmware.
//!
//! The controller loop pauses 50 ms, samples six 10-bit analog channels,
//! sends one OSC message per channel and then one `/triggerN` message per
//! pad. A pad reports `1` on the first pass after a contact that was held
//! longer than the debounce threshold has been released, `0` otherwise.
//!
//! All time arithmetic is done in integer nanoseconds so that threshold
//! comparisons are exact (`10.1 ms / 0.1 ms` is 101 iterations, not
//! 100.999...).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::SoundMode;
use crate::osc::{self, OscMessage, PAD_COUNT, SENSOR_ADDRESSES};

/// Virtual time between two passes of the controller main loop.
pub const POLL_PERIOD_MS: u64 = 50;

/// Full-scale value of the 10-bit analog converter.
pub const ADC_MAX: u16 = 1023;

const NS_PER_MS: f64 = 1_000_000.0;

/// Messages emitted per poll: six sensor channels plus twelve triggers.
pub const MESSAGES_PER_POLL: usize = SENSOR_ADDRESSES.len() + PAD_COUNT as usize;

fn ms_to_ns(ms: f64) -> u64 {
    (ms * NS_PER_MS).round() as u64
}

/// Analog inputs, in the order the firmware transmits them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorChannel {
    Bend1,
    Bend2,
    Optic,
    Piezo,
    Fsr,
    Slider,
}

impl SensorChannel {
    pub const ALL: [SensorChannel; 6] = [
        SensorChannel::Bend1,
        SensorChannel::Bend2,
        SensorChannel::Optic,
        SensorChannel::Piezo,
        SensorChannel::Fsr,
        SensorChannel::Slider,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn address(self) -> &'static str {
        SENSOR_ADDRESSES[self.index()]
    }

    pub fn from_address(address: &str) -> Option<Self> {
        SENSOR_ADDRESSES
            .iter()
            .position(|a| *a == address)
            .map(|i| Self::ALL[i])
    }

    pub fn name(self) -> &'static str {
        match self {
            SensorChannel::Bend1 => "bend1",
            SensorChannel::Bend2 => "bend2",
            SensorChannel::Optic => "optic",
            SensorChannel::Piezo => "piezo",
            SensorChannel::Fsr => "fsr",
            SensorChannel::Slider => "slider",
        }
    }
}

/// One reading of all six analog channels, each in `0..=1023`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SensorFrame {
    values: [u16; 6],
}

impl SensorFrame {
    pub fn get(&self, channel: SensorChannel) -> u16 {
        self.values[channel.index()]
    }

    pub fn set(&mut self, channel: SensorChannel, value: u16) -> Result<(), FirmwareError> {
        if value > ADC_MAX {
            return Err(FirmwareError::AdcRange { channel, value });
        }
        self.values[channel.index()] = value;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct DebounceConfig {
    pub threshold_iterations: u64,
    pub iteration_period_ms: f64,
}

impl Default for DebounceConfig {
    fn default() -> Self {
        Self {
            threshold_iterations: 100,
            iteration_period_ms: 0.1,
        }
    }
}

impl DebounceConfig {
    pub fn validate(&self) -> Result<(), FirmwareError> {
        if self.threshold_iterations < 1 {
            return Err(FirmwareError::Debounce("threshold_iterations must be ≥ 1".into()));
        }
        if !(self.iteration_period_ms.is_finite() && ms_to_ns(self.iteration_period_ms) >= 1) {
            return Err(FirmwareError::Debounce(
                "iteration_period_ms must be positive (at least 1 ns)".into(),
            ));
        }
        Ok(())
    }

    fn period_ns(&self) -> u64 {
        ms_to_ns(self.iteration_period_ms).max(1)
    }

    /// Longest contact that is still rejected as chatter.
    pub fn max_rejected_ms(&self) -> f64 {
        self.threshold_iterations as f64 * self.iteration_period_ms
    }
}

/// The debounce counter: the wait-for-release loop runs once per
/// iteration period while the line is held low, and the press counts
/// only if the loop ran more than `threshold_iterations` times.
pub fn button_pressed(contact_duration_ms: Option<f64>, cfg: &DebounceConfig) -> u8 {
    match contact_duration_ms {
        Some(d) if d > 0.0 => debounce_ns(ms_to_ns(d), cfg),
        _ => 0,
    }
}

fn debounce_ns(duration_ns: u64, cfg: &DebounceConfig) -> u8 {
    let iterations = duration_ns / cfg.period_ns();
    u8::from(iterations > cfg.threshold_iterations)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FirmwareError {
    #[error("{channel:?} value {value} outside 0..=1023")]
    AdcRange { channel: SensorChannel, value: u16 },
    #[error("invalid debounce config: {0}")]
    Debounce(String),
    #[error("script action {index}: {reason}")]
    Script { index: usize, reason: String },
    #[error("pad {pad}: contact at {start_ms} ms overlaps the previous contact")]
    Overlap { pad: u8, start_ms: f64 },
    #[error("invalid script file: {0}")]
    Parse(String),
}

/// A contact on one pad, in nanoseconds of virtual time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contact {
    pub pad: u8,
    pub start_ns: u64,
    pub end_ns: u64,
}

impl Contact {
    pub fn duration_ns(&self) -> u64 {
        self.end_ns - self.start_ns
    }
}

/// Scripted touch contacts per pad. Contacts on one pad never overlap.
#[derive(Debug, Clone, Default)]
pub struct PadLineState {
    contacts: Vec<Vec<Contact>>,
}

impl PadLineState {
    pub fn new() -> Self {
        Self {
            contacts: vec![Vec::new(); PAD_COUNT as usize],
        }
    }

    pub fn add_contact(&mut self, pad: u8, start_ms: f64, duration_ms: f64) -> Result<(), FirmwareError> {
        if !(1..=PAD_COUNT).contains(&pad) {
            return Err(FirmwareError::Script {
                index: 0,
                reason: format!("pad {pad} outside 1..=12"),
            });
        }
        let start_ns = ms_to_ns(start_ms);
        let contact = Contact {
            pad,
            start_ns,
            end_ns: start_ns + ms_to_ns(duration_ms),
        };
        let line = &mut self.contacts[pad as usize - 1];
        if line.last().is_some_and(|prev| contact.start_ns < prev.end_ns) {
            return Err(FirmwareError::Overlap { pad, start_ms });
        }
        line.push(contact);
        Ok(())
    }

    /// Whether the pad line is held low at `t_ns`.
    pub fn is_pressed(&self, pad: u8, t_ns: u64) -> bool {
        self.contacts[pad as usize - 1]
            .iter()
            .any(|c| c.start_ns <= t_ns && t_ns < c.end_ns)
    }

    /// Contacts released in the half-open window `(after_ns, upto_ns]`.
    fn released_in(&self, pad: u8, after_ns: Option<u64>, upto_ns: u64) -> impl Iterator<Item = &Contact> {
        self.contacts[pad as usize - 1]
            .iter()
            .filter(move |c| after_ns.is_none_or(|a| c.end_ns > a) && c.end_ns <= upto_ns)
    }

    pub fn last_release_ns(&self) -> Option<u64> {
        self.contacts.iter().flatten().map(|c| c.end_ns).max()
    }
}

/// Everything the controller remembers between passes.
#[derive(Debug, Clone)]
pub struct FirmwareState {
    pub cfg: DebounceConfig,
    pub frame: SensorFrame,
    pub pads: PadLineState,
    // qualifying releases not yet reported, per pad
    pending: [u32; PAD_COUNT as usize],
    last_poll_ns: Option<u64>,
}

impl FirmwareState {
    pub fn new(cfg: DebounceConfig) -> Self {
        Self {
            cfg,
            frame: SensorFrame::default(),
            pads: PadLineState::new(),
            pending: [0; PAD_COUNT as usize],
            last_poll_ns: None,
        }
    }

    /// One pass of the main loop at virtual time `now_ms`.
    ///
    /// Emits the six sensor channels, then `/trigger1`..`/trigger12`. A
    /// pad carries `1` once for every contact that passed the debounce
    /// count and was released since the previous pass. If two such
    /// contacts land in one window the second is reported on the next
    /// pass, so every jump is reported exactly once.
    pub fn poll_step(&mut self, now_ms: u64) -> Vec<OscMessage> {
        let now_ns = now_ms * 1_000_000;
        for pad in 1..=PAD_COUNT {
            let hits = self
                .pads
                .released_in(pad, self.last_poll_ns, now_ns)
                .filter(|c| debounce_ns(c.duration_ns(), &self.cfg) == 1)
                .count() as u32;
            self.pending[pad as usize - 1] += hits;
        }
        self.last_poll_ns = Some(now_ns);

        let mut out = Vec::with_capacity(MESSAGES_PER_POLL);
        for channel in SensorChannel::ALL {
            out.push(int_message(channel.address(), self.frame.get(channel) as i32));
        }
        for pad in 1..=PAD_COUNT {
            let slot = &mut self.pending[pad as usize - 1];
            let fired = *slot > 0;
            if fired {
                *slot -= 1;
            }
            out.push(int_message(&osc::trigger_address(pad), i32::from(fired)));
        }
        out
    }
}

fn int_message(address: &str, value: i32) -> OscMessage {
    OscMessage::with_int(address, value).expect("schema addresses are valid")
}

/// One entry of a jump script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScriptAction {
    Contact {
        #[serde(rename = "tMs")]
        t_ms: f64,
        pad: u8,
        #[serde(rename = "durationMs")]
        duration_ms: f64,
    },
    Sensor {
        #[serde(rename = "tMs")]
        t_ms: f64,
        channel: SensorChannel,
        value: u16,
    },
    Mode {
        #[serde(rename = "tMs")]
        t_ms: f64,
        mode: SoundMode,
    },
}

impl ScriptAction {
    pub fn t_ms(&self) -> f64 {
        match self {
            ScriptAction::Contact { t_ms, .. }
            | ScriptAction::Sensor { t_ms, .. }
            | ScriptAction::Mode { t_ms, .. } => *t_ms,
        }
    }

    fn end_ms(&self) -> f64 {
        match self {
            ScriptAction::Contact { t_ms, duration_ms, .. } => t_ms + duration_ms,
            other => other.t_ms(),
        }
    }
}

/// A scripted play session: pad contacts, sensor changes and mode clicks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct JumpScript {
    /// Total virtual time to simulate. Defaults to one poll past the
    /// last scripted event.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<f64>,
    pub actions: Vec<ScriptAction>,
}

impl JumpScript {
    pub fn from_json(text: &str) -> Result<Self, FirmwareError> {
        let script: JumpScript = serde_json::from_str(text).map_err(|e| FirmwareError::Parse(e.to_string()))?;
        script.validate()?;
        Ok(script)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }

    pub fn validate(&self) -> Result<(), FirmwareError> {
        let bad = |index: usize, reason: String| FirmwareError::Script { index, reason };
        if let Some(d) = self.duration_ms {
            if !(d.is_finite() && d >= 0.0) {
                return Err(bad(0, format!("durationMs {d} must be finite and ≥ 0")));
            }
        }
        let mut lines = PadLineState::new();
        let mut prev = 0.0f64;
        for (index, action) in self.actions.iter().enumerate() {
            let t = action.t_ms();
            if !(t.is_finite() && t >= 0.0) {
                return Err(bad(index, format!("tMs {t} must be finite and ≥ 0")));
            }
            if t < prev {
                return Err(bad(
                    index,
                    format!("tMs {t} is earlier than the previous action ({prev})"),
                ));
            }
            prev = t;
            match *action {
                ScriptAction::Contact { pad, duration_ms, .. } => {
                    if !(1..=PAD_COUNT).contains(&pad) {
                        return Err(bad(index, format!("pad {pad} outside 1..=12")));
                    }
                    if !(duration_ms.is_finite() && duration_ms >= 0.0) {
                        return Err(bad(index, format!("durationMs {duration_ms} must be finite and ≥ 0")));
                    }
                    lines
                        .add_contact(pad, t, duration_ms)
                        .map_err(|e| bad(index, e.to_string()))?;
                }
                ScriptAction::Sensor { channel, value, .. } => {
                    if value > ADC_MAX {
                        return Err(bad(index, format!("{} value {value} outside 0..=1023", channel.name())));
                    }
                }
                ScriptAction::Mode { .. } => {}
            }
        }
        Ok(())
    }

    /// Virtual time covered by [`run_script`], rounded down to whole polls.
    pub fn effective_duration_ms(&self) -> u64 {
        match self.duration_ms {
            Some(d) => d as u64,
            None => {
                let end = self.actions.iter().map(ScriptAction::end_ms).fold(0.0, f64::max);
                let polls = (end / POLL_PERIOD_MS as f64).ceil() as u64;
                (polls + 1) * POLL_PERIOD_MS
            }
        }
    }

    /// Mode clicks in script order, with times rounded to whole ms.
    pub fn mode_clicks(&self) -> impl Iterator<Item = (u64, SoundMode)> + '_ {
        self.actions.iter().filter_map(|a| match a {
            ScriptAction::Mode { t_ms, mode } => Some((t_ms.round() as u64, *mode)),
            _ => None,
        })
    }
}

/// An emitted message stamped with the virtual time of its poll.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedMessage {
    pub t_ms: u64,
    pub msg: OscMessage,
}

/// Drives [`FirmwareState::poll_step`] every 50 ms across the script.
///
/// Sensor changes take effect at their timestamp; a change scheduled at
/// exactly a poll instant is visible to that poll. Mode clicks are not
/// seen by the controller; see [`JumpScript::mode_clicks`].
pub fn run_script(script: &JumpScript, cfg: &DebounceConfig) -> Result<Vec<TimedMessage>, FirmwareError> {
    cfg.validate()?;
    script.validate()?;

    let mut state = FirmwareState::new(*cfg);
    let mut sensor_changes = Vec::new();
    for action in &script.actions {
        match *action {
            ScriptAction::Contact { t_ms, pad, duration_ms } => state.pads.add_contact(pad, t_ms, duration_ms)?,
            ScriptAction::Sensor { t_ms, channel, value } => sensor_changes.push((ms_to_ns(t_ms), channel, value)),
            ScriptAction::Mode { .. } => {}
        }
    }

    let polls = script.effective_duration_ms() / POLL_PERIOD_MS;
    let mut out = Vec::with_capacity(polls as usize * MESSAGES_PER_POLL);
    let mut changes = sensor_changes.into_iter().peekable();
    for k in 1..=polls {
        let now_ms = k * POLL_PERIOD_MS;
        while let Some(&(t_ns, channel, value)) = changes.peek() {
            if t_ns > now_ms * 1_000_000 {
                break;
            }
            state.frame.set(channel, value)?;
            changes.next();
        }
        out.extend(
            state
                .poll_step(now_ms)
                .into_iter()
                .map(|msg| TimedMessage { t_ms: now_ms, msg }),
        );
    }
    Ok(out)
}
