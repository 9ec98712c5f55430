//! Offline multitrack rendering of a session's sound commands.
//!
//! Each command becomes one voice starting at its timestamp. Voices are
//! summed on a fixed-point mix bus (`i64`, [`MIX_ONE`] = full scale) so
//! that mixing is exactly associative: rendering two command sets
//! separately and adding the buses gives the same bus as rendering them
//! together, and per-pad stems add up to the mix exactly. The bus is hard
//! clamped to `[-1, 1]` and quantized to 16-bit PCM only on output.

pub mod wav;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::engine::{self, EngineConfig, Pad, SessionLog, SoundCommand, SoundMode};
use crate::osc::PAD_COUNT;
use crate::sieve::{self, Sieve};

pub const DEFAULT_SAMPLE_RATE: u32 = 44_100;

/// Length of the synthesized fallback tone.
pub const FALLBACK_TONE_MS: u32 = 400;

/// Peak envelope amplitude of synthesized tones.
pub const TONE_PEAK: f64 = 0.8;

/// Full scale on the mix bus.
pub const MIX_ONE: i64 = 1 << 32;

const SLOTS: usize = SoundMode::ALL.len() * PAD_COUNT as usize;

#[derive(Debug, Error)]
pub enum BankError {
    #[error("cannot read manifest {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid manifest {path}: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

/// Where a slot's audio comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SoundSource {
    Sample { path: PathBuf, samples: Arc<Vec<f64>> },
    Tone { midi: u8, duration_ms: u32 },
}

/// A slot that could not use its manifest entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankWarning {
    pub slot: String,
    pub reason: String,
}

impl std::fmt::Display for BankWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} (using fallback tone)", self.slot, self.reason)
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ManifestEntry {
    File(PathBuf),
    Tone {
        tone: u8,
        #[serde(rename = "durationMs", default = "default_tone_ms")]
        duration_ms: u32,
    },
}

fn default_tone_ms() -> u32 {
    FALLBACK_TONE_MS
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    slots: BTreeMap<String, ManifestEntry>,
}

/// `"animal/3"` style slot key. Accepts `gen` or `generative`.
pub fn parse_slot_key(key: &str) -> Option<(SoundMode, Pad)> {
    let (mode, pad) = key.split_once('/')?;
    let mode: SoundMode = mode.parse().ok()?;
    let pad = Pad::new(pad.parse().ok()?)?;
    Some((mode, pad))
}

/// Sound sources for all 36 (mode, pad) slots.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBank {
    slots: Vec<SoundSource>,
}

fn slot_index(mode: SoundMode, pad: Pad) -> usize {
    mode as usize * PAD_COUNT as usize + pad.index()
}

/// Fallback pitch for a pad: its degree in the generative scale, or a
/// chromatic step above the base note when the sieve is empty.
fn fallback_pitch(sieve: &Sieve, base_midi: u8, pad: Pad) -> u8 {
    sieve
        .to_pitch(pad.index() as u64, base_midi)
        .unwrap_or_else(|_| base_midi.saturating_add(pad.index() as u8).min(127))
}

impl SampleBank {
    /// A bank of fallback tones only.
    pub fn fallback(sieve: &Sieve, base_midi: u8) -> Self {
        let slots = (0..SLOTS)
            .map(|i| {
                let pad = Pad::new((i % PAD_COUNT as usize) as u8 + 1).expect("index in range");
                SoundSource::Tone {
                    midi: fallback_pitch(sieve, base_midi, pad),
                    duration_ms: FALLBACK_TONE_MS,
                }
            })
            .collect();
        Self { slots }
    }

    pub fn for_engine(cfg: &EngineConfig) -> Self {
        Self::fallback(&cfg.sieve, cfg.base_midi)
    }

    /// Loads a JSON manifest of the form
    /// `{"slots": {"animal/3": "birds.wav", "cartoon/1": {"tone": 72, "durationMs": 300}}}`.
    ///
    /// Relative file paths resolve against the manifest's directory. A
    /// sample that is missing, unreadable or at a different sample rate
    /// leaves its slot on the fallback tone and produces a warning.
    pub fn load(
        manifest: &Path,
        sieve: &Sieve,
        base_midi: u8,
        sample_rate: u32,
    ) -> Result<(Self, Vec<BankWarning>), BankError> {
        let text = std::fs::read_to_string(manifest).map_err(|source| BankError::Read {
            path: manifest.to_owned(),
            source,
        })?;
        let invalid = |reason: String| BankError::Invalid {
            path: manifest.to_owned(),
            reason,
        };
        let parsed: Manifest = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
        let base_dir = manifest.parent().unwrap_or(Path::new("."));

        let mut bank = Self::fallback(sieve, base_midi);
        let mut warnings = Vec::new();
        for (key, entry) in parsed.slots {
            let (mode, pad) = parse_slot_key(&key).ok_or_else(|| invalid(format!("bad slot key {key:?}")))?;
            let slot = &mut bank.slots[slot_index(mode, pad)];
            match entry {
                ManifestEntry::Tone { tone, duration_ms } => {
                    if tone > 127 {
                        return Err(invalid(format!("{key}: tone {tone} outside 0..=127")));
                    }
                    *slot = SoundSource::Tone {
                        midi: tone,
                        duration_ms,
                    };
                }
                ManifestEntry::File(rel) => {
                    let path = base_dir.join(&rel);
                    match wav::read_mono(&path) {
                        Ok(m) if m.sample_rate == sample_rate => {
                            *slot = SoundSource::Sample {
                                path,
                                samples: Arc::new(m.samples),
                            };
                        }
                        Ok(m) => warnings.push(BankWarning {
                            slot: key,
                            reason: format!("{} is {} Hz, expected {sample_rate} Hz", path.display(), m.sample_rate),
                        }),
                        Err(e) => warnings.push(BankWarning {
                            slot: key,
                            reason: format!("{}: {e}", path.display()),
                        }),
                    }
                }
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok((bank, warnings))
    }

    pub fn source(&self, mode: SoundMode, pad: Pad) -> &SoundSource {
        &self.slots[slot_index(mode, pad)]
    }

    pub fn is_fallback(&self, mode: SoundMode, pad: Pad, sieve: &Sieve, base_midi: u8) -> bool {
        *self.source(mode, pad)
            == SoundSource::Tone {
                midi: fallback_pitch(sieve, base_midi, pad),
                duration_ms: FALLBACK_TONE_MS,
            }
    }
}

pub fn midi_to_hz(midi: u8) -> f64 {
    440.0 * 2f64.powf((f64::from(midi) - 69.0) / 12.0)
}

/// An exponentially decaying sine: peak envelope [`TONE_PEAK`], decaying
/// by 60 dB over the buffer.
pub fn synth_tone(midi_pitch: u8, duration_ms: u32, sample_rate: u32) -> Vec<f64> {
    let len = (f64::from(duration_ms) * f64::from(sample_rate) / 1000.0).round() as usize;
    let freq = midi_to_hz(midi_pitch);
    let tau = (f64::from(duration_ms) / 1000.0) / 1000f64.ln();
    let sr = f64::from(sample_rate);
    (0..len)
        .map(|n| {
            let t = n as f64 / sr;
            TONE_PEAK * (-t / tau).exp() * (TAU * freq * t).sin()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderConfig {
    pub sample_rate: u32,
    /// Also produce one track per pad.
    pub stems: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            sample_rate: DEFAULT_SAMPLE_RATE,
            stems: false,
        }
    }
}

/// One sounding voice.
#[derive(Debug, Clone)]
pub struct Voice {
    pub pad: Pad,
    pub start_sample: usize,
    pub gain: f64,
    pub samples: Arc<Vec<f64>>,
}

impl Voice {
    pub fn end_sample(&self) -> usize {
        self.start_sample + self.samples.len()
    }
}

/// Rendered buses on the fixed-point scale.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub sample_rate: u32,
    pub mix: Vec<i64>,
    /// Per-pad tracks, index 0 is pad 1. Present in stems mode.
    pub stems: Option<Vec<Vec<i64>>>,
}

/// Bus value to float, without clamping.
pub fn bus_to_f64(v: i64) -> f64 {
    v as f64 / MIX_ONE as f64
}

pub fn bus_to_pcm16(bus: &[i64]) -> Vec<i16> {
    bus.iter()
        .map(|&v| {
            let x = bus_to_f64(v.clamp(-MIX_ONE, MIX_ONE));
            (x * 32767.0).round() as i16
        })
        .collect()
}

impl RenderOutput {
    pub fn mix_f64(&self) -> Vec<f64> {
        self.mix.iter().map(|&v| bus_to_f64(v)).collect()
    }

    pub fn mix_pcm16(&self) -> Vec<i16> {
        bus_to_pcm16(&self.mix)
    }

    pub fn duration_ms(&self) -> f64 {
        self.mix.len() as f64 * 1000.0 / f64::from(self.sample_rate)
    }

    /// Writes `mix_path` and, in stems mode, `pad_<N>.wav` beside it.
    pub fn write(&self, mix_path: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut written = vec![mix_path.to_owned()];
        wav::write_pcm16(mix_path, &self.mix_pcm16(), self.sample_rate)?;
        if let Some(stems) = &self.stems {
            let dir = mix_path.parent().unwrap_or(Path::new("."));
            for (i, stem) in stems.iter().enumerate() {
                let path = dir.join(format!("pad_{}.wav", i + 1));
                wav::write_pcm16(&path, &bus_to_pcm16(stem), self.sample_rate)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

fn mode_of(sound_id: &str) -> Option<SoundMode> {
    sound_id.split_once('/').and_then(|(m, _)| m.parse().ok())
}

/// Resolves each command to a voice, synthesizing tones once per
/// (pitch, duration).
pub fn voices(commands: &[SoundCommand], bank: &SampleBank, sample_rate: u32) -> Vec<Voice> {
    let mut tones: HashMap<(u8, u32), Arc<Vec<f64>>> = HashMap::new();
    commands
        .iter()
        .map(|cmd| {
            let source = mode_of(&cmd.sound_id).map(|m| bank.source(m, cmd.pad));
            let samples = match source {
                Some(SoundSource::Sample { samples, .. }) => Arc::clone(samples),
                Some(&SoundSource::Tone { midi, duration_ms }) => {
                    let pitch = cmd.pitch.unwrap_or(midi);
                    Arc::clone(
                        tones
                            .entry((pitch, duration_ms))
                            .or_insert_with(|| Arc::new(synth_tone(pitch, duration_ms, sample_rate))),
                    )
                }
                None => {
                    let pitch = cmd.pitch.unwrap_or(engine::DEFAULT_BASE_MIDI);
                    Arc::clone(
                        tones
                            .entry((pitch, FALLBACK_TONE_MS))
                            .or_insert_with(|| Arc::new(synth_tone(pitch, FALLBACK_TONE_MS, sample_rate))),
                    )
                }
            };
            Voice {
                pad: cmd.pad,
                start_sample: (cmd.t_ms as f64 * f64::from(sample_rate) / 1000.0).round() as usize,
                gain: cmd.gain.clamp(0.0, 1.0),
                samples,
            }
        })
        .collect()
}

fn add_voice(bus: &mut [i64], voice: &Voice) {
    let out = &mut bus[voice.start_sample..voice.end_sample()];
    for (dst, &x) in out.iter_mut().zip(voice.samples.iter()) {
        *dst += (x * voice.gain * MIX_ONE as f64).round() as i64;
    }
}

/// Mixes the given commands. Output length is the end of the last voice.
pub fn render_commands(commands: &[SoundCommand], bank: &SampleBank, cfg: &RenderConfig) -> RenderOutput {
    let voices = voices(commands, bank, cfg.sample_rate);
    let len = voices.iter().map(Voice::end_sample).max().unwrap_or(0);
    let mut mix = vec![0i64; len];
    let mut stems = cfg.stems.then(|| vec![vec![0i64; len]; PAD_COUNT as usize]);
    for v in &voices {
        add_voice(&mut mix, v);
        if let Some(stems) = stems.as_mut() {
            add_voice(&mut stems[v.pad.index()], v);
        }
    }
    RenderOutput {
        sample_rate: cfg.sample_rate,
        mix,
        stems,
    }
}

/// Renders the sound commands recorded in a session log.
pub fn render(log: &SessionLog, bank: &SampleBank, cfg: &RenderConfig) -> RenderOutput {
    render_commands(&log.commands(), bank, cfg)
}

/// Counts rising crossings of `|x| >= threshold` that follow at least
/// 50 ms below the threshold. The start of the buffer counts as silence.
pub fn onset_count(buffer: &[f64], sample_rate: u32, threshold: f64) -> usize {
    let quiet_needed = (0.050 * f64::from(sample_rate)).round() as usize;
    let mut quiet = quiet_needed;
    let mut onsets = 0;
    for &x in buffer {
        if x.abs() >= threshold {
            if quiet >= quiet_needed {
                onsets += 1;
            }
            quiet = 0;
        } else {
            quiet = quiet.saturating_add(1);
        }
    }
    onsets
}

/// Scale used for a session's fallback tones.
pub fn bank_for_log(log: &SessionLog) -> SampleBank {
    match sieve::parse_sieve(&log.header().sieve) {
        Ok(s) => SampleBank::fallback(&s, log.header().base_midi),
        Err(_) => SampleBank::for_engine(&EngineConfig::default()),
    }
}
