//! Objective music-parameter scores for a session, graded A..E.
//!
//! Proxy definitions (all clamped to `[0, 1]`):
//!
//! * rhythm variety: Shannon entropy of inter-onset intervals binned at
//!   50 ms, divided by `ln(number of intervals)`; 0 below three onsets.
//! * pitch sensation: distinct pitch classes of generative commands plus
//!   distinct sound ids of sample-mode commands, over 12.
//! * texture change: `2σ / max` of the number of sounding voices sampled
//!   every 100 ms, voices lasting [`NOMINAL_VOICE_MS`].
//! * sound response: fraction of presses answered on the same pad within
//!   50 ms.
//! * dynamic variance: standard deviation of command gains over 0.5.
//! * timbre change: mode switches plus sound-id changes between
//!   consecutive commands, over `commands - 1`.
//!
//! Any change to these definitions bumps [`PROXY_VERSION`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{Record, SessionLog, SoundCommand};

pub const PROXY_VERSION: u32 = 1;

/// Voice length assumed when estimating polyphony from a log.
pub const NOMINAL_VOICE_MS: u64 = 400;

const RHYTHM_BIN_MS: u64 = 50;
const TEXTURE_STEP_MS: u64 = 100;
const RESPONSE_WINDOW_MS: u64 = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("score {0} outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Grade {
    A,
    B,
    C,
    D,
    E,
}

impl Grade {
    pub const ALL: [Grade; 5] = [Grade::A, Grade::B, Grade::C, Grade::D, Grade::E];

    pub fn label(self) -> &'static str {
        match self {
            Grade::A => "Excellent",
            Grade::B => "Good",
            Grade::C => "Medium",
            Grade::D => "Not bad",
            Grade::E => "No good",
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Half-open bands: A ≥ 0.9, B ≥ 0.8, C ≥ 0.7, D ≥ 0.6, E below.
pub fn grade(score: f64) -> Result<Grade, MetricsError> {
    if !(0.0..=1.0).contains(&score) {
        return Err(MetricsError::OutOfRange(score));
    }
    Ok(match score {
        s if s >= 0.9 => Grade::A,
        s if s >= 0.8 => Grade::B,
        s if s >= 0.7 => Grade::C,
        s if s >= 0.6 => Grade::D,
        _ => Grade::E,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Parameter {
    RhythmVariety,
    PitchSensation,
    TextureChange,
    SoundResponse,
    DynamicVariance,
    TimbreChange,
}

impl Parameter {
    pub const ALL: [Parameter; 6] = [
        Parameter::RhythmVariety,
        Parameter::PitchSensation,
        Parameter::TextureChange,
        Parameter::SoundResponse,
        Parameter::DynamicVariance,
        Parameter::TimbreChange,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Parameter::RhythmVariety => "Rhythm Variety",
            Parameter::PitchSensation => "Pitch Sensation",
            Parameter::TextureChange => "Texture Change",
            Parameter::SoundResponse => "Sound Response",
            Parameter::DynamicVariance => "Dynamic Variance",
            Parameter::TimbreChange => "Timbre Change",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricReport {
    pub proxy_version: u32,
    pub scores: BTreeMap<Parameter, f64>,
    pub grades: BTreeMap<Parameter, Grade>,
}

impl MetricReport {
    fn from_scores(scores: [f64; 6]) -> Self {
        let scores: BTreeMap<_, _> = Parameter::ALL
            .into_iter()
            .zip(scores.map(|s| if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) }))
            .collect();
        let grades = scores
            .iter()
            .map(|(&p, &s)| (p, grade(s).expect("clamped score")))
            .collect();
        Self {
            proxy_version: PROXY_VERSION,
            scores,
            grades,
        }
    }

    pub fn score(&self, p: Parameter) -> f64 {
        self.scores[&p]
    }

    pub fn grade(&self, p: Parameter) -> Grade {
        self.grades[&p]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Grade rows by parameter columns, one mark per column, then scores.
    pub fn to_table(&self) -> String {
        let width = Parameter::ALL.iter().map(|p| p.label().len()).max().unwrap_or(0) + 2;
        let mut out = format!("{:<12}", "");
        for p in Parameter::ALL {
            out.push_str(&format!("{:^width$}", p.label()));
        }
        out.push('\n');
        for g in Grade::ALL {
            out.push_str(&format!("{:<12}", format!("{g} {}", g.label())));
            for p in Parameter::ALL {
                let mark = if self.grade(p) == g { "●" } else { "" };
                out.push_str(&format!("{mark:^width$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<12}", "score"));
        for p in Parameter::ALL {
            out.push_str(&format!("{:^width$}", format!("{:.3}", self.score(p))));
        }
        out.push('\n');
        out
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn rhythm_variety(cmds: &[SoundCommand]) -> f64 {
    if cmds.len() < 3 {
        return 0.0;
    }
    let mut bins: BTreeMap<u64, usize> = BTreeMap::new();
    for w in cmds.windows(2) {
        *bins.entry((w[1].t_ms - w[0].t_ms) / RHYTHM_BIN_MS).or_default() += 1;
    }
    let n = (cmds.len() - 1) as f64;
    let entropy: f64 = bins
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    // a single bin sums to -0.0
    (entropy / n.ln()).max(0.0)
}

fn pitch_sensation(cmds: &[SoundCommand]) -> f64 {
    let mut classes = BTreeSet::new();
    let mut samples = BTreeSet::new();
    for c in cmds {
        match c.pitch {
            Some(p) => {
                classes.insert(p % 12);
            }
            None => {
                samples.insert(c.sound_id.as_str());
            }
        }
    }
    (classes.len() + samples.len()) as f64 / 12.0
}

fn texture_change(cmds: &[SoundCommand]) -> f64 {
    let (Some(first), Some(end)) = (
        cmds.iter().map(|c| c.t_ms).min(),
        cmds.iter().map(|c| c.t_ms + NOMINAL_VOICE_MS).max(),
    ) else {
        return 0.0;
    };
    let poly: Vec<f64> = (first..end)
        .step_by(TEXTURE_STEP_MS as usize)
        .map(|t| {
            cmds.iter()
                .filter(|c| c.t_ms <= t && t < c.t_ms + NOMINAL_VOICE_MS)
                .count() as f64
        })
        .collect();
    let max = poly.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    2.0 * std_dev(&poly) / max
}

fn sound_response(records: &[Record]) -> f64 {
    let presses: Vec<_> = records
        .iter()
        .filter_map(|r| match r {
            Record::Press { t_ms, pad } => Some((*t_ms, *pad)),
            _ => None,
        })
        .collect();
    if presses.is_empty() {
        return 0.0;
    }
    let sounds: Vec<&SoundCommand> = records
        .iter()
        .filter_map(|r| match r {
            Record::Sound(c) => Some(c),
            _ => None,
        })
        .collect();
    let total = presses.len();
    let mut used = vec![false; sounds.len()];
    let mut answered = 0;
    for (t, pad) in presses {
        let hit = sounds
            .iter()
            .enumerate()
            .position(|(i, c)| !used[i] && c.pad == pad && c.t_ms >= t && c.t_ms - t <= RESPONSE_WINDOW_MS);
        if let Some(i) = hit {
            used[i] = true;
            answered += 1;
        }
    }
    answered as f64 / total as f64
}

fn dynamic_variance(cmds: &[SoundCommand]) -> f64 {
    let gains: Vec<f64> = cmds.iter().map(|c| c.gain).collect();
    std_dev(&gains) / 0.5
}

fn timbre_change(log: &SessionLog, cmds: &[SoundCommand]) -> f64 {
    if cmds.len() < 2 {
        return 0.0;
    }
    let mut mode = log.header().initial_mode;
    let mut switches = 0usize;
    for r in log.records() {
        if let Record::Mode { mode: m, .. } = r {
            if *m != mode {
                switches += 1;
                mode = *m;
            }
        }
    }
    let changes = cmds.windows(2).filter(|w| w[0].sound_id != w[1].sound_id).count();
    (switches + changes) as f64 / (cmds.len() - 1) as f64
}

pub fn compute(log: &SessionLog) -> MetricReport {
    let cmds = log.commands();
    MetricReport::from_scores([
        rhythm_variety(&cmds),
        pitch_sensation(&cmds),
        texture_change(&cmds),
        sound_response(log.records()),
        dynamic_variance(&cmds),
        timbre_change(log, &cmds),
    ])
}
