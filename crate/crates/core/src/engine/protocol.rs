//! Line-delimited JSON spoken on the UI socket.
//!
//! Clients send `{"type":"press","pad":N}`, `{"type":"release","pad":N}`
//! and `{"type":"mode","mode":"cartoon"|"animal"|"generative"}`. The engine
//! broadcasts `{"type":"sound",...}` for every sound command and
//! `{"type":"state","mode":M,"masterGain":G}` on every state change and
//! to each newly connected client.

use serde::{Deserialize, Serialize};

use super::{EngineStatus, Pad, SoundCommand, SoundMode};

/// Default TCP port of the UI socket.
pub const DEFAULT_UI_PORT: u16 = 8080;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClientMessage {
    Press { pad: Pad },
    Release { pad: Pad },
    Mode { mode: SoundMode },
}

impl ClientMessage {
    pub fn parse(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line.trim())
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("client message serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ServerMessage {
    #[serde(rename_all = "camelCase")]
    Sound {
        pad: Pad,
        sound_id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pitch: Option<u8>,
        gain: f64,
        t_ms: u64,
    },
    #[serde(rename_all = "camelCase")]
    State { mode: SoundMode, master_gain: f64 },
}

impl ServerMessage {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }
}

impl From<&SoundCommand> for ServerMessage {
    fn from(c: &SoundCommand) -> Self {
        ServerMessage::Sound {
            pad: c.pad,
            sound_id: c.sound_id.clone(),
            pitch: c.pitch,
            gain: c.gain,
            t_ms: c.t_ms,
        }
    }
}

impl From<EngineStatus> for ServerMessage {
    fn from(s: EngineStatus) -> Self {
        ServerMessage::State {
            mode: s.mode,
            master_gain: s.master_gain,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn client_messages() {
        assert_eq!(
            ClientMessage::parse(r#"{"type":"press","pad":4}"#).unwrap(),
            ClientMessage::Press {
                pad: Pad::new(4).unwrap()
            }
        );
        assert_eq!(
            ClientMessage::parse(r#" {"type":"mode","mode":"generative"} "#).unwrap(),
            ClientMessage::Mode {
                mode: SoundMode::Generative
            }
        );
        assert!(ClientMessage::parse(r#"{"type":"press","pad":0}"#).is_err());
        assert!(ClientMessage::parse(r#"{"type":"press","pad":4,"x":1}"#).is_err());
        assert!(ClientMessage::parse(r#"{"type":"jump","pad":4}"#).is_err());
        assert!(ClientMessage::parse(r#"{"type":"mode","mode":"jazz"}"#).is_err());
        let release = ClientMessage::Release {
            pad: Pad::new(12).unwrap(),
        };
        assert_eq!(release.to_line(), r#"{"type":"release","pad":12}"#);
    }

    #[test]
    fn server_messages() {
        let cmd = SoundCommand {
            t_ms: 250,
            pad: Pad::new(7).unwrap(),
            sound_id: "gen/7".into(),
            pitch: Some(60),
            gain: 0.5,
        };
        assert_eq!(
            ServerMessage::from(&cmd).to_line(),
            r#"{"type":"sound","pad":7,"soundId":"gen/7","pitch":60,"gain":0.5,"tMs":250}"#
        );
        let state = ServerMessage::State {
            mode: SoundMode::Animal,
            master_gain: 1.0,
        };
        assert_eq!(state.to_line(), r#"{"type":"state","mode":"animal","masterGain":1.0}"#);
        let no_pitch = SoundCommand {
            pitch: None,
            sound_id: "animal/7".into(),
            ..cmd
        };
        assert!(!ServerMessage::from(&no_pitch).to_line().contains("pitch"));
    }
}
