//! Offline path from a jump script to a session log, in virtual time.

use crate::engine::{Engine, EngineConfig, SessionLog};
use crate::firmware::{self, DebounceConfig, FirmwareError, JumpScript};

/// Runs the controller model over `script` and feeds every emitted message
/// to a fresh engine at its poll time.
///
/// Mode clicks reach the engine directly at their own (rounded) time,
/// ahead of the poll that follows them. The header's creation time is 0 so
/// equal inputs give byte-identical logs.
pub fn simulate_session(
    script: &JumpScript,
    debounce: &DebounceConfig,
    engine_cfg: &EngineConfig,
) -> Result<SessionLog, FirmwareError> {
    let messages = firmware::run_script(script, debounce)?;
    // validated scripts are time-ordered
    let mut clicks = script.mode_clicks().peekable();

    let mut engine = Engine::new(engine_cfg.clone(), 0);
    for timed in &messages {
        while let Some(&(t, mode)) = clicks.peek() {
            if t > timed.t_ms {
                break;
            }
            engine.set_mode(mode, t);
            clicks.next();
        }
        engine.ingest(&timed.msg, timed.t_ms);
    }
    for (t, mode) in clicks {
        engine.set_mode(mode, t);
    }
    Ok(engine.into_log())
}
