//! Session logs are JSON lines; replay rebuilds the sound commands from inputs.

use hopscotch::engine::{replay, SessionLog};
use hopscotch::firmware::{DebounceConfig, JumpScript};
use hopscotch::{engine::EngineConfig, pipeline};

fn main() -> hopscotch::Result<()> {
    let script = JumpScript::from_json(
        r#"{"actions":[
            {"kind":"sensor","tMs":0,"channel":"slider","value":700},
            {"kind":"contact","tMs":30,"pad":2,"durationMs":40},
            {"kind":"mode","tMs":300,"mode":"generative"},
            {"kind":"contact","tMs":400,"pad":9,"durationMs":25}
        ]}"#,
    )?;
    let log = pipeline::simulate_session(&script, &DebounceConfig::default(), &EngineConfig::default())?;
    let text = log.to_jsonl();
    for line in text.lines().filter(|l| !l.contains("\"sensor\"")) {
        println!("{line}");
    }

    let parsed = SessionLog::from_jsonl(&text)?;
    assert_eq!(replay(&parsed)?, parsed.commands());
    println!("replayed {} commands identically", parsed.commands().len());
    Ok(())
}
