//! Script to score in one pass: simulate the demo script, render it, grade it.

use std::path::PathBuf;

use hopscotch::config::Config;
use hopscotch::firmware::JumpScript;
use hopscotch::soundscape::{self, RenderConfig};
use hopscotch::{metrics, pipeline, Error};

fn main() -> hopscotch::Result<()> {
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets");
    let text = std::fs::read_to_string(assets.join("demo_script.json")).map_err(|source| Error::Io {
        module: "firmware",
        context: "reading demo script".into(),
        source,
    })?;
    let cfg = Config::default();
    let log = pipeline::simulate_session(&JumpScript::from_json(&text)?, &cfg.debounce, &cfg.engine_config()?)?;

    let out = soundscape::render(&log, &soundscape::bank_for_log(&log), &RenderConfig::default());
    let peak = out.mix_f64().iter().fold(0.0f64, |m, s| m.max(s.abs()));
    println!(
        "{} commands, {:.2} s of audio, peak {:.3}, {} onsets",
        log.commands().len(),
        out.duration_ms() / 1000.0,
        peak,
        soundscape::onset_count(&out.mix_f64(), out.sample_rate, 0.05)
    );
    print!("{}", metrics::compute(&log).to_table());
    Ok(())
}
