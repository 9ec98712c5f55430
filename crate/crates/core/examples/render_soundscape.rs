//! Render a simulated session with the demo bank to WAV, with per-pad stems.
//!
//! `cargo run --example render_soundscape -- out_dir`

use std::path::PathBuf;

use hopscotch::config::Config;
use hopscotch::firmware::JumpScript;
use hopscotch::soundscape::{self, RenderConfig, SampleBank, DEFAULT_SAMPLE_RATE};
use hopscotch::{pipeline, Error};

fn main() -> hopscotch::Result<()> {
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets");
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);

    let cfg = Config::load(&assets.join("demo_config.json"))?;
    let script_text = std::fs::read_to_string(assets.join("demo_script.json")).map_err(|source| Error::Io {
        module: "firmware",
        context: "reading demo script".into(),
        source,
    })?;
    let engine = cfg.engine_config()?;
    let log = pipeline::simulate_session(&JumpScript::from_json(&script_text)?, &cfg.debounce, &engine)?;

    let manifest = cfg.bank_manifest.expect("demo config names a bank");
    let (bank, warnings) = SampleBank::load(&manifest, &engine.sieve, engine.base_midi, DEFAULT_SAMPLE_RATE)?;
    assert!(warnings.is_empty());
    let out = soundscape::render(
        &log,
        &bank,
        &RenderConfig {
            stems: true,
            ..RenderConfig::default()
        },
    );

    let mix = out_dir.join("hopscotch_demo.wav");
    let written = out.write(&mix).map_err(|source| Error::Io {
        module: "soundscape",
        context: format!("writing {}", mix.display()),
        source,
    })?;
    let onsets = soundscape::onset_count(&out.mix_f64(), out.sample_rate, 0.05);
    println!(
        "{:.1} s, {} commands, {} onsets, {} files under {}",
        out.duration_ms() / 1000.0,
        log.commands().len(),
        onsets,
        written.len(),
        out_dir.display()
    );
    Ok(())
}
