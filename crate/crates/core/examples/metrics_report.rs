//! Score two contrasting sessions on the six sound-experience proxies.

use hopscotch::engine::EngineConfig;
use hopscotch::engine::SoundMode;
use hopscotch::firmware::{DebounceConfig, JumpScript, ScriptAction, SensorChannel};
use hopscotch::{metrics, pipeline};

fn session(actions: Vec<ScriptAction>) -> hopscotch::Result<hopscotch::engine::SessionLog> {
    let script = JumpScript {
        duration_ms: None,
        actions,
    };
    Ok(pipeline::simulate_session(
        &script,
        &DebounceConfig::default(),
        &EngineConfig::default(),
    )?)
}

fn main() -> hopscotch::Result<()> {
    // the same pad at a steady pulse
    let monotone = (0..12)
        .map(|i| ScriptAction::Contact {
            t_ms: 100.0 + 500.0 * i as f64,
            pad: 1,
            duration_ms: 30.0,
        })
        .collect();

    // every pad, uneven timing, changing accent and mode
    let mut varied = vec![ScriptAction::Sensor {
        t_ms: 0.0,
        channel: SensorChannel::Slider,
        value: 1023,
    }];
    let mut t = 100.0;
    for i in 0..12u8 {
        if i == 4 || i == 8 {
            let mode = if i == 4 {
                SoundMode::Animal
            } else {
                SoundMode::Generative
            };
            varied.push(ScriptAction::Mode { t_ms: t, mode });
        }
        varied.push(ScriptAction::Sensor {
            t_ms: t,
            channel: SensorChannel::Piezo,
            value: (i as u16 * 331) % 1024,
        });
        varied.push(ScriptAction::Contact {
            t_ms: t + 1.0,
            pad: i + 1,
            duration_ms: 30.0,
        });
        t += [150.0, 400.0, 250.0, 900.0][i as usize % 4];
    }

    for (name, actions) in [("monotone", monotone), ("varied", varied)] {
        let report = metrics::compute(&session(actions)?);
        println!("== {name}\n{}", report.to_table());
    }
    Ok(())
}
