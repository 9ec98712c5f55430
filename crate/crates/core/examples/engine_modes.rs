//! Drive the engine by hand: sensors set gain, mode picks the sound family.

use hopscotch::engine::{Engine, EngineConfig, EngineUpdate, Pad, SoundMode};
use hopscotch::firmware::SensorChannel;

fn main() {
    let mut engine = Engine::new(EngineConfig::default(), 0);
    engine.apply_sensor(SensorChannel::Slider, 800, 0);
    engine.apply_sensor(SensorChannel::Piezo, 1023, 0);
    let pad = Pad::new(5).expect("pad in 1..=12");

    let mut t = 100;
    for mode in SoundMode::ALL {
        engine.set_mode(mode, t);
        for update in engine.press(pad, t + 10) {
            if let EngineUpdate::Sound(c) = update {
                println!(
                    "{:<10} {:<12} pitch {:?} gain {:.3}",
                    mode.name(),
                    c.sound_id,
                    c.pitch,
                    c.gain
                );
            }
        }
        // held pads do not retrigger
        assert!(engine
            .press(pad, t + 20)
            .iter()
            .all(|u| !matches!(u, EngineUpdate::Sound(_))));
        engine.release(pad, t + 30);
        t += 100;
    }
    println!("{:?}", engine.status());
}
