//! How contact length decides whether a jump counts, and what a poll emits.

use hopscotch::firmware::{self, button_pressed, DebounceConfig, JumpScript};

fn main() -> hopscotch::Result<()> {
    let cfg = DebounceConfig::default();
    println!("contacts up to {} ms are rejected as bounce", cfg.max_rejected_ms());
    for ms in [None, Some(2.0), Some(10.0), Some(10.1), Some(25.0)] {
        println!("contact {ms:>10?} ms -> {}", button_pressed(ms, &cfg));
    }

    let script = JumpScript::from_json(
        r#"{"actions":[
            {"kind":"contact","tMs":12,"pad":4,"durationMs":9},
            {"kind":"contact","tMs":60,"pad":4,"durationMs":30},
            {"kind":"contact","tMs":95,"pad":7,"durationMs":3},
            {"kind":"contact","tMs":101,"pad":7,"durationMs":40}
        ]}"#,
    )?;
    let messages = firmware::run_script(&script, &cfg)?;
    println!(
        "{} polls, {} messages",
        messages.len() / firmware::MESSAGES_PER_POLL,
        messages.len()
    );
    for m in messages
        .iter()
        .filter(|m| m.msg.address().starts_with("/trigger") && m.msg.first_int() == Some(1))
    {
        println!("t={:>4} ms {}", m.t_ms, m.msg.address());
    }
    Ok(())
}
