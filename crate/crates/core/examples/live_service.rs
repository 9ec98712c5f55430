//! Start the live service on loopback, drive it over OSC/UDP and the UI
//! socket, then stop it and inspect the session log.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, UdpSocket};
use std::time::Duration;

use hopscotch::engine::protocol::ClientMessage;
use hopscotch::engine::service::{self, ServeConfig};
use hopscotch::engine::{EngineConfig, Pad, SoundMode};
use hopscotch::osc::{self, OscMessage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let svc = service::serve(ServeConfig {
        udp_addr: "127.0.0.1:0".parse()?,
        ui_addr: "127.0.0.1:0".parse()?,
        serial_path: None,
        session_path: None,
        engine: EngineConfig::default(),
    })?;
    println!("OSC on {}, UI on {}", svc.udp_addr(), svc.ui_addr());

    let ui = TcpStream::connect(svc.ui_addr())?;
    ui.set_read_timeout(Some(Duration::from_secs(2)))?;
    let mut lines = BufReader::new(ui.try_clone()?).lines();
    let mut ui_out = ui;
    println!("greeting: {}", lines.next().ok_or("closed")??);

    let udp = UdpSocket::bind("127.0.0.1:0")?;
    udp.send_to(
        &osc::encode_message(&OscMessage::with_int("/trigger3", 1)?)?,
        svc.udp_addr(),
    )?;
    println!("after /trigger3: {}", lines.next().ok_or("closed")??);

    writeln!(
        ui_out,
        "{}",
        ClientMessage::Mode {
            mode: SoundMode::Generative
        }
        .to_line()
    )?;
    println!("after mode: {}", lines.next().ok_or("closed")??);
    writeln!(
        ui_out,
        "{}",
        ClientMessage::Press {
            pad: Pad::new(10).ok_or("pad")?
        }
        .to_line()
    )?;
    println!("after UI press: {}", lines.next().ok_or("closed")??);

    let log = svc.stop()?;
    print!("{}", log.to_jsonl());
    Ok(())
}
