//! Encode the controller's messages, inspect the wire bytes, decode them back.

use hopscotch::osc::{self, OscArg, OscMessage};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect::<Vec<_>>().join(" ")
}

fn main() -> hopscotch::Result<()> {
    let trigger = OscMessage::with_int(osc::trigger_address(1), 1)?;
    let bytes = osc::encode_message(&trigger)?;
    println!("{} -> {} bytes: {}", trigger.address(), bytes.len(), hex(&bytes));
    assert_eq!(osc::decode_message(&bytes)?, trigger);

    let mixed = OscMessage::new(
        "/debug",
        vec![OscArg::Int(-7), OscArg::Float(0.25), OscArg::Str("hop".into())],
    )?;
    let bytes = osc::encode_message(&mixed)?;
    println!("{} -> {} bytes", mixed.address(), bytes.len());
    println!("decoded args: {:?}", osc::decode_message(&bytes)?.args());

    for address in osc::SENSOR_ADDRESSES {
        let m = OscMessage::with_int(address, 512)?;
        println!("{address:<14} {:>2} bytes", osc::encode_message(&m)?.len());
    }

    match osc::decode_message(&bytes[..bytes.len() - 1]) {
        Err(e) => println!("truncated packet rejected: {e}"),
        Ok(_) => unreachable!("a 3-byte-short packet cannot decode"),
    }
    Ok(())
}
