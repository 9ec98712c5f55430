//! SLIP framing as used on the serial link, fed to the decoder in ragged chunks.

use hopscotch::osc::{self, slip, OscMessage};

fn main() -> hopscotch::Result<()> {
    let mut stream = Vec::new();
    for pad in [3u8, 11] {
        let msg = OscMessage::with_int(osc::trigger_address(pad), 1)?;
        stream.extend(slip::frame(&osc::encode_message(&msg)?));
    }
    // payload bytes equal to END and ESC get escaped
    let framed = slip::frame(&[0xC0, 0x01, 0xDB]);
    println!("escaped frame: {framed:02x?}");
    assert_eq!(slip::unframe(&framed)?, [0xC0, 0x01, 0xDB]);

    let mut decoder = slip::SlipDecoder::new();
    for chunk in stream.chunks(7) {
        for frame in decoder.push(chunk) {
            let msg = osc::decode_message(&frame?)?;
            println!("{} {:?}", msg.address(), msg.first_int());
        }
    }
    Ok(())
}
