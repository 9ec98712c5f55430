//! OSC 1.0 message codec, SLIP framing and the pad address schema.
//!
//! Only single messages are supported (no bundles or time tags). Arguments
//! are `int32`, `float32` or `string`, encoded big-endian and 4-byte aligned.

use std::fmt;

use thiserror::Error;

/// Prefix of the per-pad trigger addresses, `/trigger1` .. `/trigger12`.
pub const TRIGGER_PREFIX: &str = "/trigger";

/// Number of pads on the court.
pub const PAD_COUNT: u8 = 12;

/// Default UDP port for OSC datagrams.
pub const DEFAULT_UDP_PORT: u16 = 9000;

/// Sensor addresses in the order the firmware emits them each pass.
pub const SENSOR_ADDRESSES: [&str; 6] = [
    "/bend_data1",
    "/bend_data2",
    "/optic_data",
    "/piezo_data",
    "/fsr_data",
    "/Slider_data",
];

#[derive(Debug, Clone)]
pub enum OscArg {
    Int(i32),
    Float(f32),
    Str(String),
}

impl OscArg {
    fn tag(&self) -> u8 {
        match self {
            OscArg::Int(_) => b'i',
            OscArg::Float(_) => b'f',
            OscArg::Str(_) => b's',
        }
    }

    pub fn as_int(&self) -> Option<i32> {
        match self {
            OscArg::Int(v) => Some(*v),
            _ => None,
        }
    }
}

// Floats compare bitwise so that decode(encode(m)) == m holds for NaN payloads too.
impl PartialEq for OscArg {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (OscArg::Int(a), OscArg::Int(b)) => a == b,
            (OscArg::Float(a), OscArg::Float(b)) => a.to_bits() == b.to_bits(),
            (OscArg::Str(a), OscArg::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for OscArg {}

impl fmt::Display for OscArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OscArg::Int(v) => write!(f, "{v}"),
            OscArg::Float(v) => write!(f, "{v}"),
            OscArg::Str(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("address must not be empty")]
    EmptyAddress,
    #[error("address must start with '/', found byte 0x{0:02x}")]
    MissingSlash(u8),
    #[error("address contains invalid byte 0x{byte:02x} at position {position}")]
    InvalidAddressByte { byte: u8, position: usize },
    #[error("string argument {index} contains a NUL byte")]
    NulInString { index: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("length not multiple of 4 (got {0} bytes)")]
    LengthNotMultipleOf4(usize),
    #[error("message too short ({0} bytes, need at least 8)")]
    TooShort(usize),
    #[error("address does not start with '/'")]
    MissingSlash,
    #[error("invalid address: {0}")]
    InvalidAddress(EncodeError),
    #[error("type tag string does not start with ','")]
    MissingTypeTag,
    #[error("unterminated string at offset {0}")]
    UnterminatedString(usize),
    #[error("non-zero padding byte at offset {0}")]
    BadPadding(usize),
    #[error("string at offset {0} is not valid UTF-8")]
    InvalidUtf8(usize),
    #[error("unsupported type tag '{0}'")]
    UnsupportedTypeTag(char),
    #[error("truncated argument {index} (type '{tag}')")]
    TruncatedArgument { index: usize, tag: char },
    #[error("{0} trailing bytes after the last argument")]
    TrailingBytes(usize),
}

/// An OSC message: an address path and its typed arguments.
///
/// Construct through [`OscMessage::new`] so the address invariants hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscMessage {
    address: String,
    args: Vec<OscArg>,
}

impl OscMessage {
    pub fn new(address: impl Into<String>, args: Vec<OscArg>) -> Result<Self, EncodeError> {
        let address = address.into();
        validate_address(&address)?;
        for (index, arg) in args.iter().enumerate() {
            if let OscArg::Str(s) = arg {
                if s.as_bytes().contains(&0) {
                    return Err(EncodeError::NulInString { index });
                }
            }
        }
        Ok(Self { address, args })
    }

    /// Convenience for the firmware's single-int-argument messages.
    pub fn with_int(address: impl Into<String>, value: i32) -> Result<Self, EncodeError> {
        Self::new(address, vec![OscArg::Int(value)])
    }

    pub fn address(&self) -> &str {
        &self.address
    }

    pub fn args(&self) -> &[OscArg] {
        &self.args
    }

    /// First argument as an int, if present and of int type.
    pub fn first_int(&self) -> Option<i32> {
        self.args.first().and_then(OscArg::as_int)
    }
}

impl fmt::Display for OscMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.address)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        Ok(())
    }
}

pub fn validate_address(address: &str) -> Result<(), EncodeError> {
    let bytes = address.as_bytes();
    match bytes.first() {
        None => return Err(EncodeError::EmptyAddress),
        Some(b'/') => {}
        Some(&b) => return Err(EncodeError::MissingSlash(b)),
    }
    if let Some((position, &byte)) = bytes.iter().enumerate().find(|(_, b)| matches!(b, b' ' | b'#' | 0)) {
        return Err(EncodeError::InvalidAddressByte { byte, position });
    }
    Ok(())
}

fn push_padded_str(out: &mut Vec<u8>, s: &[u8]) {
    out.extend_from_slice(s);
    // at least one NUL, then pad to the next 4-byte boundary
    let pad = 4 - s.len() % 4;
    out.extend(std::iter::repeat_n(0, pad));
}

/// Encodes a message into its OSC 1.0 byte representation.
pub fn encode_message(msg: &OscMessage) -> Result<Vec<u8>, EncodeError> {
    validate_address(&msg.address)?;
    let mut out = Vec::with_capacity(msg.address.len() + 8 + msg.args.len() * 8);
    push_padded_str(&mut out, msg.address.as_bytes());

    let mut tags = Vec::with_capacity(msg.args.len() + 1);
    tags.push(b',');
    tags.extend(msg.args.iter().map(OscArg::tag));
    push_padded_str(&mut out, &tags);

    for (index, arg) in msg.args.iter().enumerate() {
        match arg {
            OscArg::Int(v) => out.extend_from_slice(&v.to_be_bytes()),
            OscArg::Float(v) => out.extend_from_slice(&v.to_be_bytes()),
            OscArg::Str(s) => {
                if s.as_bytes().contains(&0) {
                    return Err(EncodeError::NulInString { index });
                }
                push_padded_str(&mut out, s.as_bytes());
            }
        }
    }
    debug_assert_eq!(out.len() % 4, 0);
    Ok(out)
}

/// Reads a NUL-terminated, zero-padded string starting at `offset`.
/// Returns the string bytes and the offset just past the padding.
fn read_padded_str(bytes: &[u8], offset: usize) -> Result<(&[u8], usize), DecodeError> {
    let rest = &bytes[offset..];
    let nul = rest
        .iter()
        .position(|&b| b == 0)
        .ok_or(DecodeError::UnterminatedString(offset))?;
    let end = offset + (nul / 4 + 1) * 4;
    if end > bytes.len() {
        return Err(DecodeError::UnterminatedString(offset));
    }
    if let Some(p) = bytes[offset + nul..end].iter().position(|&b| b != 0) {
        return Err(DecodeError::BadPadding(offset + nul + p));
    }
    Ok((&rest[..nul], end))
}

fn utf8(bytes: &[u8], offset: usize) -> Result<String, DecodeError> {
    std::str::from_utf8(bytes)
        .map(str::to_owned)
        .map_err(|_| DecodeError::InvalidUtf8(offset))
}

/// Decodes one OSC message. The input must be exactly one canonical
/// encoding: zero padding, no trailing bytes.
pub fn decode_message(bytes: &[u8]) -> Result<OscMessage, DecodeError> {
    if !bytes.len().is_multiple_of(4) {
        return Err(DecodeError::LengthNotMultipleOf4(bytes.len()));
    }
    if bytes.len() < 8 {
        return Err(DecodeError::TooShort(bytes.len()));
    }
    if bytes[0] != b'/' {
        return Err(DecodeError::MissingSlash);
    }
    let (addr, mut pos) = read_padded_str(bytes, 0)?;
    let address = utf8(addr, 0)?;
    validate_address(&address).map_err(DecodeError::InvalidAddress)?;

    if bytes.get(pos) != Some(&b',') {
        return Err(DecodeError::MissingTypeTag);
    }
    let (tags, next) = read_padded_str(bytes, pos)?;
    pos = next;

    let mut args = Vec::with_capacity(tags.len() - 1);
    for (index, &tag) in tags[1..].iter().enumerate() {
        match tag {
            b'i' | b'f' => {
                let word: [u8; 4] =
                    bytes
                        .get(pos..pos + 4)
                        .and_then(|w| w.try_into().ok())
                        .ok_or(DecodeError::TruncatedArgument {
                            index,
                            tag: tag as char,
                        })?;
                pos += 4;
                args.push(if tag == b'i' {
                    OscArg::Int(i32::from_be_bytes(word))
                } else {
                    OscArg::Float(f32::from_be_bytes(word))
                });
            }
            b's' => {
                if pos >= bytes.len() {
                    return Err(DecodeError::TruncatedArgument { index, tag: 's' });
                }
                let (s, next) = read_padded_str(bytes, pos)?;
                args.push(OscArg::Str(utf8(s, pos)?));
                pos = next;
            }
            other => return Err(DecodeError::UnsupportedTypeTag(other as char)),
        }
    }
    if pos != bytes.len() {
        return Err(DecodeError::TrailingBytes(bytes.len() - pos));
    }
    Ok(OscMessage { address, args })
}

/// Maps `/triggerN` to `N` for `N` in 1..=12. Any other address is `None`.
pub fn parse_trigger_address(address: &str) -> Option<u8> {
    let suffix = address.strip_prefix(TRIGGER_PREFIX)?;
    // reject "+3", "03" and friends: only the canonical decimal form is in the schema
    if suffix.is_empty() || suffix.starts_with('0') || !suffix.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u8 = suffix.parse().ok()?;
    (1..=PAD_COUNT).contains(&n).then_some(n)
}

pub fn trigger_address(pad: u8) -> String {
    format!("{TRIGGER_PREFIX}{pad}")
}

pub mod slip {
    //! SLIP (RFC 1055) framing for byte-stream transports.

    use thiserror::Error;

    pub const END: u8 = 0xC0;
    pub const ESC: u8 = 0xDB;
    pub const ESC_END: u8 = 0xDC;
    pub const ESC_ESC: u8 = 0xDD;

    #[derive(Debug, Error, Clone, PartialEq, Eq)]
    pub enum SlipError {
        #[error("dangling escape byte at end of frame")]
        DanglingEscape,
        #[error("invalid escape sequence 0xdb 0x{0:02x}")]
        InvalidEscape(u8),
        #[error("frame is not terminated by END (0xc0)")]
        Unterminated,
        #[error("{0} bytes after the END delimiter")]
        TrailingBytes(usize),
    }

    /// Escapes `payload` and appends the END delimiter.
    pub fn frame(payload: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(payload.len() + 2);
        for &b in payload {
            match b {
                END => out.extend_from_slice(&[ESC, ESC_END]),
                ESC => out.extend_from_slice(&[ESC, ESC_ESC]),
                _ => out.push(b),
            }
        }
        out.push(END);
        out
    }

    /// Inverse of [`frame`] for a single, END-terminated frame.
    pub fn unframe(frame: &[u8]) -> Result<Vec<u8>, SlipError> {
        let mut out = Vec::with_capacity(frame.len());
        let mut iter = frame.iter().enumerate();
        while let Some((i, &b)) = iter.next() {
            match b {
                END => {
                    let rest = frame.len() - i - 1;
                    return if rest == 0 {
                        Ok(out)
                    } else {
                        Err(SlipError::TrailingBytes(rest))
                    };
                }
                ESC => match iter.next() {
                    Some((_, &ESC_END)) => out.push(END),
                    Some((_, &ESC_ESC)) => out.push(ESC),
                    Some((_, &END)) | None => return Err(SlipError::DanglingEscape),
                    Some((_, &other)) => return Err(SlipError::InvalidEscape(other)),
                },
                _ => out.push(b),
            }
        }
        Err(SlipError::Unterminated)
    }

    /// Incremental decoder for a continuous SLIP byte stream.
    ///
    /// Empty frames (back-to-back END bytes) are skipped, so senders may
    /// prefix frames with END to flush line noise.
    #[derive(Debug, Default)]
    pub struct SlipDecoder {
        buf: Vec<u8>,
        escaped: bool,
        corrupt: Option<SlipError>,
    }

    impl SlipDecoder {
        pub fn new() -> Self {
            Self::default()
        }

        /// Feeds bytes, returning every frame completed by them. A corrupt
        /// frame is reported as an error in its position of the output.
        pub fn push(&mut self, data: &[u8]) -> Vec<Result<Vec<u8>, SlipError>> {
            let mut frames = Vec::new();
            for &b in data {
                if self.escaped {
                    self.escaped = false;
                    match b {
                        ESC_END => self.buf.push(END),
                        ESC_ESC => self.buf.push(ESC),
                        END => {
                            self.buf.clear();
                            self.corrupt = None;
                            frames.push(Err(SlipError::DanglingEscape));
                            continue;
                        }
                        other => {
                            self.corrupt.get_or_insert(SlipError::InvalidEscape(other));
                        }
                    }
                    continue;
                }
                match b {
                    END => {
                        if let Some(err) = self.corrupt.take() {
                            self.buf.clear();
                            frames.push(Err(err));
                        } else if !self.buf.is_empty() {
                            frames.push(Ok(std::mem::take(&mut self.buf)));
                        }
                    }
                    ESC => self.escaped = true,
                    _ => self.buf.push(b),
                }
            }
            frames
        }
    }
}
