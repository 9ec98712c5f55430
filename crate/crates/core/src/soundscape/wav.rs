//! RIFF/WAVE output (16-bit PCM, mono) and sample-file input.

use std::path::Path;

use crate::fsutil;

pub const BITS_PER_SAMPLE: u16 = 16;
pub const CHANNELS: u16 = 1;
pub const HEADER_LEN: usize = 44;

/// Canonical 44-byte-header PCM WAVE file, little-endian.
pub fn encode_pcm16(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let block_align = CHANNELS * BITS_PER_SAMPLE / 8;
    let byte_rate = sample_rate * u32::from(block_align);
    let data_len = (samples.len() * 2) as u32;

    let mut out = Vec::with_capacity(HEADER_LEN + samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&CHANNELS.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&BITS_PER_SAMPLE.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn write_pcm16(path: &Path, samples: &[i16], sample_rate: u32) -> std::io::Result<()> {
    fsutil::write_atomic(path, &encode_pcm16(samples, sample_rate))
}

/// A decoded sample file, mixed down to mono in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoSamples {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

pub fn read_mono(path: &Path) -> Result<MonoSamples, hound::Error> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let channels = usize::from(spec.channels.max(1));
    let interleaved: Vec<f64> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()?,
        hound::SampleFormat::Int => {
            let scale = f64::from(1u32 << (spec.bits_per_sample - 1));
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale))
                .collect::<Result<_, _>>()?
        }
    };
    let samples = interleaved
        .chunks(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    Ok(MonoSamples {
        sample_rate: spec.sample_rate,
        samples,
    })
}
