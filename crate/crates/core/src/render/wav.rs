//! 32-bit IEEE-float WAV, interleaved.

use std::path::Path;

use super::AudioBuffer;
use crate::error::{Error, Result};

const FORMAT_FLOAT: u16 = 3;

pub fn write_wav(buf: &AudioBuffer, path: &Path) -> Result<()> {
    let channels = buf.channel_count() as u16;
    let data_len = buf.len() * channels as usize * 4;
    let data_len32 = u32::try_from(data_len)
        .ok()
        .filter(|n| *n <= u32::MAX - 36)
        .ok_or_else(|| Error::UnsupportedFormat("audio too long for a RIFF file".into()))?;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_FLOAT.to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&buf.sample_rate().to_le_bytes());
    out.extend_from_slice(&(buf.sample_rate() * channels as u32 * 4).to_le_bytes());
    out.extend_from_slice(&(channels * 4).to_le_bytes());
    out.extend_from_slice(&32u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len32.to_le_bytes());
    for n in 0..buf.len() {
        for c in buf.channels() {
            out.extend_from_slice(&c[n].to_le_bytes());
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

pub fn read_wav(path: &Path) -> Result<AudioBuffer> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |why: &str| Error::UnsupportedFormat(format!("{}: {why}", path.display()));
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("not a RIFF/WAVE file"));
    }
    let mut at = 12;
    let mut fmt: Option<(u16, u32)> = None;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = u32_at(&bytes, at + 4) as usize;
        let body = at + 8;
        if id == b"fmt " {
            if size < 16 || body + 16 > bytes.len() {
                return Err(bad("truncated fmt chunk"));
            }
            let format = u16_at(&bytes, body);
            let bits = u16_at(&bytes, body + 14);
            if format != FORMAT_FLOAT || bits != 32 {
                return Err(bad(&format!("format {format} with {bits} bits; only 32-bit float is read")));
            }
            fmt = Some((u16_at(&bytes, body + 2), u32_at(&bytes, body + 4)));
        } else if id == b"data" {
            let (channels, sr) = fmt.ok_or_else(|| bad("data before fmt"))?;
            if body + size > bytes.len() {
                return Err(bad("truncated data chunk"));
            }
            let frame = channels as usize * 4;
            if frame == 0 || size % frame != 0 {
                return Err(bad("data length is not a whole number of frames"));
            }
            let frames = size / frame;
            let mut out = vec![Vec::with_capacity(frames); channels as usize];
            for (k, chunk) in bytes[body..body + size].chunks_exact(4).enumerate() {
                out[k % channels as usize].push(f32::from_le_bytes(chunk.try_into().unwrap()));
            }
            return AudioBuffer::new(sr, out);
        }
        at = body + size + (size & 1);
    }
    Err(bad("no data chunk"))
}
