//! Minimal RIFF/WAVE PCM codec: 16-bit mono export for rendered signals
//! (lossy: samples are requantized to 16 bits) and 16/24-bit mono
//! ingestion normalized by full-scale division.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Write samples as 16-bit mono PCM. Values are clamped to full scale and
/// rounded; the export is documented as lossy.
pub fn write_wav_mono16<W: Write>(mut out: W, sample_rate: u32, samples: &[f64]) -> Result<()> {
    let data_len = (samples.len() * 2) as u32;
    out.write_all(b"RIFF")?;
    out.write_all(&(36 + data_len).to_le_bytes())?;
    out.write_all(b"WAVE")?;
    out.write_all(b"fmt ")?;
    out.write_all(&16u32.to_le_bytes())?;
    out.write_all(&1u16.to_le_bytes())?; // PCM
    out.write_all(&1u16.to_le_bytes())?; // mono
    out.write_all(&sample_rate.to_le_bytes())?;
    out.write_all(&(sample_rate * 2).to_le_bytes())?;
    out.write_all(&2u16.to_le_bytes())?; // block align
    out.write_all(&16u16.to_le_bytes())?;
    out.write_all(b"data")?;
    out.write_all(&data_len.to_le_bytes())?;
    for &x in samples {
        // Symmetric with the reader's /32768 so round-trips stay within
        // half a code.
        let v = (x.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Read a mono 16- or 24-bit PCM WAV; returns the sample rate and samples
/// normalized to (-1, 1) by full-scale division (the single most negative
/// code clamps to just inside the open interval).
pub fn read_wav_mono<R: Read>(mut input: R) -> Result<(u32, Vec<f64>)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::WavFormat("missing RIFF/WAVE header".into()));
    }

    let mut pos = 12usize;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_end = pos + 8 + size;
        if body_end > bytes.len() {
            return Err(Error::WavFormat(format!(
                "chunk {:?} overruns the file",
                String::from_utf8_lossy(id)
            )));
        }
        let body = &bytes[pos + 8..body_end];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::WavFormat("fmt chunk too short".into()));
                }
                let audio_format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                format = Some((audio_format, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned.
        pos = body_end + (size & 1);
    }

    let (audio_format, channels, rate, bits) =
        format.ok_or_else(|| Error::WavFormat("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::WavFormat("no data chunk".into()))?;
    if audio_format != 1 {
        return Err(Error::WavFormat(format!(
            "only PCM is supported, got format {audio_format}"
        )));
    }
    if channels != 1 {
        return Err(Error::WavFormat(format!(
            "only mono is supported, got {channels} channels"
        )));
    }

    let samples = match bits {
        16 => {
            let limit = 32767.0 / 32768.0;
            data.chunks_exact(2)
                .map(|c| {
                    let v = i16::from_le_bytes(c.try_into().unwrap()) as f64 / 32768.0;
                    v.clamp(-limit, limit)
                })
                .collect()
        }
        24 => {
            let limit = (8_388_607.0) / 8_388_608.0;
            data.chunks_exact(3)
                .map(|c| {
                    let raw = (c[0] as i32) | ((c[1] as i32) << 8) | ((c[2] as i32) << 16);
                    let v = (raw << 8) >> 8; // sign extend
                    (v as f64 / 8_388_608.0).clamp(-limit, limit)
                })
                .collect()
        }
        other => {
            return Err(Error::WavFormat(format!(
                "only 16- or 24-bit PCM is supported, got {other}"
            )))
        }
    };
    Ok((rate, samples))
}
