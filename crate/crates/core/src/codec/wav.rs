//! Minimal RIFF/WAVE reader and writer for mono 32-bit-float files, the only
//! on-disk audio format this crate uses.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ImpulseResponse, IrForm, CROPPED_LEN, PACKED_LEN};
use crate::{Error, Result};

const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_PCM: u16 = 1;

/// Reads a mono 32-bit-float WAV. Multichannel or integer-PCM files are
/// rejected with a conversion hint.
pub fn read_wav<P: AsRef<Path>>(path: P) -> Result<ImpulseResponse> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Wav(format!(
            "{}: not a RIFF/WAVE file",
            path.as_ref().display()
        )));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_end = (pos + 8 + size).min(bytes.len());
        let body = &bytes[pos + 8..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::Wav("fmt chunk too short".into()));
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned.
        pos = pos + 8 + size + (size & 1);
    }

    let (format, channels, rate, bits) =
        fmt.ok_or_else(|| Error::Wav("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::Wav("missing data chunk".into()))?;

    if channels != 1 {
        return Err(Error::Wav(format!(
            "{channels}-channel input not supported; mix down to mono first"
        )));
    }
    if format == FORMAT_PCM {
        return Err(Error::Wav(
            "integer PCM input not supported; convert to 32-bit float first".into(),
        ));
    }
    if format != FORMAT_IEEE_FLOAT || bits != 32 {
        return Err(Error::Wav(format!(
            "unsupported format {format}/{bits}-bit; convert to 32-bit float first"
        )));
    }

    let samples: Vec<f64> = data
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    let form = match samples.len() {
        CROPPED_LEN => IrForm::Cropped,
        PACKED_LEN => IrForm::Packed,
        _ => IrForm::Raw,
    };
    Ok(ImpulseResponse {
        samples,
        rate,
        form,
    })
}

/// Writes a mono 32-bit-float WAV.
pub fn write_wav<P: AsRef<Path>>(ir: &ImpulseResponse, path: P) -> Result<()> {
    let n = ir.samples.len() as u32;
    let data_size = n * 4;
    let mut out = Vec::with_capacity(44 + data_size as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_size).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_IEEE_FLOAT.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&ir.rate.to_le_bytes());
    out.extend_from_slice(&(ir.rate * 4).to_le_bytes()); // byte rate
    out.extend_from_slice(&4u16.to_le_bytes()); // block align
    out.extend_from_slice(&32u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_size.to_le_bytes());
    for &s in &ir.samples {
        out.extend_from_slice(&(s as f32).to_le_bytes());
    }
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&out)?;
    Ok(())
}
