//! Impulse response representations and conversions.
//!
//! Raw IRs at arbitrary rate are band-limited-resampled to 16 kHz, cropped to
//! a 3968-sample body, normalized to a body standard deviation of 0.1, and
//! tagged with 128 trailing copies of the original standard deviation for a
//! packed length of 4096. Unpacking reads the tag interior (boundary samples
//! are corrupted by the 41-tap convolutions downstream) and restores the
//! original magnitude.

mod wav;

pub use wav::{read_wav, write_wav};

use crate::{Error, Result};

/// Samples in the cropped body.
pub const CROPPED_LEN: usize = 3968;
/// Tag samples appended after the body.
pub const TAG_LEN: usize = 128;
/// Packed length: body plus tag.
pub const PACKED_LEN: usize = CROPPED_LEN + TAG_LEN;
/// Working sample rate for cropped/packed forms.
pub const TARGET_RATE: u32 = 16_000;
/// Half-width of the 41-tap kernel; the tag mean skips this many samples on
/// each side of the tag so only uncorrupted values contribute.
pub const TAG_GUARD: usize = 20 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrForm {
    Raw,
    Cropped,
    Packed,
}

/// Mono impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    pub samples: Vec<f64>,
    pub rate: u32,
    pub form: IrForm,
}

impl ImpulseResponse {
    pub fn raw(samples: Vec<f64>, rate: u32) -> Self {
        ImpulseResponse {
            samples,
            rate,
            form: IrForm::Raw,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.rate as f64
    }
}

/// Population standard deviation with mean subtraction.
pub fn std_dev(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt()
}

/// Band-limited resampling with an 81-tap-per-side windowed-sinc kernel,
/// cutoff at the lower of the two Nyquist frequencies. Same-rate calls pass
/// through bit-identically.
pub fn resample(ir: &ImpulseResponse, to_rate: u32) -> Result<ImpulseResponse> {
    if ir.rate == 0 || to_rate == 0 {
        return Err(Error::Signal("sample rates must be positive".into()));
    }
    if to_rate == ir.rate {
        return Ok(ir.clone());
    }
    let ratio = ir.rate as f64 / to_rate as f64; // input samples per output sample
    let out_len = ((ir.samples.len() as f64) / ratio).round() as usize;
    // Cutoff relative to the input rate; <= 0.5 always.
    let cutoff = 0.5 * (to_rate as f64 / ir.rate as f64).min(1.0);
    let half_width: usize = 81;
    // When downsampling, the kernel stretches by 1/(2*cutoff) input samples.
    let stretch = (0.5 / cutoff).max(1.0);
    let taps = (half_width as f64 * stretch).ceil() as isize;

    let mut out = vec![0.0f64; out_len];
    let x = &ir.samples;
    for (n, o) in out.iter_mut().enumerate() {
        let center = n as f64 * ratio;
        let lo = (center.floor() as isize - taps).max(0);
        let hi = ((center.floor() as isize) + taps + 1).min(x.len() as isize);
        let mut acc = 0.0;
        for m in lo..hi {
            let t = center - m as f64;
            acc += x[m as usize] * sinc_kernel(t, cutoff, taps as f64);
        }
        *o = acc;
    }
    Ok(ImpulseResponse::raw(out, to_rate))
}

/// 2*fc*sinc(2*fc*t) under a Blackman window of half-width `taps`.
fn sinc_kernel(t: f64, cutoff: f64, taps: f64) -> f64 {
    if t.abs() >= taps {
        return 0.0;
    }
    let sinc = {
        let u = 2.0 * cutoff * t * std::f64::consts::PI;
        if u.abs() < 1e-12 {
            1.0
        } else {
            u.sin() / u
        }
    };
    // Blackman window over [-taps, taps].
    let w = {
        let r = t / taps; // in [-1, 1]
        let a = std::f64::consts::PI * (r + 1.0);
        0.42 - 0.5 * a.cos() + 0.08 * (2.0 * a).cos()
    };
    2.0 * cutoff * sinc * w
}

/// Keeps the first `length` samples (onset preserved); shorter inputs are
/// zero-padded at the tail.
pub fn crop_or_pad(ir: &ImpulseResponse, length: usize) -> Result<ImpulseResponse> {
    if ir.is_empty() {
        return Err(Error::Signal("cannot crop an empty IR".into()));
    }
    if ir.rate != TARGET_RATE {
        return Err(Error::Signal(format!(
            "crop expects {TARGET_RATE} Hz input, got {} Hz (resample first)",
            ir.rate
        )));
    }
    let mut samples = ir.samples.clone();
    samples.resize(length, 0.0);
    Ok(ImpulseResponse {
        samples,
        rate: ir.rate,
        form: IrForm::Cropped,
    })
}

/// Normalizes the 3968-sample body to standard deviation 0.1 by dividing by
/// ten times its STD, and appends 128 copies of the original STD.
pub fn pack(ir: &ImpulseResponse) -> Result<ImpulseResponse> {
    if ir.samples.len() != CROPPED_LEN {
        return Err(Error::Signal(format!(
            "pack expects a {CROPPED_LEN}-sample cropped IR, got {}",
            ir.samples.len()
        )));
    }
    if ir.samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Signal("pack input contains non-finite samples".into()));
    }
    let s = std_dev(&ir.samples);
    if s <= 0.0 {
        return Err(Error::Signal(
            "silent IR (zero standard deviation) cannot be packed".into(),
        ));
    }
    let mut samples: Vec<f64> = ir.samples.iter().map(|&x| x / (10.0 * s)).collect();
    samples.extend(std::iter::repeat(s).take(TAG_LEN));
    Ok(ImpulseResponse {
        samples,
        rate: ir.rate,
        form: IrForm::Packed,
    })
}

/// Estimated STD of a packed IR: mean over the tag interior, excluding the
/// kernel-corrupted boundary samples on each side.
pub fn tag_std(packed: &[f64]) -> Result<f64> {
    if packed.len() != PACKED_LEN {
        return Err(Error::Signal(format!(
            "packed IR must have {PACKED_LEN} samples, got {}",
            packed.len()
        )));
    }
    let interior = &packed[CROPPED_LEN + TAG_GUARD..PACKED_LEN - TAG_GUARD];
    Ok(interior.iter().sum::<f64>() / interior.len() as f64)
}

/// Inverse of [`pack`]: recovers the STD from the tag interior and rescales
/// the body to its original magnitude.
pub fn unpack(packed: &ImpulseResponse) -> Result<ImpulseResponse> {
    let s = tag_std(&packed.samples)?;
    if s <= 0.0 {
        return Err(Error::Signal(format!(
            "recovered STD must be positive, got {s}"
        )));
    }
    let samples: Vec<f64> = packed.samples[..CROPPED_LEN]
        .iter()
        .map(|&x| x * 10.0 * s)
        .collect();
    Ok(ImpulseResponse {
        samples,
        rate: packed.rate,
        form: IrForm::Cropped,
    })
}
