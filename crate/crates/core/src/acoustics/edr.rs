//! Energy decay relief (per-band remaining energy over time) and the
//! broadband Schroeder energy decay curve.

use ndarray::Array2;

use super::stft::{band_energy_stft_cfg, StftConfig, BAND_CENTERS};
use crate::{Error, Result};

/// Frames x 6 matrix of remaining band energy: entry (n, k) is the energy of
/// band k summed from frame n to the end.
#[derive(Debug, Clone, PartialEq)]
pub struct EdrMatrix {
    pub values: Array2<f64>,
    pub band_centers: [f64; 6],
    /// Start time of each frame in seconds.
    pub frame_times: Vec<f64>,
}

impl EdrMatrix {
    pub fn frames(&self) -> usize {
        self.values.nrows()
    }
}

/// EDR at the production STFT config (Hann 256 / hop 128 at 16 kHz).
pub fn edr(samples: &[f64], rate: u32) -> Result<EdrMatrix> {
    let cfg = StftConfig::production();
    if (rate as f64 - cfg.rate).abs() > 1e-9 {
        return Err(Error::Signal(format!(
            "edr assumes {} Hz, got {rate} Hz",
            cfg.rate
        )));
    }
    edr_cfg(samples, &cfg)
}

/// EDR with an explicit framing config.
pub fn edr_cfg(samples: &[f64], cfg: &StftConfig) -> Result<EdrMatrix> {
    let band = band_energy_stft_cfg(samples, cfg)?;
    Ok(EdrMatrix {
        values: reverse_cumsum(&band),
        band_centers: BAND_CENTERS,
        frame_times: (0..band.nrows()).map(|m| cfg.frame_time(m)).collect(),
    })
}

/// Reverse cumulative sum along the time (row) axis.
pub fn reverse_cumsum(band: &Array2<f64>) -> Array2<f64> {
    let mut out = band.clone();
    let (m, k) = (out.nrows(), out.ncols());
    for col in 0..k {
        for row in (0..m.saturating_sub(1)).rev() {
            out[[row, col]] += out[[row + 1, col]];
        }
    }
    out
}

/// Schroeder energy decay curve in dB, normalized so EDC[0] = 0.
/// `edc[n] = 10*log10(sum_{m>=n} x[m]^2 / total)`; non-increasing, and -inf
/// after the last nonzero sample.
pub fn edc(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Signal("silent IR has no energy decay curve".into()));
    }
    let mut out = vec![0.0f64; samples.len()];
    let mut tail = 0.0;
    for n in (0..samples.len()).rev() {
        tail += samples[n] * samples[n];
        out[n] = tail;
    }
    // Normalize by the backward-accumulated total so out[0] is exactly 0 dB.
    let total = out[0];
    if !(total > 0.0) {
        return Err(Error::Signal("silent IR has no energy decay curve".into()));
    }
    for v in &mut out {
        *v = 10.0 * (*v / total).log10();
    }
    Ok(out)
}
