//! Room-acoustics analysis: octave-band STFT energies, energy decay relief
//! and curve, T60 / EDT / DRR estimators, and power spectra.

mod edr;
mod metrics;
mod stft;

pub use edr::{edc, edr, EdrMatrix};
pub use metrics::{drr, edt, power_spectrum, t60, DEFAULT_DIRECT_WINDOW};
pub use stft::{band_bin_ranges, band_energy_stft, hann_window, StftConfig, BAND_CENTERS};
