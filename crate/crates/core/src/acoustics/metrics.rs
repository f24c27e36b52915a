//! Acoustic metric estimators on the energy decay curve.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::edr::edc;
use crate::{Error, Result};

/// DRR direct-sound window half-width in seconds (+-2.5 ms around the peak).
pub const DEFAULT_DIRECT_WINDOW: f64 = 0.0025;

/// Least-squares line fit over the EDC segment between the first crossings of
/// `from_db` and `to_db`. Returns (slope dB/sample, segment start index).
fn fit_decay_segment(curve: &[f64], from_db: f64, to_db: f64) -> Result<f64> {
    let start = curve
        .iter()
        .position(|&v| v <= from_db)
        .ok_or_else(|| Error::InsufficientDecay(format!("EDC never reaches {from_db} dB")))?;
    let end = curve.iter().position(|&v| v <= to_db).ok_or_else(|| {
        Error::InsufficientDecay(format!(
            "EDC never reaches {to_db} dB; a longer IR is needed"
        ))
    })?;
    if end <= start + 1 {
        return Err(Error::InsufficientDecay(format!(
            "decay range [{from_db}, {to_db}] dB spans fewer than two samples"
        )));
    }
    let segment = &curve[start..=end];
    if segment.iter().any(|y| !y.is_finite()) {
        return Err(Error::InsufficientDecay(
            "EDC drops to -inf inside the fit range (point-energy IR)".into(),
        ));
    }
    let n = segment.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &y) in segment.iter().enumerate() {
        let x = (start + i) as f64;
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if !(slope < 0.0) {
        return Err(Error::InsufficientDecay(
            "decay segment has non-negative slope".into(),
        ));
    }
    Ok(slope)
}

/// Reverberation time via T20 extrapolation: line fit to the EDC over
/// [-5, -25] dB, T60 = time to fall 60 dB at the fitted slope.
pub fn t60(samples: &[f64], rate: u32) -> Result<f64> {
    let curve = edc(samples)?;
    let slope = fit_decay_segment(&curve, -5.0, -25.0)?;
    Ok(-60.0 / slope / rate as f64)
}

/// Early decay time: line fit over [0, -10] dB, six times the fitted
/// time-to-minus-10-dB.
pub fn edt(samples: &[f64], rate: u32) -> Result<f64> {
    let curve = edc(samples)?;
    let slope = fit_decay_segment(&curve, 0.0, -10.0)?;
    Ok(-60.0 / slope / rate as f64)
}

/// Direct-to-reverberant ratio in dB: energy within +-`direct_window` seconds
/// of the absolute peak versus everything else. A pure impulse with no tail
/// returns +inf (flagged degenerate case for callers to exclude).
pub fn drr(samples: &[f64], rate: u32, direct_window: f64) -> Result<f64> {
    let total: f64 = samples.iter().map(|x| x * x).sum();
    if !(total > 0.0) {
        return Err(Error::Signal("silent IR has no DRR".into()));
    }
    let peak = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let half = (direct_window * rate as f64).round() as usize;
    let lo = peak.saturating_sub(half);
    let hi = (peak + half + 1).min(samples.len());
    let direct: f64 = samples[lo..hi].iter().map(|x| x * x).sum();
    let reverberant = total - direct;
    if reverberant <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (direct / reverberant).log10())
}

/// One-sided power spectrum: (frequencies in Hz, 10*log10 |FFT|^2).
pub fn power_spectrum(samples: &[f64], rate: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples.is_empty() {
        return Err(Error::Signal("empty signal has no spectrum".into()));
    }
    let n = samples.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.process(&mut buf);
    let half = n / 2 + 1;
    let freqs = (0..half).map(|k| k as f64 * rate as f64 / n as f64).collect();
    let db = buf[..half]
        .iter()
        .map(|c| 10.0 * c.norm_sqr().log10())
        .collect();
    Ok((freqs, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Noise IR with envelope 10^(-3t / t60): decays 60 dB in `t60` seconds.
    fn synthetic_decay(t60_secs: f64, rate: u32, len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len)
            .map(|i| {
                let t = i as f64 / rate as f64;
                let env = 10f64.powf(-3.0 * t / t60_secs);
                env * if rng.random::<bool>() { 1.0 } else { -1.0 }
            })
            .collect()
    }

    #[test]
    fn t60_matches_analytic_decay() {
        let ir = synthetic_decay(0.4, 16_000, 3968 * 2, 1);
        let est = t60(&ir, 16_000).unwrap();
        assert!((est - 0.4).abs() <= 0.02, "t60 {est} vs 0.4");
    }

    #[test]
    fn t60_halves_with_decay_constant() {
        let a = t60(&synthetic_decay(0.4, 16_000, 8000, 2), 16_000).unwrap();
        let b = t60(&synthetic_decay(0.2, 16_000, 8000, 2), 16_000).unwrap();
        assert!((a / b - 2.0).abs() < 0.1, "ratio {}", a / b);
    }

    #[test]
    fn t60_scale_invariant() {
        let ir = synthetic_decay(0.3, 16_000, 8000, 3);
        let scaled: Vec<f64> = ir.iter().map(|&x| 17.0 * x).collect();
        let a = t60(&ir, 16_000).unwrap();
        let b = t60(&scaled, 16_000).unwrap();
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn t60_insufficient_decay_errors() {
        // EDC of [1, 0.9] only falls to -3.5 dB: the -5 dB crossing is never
        // reached, so the estimator must refuse.
        let stub = vec![1.0, 0.9];
        assert!(matches!(
            t60(&stub, 16_000),
            Err(Error::InsufficientDecay(_))
        ));
    }

    #[test]
    fn edt_linear_edc_construction() {
        // 10 dB per 0.05 s => EDT = 6 * 0.05 = 0.3 s.
        let ir = synthetic_decay(0.3, 16_000, 8000, 4);
        let est = edt(&ir, 16_000).unwrap();
        assert!((est - 0.3).abs() <= 0.006, "edt {est} vs 0.3");
    }

    #[test]
    fn edt_close_to_t60_for_single_slope() {
        let ir = synthetic_decay(0.35, 16_000, 8000, 5);
        let a = edt(&ir, 16_000).unwrap();
        let b = t60(&ir, 16_000).unwrap();
        assert!((a - b).abs() / b < 0.05, "edt {a} t60 {b}");
    }

    #[test]
    fn drr_four_to_one() {
        // Direct energy 1.0 inside the window, tail energy 0.25 well after it.
        let rate = 16_000;
        let mut ir = vec![0.0; 4000];
        ir[100] = 1.0;
        // Tail: 400 samples of equal energy starting 50 ms after the peak.
        let tail_amp = (0.25f64 / 400.0).sqrt();
        for i in 0..400 {
            ir[900 + i] = tail_amp;
        }
        let v = drr(&ir, rate, DEFAULT_DIRECT_WINDOW).unwrap();
        assert!((v - 6.0206).abs() <= 0.05, "drr {v}");
    }

    #[test]
    fn drr_equal_energies_zero_db() {
        let mut ir = vec![0.0; 4000];
        ir[50] = 1.0;
        ir[2000] = 1.0 - 1e-12; // equal energy outside the window; peak is ir[50]
        let v = drr(&ir, 16_000, DEFAULT_DIRECT_WINDOW).unwrap();
        assert!(v.abs() < 1e-9, "drr {v}");
    }

    #[test]
    fn drr_pure_impulse_infinite() {
        let mut ir = vec![0.0; 1000];
        ir[10] = 0.5;
        let v = drr(&ir, 16_000, DEFAULT_DIRECT_WINDOW).unwrap();
        assert!(v.is_infinite() && v > 0.0);
    }

    #[test]
    fn power_spectrum_impulse_flat() {
        let mut ir = vec![0.0; 512];
        ir[0] = 1.0;
        let (_, db) = power_spectrum(&ir, 16_000).unwrap();
        let (lo, hi) = db
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        assert!(hi - lo < 1e-6, "flatness {}", hi - lo);
    }

    #[test]
    fn power_spectrum_tone_peak() {
        let rate = 16_000u32;
        let n = 1600;
        let ir: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 500.0 * i as f64 / rate as f64).sin())
            .collect();
        let (freqs, db) = power_spectrum(&ir, rate).unwrap();
        let peak = db
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((freqs[peak] - 500.0).abs() < 10.0 + 1e-9, "peak at {}", freqs[peak]);
    }

    #[test]
    fn parseval_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ir: Vec<f64> = (0..777).map(|_| rng.random::<f64>() - 0.5).collect();
        let n = ir.len();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let mut buf: Vec<Complex64> = ir.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft.process(&mut buf);
        let lhs: f64 = buf.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        let rhs: f64 = ir.iter().map(|x| x * x).sum();
        assert!((lhs - rhs).abs() <= 1e-9 * rhs);
    }
}
