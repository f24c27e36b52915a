//! Image-source impulse response synthesis for rectangular rooms.

use nalgebra::Vector3;

use super::BoxScene;
use crate::codec::ImpulseResponse;
use crate::{Error, Result};

pub const SPEED_OF_SOUND: f64 = 343.0;

/// Fractional-delay kernel half-width (81 taps total): wide enough to avoid
/// delay quantization bias in T60/DRR oracles.
const DELAY_HALF_TAPS: isize = 40;

/// Image-source IR for the room shell (furniture is ignored acoustically).
/// Each image source up to `max_order` total wall reflections contributes an
/// attenuated, fractionally delayed impulse: amplitude is the product of the
/// per-wall reflection coefficients `sqrt(1 - alpha)` over 4*pi*distance,
/// delay is distance over 343 m/s, placed with an 81-tap windowed sinc.
pub fn image_method_ir(
    scene: &BoxScene,
    source: Vector3<f64>,
    listener: Vector3<f64>,
    max_order: u32,
    rate: u32,
) -> Result<ImpulseResponse> {
    scene.validate()?;
    if rate == 0 {
        return Err(Error::InvalidInput("sample rate must be positive".into()));
    }
    if !scene.contains_strictly(source) {
        return Err(Error::InvalidInput(format!(
            "source {source:?} not strictly inside the room"
        )));
    }
    if !scene.contains_strictly(listener) {
        return Err(Error::InvalidInput(format!(
            "listener {listener:?} not strictly inside the room"
        )));
    }
    if (source - listener).norm() < 1e-9 {
        return Err(Error::InvalidInput(
            "source and listener must be distinct".into(),
        ));
    }

    // Reflection coefficients per wall: x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
    let beta: Vec<f64> = scene.absorption.iter().map(|&a| (1.0 - a).sqrt()).collect();
    let dims = scene.dims;

    // Per-axis index bound: |m - q| + |m| <= max_order implies |m| <= order/2 + 1.
    let bound = (max_order as isize) / 2 + 1;

    // (distance, amplitude) per image source.
    let mut pulses: Vec<(f64, f64)> = Vec::new();
    for mx in -bound..=bound {
        for q in 0..=1i32 {
            let ox = (mx - q as isize).unsigned_abs() as u32 + mx.unsigned_abs() as u32;
            if ox > max_order {
                continue;
            }
            let bx = beta[0].powi((mx - q as isize).unsigned_abs() as i32)
                * beta[1].powi(mx.unsigned_abs() as i32);
            let dx = (1 - 2 * q) as f64 * source.x - listener.x + 2.0 * mx as f64 * dims.x;
            for my in -bound..=bound {
                for j in 0..=1i32 {
                    let oy = (my - j as isize).unsigned_abs() as u32 + my.unsigned_abs() as u32;
                    if ox + oy > max_order {
                        continue;
                    }
                    let by = beta[2].powi((my - j as isize).unsigned_abs() as i32)
                        * beta[3].powi(my.unsigned_abs() as i32);
                    let dy =
                        (1 - 2 * j) as f64 * source.y - listener.y + 2.0 * my as f64 * dims.y;
                    for mz in -bound..=bound {
                        for k in 0..=1i32 {
                            let oz = (mz - k as isize).unsigned_abs() as u32
                                + mz.unsigned_abs() as u32;
                            if ox + oy + oz > max_order {
                                continue;
                            }
                            let bz = beta[4].powi((mz - k as isize).unsigned_abs() as i32)
                                * beta[5].powi(mz.unsigned_abs() as i32);
                            let amp_refl = bx * by * bz;
                            if amp_refl == 0.0 {
                                continue;
                            }
                            let dz = (1 - 2 * k) as f64 * source.z - listener.z
                                + 2.0 * mz as f64 * dims.z;
                            let dist = (dx * dx + dy * dy + dz * dz).sqrt();
                            let amp = amp_refl
                                / (4.0 * std::f64::consts::PI * dist.max(1e-6));
                            pulses.push((dist, amp));
                        }
                    }
                }
            }
        }
    }

    let max_dist = pulses.iter().map(|p| p.0).fold(0.0, f64::max);
    let len = ((max_dist / SPEED_OF_SOUND) * rate as f64).ceil() as usize
        + DELAY_HALF_TAPS as usize
        + 2;
    let mut samples = vec![0.0f64; len];
    for &(dist, amp) in &pulses {
        let center = dist / SPEED_OF_SOUND * rate as f64;
        add_sinc_pulse(&mut samples, center, amp);
    }

    Ok(ImpulseResponse::raw(samples, rate))
}

/// Adds `amp * sinc(n - center)` under a Hann window of 81 taps.
fn add_sinc_pulse(samples: &mut [f64], center: f64, amp: f64) {
    let lo = (center.ceil() as isize - DELAY_HALF_TAPS).max(0);
    let hi = ((center.floor() as isize) + DELAY_HALF_TAPS + 1).min(samples.len() as isize);
    for n in lo..hi {
        let t = n as f64 - center;
        let u = std::f64::consts::PI * t;
        let sinc = if u.abs() < 1e-12 { 1.0 } else { u.sin() / u };
        let r = t / (DELAY_HALF_TAPS as f64 + 1.0);
        let w = 0.5 + 0.5 * (std::f64::consts::PI * r).cos();
        samples[n as usize] += amp * sinc * w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustics::t60;
    use nalgebra::vector;

    fn room(alpha: f64) -> BoxScene {
        BoxScene::new(vector![6.0, 4.5, 3.0], [alpha; 6])
    }

    #[test]
    fn fully_absorptive_room_single_pulse_at_delay() {
        // Distance 3.43 m at 16 kHz: peak at sample 3.43/343*16000 = 160.
        let scene = room(1.0);
        let ir = image_method_ir(
            &scene,
            vector![1.0, 2.0, 1.5],
            vector![4.43, 2.0, 1.5],
            10,
            16_000,
        )
        .unwrap();
        let peak = ir
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap()
            .0;
        assert!((peak as i64 - 160).abs() <= 1, "peak at {peak}");
        // Direct path only: everything outside the kernel support is zero.
        for (n, &x) in ir.samples.iter().enumerate() {
            if (n as isize - 160).abs() > 41 {
                assert_eq!(x, 0.0, "sample {n} nonzero");
            }
        }
    }

    #[test]
    fn amplitude_follows_inverse_distance() {
        // Distances chosen so the delays land on integer samples (160, 320)
        // and the kernel peak equals the pulse amplitude exactly.
        let scene = BoxScene::new(vector![20.0, 10.0, 8.0], [1.0; 6]);
        let src = vector![2.0, 5.0, 4.0];
        let near = image_method_ir(&scene, src, vector![5.43, 5.0, 4.0], 0, 16_000).unwrap();
        let far = image_method_ir(&scene, src, vector![8.86, 5.0, 4.0], 0, 16_000).unwrap();
        let peak = |ir: &ImpulseResponse| {
            ir.samples
                .iter()
                .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        };
        let ratio = peak(&near) / peak(&far);
        assert!((ratio - 2.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn reciprocity() {
        let scene = room(0.35);
        let a = image_method_ir(
            &scene,
            vector![1.2, 1.1, 1.0],
            vector![4.8, 3.3, 2.2],
            12,
            16_000,
        )
        .unwrap();
        let b = image_method_ir(
            &scene,
            vector![4.8, 3.3, 2.2],
            vector![1.2, 1.1, 1.0],
            12,
            16_000,
        )
        .unwrap();
        assert_eq!(a.len(), b.len());
        let max_diff = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(&x, &y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(max_diff <= 1e-6, "max diff {max_diff}");
    }

    #[test]
    fn lower_absorption_longer_t60() {
        let src = vector![1.5, 1.2, 1.1];
        let lst = vector![4.2, 3.1, 1.9];
        let t_live = {
            let ir = image_method_ir(&room(0.2), src, lst, 40, 16_000).unwrap();
            t60(&ir.samples, 16_000).unwrap()
        };
        let t_dead = {
            let ir = image_method_ir(&room(0.6), src, lst, 40, 16_000).unwrap();
            t60(&ir.samples, 16_000).unwrap()
        };
        assert!(
            t_live > t_dead,
            "alpha 0.2 -> {t_live}s should exceed alpha 0.6 -> {t_dead}s"
        );
    }

    #[test]
    fn energy_tail_shrinks_with_order() {
        let src = vector![1.5, 1.2, 1.1];
        let lst = vector![4.2, 3.1, 1.9];
        let energy = |order: u32| {
            let ir = image_method_ir(&room(0.3), src, lst, order, 16_000).unwrap();
            ir.samples.iter().map(|x| x * x).sum::<f64>()
        };
        let increments: Vec<f64> = (0..5)
            .map(|k| (energy(k + 1) - energy(k)).abs() / energy(k + 1))
            .collect();
        for w in increments.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "increments not falling: {increments:?}");
        }
    }

    #[test]
    fn input_validation() {
        let scene = room(0.5);
        let inside = vector![1.0, 1.0, 1.0];
        assert!(image_method_ir(&scene, inside, inside, 5, 16_000).is_err());
        assert!(
            image_method_ir(&scene, vector![-1.0, 1.0, 1.0], inside, 5, 16_000).is_err()
        );
        assert!(
            image_method_ir(&scene, inside, vector![1.0, 1.0, 3.0], 5, 16_000).is_err()
        );
    }
}
