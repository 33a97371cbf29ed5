#![allow(dead_code)]

use std::f32::consts::TAU;

use fcm_core::{FeatureTensor, SampleFrame, TensorGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tensor with Gaussian-ish values, per-channel offsets and varied energy.
pub fn random_tensor(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> FeatureTensor {
    let base: f32 = rng.gen_range(-2.0..2.0);
    let mut data = Vec::with_capacity(c * h * w);
    for _ in 0..c {
        let offset: f32 = rng.gen_range(-1.0..1.0);
        let scale: f32 = rng.gen_range(0.05..3.0);
        for _ in 0..h * w {
            // sum of uniforms is close enough to normal here
            let n: f32 = (0..4).map(|_| rng.gen_range(-1.0f32..1.0)).sum::<f32>() * 0.5;
            data.push(base + offset + scale * n);
        }
    }
    FeatureTensor::new(c, h, w, data).unwrap()
}

pub fn random_group(rng: &mut ChaCha8Rng, max_tensors: usize) -> TensorGroup {
    let n = rng.gen_range(1..=max_tensors);
    let tensors = (0..n)
        .map(|_| {
            let c = rng.gen_range(1..=12);
            let h = rng.gen_range(1..=10);
            let w = rng.gen_range(1..=10);
            random_tensor(rng, c, h, w)
        })
        .collect();
    TensorGroup::unlabeled(tensors).unwrap()
}

/// Smooth, feature-map-like tensor: low-frequency sinusoids per channel with
/// channel energies spread over two orders of magnitude.
pub fn smooth_tensor(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> FeatureTensor {
    let mut data = Vec::with_capacity(c * h * w);
    for _ in 0..c {
        let amp: f32 = 10f32.powf(rng.gen_range(-1.0..1.0));
        let (fy, fx): (f32, f32) = (rng.gen_range(0.2..1.2), rng.gen_range(0.2..1.2));
        let (py, px): (f32, f32) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        for y in 0..h {
            for x in 0..w {
                let v = (fy * y as f32 * 0.5 + py).sin() * (fx * x as f32 * 0.5 + px).cos();
                let noise: f32 = rng.gen_range(-0.02..0.02);
                data.push(amp * (v + noise));
            }
        }
    }
    FeatureTensor::new(c, h, w, data).unwrap()
}

/// Smooth 10-bit frame: a few low-frequency sinusoids plus mild noise.
pub fn smooth_frame(rng: &mut ChaCha8Rng, h: usize, w: usize) -> SampleFrame {
    let comps: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(50.0..200.0),
                rng.gen_range(0.01..0.15),
                rng.gen_range(0.01..0.15),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let mut samples = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let mut v = 512.0;
            for &(a, fy, fx, p) in &comps {
                v += a * (fy * y as f64 + fx * x as f64 + p).sin();
            }
            v += rng.gen_range(-4.0..4.0);
            samples.push(v.round().clamp(0.0, 1023.0) as u16);
        }
    }
    SampleFrame::new(h, w, samples).unwrap()
}

/// Relative agreement of decoded statistics with the transmitted ones. The
/// mean is compared on the scale of the distribution (max of |mu| and sigma)
/// so a near-zero mean does not demand an absolute match below f32 rounding.
pub fn stats_match(got: (f64, f64), want: (f64, f64), tol: f64) -> bool {
    let (gm, gs) = got;
    let (wm, ws) = want;
    let scale = wm.abs().max(ws);
    (gm - wm).abs() <= tol * scale && (gs - ws).abs() <= tol * ws
}
