//! Seeded synthetic scenes with a chosen combination of degradations.
//!
//! Each archetype is built so every detector statistic sits at least a
//! factor of two away from its default threshold: cast scenes have a maximum
//! relative channel deviation of about 0.63 (clean scenes 0), dark scenes a
//! mean value near 0.11 (bright scenes above 0.8), blurred scenes a
//! Laplacian variance far below the floor and sharp scenes far above it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{Category8, DegradationFlags};
use crate::error::Result;
use crate::image::{gaussian_blur, rgb_pixel, ImageF32, Plane};

/// Blue-green cast gains, red strongly attenuated.
pub const CAST_GAINS: [f32; 3] = [0.25, 0.8, 1.0];
pub const DARK_LEVEL: f32 = 0.09;
pub const BRIGHT_LEVEL: f32 = 0.8;
pub const BLUR_SIGMA: f64 = 3.0;

pub fn archetype(category: Category8, seed: u64, width: usize, height: usize) -> Result<ImageF32> {
    scene(category.flags(), seed, width, height)
}

/// Scene with exactly the requested degradations.
pub fn scene(flags: DegradationFlags, seed: u64, width: usize, height: usize) -> Result<ImageF32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // about four patches across the shorter side
    let block = (width.min(height) / 4).max(4);
    let (bw, bh) = (width.div_ceil(block), height.div_ceil(block));
    // saturated patches of random hue
    let blocks: Vec<[f32; 3]> = (0..bw * bh)
        .map(|_| {
            let h = rng.gen_range(0.0..1.0);
            let s = rng.gen_range(0.6..1.0);
            let v = rng.gen_range(0.3..1.0);
            rgb_pixel(h, s, v).map(|x| x as f32)
        })
        .collect();

    let mut planes: Vec<Plane> = (0..3)
        .map(|c| {
            Plane::from_fn(width, height, |x, y| {
                let mut v = blocks[(y / block) * bw + x / block][c];
                if !flags.blurred {
                    v += if (x + y) % 2 == 0 { 0.12 } else { -0.12 };
                }
                v
            })
        })
        .collect();
    if flags.blurred {
        planes = planes.iter().map(|p| gaussian_blur(p, BLUR_SIGMA)).collect::<Result<_>>()?;
    }

    let level = if flags.low_light { DARK_LEVEL } else { BRIGHT_LEVEL };
    let gains = if flags.color_cast { CAST_GAINS } else { [1.0; 3] };
    // channel means hit gains * level after clamping
    for (c, p) in planes.iter_mut().enumerate() {
        let s = clipped_scale(&p.data, f64::from(gains[c] * level));
        for v in &mut p.data {
            *v = (*v as f64 * s).clamp(0.0, 1.0) as f32;
        }
    }
    let samples: Vec<f32> = planes.into_iter().flat_map(|p| p.data).collect();
    ImageF32::from_clamped(width, height, 3, samples)
}

/// Scale `s` with mean(min(1, s * v)) == target, by bisection.
fn clipped_scale(data: &[f32], target: f64) -> f64 {
    let clipped_mean = |s: f64| data.iter().map(|&v| (v.max(0.0) as f64 * s).min(1.0)).sum::<f64>() / data.len() as f64;
    let (mut lo, mut hi) = (0.0, 1.0);
    while clipped_mean(hi) < target && hi < 1e6 {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if clipped_mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
