use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::AugmentConfig;
use crate::error::{Error, Result};
use crate::image::ImageF32;

/// What one augmentation sample did to its source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentRecord {
    pub source: String,
    pub sample: usize,
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
    pub gains: Vec<f64>,
}

/// Generator seed for one (run seed, file, sample) triple: the first eight
/// bytes, little endian, of SHA-256 over the seed bytes, the name and the
/// sample index.
pub fn sample_seed(seed: u64, file: &str, sample: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(file.as_bytes());
    h.update((sample as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Side length of a crop; tiny epsilon keeps 0.8 * 100 from landing on 79.
pub fn crop_side(side: usize, fraction: f64) -> usize {
    (side as f64 * fraction + 1e-9).floor() as usize
}

/// Random crop of `crop_fraction` of each side, top-left uniform over the
/// valid offsets, then a per-channel gain drawn from `[1 - j, 1 + j]`.
pub fn augment_image(img: &ImageF32, cfg: &AugmentConfig, seed: u64, file: &str, sample: usize) -> Result<(ImageF32, AugmentRecord)> {
    cfg.validate()?;
    let (cw, ch) = (crop_side(img.width(), cfg.crop_fraction), crop_side(img.height(), cfg.crop_fraction));
    if cw == 0 || ch == 0 {
        return Err(Error::CropTooSmall { width: img.width(), height: img.height(), fraction: cfg.crop_fraction });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, file, sample));
    let x0 = rng.gen_range(0..=img.width() - cw);
    let y0 = rng.gen_range(0..=img.height() - ch);
    let j = cfg.jitter_amplitude;
    let gains: Vec<f64> = (0..img.channels()).map(|_| rng.gen_range(1.0 - j..=1.0 + j)).collect();

    let crop = img.crop(x0, y0, cw, ch)?;
    let out = if gains.iter().all(|g| *g == 1.0) {
        crop
    } else {
        let n = cw * ch;
        let samples: Vec<f32> = crop
            .samples()
            .iter()
            .enumerate()
            .map(|(i, v)| (*v as f64 * gains[i / n]) as f32)
            .collect();
        ImageF32::from_clamped(cw, ch, img.channels(), samples)?
    };
    Ok((out, AugmentRecord { source: file.to_string(), sample, x0, y0, width: cw, height: ch, gains }))
}
