//! UIQM and its colorfulness, sharpness and contrast components. All
//! intensities stay in `[0, 1]`; the block-ratio terms are scale free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::{luma, ImageF32, Plane};

pub const UIQM_WEIGHTS: [f64; 3] = [0.0282, 0.2953, 3.5753];
pub const BLOCK: usize = 8;
const TRIM: f64 = 0.1;
const EME_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UiqmComponents {
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
}

impl UiqmComponents {
    pub fn score(&self) -> f64 {
        UIQM_WEIGHTS[0] * self.uicm + UIQM_WEIGHTS[1] * self.uism + UIQM_WEIGHTS[2] * self.uiconm
    }
}

/// Trimmed mean (dropping `floor(0.1 N)` values per side) and the variance
/// of all values about it. Sorts `v`.
pub(crate) fn trimmed_stats(v: &mut [f64]) -> (f64, f64) {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let k = (TRIM * n as f64).floor() as usize;
    let kept = &v[k..n - k];
    let mu = kept.iter().sum::<f64>() / kept.len() as f64;
    let var = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n as f64;
    (mu, var)
}

pub fn uicm(img: &ImageF32) -> Result<f64> {
    img.require_rgb()?;
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    let mut rg: Vec<f64> = r.iter().zip(g).map(|(&r, &g)| r as f64 - g as f64).collect();
    let mut yb: Vec<f64> = (0..img.pixel_count())
        .map(|i| (r[i] as f64 + g[i] as f64) / 2.0 - b[i] as f64)
        .collect();
    let (mu_rg, var_rg) = trimmed_stats(&mut rg);
    let (mu_yb, var_yb) = trimmed_stats(&mut yb);
    Ok(-0.0268 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt() + 0.1586 * (var_rg + var_yb).sqrt())
}

/// 3x3 Sobel gradient magnitude with replicate padding.
pub fn sobel_magnitude(plane: &Plane) -> Vec<f64> {
    let (w, h) = (plane.width as isize, plane.height as isize);
    let p = |x: isize, y: isize| plane.get_clamped(x, y) as f64;
    let mut out = Vec::with_capacity(plane.data.len());
    for y in 0..h {
        for x in 0..w {
            let gx = (p(x + 1, y - 1) + 2.0 * p(x + 1, y) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2.0 * p(x - 1, y) + p(x - 1, y + 1));
            let gy = (p(x - 1, y + 1) + 2.0 * p(x, y + 1) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2.0 * p(x, y - 1) + p(x + 1, y - 1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

fn require_block(img: &ImageF32) -> Result<()> {
    if img.width() < BLOCK || img.height() < BLOCK {
        return Err(Error::ImageTooSmall { width: img.width(), height: img.height(), min: BLOCK });
    }
    Ok(())
}

/// (min, max) of every full 8x8 block, row-major over blocks.
fn block_extrema(values: &[f64], width: usize, height: usize) -> Vec<(f64, f64)> {
    let (bx, by) = (width / BLOCK, height / BLOCK);
    let mut out = Vec::with_capacity(bx * by);
    for j in 0..by {
        for i in 0..bx {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for y in j * BLOCK..(j + 1) * BLOCK {
                for &v in &values[y * width + i * BLOCK..y * width + (i + 1) * BLOCK] {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            out.push((lo, hi));
        }
    }
    out
}

/// `(2 / K) sum ln(max / min)` over 8x8 blocks; blocks with `min < 1e-6` add 0.
pub fn eme(values: &[f64], width: usize, height: usize) -> f64 {
    let blocks = block_extrema(values, width, height);
    let sum: f64 = blocks
        .iter()
        .map(|&(lo, hi)| if lo < EME_FLOOR { 0.0 } else { (hi / lo).ln() })
        .sum();
    2.0 * sum / blocks.len() as f64
}

pub fn uism(img: &ImageF32) -> Result<f64> {
    img.require_rgb()?;
    require_block(img)?;
    let weights = [0.299, 0.587, 0.114];
    Ok((0..3)
        .map(|c| weights[c] * eme(&sobel_magnitude(&img.plane(c)), img.width(), img.height()))
        .sum())
}

/// Mean over 8x8 luminance blocks of `t |ln t|` with
/// `t = (max - min) / (max + min + 1e-12)`.
pub fn uiconm(img: &ImageF32) -> Result<f64> {
    require_block(img)?;
    let l: Vec<f64> = luma(img).data.iter().map(|&v| v as f64).collect();
    let blocks = block_extrema(&l, img.width(), img.height());
    let sum: f64 = blocks
        .iter()
        .map(|&(lo, hi)| {
            let t = (hi - lo) / (hi + lo + 1e-12);
            if t > 0.0 {
                t * t.ln().abs()
            } else {
                0.0
            }
        })
        .sum();
    Ok(sum / blocks.len() as f64)
}

pub fn uiqm(img: &ImageF32) -> Result<(f64, UiqmComponents)> {
    let parts = UiqmComponents { uicm: uicm(img)?, uism: uism(img)?, uiconm: uiconm(img)? };
    Ok((parts.score(), parts))
}
