use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::image::{hsv_to_rgb, rgb_to_hsv, ImageF32, Plane};

/// Channel mean per position, min-max normalized (constant maps become 0.5)
/// and bilinearly resized with half-pixel centres.
pub fn attention_map(features: &Tensor, out_h: usize, out_w: usize) -> Result<Plane> {
    let (c, h, w) = features.shape();
    if c == 0 || h == 0 || w == 0 || out_h == 0 || out_w == 0 {
        return Err(Error::InvalidParameter("attention map needs non-empty features and output".into()));
    }
    let mut mean = vec![0.0f64; h * w];
    for ch in 0..c {
        for (m, &v) in mean.iter_mut().zip(features.channel(ch)) {
            *m += v as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= c as f64);
    let lo = mean.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mean.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm: Vec<f64> = if hi > lo {
        mean.iter().map(|m| (m - lo) / (hi - lo)).collect()
    } else {
        vec![0.5; h * w]
    };
    Ok(resize_bilinear(&norm, w, h, out_w, out_h))
}

fn source_coord(dst: usize, in_len: usize, out_len: usize) -> (usize, usize, f64) {
    let s = ((dst as f64 + 0.5) * in_len as f64 / out_len as f64 - 0.5).clamp(0.0, (in_len - 1) as f64);
    let i0 = s.floor() as usize;
    (i0, (i0 + 1).min(in_len - 1), s - i0 as f64)
}

fn resize_bilinear(src: &[f64], w: usize, h: usize, out_w: usize, out_h: usize) -> Plane {
    let xs: Vec<_> = (0..out_w).map(|x| source_coord(x, w, out_w)).collect();
    let mut data = Vec::with_capacity(out_w * out_h);
    for y in 0..out_h {
        let (y0, y1, fy) = source_coord(y, h, out_h);
        for &(x0, x1, fx) in &xs {
            let top = src[y0 * w + x0] * (1.0 - fx) + src[y0 * w + x1] * fx;
            let bottom = src[y1 * w + x0] * (1.0 - fx) + src[y1 * w + x1] * fx;
            data.push((top * (1.0 - fy) + bottom * fy) as f32);
        }
    }
    Plane { width: out_w, height: out_h, data }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FuseMode {
    #[default]
    Mean,
}

pub fn fuse_attention(a: &Plane, b: &Plane, mode: FuseMode) -> Result<Plane> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimMismatch(format!(
            "attention maps {}x{} and {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    let data = match mode {
        FuseMode::Mean => a.data.iter().zip(&b.data).map(|(&x, &y)| ((x as f64 + y as f64) * 0.5) as f32).collect(),
    };
    Ok(Plane { width: a.width, height: a.height, data })
}

/// `V' = clamp(V * (1 + gain * (attn - mean(attn))))` on the HSV value
/// channel; hue and saturation are kept.
pub fn feature_guided_enhance(img: &ImageF32, attn: &Plane, gain: f64) -> Result<ImageF32> {
    if attn.width != img.width() || attn.height != img.height() {
        return Err(Error::DimMismatch(format!(
            "attention {}x{} for image {}x{}",
            attn.width,
            attn.height,
            img.width(),
            img.height()
        )));
    }
    if !(gain >= 0.0) || !gain.is_finite() {
        return Err(Error::InvalidParameter(format!("feature gain must be non-negative, got {gain}")));
    }
    if gain == 0.0 {
        return Ok(img.clone());
    }
    let hsv = rgb_to_hsv(img)?;
    let mean = attn.data.iter().map(|&a| a as f64).sum::<f64>() / attn.data.len() as f64;
    let mut v = hsv.plane(2);
    for (s, &a) in v.data.iter_mut().zip(&attn.data) {
        *s = (*s as f64 * (1.0 + gain * (a as f64 - mean))).clamp(0.0, 1.0) as f32;
    }
    hsv_to_rgb(&ImageF32::from_planes(&[hsv.plane(0), hsv.plane(1), v])?)
}
