//! Non-local means denoising.
//!
//! For each pixel `x` the output is `sum_y w(x, y) I(y) / sum_y w(x, y)` over
//! the search window around `x` (clipped to the image), with
//! `w(x, y) = exp(-d2(x, y) / h^2)` and `d2` the mean squared difference of
//! the two replicate-padded patches. The centre pixel takes part with weight 1.
//!
//! Patch distances are evaluated per search offset with a summed-area table,
//! which makes the cost independent of the patch size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ImageF32, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NlmParams {
    pub patch_radius: usize,
    pub window_radius: usize,
    /// Filtering strength in intensity units.
    pub h: f64,
}

impl Default for NlmParams {
    fn default() -> Self {
        Self { patch_radius: 3, window_radius: 10, h: 0.1 }
    }
}

impl NlmParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_radius < self.patch_radius {
            return Err(Error::InvalidParameter(format!(
                "NLM window radius {} is smaller than patch radius {}",
                self.window_radius, self.patch_radius
            )));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidParameter(format!("NLM h must be positive, got {}", self.h)));
        }
        Ok(())
    }
}

pub fn nlm_denoise(img: &ImageF32, params: &NlmParams) -> Result<ImageF32> {
    params.validate()?;
    let min = 2 * params.patch_radius + 1;
    if img.width() < min || img.height() < min {
        return Err(Error::ImageTooSmall { width: img.width(), height: img.height(), min });
    }
    let planes: Vec<Plane> = img.planes().iter().map(|p| nlm_plane(p, params)).collect();
    ImageF32::from_planes(&planes)
}

pub(crate) fn nlm_plane(plane: &Plane, params: &NlmParams) -> Plane {
    let (w, h) = (plane.width as isize, plane.height as isize);
    let p = params.patch_radius as isize;
    let r = params.window_radius as isize;
    let patch_area = ((2 * p + 1) * (2 * p + 1)) as f64;
    let inv_h2 = 1.0 / (params.h * params.h);

    // padded grid covers z in [-p, w - 1 + p] x [-p, h - 1 + p]
    let (pw, ph) = ((w + 2 * p) as usize, (h + 2 * p) as usize);
    let mut sat = vec![0.0f64; (pw + 1) * (ph + 1)];
    let mut num = vec![0.0f64; plane.data.len()];
    let mut den = vec![0.0f64; plane.data.len()];

    for dy in -r..=r {
        for dx in -r..=r {
            // summed-area table of (P(z) - P(z + o))^2 over the padded grid
            for gy in 0..ph {
                let zy = gy as isize - p;
                let mut row = 0.0f64;
                for gx in 0..pw {
                    let zx = gx as isize - p;
                    let d = plane.get_clamped(zx, zy) as f64 - plane.get_clamped(zx + dx, zy + dy) as f64;
                    row += d * d;
                    sat[(gy + 1) * (pw + 1) + gx + 1] = sat[gy * (pw + 1) + gx + 1] + row;
                }
            }
            for y in 0..h {
                let ny = y + dy;
                if ny < 0 || ny >= h {
                    continue;
                }
                for x in 0..w {
                    let nx = x + dx;
                    if nx < 0 || nx >= w {
                        continue;
                    }
                    // patch around x spans padded indices [x, x + 2p] (inclusive)
                    let (x0, y0) = (x as usize, y as usize);
                    let (x1, y1) = (x0 + 2 * p as usize + 1, y0 + 2 * p as usize + 1);
                    let s = sat[y1 * (pw + 1) + x1] - sat[y0 * (pw + 1) + x1] - sat[y1 * (pw + 1) + x0]
                        + sat[y0 * (pw + 1) + x0];
                    let d2 = if dx == 0 && dy == 0 { 0.0 } else { s.max(0.0) / patch_area };
                    let weight = (-d2 * inv_h2).exp();
                    let i = (y * w + x) as usize;
                    num[i] += weight * plane.data[(ny * w + nx) as usize] as f64;
                    den[i] += weight;
                }
            }
        }
    }
    let data = num.iter().zip(&den).map(|(n, d)| (n / d) as f32).collect();
    Plane { width: plane.width, height: plane.height, data }
}
