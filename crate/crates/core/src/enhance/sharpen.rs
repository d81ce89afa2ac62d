use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{convolve2d, ImageF32, Kernel2D, Plane};

/// Which Laplacian kernel drives the sharpening term `I + s * (K * I)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    /// Center 8, ring -1. Sums to zero, so flat regions pass through.
    #[default]
    ZeroSum,
    /// Center -9, ring -1, exactly as published. Sums to -17: a constant `c`
    /// becomes `-16c` before clamping. Kept for fidelity experiments.
    Paper,
}

impl KernelMode {
    pub fn kernel(self) -> Kernel2D {
        let center = match self {
            KernelMode::ZeroSum => 8.0,
            KernelMode::Paper => -9.0,
        };
        Kernel2D::from_rows([[-1.0, -1.0, -1.0], [-1.0, center, -1.0], [-1.0, -1.0, -1.0]]).expect("static kernel")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpenParams {
    pub strength: f64,
    pub kernel_mode: KernelMode,
}

impl Default for SharpenParams {
    fn default() -> Self {
        Self { strength: 1.0, kernel_mode: KernelMode::ZeroSum }
    }
}

impl SharpenParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0) || !self.strength.is_finite() {
            return Err(Error::NegativeStrength(self.strength));
        }
        Ok(())
    }
}

/// Per-channel `I + strength * (K * I)` before clamping.
pub fn sharpen_unclamped(img: &ImageF32, params: &SharpenParams) -> Result<Vec<Plane>> {
    params.validate()?;
    let k = params.kernel_mode.kernel();
    Ok(img
        .planes()
        .into_iter()
        .map(|p| {
            let detail = convolve2d(&p, &k);
            let data = p
                .data
                .iter()
                .zip(&detail.data)
                .map(|(&i, &d)| (i as f64 + params.strength * d as f64) as f32)
                .collect();
            Plane { width: p.width, height: p.height, data }
        })
        .collect())
}

pub fn sharpen(img: &ImageF32, params: &SharpenParams) -> Result<ImageF32> {
    if params.strength == 0.0 {
        params.validate()?;
        return Ok(img.clone());
    }
    ImageF32::from_planes(&sharpen_unclamped(img, params)?)
}
