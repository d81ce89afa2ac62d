use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{gaussian_blur, hsv_to_rgb, rgb_to_hsv, ImageF32, Plane};

const LOG_EPS: f64 = 1e-3;

/// Illumination / reflectance gains for the log-domain split of the value
/// channel. The lowpass is a spatial Gaussian rather than a frequency-domain
/// filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomomorphicParams {
    pub gamma_low: f64,
    pub gamma_high: f64,
    pub sigma: f64,
}

impl Default for HomomorphicParams {
    fn default() -> Self {
        Self { gamma_low: 0.7, gamma_high: 1.3, sigma: 15.0 }
    }
}

impl HomomorphicParams {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma_low.is_finite() || !self.gamma_high.is_finite() {
            return Err(Error::InvalidParameter("homomorphic gains must be finite".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::NonPositiveSigma(self.sigma));
        }
        Ok(())
    }
}

pub(crate) fn homomorphic_plane(v: &Plane, params: &HomomorphicParams) -> Result<Plane> {
    let log = Plane {
        width: v.width,
        height: v.height,
        data: v.data.iter().map(|&s| (s as f64 + LOG_EPS).ln() as f32).collect(),
    };
    let low = gaussian_blur(&log, params.sigma)?;
    let data = log
        .data
        .iter()
        .zip(&low.data)
        .map(|(&l, &lp)| {
            let (l, lp) = (l as f64, lp as f64);
            ((params.gamma_low * lp + params.gamma_high * (l - lp)).exp() - LOG_EPS) as f32
        })
        .collect();
    Ok(Plane { width: v.width, height: v.height, data })
}

/// `exp(g_low * lowpass + g_high * (log v - lowpass)) - eps` on the value
/// channel, with `log v = ln(v + eps)` and `eps = 1e-3`.
pub fn homomorphic_filter(img: &ImageF32, params: &HomomorphicParams) -> Result<ImageF32> {
    params.validate()?;
    let hsv = rgb_to_hsv(img)?;
    let v = homomorphic_plane(&hsv.plane(2), params)?;
    hsv_to_rgb(&ImageF32::from_planes(&[hsv.plane(0), hsv.plane(1), v])?)
}
