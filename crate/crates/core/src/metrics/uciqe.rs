use serde::Serialize;

use crate::error::Result;
use crate::image::{rgb_to_lab, ImageF32};

pub const UCIQE_WEIGHTS: [f64; 3] = [0.4680, 0.2745, 0.2576];

/// UCIQE components. Chroma and lightness are divided by 100.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UciqeComponents {
    pub sigma_c: f64,
    pub con_l: f64,
    pub mu_s: f64,
}

impl UciqeComponents {
    pub fn score(&self) -> f64 {
        UCIQE_WEIGHTS[0] * self.sigma_c + UCIQE_WEIGHTS[1] * self.con_l + UCIQE_WEIGHTS[2] * self.mu_s
    }
}

/// Mean of the `ceil(0.01 N)` highest minus mean of the `ceil(0.01 N)`
/// lowest values of `l`, divided by 100.
pub(crate) fn lightness_contrast(l: &mut [f64]) -> f64 {
    l.sort_by(f64::total_cmp);
    let n = l.len();
    let k = (n as f64 * 0.01).ceil() as usize;
    let low: f64 = l[..k].iter().sum::<f64>() / k as f64;
    let high: f64 = l[n - k..].iter().sum::<f64>() / k as f64;
    (high - low) / 100.0
}

pub fn uciqe(img: &ImageF32) -> Result<(f64, UciqeComponents)> {
    let lab = rgb_to_lab(img)?;
    let n = lab.len() as f64;
    let chroma: Vec<f64> = lab.iter().map(|p| (p.a * p.a + p.b * p.b).sqrt()).collect();
    let mean_c = chroma.iter().sum::<f64>() / n;
    let var_c = chroma.iter().map(|c| (c - mean_c).powi(2)).sum::<f64>() / n;
    let mu_s = lab
        .iter()
        .zip(&chroma)
        .map(|(p, &c)| {
            let denom = c * c + p.l * p.l;
            if denom < 1e-9 {
                0.0
            } else {
                c / denom.sqrt()
            }
        })
        .sum::<f64>()
        / n;
    let mut l: Vec<f64> = lab.iter().map(|p| p.l).collect();
    let parts = UciqeComponents { sigma_c: var_c.sqrt() / 100.0, con_l: lightness_contrast(&mut l), mu_s };
    Ok((parts.score(), parts))
}
