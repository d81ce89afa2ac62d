use super::ImageF32;
use crate::error::Result;

/// Per-channel means of an RGB image.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChannelStats {
    pub mean_r: f64,
    pub mean_g: f64,
    pub mean_b: f64,
    /// `(mean_r + mean_g + mean_b) / 3`
    pub mean_avg: f64,
}

impl ChannelStats {
    pub fn means(&self) -> [f64; 3] {
        [self.mean_r, self.mean_g, self.mean_b]
    }
}

pub fn channel_stats(img: &ImageF32) -> Result<ChannelStats> {
    img.require_rgb()?;
    let n = img.pixel_count() as f64;
    let mean = |c: usize| img.channel(c).iter().map(|&v| v as f64).sum::<f64>() / n;
    let (mean_r, mean_g, mean_b) = (mean(0), mean(1), mean(2));
    Ok(ChannelStats {
        mean_r,
        mean_g,
        mean_b,
        mean_avg: (mean_r + mean_g + mean_b) / 3.0,
    })
}
