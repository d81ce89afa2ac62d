use crate::error::{Result, Warning};
use crate::image::{channel_stats, ImageF32};

const MIN_MEAN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GrayWorldOutcome {
    pub image: ImageF32,
    /// Gain applied to each channel (1 for skipped channels).
    pub gains: [f64; 3],
    pub warnings: Vec<Warning>,
}

/// Scales each channel by `mean_avg / mean_c` so that, before clamping, every
/// channel mean equals the cross-channel mean. Channels whose mean is at most
/// 1e-6 are left unscaled with a [`Warning::ZeroChannelMean`].
pub fn gray_world(img: &ImageF32) -> Result<GrayWorldOutcome> {
    let stats = channel_stats(img)?;
    let mut gains = [1.0; 3];
    let mut warnings = Vec::new();
    for (c, mean) in stats.means().into_iter().enumerate() {
        if mean > MIN_MEAN {
            gains[c] = stats.mean_avg / mean;
        } else {
            warnings.push(Warning::ZeroChannelMean { channel: c });
        }
    }
    let n = img.pixel_count();
    let samples = img
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &s)| (s as f64 * gains[i / n]) as f32)
        .collect();
    let image = ImageF32::from_clamped(img.width(), img.height(), 3, samples)?;
    Ok(GrayWorldOutcome { image, gains, warnings })
}

pub fn gray_world_correct(img: &ImageF32) -> Result<ImageF32> {
    Ok(gray_world(img)?.image)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_maps_to_mean_avg() {
        let out = gray_world_correct(&ImageF32::solid_rgb(3, 3, [0.6, 0.3, 0.3]).unwrap()).unwrap();
        assert!(out.samples().iter().all(|&s| s == 0.4f32), "{:?}", &out.samples()[..3]);
    }

    #[test]
    fn gray_unchanged() {
        let img = ImageF32::from_fn(5, 5, 3, |_, x, y| ((x + 2 * y) % 5) as f32 / 5.0).unwrap();
        assert_eq!(gray_world_correct(&img).unwrap(), img);
    }

    #[test]
    fn zero_channel_left_alone() {
        let img = ImageF32::solid_rgb(2, 2, [0.0, 0.4, 0.2]).unwrap();
        let out = gray_world(&img).unwrap();
        assert_eq!(out.warnings, vec![Warning::ZeroChannelMean { channel: 0 }]);
        assert_eq!(out.gains[0], 1.0);
        assert!(out.image.channel(0).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn idempotent_without_clamping() {
        let img = ImageF32::from_fn(8, 8, 3, |c, x, y| 0.1 + 0.05 * c as f32 + 0.01 * ((x * 3 + y * 5) % 7) as f32).unwrap();
        let once = gray_world_correct(&img).unwrap();
        let twice = gray_world_correct(&once).unwrap();
        for (a, b) in once.samples().iter().zip(twice.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
