//! Detection of color cast, low light and blur, and their combination into
//! eight degradation categories.

mod summary;

pub use summary::{paper_table_ii, CooccurrenceCell, DatasetReport, Marginals};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::image::{channel_stats, laplacian_variance, rgb_to_hsv, ImageF32};

/// Decision thresholds for the three detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierThresholds {
    /// Maximum relative deviation of a channel mean from the cross-channel mean.
    pub cast_ratio: f64,
    /// Mean HSV value below which an image counts as low light.
    pub brightness_floor: f64,
    /// Laplacian variance (on `[0, 1]` luminance) below which an image is blurred.
    pub sharpness_floor: f64,
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        Self { cast_ratio: 0.25, brightness_floor: 0.35, sharpness_floor: 0.0015 }
    }
}

impl ClassifierThresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.cast_ratio) || !ok(self.brightness_floor) || !ok(self.sharpness_floor) {
            return Err(Error::InvalidParameter("classifier thresholds must be strictly positive".into()));
        }
        if self.brightness_floor >= 1.0 {
            return Err(Error::InvalidParameter("brightness_floor must be below 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DegradationFlags {
    pub color_cast: bool,
    pub low_light: bool,
    pub blurred: bool,
}

impl DegradationFlags {
    pub fn new(color_cast: bool, low_light: bool, blurred: bool) -> Self {
        Self { color_cast, low_light, blurred }
    }

    pub fn category(self) -> Category8 {
        use Category8::*;
        match (self.color_cast, self.low_light, self.blurred) {
            (true, false, false) => ColorBiasOnly,
            (true, false, true) => ColorBiasBlur,
            (true, true, false) => ColorBiasLowLight,
            (true, true, true) => ColorBiasLowLightBlur,
            (false, false, false) => NoIssues,
            (false, false, true) => BlurOnly,
            (false, true, true) => LowLightBlur,
            (false, true, false) => LowLightOnly,
        }
    }
}

/// The eight degradation combinations, declared in report rank order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category8 {
    ColorBiasOnly,
    ColorBiasBlur,
    ColorBiasLowLight,
    ColorBiasLowLightBlur,
    NoIssues,
    BlurOnly,
    LowLightBlur,
    LowLightOnly,
}

impl Category8 {
    pub const ALL: [Category8; 8] = [
        Category8::ColorBiasOnly,
        Category8::ColorBiasBlur,
        Category8::ColorBiasLowLight,
        Category8::ColorBiasLowLightBlur,
        Category8::NoIssues,
        Category8::BlurOnly,
        Category8::LowLightBlur,
        Category8::LowLightOnly,
    ];

    /// 1-based report rank.
    pub fn rank(self) -> usize {
        self as usize + 1
    }

    pub fn description(self) -> &'static str {
        match self {
            Category8::ColorBiasOnly => "Color bias only",
            Category8::ColorBiasBlur => "Color bias + blur",
            Category8::ColorBiasLowLight => "Color bias + low light",
            Category8::ColorBiasLowLightBlur => "Color bias + low light + blur",
            Category8::NoIssues => "No issues",
            Category8::BlurOnly => "Blur only",
            Category8::LowLightBlur => "Low light + blur",
            Category8::LowLightOnly => "Low light only",
        }
    }

    /// Identifier used in CSV files.
    pub fn id(self) -> &'static str {
        match self {
            Category8::ColorBiasOnly => "ColorBiasOnly",
            Category8::ColorBiasBlur => "ColorBiasBlur",
            Category8::ColorBiasLowLight => "ColorBiasLowLight",
            Category8::ColorBiasLowLightBlur => "ColorBiasLowLightBlur",
            Category8::NoIssues => "NoIssues",
            Category8::BlurOnly => "BlurOnly",
            Category8::LowLightBlur => "LowLightBlur",
            Category8::LowLightOnly => "LowLightOnly",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn flags(self) -> DegradationFlags {
        use Category8::*;
        let (c, l, b) = match self {
            ColorBiasOnly => (true, false, false),
            ColorBiasBlur => (true, false, true),
            ColorBiasLowLight => (true, true, false),
            ColorBiasLowLightBlur => (true, true, true),
            NoIssues => (false, false, false),
            BlurOnly => (false, false, true),
            LowLightBlur => (false, true, true),
            LowLightOnly => (false, true, false),
        };
        DegradationFlags::new(c, l, b)
    }
}

impl std::fmt::Display for Category8 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CastDiagnostics {
    pub mean_r: f64,
    pub mean_g: f64,
    pub mean_b: f64,
    pub mean_avg: f64,
    /// `max_c |mean_c - mean_avg| / mean_avg`, 0 for near-black images.
    pub max_rel_dev: f64,
    pub warning: Option<Warning>,
}

const NEAR_BLACK: f64 = 1e-6;

/// Color cast holds when some channel mean deviates from the cross-channel
/// mean by more than `cast_ratio` of it. Near-black images report no cast and
/// carry [`Warning::NearBlackImage`].
pub fn detect_color_cast(img: &ImageF32, t: &ClassifierThresholds) -> Result<(bool, CastDiagnostics)> {
    let s = channel_stats(img)?;
    let mut d = CastDiagnostics {
        mean_r: s.mean_r,
        mean_g: s.mean_g,
        mean_b: s.mean_b,
        mean_avg: s.mean_avg,
        max_rel_dev: 0.0,
        warning: None,
    };
    if s.mean_avg <= NEAR_BLACK {
        d.warning = Some(Warning::NearBlackImage);
        return Ok((false, d));
    }
    d.max_rel_dev = s
        .means()
        .iter()
        .map(|m| (m - s.mean_avg).abs() / s.mean_avg)
        .fold(0.0, f64::max);
    Ok((d.max_rel_dev > t.cast_ratio, d))
}

/// Mean of the HSV value channel.
pub fn mean_value(img: &ImageF32) -> Result<f64> {
    let hsv = rgb_to_hsv(img)?;
    Ok(hsv.channel(2).iter().map(|&v| v as f64).sum::<f64>() / img.pixel_count() as f64)
}

pub fn detect_low_light(img: &ImageF32, t: &ClassifierThresholds) -> Result<bool> {
    Ok(mean_value(img)? < t.brightness_floor)
}

/// Featureless (constant) images have zero Laplacian variance and therefore
/// classify as blurred.
pub fn detect_blur(img: &ImageF32, t: &ClassifierThresholds) -> bool {
    laplacian_variance(img) < t.sharpness_floor
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub flags: DegradationFlags,
    pub category: Category8,
    pub cast: CastDiagnostics,
    pub mean_v: f64,
    pub laplacian_variance: f64,
}

impl Classification {
    pub fn warning(&self) -> Option<Warning> {
        self.cast.warning
    }
}

pub fn classify(img: &ImageF32, t: &ClassifierThresholds) -> Result<Classification> {
    let (color_cast, cast) = detect_color_cast(img, t)?;
    let mean_v = mean_value(img)?;
    let lap = laplacian_variance(img);
    let flags = DegradationFlags::new(color_cast, mean_v < t.brightness_floor, lap < t.sharpness_floor);
    Ok(Classification { flags, category: flags.category(), cast, mean_v, laplacian_variance: lap })
}
