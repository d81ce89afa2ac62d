//! Planar floating-point images and the primitives every other module builds
//! on: PPM I/O, color conversions, spatial filtering and channel statistics.

mod color;
mod filter;
mod ppm;
mod stats;

pub(crate) use color::rgb_pixel;
pub use color::{hsv_to_rgb, lab_to_rgb, rgb_to_hsv, rgb_to_lab, LabPixel};
pub use filter::{convolve2d, gaussian_blur, gaussian_kernel_1d, laplacian_variance, luma, Kernel2D};
pub use ppm::{decode_ppm, encode_ppm, load_ppm, save_ppm};
pub use stats::{channel_stats, ChannelStats};

use crate::error::{Error, Result};

/// Planar image with samples in `[0, 1]`.
///
/// Samples are stored channel-major, then row-major: sample `(c, x, y)` lives at
/// `c * width * height + y * width + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageF32 {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f32>,
}

impl ImageF32 {
    /// Validating constructor. Rejects zero dimensions, channel counts other
    /// than 1 or 3, length mismatches and samples outside `[0, 1]`.
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<f32>) -> Result<Self> {
        check_dims(width, height, channels)?;
        if samples.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidImage(format!("sample {bad} outside [0, 1]")));
        }
        Ok(Self { width, height, channels, samples })
    }

    /// Builds an image from arbitrary values, clamping each into `[0, 1]`.
    /// NaN becomes 0.
    pub fn from_clamped(width: usize, height: usize, channels: usize, mut samples: Vec<f32>) -> Result<Self> {
        check_dims(width, height, channels)?;
        if samples.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        samples.iter_mut().for_each(|s| *s = clamp_unit(*s));
        Ok(Self { width, height, channels, samples })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f32) -> Result<Self> {
        Self::from_clamped(width, height, channels, vec![value; width * height * channels])
    }

    /// Constant RGB image.
    pub fn solid_rgb(width: usize, height: usize, rgb: [f32; 3]) -> Result<Self> {
        let n = width * height;
        let mut samples = Vec::with_capacity(3 * n);
        for v in rgb {
            samples.extend(std::iter::repeat(v).take(n));
        }
        Self::new(width, height, 3, samples)
    }

    /// Builds an image by evaluating `f(channel, x, y)` for every sample. The
    /// result is clamped.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        check_dims(width, height, channels)?;
        let mut samples = Vec::with_capacity(width * height * channels);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    samples.push(f(c, x, y));
                }
            }
        }
        Self::from_clamped(width, height, channels, samples)
    }

    /// Stacks equally sized planes into an image, clamping every sample.
    pub fn from_planes(planes: &[Plane]) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::InvalidImage("no planes".into()))?;
        if planes.iter().any(|p| p.width != first.width || p.height != first.height) {
            return Err(Error::DimMismatch("planes differ in size".into()));
        }
        let samples = planes.iter().flat_map(|p| p.data.iter().copied()).collect();
        Self::from_clamped(first.width, first.height, planes.len(), samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Pixels per channel.
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.pixel_count();
        &self.samples[c * n..(c + 1) * n]
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f32 {
        self.samples[c * self.pixel_count() + y * self.width + x]
    }

    /// Copies one channel out as a [`Plane`].
    pub fn plane(&self, c: usize) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.channel(c).to_vec(),
        }
    }

    pub fn planes(&self) -> Vec<Plane> {
        (0..self.channels).map(|c| self.plane(c)).collect()
    }

    /// Applies `f` to every sample and clamps the result.
    pub fn map(&self, mut f: impl FnMut(f32) -> f32) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| clamp_unit(f(s))).collect(),
            ..*self
        }
    }

    /// Sub-image with top-left corner `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || x0 + width > self.width || y0 + height > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop {width}x{height}+{x0}+{y0} outside {}x{}",
                self.width, self.height
            )));
        }
        let mut samples = Vec::with_capacity(width * height * self.channels);
        for c in 0..self.channels {
            let plane = self.channel(c);
            for y in y0..y0 + height {
                samples.extend_from_slice(&plane[y * self.width + x0..y * self.width + x0 + width]);
            }
        }
        Ok(Self { width, height, channels: self.channels, samples })
    }

    /// Mirror across the vertical axis.
    pub fn flip_horizontal(&self) -> Self {
        self.remap(self.width, self.height, |x, y| (self.width - 1 - x, y))
    }

    pub fn flip_vertical(&self) -> Self {
        self.remap(self.width, self.height, |x, y| (x, self.height - 1 - y))
    }

    /// Rotation by 90 degrees clockwise.
    pub fn rotate90(&self) -> Self {
        // output (x, y) comes from input (y, H - 1 - x)
        self.remap(self.height, self.width, |x, y| (y, self.height - 1 - x))
    }

    fn remap(&self, width: usize, height: usize, src: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let mut samples = Vec::with_capacity(self.samples.len());
        for c in 0..self.channels {
            for y in 0..height {
                for x in 0..width {
                    let (sx, sy) = src(x, y);
                    samples.push(self.get(c, sx, sy));
                }
            }
        }
        Self { width, height, channels: self.channels, samples }
    }

    pub(crate) fn require_rgb(&self) -> Result<()> {
        if self.channels != 3 {
            return Err(Error::ChannelMismatch { expected: 3, found: self.channels });
        }
        Ok(())
    }
}

fn check_dims(width: usize, height: usize, channels: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!("zero dimension {width}x{height}")));
    }
    if channels != 1 && channels != 3 {
        return Err(Error::InvalidImage(format!("{channels} channels (expected 1 or 3)")));
    }
    Ok(())
}

#[inline]
pub(crate) fn clamp_unit(v: f32) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// A single 2-D plane of unrestricted real values (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("zero dimension {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "plane expects {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    /// Sample with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f32 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.data
            .iter()
            .map(|&v| {
                let d = v as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / self.data.len() as f64
    }
}
