use crate::error::{Error, Result};
use crate::image::ImageF32;

/// Rank-3 `(channels, height, width)` tensor, channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(Error::ShapeMismatch(format!(
                "shape ({channels}, {height}, {width}) needs {} values, got {}",
                channels * height * width,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch("tensor values must be finite".into()));
        }
        Ok(Self { channels, height, width, data })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self { channels, height, width, data: vec![0.0; channels * height * width] }
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: f32) -> Self {
        Self { channels, height, width, data: vec![value; channels * height * width] }
    }

    /// RGB image as a `(3, H, W)` tensor, values unchanged.
    pub fn from_image(img: &ImageF32) -> Self {
        Self {
            channels: img.channels(),
            height: img.height(),
            width: img.width(),
            data: img.samples().to_vec(),
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }
}

/// Elementwise `max(0, x)`.
pub fn relu(t: &Tensor) -> Tensor {
    let mut out = t.clone();
    relu_in_place(&mut out);
    out
}

pub(crate) fn relu_in_place(t: &mut Tensor) {
    t.data.iter_mut().for_each(|v| *v = v.max(0.0));
}

/// Non-overlapping 2x2 max pooling.
pub fn max_pool2(t: &Tensor) -> Result<Tensor> {
    if t.height % 2 != 0 || t.width % 2 != 0 {
        return Err(Error::OddSpatialDim { height: t.height, width: t.width });
    }
    let (h, w) = (t.height / 2, t.width / 2);
    let mut data = Vec::with_capacity(t.channels * h * w);
    for c in 0..t.channels {
        for y in 0..h {
            for x in 0..w {
                let v = t
                    .get(c, 2 * y, 2 * x)
                    .max(t.get(c, 2 * y, 2 * x + 1))
                    .max(t.get(c, 2 * y + 1, 2 * x))
                    .max(t.get(c, 2 * y + 1, 2 * x + 1));
                data.push(v);
            }
        }
    }
    Ok(Tensor { channels: t.channels, height: h, width: w, data })
}
