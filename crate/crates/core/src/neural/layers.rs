use serde::{Deserialize, Serialize};

use super::tensor::{relu_in_place, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    None,
}

/// 2-D convolution layer. Weights are `(out, in, k, k)` row-major and are
/// applied as cross-correlation (no kernel flip).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub out_channels: usize,
    pub in_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
    pub activation: Activation,
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

impl ConvLayer {
    pub fn new(
        out_channels: usize,
        in_channels: usize,
        kernel: usize,
        stride: usize,
        padding: usize,
        activation: Activation,
        weights: Vec<f32>,
        bias: Vec<f32>,
    ) -> Result<Self> {
        if kernel % 2 == 0 || stride == 0 {
            return Err(Error::ShapeMismatch(format!("kernel {kernel} must be odd and stride {stride} positive")));
        }
        if weights.len() != out_channels * in_channels * kernel * kernel || bias.len() != out_channels {
            return Err(Error::ShapeMismatch(format!(
                "conv ({out_channels}, {in_channels}, {kernel}, {kernel}) got {} weights and {} biases",
                weights.len(),
                bias.len()
            )));
        }
        Ok(Self { out_channels, in_channels, kernel, stride, padding, activation, weights, bias })
    }

    /// All-zero weights and biases.
    pub fn zeros(out_channels: usize, in_channels: usize, kernel: usize, stride: usize, padding: usize, activation: Activation) -> Self {
        Self {
            out_channels,
            in_channels,
            kernel,
            stride,
            padding,
            activation,
            weights: vec![0.0; out_channels * in_channels * kernel * kernel],
            bias: vec![0.0; out_channels],
        }
    }

    pub fn weight_shape(&self) -> [usize; 4] {
        [self.out_channels, self.in_channels, self.kernel, self.kernel]
    }

    /// `floor((n + 2p - k) / s) + 1`.
    pub fn output_dim(&self, n: usize) -> Result<usize> {
        let padded = n + 2 * self.padding;
        if padded < self.kernel {
            return Err(Error::NonIntegralOutputDim(format!(
                "input {n} with padding {} is smaller than kernel {}",
                self.padding, self.kernel
            )));
        }
        Ok((padded - self.kernel) / self.stride + 1)
    }

    fn w(&self, o: usize, i: usize, ky: usize, kx: usize) -> f32 {
        self.weights[((o * self.in_channels + i) * self.kernel + ky) * self.kernel + kx]
    }
}

/// Valid output index range `[lo, hi)` for kernel offset `k` along one axis.
fn valid_range(k: usize, pad: usize, stride: usize, in_len: usize, out_len: usize) -> (usize, usize) {
    // input index = o * stride + k - pad must land in [0, in_len)
    let lo = if pad > k { (pad - k).div_ceil(stride).min(out_len) } else { 0 };
    let hi = if in_len + pad > k { ((in_len + pad - k - 1) / stride + 1).min(out_len) } else { 0 };
    (lo, hi.max(lo))
}

/// Zero-padded convolution. Each output element is the bias plus the
/// products summed in input-channel-major, then row-major kernel order.
pub fn conv2d_forward(input: &Tensor, layer: &ConvLayer) -> Result<Tensor> {
    let (c, h, w) = input.shape();
    if c != layer.in_channels {
        return Err(Error::ShapeMismatch(format!(
            "conv expects {} input channels, got {c}",
            layer.in_channels
        )));
    }
    let oh = layer.output_dim(h)?;
    let ow = layer.output_dim(w)?;
    let (s, p) = (layer.stride, layer.padding);
    let mut out = Tensor::zeros(layer.out_channels, oh, ow);
    let data = out.data_mut();
    let src = input.data();
    for o in 0..layer.out_channels {
        let plane = &mut data[o * oh * ow..(o + 1) * oh * ow];
        plane.fill(layer.bias[o]);
        for i in 0..c {
            let in_plane = &src[i * h * w..(i + 1) * h * w];
            for ky in 0..layer.kernel {
                let (y_lo, y_hi) = valid_range(ky, p, s, h, oh);
                for kx in 0..layer.kernel {
                    let (x_lo, x_hi) = valid_range(kx, p, s, w, ow);
                    if x_lo == x_hi {
                        continue;
                    }
                    let wt = layer.w(o, i, ky, kx);
                    for oy in y_lo..y_hi {
                        let iy = oy * s + ky - p;
                        let in_row = &in_plane[iy * w..(iy + 1) * w];
                        let out_row = &mut plane[oy * ow..(oy + 1) * ow];
                        if s == 1 {
                            let ix0 = x_lo + kx - p;
                            for (ov, iv) in out_row[x_lo..x_hi].iter_mut().zip(&in_row[ix0..ix0 + (x_hi - x_lo)]) {
                                *ov += wt * iv;
                            }
                        } else {
                            for ox in x_lo..x_hi {
                                out_row[ox] += wt * in_row[ox * s + kx - p];
                            }
                        }
                    }
                }
            }
        }
    }
    if layer.activation == Activation::Relu {
        relu_in_place(&mut out);
    }
    Ok(out)
}

/// Two stride-1, same-padded convolutions with an identity shortcut:
/// `relu(x + conv_b(relu(conv_a(x))))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBlock {
    pub conv_a: ConvLayer,
    pub conv_b: ConvLayer,
}

impl ResidualBlock {
    pub fn new(conv_a: ConvLayer, conv_b: ConvLayer) -> Result<Self> {
        for conv in [&conv_a, &conv_b] {
            if conv.stride != 1 || conv.padding != conv.kernel / 2 || conv.in_channels != conv.out_channels {
                return Err(Error::ShapeMismatch(
                    "residual convolutions must be stride 1, same-padded and channel preserving".into(),
                ));
            }
        }
        if conv_a.out_channels != conv_b.in_channels {
            return Err(Error::ShapeMismatch("residual convolutions disagree on channel count".into()));
        }
        Ok(Self { conv_a, conv_b })
    }

    pub fn zeros(channels: usize, kernel: usize) -> Self {
        Self {
            conv_a: ConvLayer::zeros(channels, channels, kernel, 1, kernel / 2, Activation::Relu),
            conv_b: ConvLayer::zeros(channels, channels, kernel, 1, kernel / 2, Activation::None),
        }
    }

    pub fn channels(&self) -> usize {
        self.conv_a.in_channels
    }
}

pub fn residual_forward(input: &Tensor, block: &ResidualBlock) -> Result<Tensor> {
    let mut a = conv2d_forward(input, &block.conv_a)?;
    relu_in_place(&mut a);
    let mut b = conv2d_forward(&a, &block.conv_b)?;
    for (v, x) in b.data_mut().iter_mut().zip(input.data()) {
        *v += x;
    }
    relu_in_place(&mut b);
    Ok(b)
}
