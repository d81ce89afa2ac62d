use serde::{Deserialize, Serialize};

use super::layers::{conv2d_forward, residual_forward, Activation, ConvLayer, ResidualBlock};
use super::tensor::{max_pool2, Tensor};
use crate::error::{Error, Result};
use crate::image::ImageF32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    VggHead,
    ResnetHead,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv {
        name: String,
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        stride: usize,
        padding: usize,
        activation: Activation,
    },
    MaxPool2,
    Residual {
        name: String,
        channels: usize,
        kernel: usize,
    },
}

/// One named parameter tensor as it appears in a weight manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSlot {
    pub name: String,
    pub shape: Vec<usize>,
    /// `in * k * k` for weights, 0 for biases.
    pub fan_in: usize,
}

impl ParamSlot {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_bias(&self) -> bool {
        self.fan_in == 0
    }
}

fn conv_slots(name: &str, out_c: usize, in_c: usize, k: usize) -> [ParamSlot; 2] {
    [
        ParamSlot { name: format!("{name}.weight"), shape: vec![out_c, in_c, k, k], fan_in: in_c * k * k },
        ParamSlot { name: format!("{name}.bias"), shape: vec![out_c], fan_in: 0 },
    ]
}

/// Layer list plus the index of the layer whose output is the feature tap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorSpec {
    pub name: HeadKind,
    pub layers: Vec<LayerSpec>,
    pub tap: usize,
}

impl ExtractorSpec {
    pub fn new(name: HeadKind, layers: Vec<LayerSpec>, tap: usize) -> Result<Self> {
        if tap >= layers.len() {
            return Err(Error::InvalidParameter(format!(
                "tap {tap} does not name one of the {} layers",
                layers.len()
            )));
        }
        let mut channels: Option<usize> = None;
        for layer in &layers {
            match layer {
                LayerSpec::Conv { in_channels, out_channels, kernel, stride, .. } => {
                    if kernel % 2 == 0 || *stride == 0 {
                        return Err(Error::InvalidParameter("conv kernel must be odd and stride positive".into()));
                    }
                    if channels.is_some_and(|c| c != *in_channels) {
                        return Err(Error::ShapeMismatch(format!("layer expects {in_channels} channels")));
                    }
                    channels = Some(*out_channels);
                }
                LayerSpec::Residual { channels: c, kernel, .. } => {
                    if kernel % 2 == 0 {
                        return Err(Error::InvalidParameter("residual kernel must be odd".into()));
                    }
                    if channels.is_some_and(|x| x != *c) {
                        return Err(Error::ShapeMismatch(format!("residual block expects {c} channels")));
                    }
                    channels = Some(*c);
                }
                LayerSpec::MaxPool2 => {}
            }
        }
        Ok(Self { name, layers, tap })
    }

    /// Layers executed to reach the tap.
    pub fn active_layers(&self) -> &[LayerSpec] {
        &self.layers[..=self.tap]
    }

    /// Parameter tensors in execution order, up to the tap.
    pub fn param_slots(&self) -> Vec<ParamSlot> {
        let mut out = Vec::new();
        for layer in self.active_layers() {
            match layer {
                LayerSpec::Conv { name, in_channels, out_channels, kernel, .. } => {
                    out.extend(conv_slots(name, *out_channels, *in_channels, *kernel));
                }
                LayerSpec::Residual { name, channels, kernel } => {
                    out.extend(conv_slots(&format!("{name}.conv_a"), *channels, *channels, *kernel));
                    out.extend(conv_slots(&format!("{name}.conv_b"), *channels, *channels, *kernel));
                }
                LayerSpec::MaxPool2 => {}
            }
        }
        out
    }

    /// Factor the input height and width must be divisible by.
    pub fn spatial_divisor(&self) -> usize {
        self.active_layers()
            .iter()
            .map(|l| match l {
                LayerSpec::Conv { stride, .. } => *stride,
                LayerSpec::MaxPool2 => 2,
                LayerSpec::Residual { .. } => 1,
            })
            .product()
    }

    pub fn input_channels(&self) -> Option<usize> {
        self.layers.iter().find_map(|l| match l {
            LayerSpec::Conv { in_channels, .. } => Some(*in_channels),
            LayerSpec::Residual { channels, .. } => Some(*channels),
            LayerSpec::MaxPool2 => None,
        })
    }

    /// Tap output shape for an input of the given size.
    pub fn output_shape(&self, channels: usize, height: usize, width: usize) -> Result<(usize, usize, usize)> {
        let (mut c, mut h, mut w) = (channels, height, width);
        for layer in self.active_layers() {
            match layer {
                LayerSpec::Conv { in_channels, out_channels, kernel, stride, padding, .. } => {
                    if c != *in_channels {
                        return Err(Error::ShapeMismatch(format!("conv expects {in_channels} channels, got {c}")));
                    }
                    let probe = ConvLayer::zeros(1, 1, *kernel, *stride, *padding, Activation::None);
                    (c, h, w) = (*out_channels, probe.output_dim(h)?, probe.output_dim(w)?);
                }
                LayerSpec::MaxPool2 => {
                    if h % 2 != 0 || w % 2 != 0 {
                        return Err(Error::OddSpatialDim { height: h, width: w });
                    }
                    (h, w) = (h / 2, w / 2);
                }
                LayerSpec::Residual { channels: rc, .. } => {
                    if c != *rc {
                        return Err(Error::ShapeMismatch(format!("residual expects {rc} channels, got {c}")));
                    }
                }
            }
        }
        Ok((c, h, w))
    }
}

fn conv3(name: &str, in_c: usize, out_c: usize) -> LayerSpec {
    LayerSpec::Conv {
        name: name.into(),
        in_channels: in_c,
        out_channels: out_c,
        kernel: 3,
        stride: 1,
        padding: 1,
        activation: Activation::Relu,
    }
}

/// Four 3x3 relu convolutions (64, 64, pool, 128, 128), tapped after the
/// `depth`-th convolution.
pub fn build_vgg_head(depth: usize) -> Result<ExtractorSpec> {
    if !(1..=4).contains(&depth) {
        return Err(Error::UnsupportedDepth(depth));
    }
    let layers = vec![
        conv3("conv1_1", 3, 64),
        conv3("conv1_2", 64, 64),
        LayerSpec::MaxPool2,
        conv3("conv2_1", 64, 128),
        conv3("conv2_2", 128, 128),
    ];
    let tap = if depth <= 2 { depth - 1 } else { depth };
    ExtractorSpec::new(HeadKind::VggHead, layers, tap)
}

/// 7x7/2 stem, 2x2 pool, then two residual blocks at 64 channels.
pub fn build_resnet_head() -> ExtractorSpec {
    let layers = vec![
        LayerSpec::Conv {
            name: "stem".into(),
            in_channels: 3,
            out_channels: 64,
            kernel: 7,
            stride: 2,
            padding: 3,
            activation: Activation::Relu,
        },
        LayerSpec::MaxPool2,
        LayerSpec::Residual { name: "block1".into(), channels: 64, kernel: 3 },
        LayerSpec::Residual { name: "block2".into(), channels: 64, kernel: 3 },
    ];
    ExtractorSpec::new(HeadKind::ResnetHead, layers, 3).expect("static head is well formed")
}

/// Per-channel `x * scale + shift`, applied before the first layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputAffine {
    pub scale: [f32; 3],
    pub shift: [f32; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundLayer {
    Conv(ConvLayer),
    MaxPool2,
    Residual(ResidualBlock),
}

/// An extractor spec with weights attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Extractor {
    pub(crate) spec: ExtractorSpec,
    pub(crate) layers: Vec<BoundLayer>,
    pub(crate) input_affine: Option<InputAffine>,
}

impl Extractor {
    /// Binds parameter tensors given in `param_slots` order.
    pub fn from_params(spec: ExtractorSpec, params: Vec<Vec<f32>>, input_affine: Option<InputAffine>) -> Result<Self> {
        let slots = spec.param_slots();
        if params.len() != slots.len() {
            return Err(Error::ShapeMismatch(format!(
                "spec needs {} parameter tensors, got {}",
                slots.len(),
                params.len()
            )));
        }
        for (slot, p) in slots.iter().zip(&params) {
            if p.len() != slot.len() {
                return Err(Error::ShapeMismatch(format!("{} needs {} values, got {}", slot.name, slot.len(), p.len())));
            }
        }
        let mut it = params.into_iter();
        let mut layers = Vec::new();
        for layer in spec.active_layers() {
            layers.push(match layer {
                LayerSpec::Conv { in_channels, out_channels, kernel, stride, padding, activation, .. } => {
                    let (w, b) = (it.next().unwrap(), it.next().unwrap());
                    BoundLayer::Conv(ConvLayer::new(*out_channels, *in_channels, *kernel, *stride, *padding, *activation, w, b)?)
                }
                LayerSpec::MaxPool2 => BoundLayer::MaxPool2,
                LayerSpec::Residual { channels, kernel, .. } => {
                    let c = *channels;
                    let k = *kernel;
                    let a = ConvLayer::new(c, c, k, 1, k / 2, Activation::Relu, it.next().unwrap(), it.next().unwrap())?;
                    let b = ConvLayer::new(c, c, k, 1, k / 2, Activation::None, it.next().unwrap(), it.next().unwrap())?;
                    BoundLayer::Residual(ResidualBlock::new(a, b)?)
                }
            });
        }
        Ok(Self { spec, layers, input_affine })
    }

    pub fn zeros(spec: ExtractorSpec) -> Self {
        let params = spec.param_slots().iter().map(|s| vec![0.0; s.len()]).collect();
        Self::from_params(spec, params, None).expect("zero parameters match their own slots")
    }

    pub fn spec(&self) -> &ExtractorSpec {
        &self.spec
    }

    pub fn input_affine(&self) -> Option<&InputAffine> {
        self.input_affine.as_ref()
    }

    pub fn layers(&self) -> &[BoundLayer] {
        &self.layers
    }

    /// Parameter tensors in manifest order.
    pub fn params(&self) -> Vec<&[f32]> {
        let mut out: Vec<&[f32]> = Vec::new();
        for layer in &self.layers {
            match layer {
                BoundLayer::Conv(c) => out.extend([&c.weights[..], &c.bias[..]]),
                BoundLayer::Residual(r) => {
                    out.extend([&r.conv_a.weights[..], &r.conv_a.bias[..], &r.conv_b.weights[..], &r.conv_b.bias[..]])
                }
                BoundLayer::MaxPool2 => {}
            }
        }
        out
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        let mut x = match &self.input_affine {
            Some(a) if input.channels() == 3 => {
                let n = input.height() * input.width();
                let data = input
                    .data()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * a.scale[i / n] + a.shift[i / n])
                    .collect();
                Tensor::new(3, input.height(), input.width(), data)?
            }
            _ => input.clone(),
        };
        for layer in &self.layers {
            x = match layer {
                BoundLayer::Conv(c) => conv2d_forward(&x, c)?,
                BoundLayer::MaxPool2 => max_pool2(&x)?,
                BoundLayer::Residual(r) => residual_forward(&x, r)?,
            };
        }
        Ok(x)
    }
}

/// RGB image in `[0, 1]` forwarded to the tap.
pub fn extract_features(img: &ImageF32, extractor: &Extractor) -> Result<Tensor> {
    if img.channels() != 3 {
        return Err(Error::ChannelMismatch { expected: 3, found: img.channels() });
    }
    let divisor = extractor.spec.spatial_divisor();
    if img.width() % divisor != 0 || img.height() % divisor != 0 {
        return Err(Error::IndivisibleDims { width: img.width(), height: img.height(), divisor });
    }
    extractor.forward(&Tensor::from_image(img))
}
