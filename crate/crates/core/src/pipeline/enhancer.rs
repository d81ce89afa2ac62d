use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, Classification, ClassifierThresholds};
use crate::enhance::{apply_plan_with, build_plan, EnhancementPlan, PlanParams, StepDiagnostics};
use crate::error::{Error, Result};
use crate::image::{ImageF32, Plane};
use crate::metrics::MethodLabel;
use crate::neural::{
    attention_map, build_resnet_head, build_vgg_head, extract_features, feature_guided_enhance, fuse_attention,
    init_weights, Extractor, FuseMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Classic,
    Vgg,
    Resnet,
    Unite,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Classic, Method::Vgg, Method::Resnet, Method::Unite];

    pub fn name(self) -> &'static str {
        match self {
            Method::Classic => "classic",
            Method::Vgg => "vgg",
            Method::Resnet => "resnet",
            Method::Unite => "unite",
        }
    }

    pub fn label(self) -> MethodLabel {
        match self {
            Method::Classic => MethodLabel::Classic,
            Method::Vgg => MethodLabel::Vgg19,
            Method::Resnet => MethodLabel::ResNet50,
            Method::Unite => MethodLabel::Unite,
        }
    }

    pub fn uses_vgg(self) -> bool {
        matches!(self, Method::Vgg | Method::Unite)
    }

    pub fn uses_resnet(self) -> bool {
        matches!(self, Method::Resnet | Method::Unite)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}; expected classic, vgg, resnet or unite")))
    }
}

/// Everything `enhance` decided and measured for one image.
#[derive(Debug, Clone)]
pub struct EnhanceOutcome {
    pub image: ImageF32,
    pub classification: Classification,
    pub plan: EnhancementPlan,
    /// Original size when the image was center-cropped for the extractors.
    pub cropped_from: Option<(usize, usize)>,
    pub steps: Vec<StepDiagnostics>,
}

/// Classify, optionally apply the attention-guided value gain, then run the
/// classical plan chosen from the input's degradation flags.
#[derive(Debug, Clone)]
pub struct Enhancer {
    pub method: Method,
    pub thresholds: ClassifierThresholds,
    pub plan: PlanParams,
    pub gain: f64,
    vgg: Option<Extractor>,
    resnet: Option<Extractor>,
}

impl Enhancer {
    pub fn classic(thresholds: ClassifierThresholds, plan: PlanParams) -> Self {
        Self { method: Method::Classic, thresholds, plan, gain: 0.0, vgg: None, resnet: None }
    }

    /// Neural method with the extractors it needs; unused ones may be `None`.
    pub fn new(
        method: Method,
        thresholds: ClassifierThresholds,
        plan: PlanParams,
        gain: f64,
        vgg: Option<Extractor>,
        resnet: Option<Extractor>,
    ) -> Result<Self> {
        thresholds.validate()?;
        if !(gain >= 0.0) || !gain.is_finite() {
            return Err(Error::InvalidParameter(format!("feature gain must be non-negative, got {gain}")));
        }
        if method.uses_vgg() && vgg.is_none() {
            return Err(Error::InvalidParameter(format!("method {method} needs the VGG-style extractor")));
        }
        if method.uses_resnet() && resnet.is_none() {
            return Err(Error::InvalidParameter(format!("method {method} needs the ResNet-style extractor")));
        }
        Ok(Self { method, thresholds, plan, gain, vgg, resnet })
    }

    /// Seeded extractors for whatever `method` needs.
    pub fn seeded(method: Method, thresholds: ClassifierThresholds, plan: PlanParams, gain: f64, seed: u64) -> Result<Self> {
        let vgg = method.uses_vgg().then(|| build_vgg_head(4).map(|s| init_weights(&s, seed))).transpose()?;
        let resnet = method.uses_resnet().then(|| init_weights(&build_resnet_head(), seed));
        Self::new(method, thresholds, plan, gain, vgg, resnet)
    }

    /// Side-length multiple the extractors in use require.
    pub fn divisor(&self) -> usize {
        [&self.vgg, &self.resnet]
            .into_iter()
            .flatten()
            .filter(|_| self.method != Method::Classic)
            .map(|e| e.spec().spatial_divisor())
            .fold(1, lcm)
    }

    fn attention(&self, img: &ImageF32) -> Result<Option<Plane>> {
        let map = |e: &Option<Extractor>| -> Result<Plane> {
            let e = e.as_ref().expect("checked at construction");
            attention_map(&extract_features(img, e)?, img.height(), img.width())
        };
        Ok(match self.method {
            Method::Classic => None,
            Method::Vgg => Some(map(&self.vgg)?),
            Method::Resnet => Some(map(&self.resnet)?),
            Method::Unite => Some(fuse_attention(&map(&self.vgg)?, &map(&self.resnet)?, FuseMode::Mean)?),
        })
    }

    pub fn enhance(&self, img: &ImageF32) -> Result<EnhanceOutcome> {
        let (input, cropped_from) = match center_crop_to_multiple(img, self.divisor())? {
            Some(c) => (c, Some((img.width(), img.height()))),
            None => (img.clone(), None),
        };
        let classification = classify(&input, &self.thresholds)?;
        let plan = build_plan(classification.flags, &self.plan);
        let guided = match self.attention(&input)? {
            Some(attn) => feature_guided_enhance(&input, &attn, self.gain)?,
            None => input,
        };
        let mut steps = Vec::new();
        let image = apply_plan_with(&guided, &plan, |d| steps.push(d.clone()))?;
        Ok(EnhanceOutcome { image, classification, plan, cropped_from, steps })
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Largest centered crop whose sides are multiples of `divisor`, or `None`
/// when the image already fits.
pub fn center_crop_to_multiple(img: &ImageF32, divisor: usize) -> Result<Option<ImageF32>> {
    let (w, h) = (img.width() / divisor * divisor, img.height() / divisor * divisor);
    if w == img.width() && h == img.height() {
        return Ok(None);
    }
    if w == 0 || h == 0 {
        return Err(Error::IndivisibleDims { width: img.width(), height: img.height(), divisor });
    }
    img.crop((img.width() - w) / 2, (img.height() - h) / 2, w, h).map(Some)
}
