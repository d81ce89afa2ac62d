use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Method;
use crate::classify::ClassifierThresholds;
use crate::enhance::{ClaheParams, NlmParams, PlanParams, SharpenParams};
use crate::error::{Error, Result};

/// Neural enhancement settings. Manifest paths that are set must exist;
/// unset ones fall back to seeded weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeuralConfig {
    pub method: Method,
    pub gain: f64,
    pub seed: u64,
    pub vgg_manifest: Option<PathBuf>,
    pub resnet_manifest: Option<PathBuf>,
}

impl Default for NeuralConfig {
    fn default() -> Self {
        Self { method: Method::Classic, gain: 0.5, seed: 7, vgg_manifest: None, resnet_manifest: None }
    }
}

/// Relative bucket weights; normalized when used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 8.0, val: 1.0, test: 1.0 }
    }
}

impl SplitRatios {
    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub crop_fraction: f64,
    pub jitter_amplitude: f64,
    pub samples_per_image: usize,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self { crop_fraction: 0.8, jitter_amplitude: 0.1, samples_per_image: 2 }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.crop_fraction > 0.0 && self.crop_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!("crop_fraction {} outside (0, 1]", self.crop_fraction)));
        }
        if !(self.jitter_amplitude >= 0.0 && self.jitter_amplitude < 1.0) {
            return Err(Error::InvalidParameter(format!("jitter_amplitude {} outside [0, 1)", self.jitter_amplitude)));
        }
        if self.samples_per_image == 0 {
            return Err(Error::InvalidParameter("samples_per_image must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub thresholds: ClassifierThresholds,
    pub clahe: ClaheParams,
    pub nlm: NlmParams,
    pub sharpen: SharpenParams,
    pub neural: NeuralConfig,
    pub split: SplitRatios,
    pub augment: AugmentConfig,
    /// Seed for shuffling and augmentation.
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            thresholds: ClassifierThresholds::default(),
            clahe: ClaheParams::default(),
            nlm: NlmParams::default(),
            sharpen: SharpenParams::default(),
            neural: NeuralConfig::default(),
            split: SplitRatios::default(),
            augment: AugmentConfig::default(),
            seed: 7,
            output_dir: PathBuf::from("aquaclear-out"),
        }
    }
}

impl PipelineConfig {
    /// Parses and validates a JSON document. Relative manifest paths are
    /// resolved against the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for m in [&mut cfg.neural.vgg_manifest, &mut cfg.neural.resnet_manifest].into_iter().flatten() {
            if m.is_relative() {
                *m = base.join(&*m);
            }
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::parse(text, Path::new("<inline>"))
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config { path: path.to_path_buf(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        self.clahe.validate()?;
        self.nlm.validate()?;
        self.sharpen.validate()?;
        if !(self.neural.gain >= 0.0) || !self.neural.gain.is_finite() {
            return Err(Error::InvalidParameter(format!("neural gain must be non-negative, got {}", self.neural.gain)));
        }
        if self.split.as_array().iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidParameter(format!("split ratios must be positive, got {:?}", self.split.as_array())));
        }
        self.augment.validate()
    }

    pub fn plan_params(&self) -> PlanParams {
        PlanParams { clahe: self.clahe, nlm: self.nlm, sharpen: self.sharpen }
    }
}
