//! Classical single-degradation enhancement methods and the planner that
//! chains them according to the detected degradations.

mod clahe;
mod gray_world;
mod homomorphic;
mod nlm;
mod sharpen;

pub use clahe::{clahe_v, hist_equalize_global, ClaheParams};
pub use gray_world::{gray_world, gray_world_correct, GrayWorldOutcome};
pub use homomorphic::{homomorphic_filter, HomomorphicParams};
pub use nlm::{nlm_denoise, NlmParams};
pub use sharpen::{sharpen, sharpen_unclamped, KernelMode, SharpenParams};

use serde::{Deserialize, Serialize};

use crate::classify::DegradationFlags;
use crate::error::{Error, Result, Warning};
use crate::image::{channel_stats, laplacian_variance, ImageF32};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    GrayWorld,
    Clahe(ClaheParams),
    Denoise(NlmParams),
    Sharpen(SharpenParams),
    Homomorphic(HomomorphicParams),
    GlobalHistEq,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::GrayWorld => "gray_world",
            Step::Clahe(_) => "clahe",
            Step::Denoise(_) => "denoise",
            Step::Sharpen(_) => "sharpen",
            Step::Homomorphic(_) => "homomorphic",
            Step::GlobalHistEq => "global_hist_eq",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Step::Clahe(p) => p.validate(),
            Step::Denoise(p) => p.validate(),
            Step::Sharpen(p) => p.validate(),
            Step::Homomorphic(p) => p.validate(),
            Step::GrayWorld | Step::GlobalHistEq => Ok(()),
        }
    }

    fn run(&self, img: &ImageF32) -> Result<(ImageF32, Vec<Warning>)> {
        Ok(match self {
            Step::GrayWorld => {
                let out = gray_world(img)?;
                (out.image, out.warnings)
            }
            Step::Clahe(p) => (clahe_v(img, p)?, vec![]),
            Step::Denoise(p) => (nlm_denoise(img, p)?, vec![]),
            Step::Sharpen(p) => (sharpen(img, p)?, vec![]),
            Step::Homomorphic(p) => (homomorphic_filter(img, p)?, vec![]),
            Step::GlobalHistEq => (hist_equalize_global(img)?, vec![]),
        })
    }
}

/// Ordered list of distinct enhancement steps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Step>", into = "Vec<Step>")]
pub struct EnhancementPlan {
    steps: Vec<Step>,
}

impl EnhancementPlan {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if steps[..i].iter().any(|t| t.name() == s.name()) {
                return Err(Error::InvalidParameter(format!("duplicate plan step {}", s.name())));
            }
            s.validate()?;
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.steps.iter().map(Step::name).collect()
    }
}

impl TryFrom<Vec<Step>> for EnhancementPlan {
    type Error = Error;
    fn try_from(steps: Vec<Step>) -> Result<Self> {
        Self::new(steps)
    }
}

impl From<EnhancementPlan> for Vec<Step> {
    fn from(p: EnhancementPlan) -> Self {
        p.steps
    }
}

/// Parameters the planner attaches to the steps it selects.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanParams {
    pub clahe: ClaheParams,
    pub nlm: NlmParams,
    pub sharpen: SharpenParams,
}

/// Cast selects gray-world, low light selects CLAHE, blur selects denoise
/// followed by sharpen. Steps always run in that global order.
pub fn build_plan(flags: DegradationFlags, params: &PlanParams) -> EnhancementPlan {
    let mut steps = Vec::new();
    if flags.color_cast {
        steps.push(Step::GrayWorld);
    }
    if flags.low_light {
        steps.push(Step::Clahe(params.clahe));
    }
    if flags.blurred {
        steps.push(Step::Denoise(params.nlm));
        steps.push(Step::Sharpen(params.sharpen));
    }
    EnhancementPlan { steps }
}

/// Snapshot taken after each executed step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub index: usize,
    pub step: &'static str,
    /// Per-channel means; absent for grayscale images.
    pub channel_means: Option<[f64; 3]>,
    pub laplacian_variance: f64,
    pub warnings: Vec<Warning>,
}

pub fn apply_plan(img: &ImageF32, plan: &EnhancementPlan) -> Result<ImageF32> {
    apply_plan_with(img, plan, |_| {})
}

/// Runs the plan, calling `hook` after every step.
pub fn apply_plan_with(
    img: &ImageF32,
    plan: &EnhancementPlan,
    mut hook: impl FnMut(&StepDiagnostics),
) -> Result<ImageF32> {
    let mut current = img.clone();
    for (index, step) in plan.steps.iter().enumerate() {
        let (next, warnings) = step.run(&current).map_err(|e| Error::Step {
            index,
            step: step.name(),
            source: Box::new(e),
        })?;
        current = next;
        hook(&StepDiagnostics {
            index,
            step: step.name(),
            channel_means: channel_stats(&current).ok().map(|s| s.means()),
            laplacian_variance: laplacian_variance(&current),
            warnings,
        });
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(flags: (bool, bool, bool)) -> Vec<&'static str> {
        build_plan(DegradationFlags::new(flags.0, flags.1, flags.2), &PlanParams::default()).names()
    }

    #[test]
    fn planner_rules() {
        assert_eq!(names((true, false, false)), ["gray_world"]);
        assert_eq!(names((true, true, true)), ["gray_world", "clahe", "denoise", "sharpen"]);
        assert_eq!(names((false, true, true)), ["clahe", "denoise", "sharpen"]);
        assert!(names((false, false, false)).is_empty());
    }

    #[test]
    fn duplicates_rejected() {
        assert!(EnhancementPlan::new(vec![Step::GrayWorld, Step::GrayWorld]).is_err());
        let bad = serde_json::from_str::<EnhancementPlan>(r#"[{"step":"gray_world"},{"step":"gray_world"}]"#);
        assert!(bad.is_err());
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = build_plan(DegradationFlags::new(true, true, true), &PlanParams::default());
        let json = serde_json::to_string(&plan).unwrap();
        assert!(json.starts_with(r#"[{"step":"gray_world"},{"step":"clahe","tiles_x":8"#), "{json}");
        assert_eq!(serde_json::from_str::<EnhancementPlan>(&json).unwrap(), plan);
    }

    #[test]
    fn empty_plan_is_identity() {
        let img = ImageF32::from_fn(7, 7, 3, |c, x, y| ((x + y + c) % 4) as f32 / 3.0).unwrap();
        assert_eq!(apply_plan(&img, &EnhancementPlan::default()).unwrap(), img);
    }

    #[test]
    fn single_step_plan_equals_direct_call() {
        let img = ImageF32::from_fn(9, 9, 3, |c, x, y| ((x * y + c) % 5) as f32 / 4.0).unwrap();
        let plan = EnhancementPlan::new(vec![Step::Sharpen(SharpenParams::default())]).unwrap();
        assert_eq!(apply_plan(&img, &plan).unwrap(), sharpen(&img, &SharpenParams::default()).unwrap());
    }

    #[test]
    fn step_errors_carry_index() {
        let img = ImageF32::filled(4, 4, 3, 0.5).unwrap();
        let plan = EnhancementPlan::new(vec![Step::GrayWorld, Step::Denoise(NlmParams::default())]).unwrap();
        match apply_plan(&img, &plan) {
            Err(Error::Step { index: 1, step: "denoise", .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
