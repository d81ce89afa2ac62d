//! Batch front end: configuration, method dispatch and the commands behind
//! the `aquaclear` binary.

mod augment;
mod commands;
mod config;
mod enhancer;
mod labels;
mod split;

pub use augment::{augment_image, crop_side, sample_seed, AugmentRecord};
pub use commands::{
    build_enhancer, cmd_augment, cmd_classify, cmd_enhance, cmd_evaluate, cmd_report, cmd_split, list_ppm,
    parse_output_name, render_report, stem, AugmentSummary, ClassifySummary, EnhanceRecord, EnhanceSummary,
    EvaluateSummary, ReportSummary, AUGMENT_LOG, CATEGORIES_FILE, COOCCURRENCE_FILE, ENHANCE_LOG, LABELS_FILE,
    MARGINALS_FILE, REPORT_CSV, REPORT_MD, SCORES_FILE, SPLIT_FILE,
};
pub use config::{AugmentConfig, NeuralConfig, PipelineConfig, SplitRatios};
pub use enhancer::{center_crop_to_multiple, EnhanceOutcome, Enhancer, Method};
pub use labels::{labels_to_csv, parse_labels_csv, LabelRow, LABELS_HEADER};
pub use split::{allocate, split_files, Bucket, SplitAssignment};
