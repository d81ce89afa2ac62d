//! Bodies of the `aquaclear` subcommands. Each reads a directory, works on
//! the images in parallel and writes its outputs in file-name order, so the
//! bytes written do not depend on the thread count.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::augment::{augment_image, AugmentRecord};
use super::config::PipelineConfig;
use super::labels::{labels_to_csv, parse_labels_csv, LabelRow};
use super::split::{split_files, SplitAssignment};
use super::{Enhancer, Method};
use crate::classify::{classify, DatasetReport, DegradationFlags};
use crate::enhance::{EnhancementPlan, StepDiagnostics};
use crate::error::{Error, Result, Warning};
use crate::image::{load_ppm, save_ppm, ImageF32};
use crate::metrics::{evaluate_batch, EvalItem, MethodLabel, QualityReport};
use crate::neural::{build_resnet_head, build_vgg_head, init_weights, load_weights, Extractor, ExtractorSpec};

pub const LABELS_FILE: &str = "labels.csv";
pub const CATEGORIES_FILE: &str = "categories.csv";
pub const COOCCURRENCE_FILE: &str = "cooccurrence.csv";
pub const MARGINALS_FILE: &str = "marginals.csv";
pub const ENHANCE_LOG: &str = "enhance.jsonl";
pub const SCORES_FILE: &str = "scores.csv";
pub const SPLIT_FILE: &str = "split.csv";
pub const AUGMENT_LOG: &str = "augment.jsonl";
pub const REPORT_MD: &str = "report.md";
pub const REPORT_CSV: &str = "report.csv";

/// Images scored per `evaluate_batch` call, to bound memory.
const EVAL_CHUNK: usize = 64;

/// `.ppm` files directly inside `dir`, sorted by name. Names that cannot
/// appear unquoted in a CSV field are skipped with a warning.
pub fn list_ppm(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_ppm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
        if !is_ppm || !path.is_file() {
            continue;
        }
        match entry.file_name().into_string() {
            Ok(name) if !name.contains([',', '"', '\n', '\r']) => out.push((name, path)),
            Ok(name) => warn!("skipping {name:?}: name is not CSV-safe"),
            Err(name) => warn!("skipping {name:?}: name is not UTF-8"),
        }
    }
    out.sort();
    Ok(out)
}

fn inputs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let files = list_ppm(dir)?;
    if files.is_empty() {
        return Err(Error::NoInputs(dir.to_path_buf()));
    }
    Ok(files)
}

/// File name without its `.ppm` extension.
pub fn stem(name: &str) -> &str {
    match name.len().checked_sub(4) {
        Some(i) if name.is_char_boundary(i) && name[i..].eq_ignore_ascii_case(".ppm") => &name[..i],
        _ => name,
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("log record serializes"));
        out.push('\n');
    }
    out
}

/// Partitions per-file results, logging and counting the failures.
fn keep_ok<T>(results: Vec<(String, Result<T>)>, what: &str) -> (Vec<T>, usize) {
    let mut ok = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for (name, r) in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                warn!("skipping {name}: {what} failed: {e}");
                skipped += 1;
            }
        }
    }
    (ok, skipped)
}

#[derive(Debug, Clone)]
pub struct ClassifySummary {
    pub rows: Vec<LabelRow>,
    pub skipped: usize,
    pub report: DatasetReport,
}

impl fmt::Display for ClassifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "classified {} images, skipped {}", self.rows.len(), self.skipped)
    }
}

/// Writes `labels.csv`, `categories.csv`, `cooccurrence.csv` and
/// `marginals.csv` into `output`.
pub fn cmd_classify(input: &Path, output: &Path, cfg: &PipelineConfig) -> Result<ClassifySummary> {
    let files = inputs(input)?;
    let results: Vec<(String, Result<LabelRow>)> = files
        .par_iter()
        .map(|(name, path)| {
            let r = load_ppm(path).and_then(|img| classify(&img, &cfg.thresholds)).map(|c| LabelRow {
                file: name.clone(),
                flags: c.flags,
                category: c.category,
            });
            (name.clone(), r)
        })
        .collect();
    let (rows, skipped) = keep_ok(results, "classification");
    if rows.is_empty() {
        return Err(Error::NoInputs(input.to_path_buf()));
    }
    let report = DatasetReport::summarize(&rows.iter().map(|r| r.category).collect::<Vec<_>>())?;
    create_dir(output)?;
    write(&output.join(LABELS_FILE), labels_to_csv(&rows))?;
    write(&output.join(CATEGORIES_FILE), report.categories_csv())?;
    write(&output.join(COOCCURRENCE_FILE), report.cooccurrence_csv())?;
    write(&output.join(MARGINALS_FILE), report.marginals_csv())?;
    Ok(ClassifySummary { rows, skipped, report })
}

fn extractor(spec: ExtractorSpec, manifest: Option<&Path>, seed: u64) -> Result<Extractor> {
    let Some(path) = manifest else {
        return Ok(init_weights(&spec, seed));
    };
    if !path.is_file() {
        return Err(Error::MissingWeights(path.to_path_buf()));
    }
    load_weights(&spec, path).map_err(|e| match e {
        Error::Io { path, .. } => Error::MissingWeights(path),
        other => other,
    })
}

/// Enhancer for the configured method. Configured manifests must exist;
/// otherwise weights are drawn from the neural seed.
pub fn build_enhancer(cfg: &PipelineConfig) -> Result<Enhancer> {
    let n = &cfg.neural;
    let vgg = n
        .method
        .uses_vgg()
        .then(|| extractor(build_vgg_head(4)?, n.vgg_manifest.as_deref(), n.seed))
        .transpose()?;
    let resnet = n
        .method
        .uses_resnet()
        .then(|| extractor(build_resnet_head(), n.resnet_manifest.as_deref(), n.seed))
        .transpose()?;
    if n.method == Method::Classic {
        return Ok(Enhancer::classic(cfg.thresholds, cfg.plan_params()));
    }
    Enhancer::new(n.method, cfg.thresholds, cfg.plan_params(), n.gain, vgg, resnet)
}

/// One line of `enhance.jsonl`.
#[derive(Debug, Clone, Serialize)]
pub struct EnhanceRecord {
    pub file: String,
    pub output: String,
    pub method: Method,
    pub category: crate::classify::Category8,
    pub flags: DegradationFlags,
    pub plan: EnhancementPlan,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cropped_from: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
    /// Per-step diagnostics, only in verbose runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepDiagnostics>>,
}

#[derive(Debug, Clone)]
pub struct EnhanceSummary {
    pub records: Vec<EnhanceRecord>,
    pub skipped: usize,
}

impl fmt::Display for EnhanceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "enhanced {} images, skipped {}", self.records.len(), self.skipped)
    }
}

/// Writes `<stem>.<method>.ppm` per input and `enhance.jsonl`.
pub fn cmd_enhance(input: &Path, output: &Path, cfg: &PipelineConfig, verbose: bool) -> Result<EnhanceSummary> {
    let files = inputs(input)?;
    let enhancer = build_enhancer(cfg)?;
    let method = enhancer.method;
    create_dir(output)?;
    let results: Vec<(String, Result<EnhanceRecord>)> = files
        .par_iter()
        .map(|(name, path)| {
            let run = || -> Result<EnhanceRecord> {
                let img = load_ppm(path)?;
                let out = enhancer.enhance(&img)?;
                if let Some((w, h)) = out.cropped_from {
                    warn!(
                        "{name}: {w}x{h} center-cropped to {}x{} for the feature extractors",
                        out.image.width(),
                        out.image.height()
                    );
                }
                let out_name = format!("{}.{}.ppm", stem(name), method);
                save_ppm(&out.image, output.join(&out_name))?;
                let neural = method != Method::Classic;
                let mut warnings: Vec<Warning> = out.classification.warning().into_iter().collect();
                warnings.extend(out.steps.iter().flat_map(|s| s.warnings.iter().copied()));
                Ok(EnhanceRecord {
                    file: name.clone(),
                    output: out_name,
                    method,
                    category: out.classification.category,
                    flags: out.classification.flags,
                    plan: out.plan,
                    gain: neural.then_some(enhancer.gain),
                    seed: neural.then_some(cfg.neural.seed),
                    cropped_from: out.cropped_from.map(|(w, h)| [w, h]),
                    warnings,
                    steps: verbose.then_some(out.steps),
                })
            };
            (name.clone(), run())
        })
        .collect();
    let (records, skipped) = keep_ok(results, "enhancement");
    if records.is_empty() {
        return Err(Error::NoInputs(input.to_path_buf()));
    }
    write(&output.join(ENHANCE_LOG), jsonl(&records))?;
    Ok(EnhanceSummary { records, skipped })
}

/// Splits `<stem>.<token>.ppm` into the stem and method. Names without a
/// known method token are originals.
pub fn parse_output_name(name: &str) -> (&str, MethodLabel) {
    let base = stem(name);
    match base.rsplit_once('.') {
        Some((s, token)) => match MethodLabel::from_token(token) {
            Some(m) => (s, m),
            None => (base, MethodLabel::Original),
        },
        None => (base, MethodLabel::Original),
    }
}

/// Reference for `test`: the same size, or a centered crop of a larger
/// reference (matching what `enhance` does to indivisible inputs).
fn align_reference(name: &str, reference: ImageF32, test: &ImageF32) -> Option<ImageF32> {
    let (rw, rh, tw, th) = (reference.width(), reference.height(), test.width(), test.height());
    if (rw, rh) == (tw, th) && reference.channels() == test.channels() {
        return Some(reference);
    }
    if rw >= tw && rh >= th && reference.channels() == test.channels() {
        if let Ok(c) = reference.crop((rw - tw) / 2, (rh - th) / 2, tw, th) {
            info!("{name}: reference {rw}x{rh} center-cropped to {tw}x{th}");
            return Some(c);
        }
    }
    warn!("{name}: reference {rw}x{rh} does not match {tw}x{th}; PSNR left empty");
    None
}

#[derive(Debug, Clone)]
pub struct EvaluateSummary {
    pub report: QualityReport,
    pub skipped: usize,
    pub unmatched_references: Vec<String>,
}

impl fmt::Display for EvaluateSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "evaluated {} images, skipped {}", self.report.rows.len(), self.skipped)
    }
}

/// Scores every image in `input` and writes `scores.csv`. With a reference
/// directory, `<stem>.ppm` there is the reference for `<stem>.<method>.ppm`.
pub fn cmd_evaluate(input: &Path, references: Option<&Path>, output: &Path) -> Result<EvaluateSummary> {
    let files = inputs(input)?;
    let refs: Vec<(String, PathBuf)> = match references {
        Some(dir) => list_ppm(dir)?,
        None => Vec::new(),
    };
    let ref_path = |s: &str| refs.iter().find(|(n, _)| stem(n) == s).map(|(_, p)| p.clone());

    let mut rows = Vec::new();
    let mut skipped = 0;
    let mut used = vec![false; refs.len()];
    for chunk in files.chunks(EVAL_CHUNK) {
        let loaded: Vec<(String, Result<EvalItem>)> = chunk
            .par_iter()
            .map(|(name, path)| {
                let (s, method) = parse_output_name(name);
                let item = load_ppm(path).map(|test| {
                    let reference = ref_path(s).and_then(|p| match load_ppm(&p) {
                        Ok(r) => align_reference(name, r, &test),
                        Err(e) => {
                            warn!("{name}: reference unreadable: {e}");
                            None
                        }
                    });
                    EvalItem { image: s.to_string(), method, reference, test }
                });
                (name.clone(), item)
            })
            .collect();
        for (name, _) in chunk {
            let s = parse_output_name(name).0;
            if let Some(i) = refs.iter().position(|(n, _)| stem(n) == s) {
                used[i] = true;
            } else if references.is_some() {
                warn!("{name}: no reference {s}.ppm");
            }
        }
        let (items, bad) = keep_ok(loaded, "decoding");
        skipped += bad;
        if !items.is_empty() {
            rows.extend(evaluate_batch(&items)?.rows);
        }
    }
    if rows.is_empty() {
        return Err(Error::NoInputs(input.to_path_buf()));
    }
    let unmatched_references: Vec<String> =
        refs.iter().zip(&used).filter(|(_, u)| !**u).map(|((n, _), _)| n.clone()).collect();
    for n in &unmatched_references {
        warn!("reference {n} matched no input");
    }
    let report = QualityReport { rows };
    create_dir(output)?;
    write(&output.join(SCORES_FILE), report.to_csv())?;
    Ok(EvaluateSummary { report, skipped, unmatched_references })
}

/// Writes `split.csv`.
pub fn cmd_split(input: &Path, output: &Path, cfg: &PipelineConfig) -> Result<SplitAssignment> {
    let names: Vec<String> = list_ppm(input)?.into_iter().map(|(n, _)| n).collect();
    let split = split_files(&names, cfg.split.as_array(), cfg.seed)?;
    create_dir(output)?;
    write(&output.join(SPLIT_FILE), split.to_csv())?;
    Ok(split)
}

#[derive(Debug, Clone)]
pub struct AugmentSummary {
    pub records: Vec<AugmentRecord>,
    pub skipped: usize,
}

impl fmt::Display for AugmentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wrote {} augmented images, skipped {} sources", self.records.len(), self.skipped)
    }
}

/// Writes `<stem>_aug<k>.ppm` for every sample and `augment.jsonl`. A crop
/// below one pixel aborts the whole run.
pub fn cmd_augment(input: &Path, output: &Path, cfg: &PipelineConfig) -> Result<AugmentSummary> {
    cfg.augment.validate()?;
    let files = inputs(input)?;
    create_dir(output)?;
    let results: Vec<(String, Result<Result<Vec<AugmentRecord>>>)> = files
        .par_iter()
        .map(|(name, path)| {
            let r = load_ppm(path).map(|img| {
                (0..cfg.augment.samples_per_image)
                    .map(|k| {
                        let (out, rec) = augment_image(&img, &cfg.augment, cfg.seed, name, k)?;
                        save_ppm(&out, output.join(format!("{}_aug{k}.ppm", stem(name))))?;
                        Ok(rec)
                    })
                    .collect::<Result<Vec<_>>>()
            });
            (name.clone(), r)
        })
        .collect();
    let (per_file, skipped) = keep_ok(results, "decoding");
    let records: Vec<AugmentRecord> = per_file.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    if records.is_empty() {
        return Err(Error::NoInputs(input.to_path_buf()));
    }
    write(&output.join(AUGMENT_LOG), jsonl(&records))?;
    Ok(AugmentSummary { records, skipped })
}

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub labels: usize,
    pub scores: usize,
    pub markdown: String,
    pub csv: String,
}

impl fmt::Display for ReportSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reported {} labels and {} score rows", self.labels, self.scores)
    }
}

/// Combined category and method tables as Markdown and as a long-format
/// `table,row,column,value` CSV.
pub fn render_report(labels: &[LabelRow], scores: &QualityReport) -> Result<(String, String)> {
    let mut md = String::from("# Quality report\n\n## Degradation categories\n\n");
    let mut csv = String::from("table,row,column,value\n");
    if labels.is_empty() {
        md.push_str("No category labels were provided.\n");
    } else {
        let rep = DatasetReport::summarize(&labels.iter().map(|r| r.category).collect::<Vec<_>>())?;
        let _ = writeln!(md, "{} images classified.\n", rep.total);
        md.push_str(&rep.markdown_table());
        for c in crate::classify::Category8::ALL {
            let _ = writeln!(csv, "categories,{c},count,{}", rep.count(c));
            let _ = writeln!(csv, "categories,{c},proportion,{:.4}", rep.proportion(c));
        }
    }
    md.push_str("\n## Method comparison\n\n");
    if scores.rows.is_empty() {
        md.push_str("No quality scores were provided.\n");
    } else {
        let table = scores.table_iii();
        md.push_str(&table.to_markdown());
        for line in table.to_csv().lines().skip(1) {
            let mut cells = line.split(',');
            let metric = cells.next().unwrap_or_default();
            for (m, v) in table.methods.iter().zip(cells) {
                let _ = writeln!(csv, "methods,{m},{metric},{v}");
            }
        }
    }
    Ok((md, csv))
}

/// Reads a labels CSV and a scores CSV; writes `report.md` and `report.csv`.
pub fn cmd_report(labels: &Path, scores: &Path, output: &Path) -> Result<ReportSummary> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p, e));
    let in_file = |p: &Path, e: Error| match e {
        Error::Csv { line, message } => Error::Csv { line, message: format!("{}: {message}", p.display()) },
        other => other,
    };
    let label_rows = parse_labels_csv(&read(labels)?).map_err(|e| in_file(labels, e))?;
    let report = QualityReport::from_csv(&read(scores)?).map_err(|e| in_file(scores, e))?;
    let (markdown, csv) = render_report(&label_rows, &report)?;
    create_dir(output)?;
    write(&output.join(REPORT_MD), &markdown)?;
    write(&output.join(REPORT_CSV), &csv)?;
    Ok(ReportSummary { labels: label_rows.len(), scores: report.rows.len(), markdown, csv })
}
