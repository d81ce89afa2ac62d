use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::psnr::{psnr, Psnr};
use super::uciqe::{uciqe, UciqeComponents};
use super::uiqm::{uiqm, UiqmComponents};
use crate::error::{Error, Result};
use crate::image::ImageF32;

pub const REPORT_HEADER: &str = "image,method,psnr,uciqe,uiqm,sigma_c,con_l,mu_s,uicm,uism,uiconm";
pub const MEAN_ROW: &str = "mean";

/// Report column labels, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MethodLabel {
    Original,
    Unite,
    #[serde(rename = "VGG19")]
    Vgg19,
    #[serde(rename = "ResNet50")]
    ResNet50,
    Classic,
}

impl MethodLabel {
    pub const ALL: [MethodLabel; 5] =
        [MethodLabel::Original, MethodLabel::Unite, MethodLabel::Vgg19, MethodLabel::ResNet50, MethodLabel::Classic];

    pub fn label(self) -> &'static str {
        match self {
            MethodLabel::Original => "Original",
            MethodLabel::Unite => "Unite",
            MethodLabel::Vgg19 => "VGG19",
            MethodLabel::ResNet50 => "ResNet50",
            MethodLabel::Classic => "Classic",
        }
    }

    /// Token used in `<stem>.<token>.ppm` file names.
    pub fn token(self) -> &'static str {
        match self {
            MethodLabel::Original => "original",
            MethodLabel::Unite => "unite",
            MethodLabel::Vgg19 => "vgg",
            MethodLabel::ResNet50 => "resnet",
            MethodLabel::Classic => "classic",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.token() == token)
    }
}

impl fmt::Display for MethodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.label() == s || m.token() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityScores {
    /// Absent when no reference was available.
    pub psnr: Option<Psnr>,
    pub uciqe: f64,
    pub uiqm: f64,
    pub sigma_c: f64,
    pub con_l: f64,
    pub mu_s: f64,
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
}

impl QualityScores {
    pub fn from_components(psnr: Option<Psnr>, c: UciqeComponents, q: UiqmComponents) -> Self {
        Self {
            psnr,
            uciqe: c.score(),
            uiqm: q.score(),
            sigma_c: c.sigma_c,
            con_l: c.con_l,
            mu_s: c.mu_s,
            uicm: q.uicm,
            uism: q.uism,
            uiconm: q.uiconm,
        }
    }

    pub fn uciqe_components(&self) -> UciqeComponents {
        UciqeComponents { sigma_c: self.sigma_c, con_l: self.con_l, mu_s: self.mu_s }
    }

    pub fn uiqm_components(&self) -> UiqmComponents {
        UiqmComponents { uicm: self.uicm, uism: self.uism, uiconm: self.uiconm }
    }
}

/// PSNR (when a reference is given), UCIQE and UIQM of one image.
pub fn score_image(reference: Option<&ImageF32>, test: &ImageF32) -> Result<QualityScores> {
    let p = reference.map(|r| psnr(r, test)).transpose()?;
    let (_, c) = uciqe(test)?;
    let (_, q) = uiqm(test)?;
    Ok(QualityScores::from_components(p, c, q))
}

#[derive(Debug, Clone)]
pub struct EvalItem {
    pub image: String,
    pub method: MethodLabel,
    pub reference: Option<ImageF32>,
    pub test: ImageF32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub image: String,
    pub method: MethodLabel,
    pub scores: QualityScores,
}

/// Per-method means over the rows of one label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodAggregate {
    pub method: MethodLabel,
    pub rows: usize,
    /// Mean over finite PSNR rows.
    pub psnr: Option<f64>,
    pub psnr_finite: usize,
    pub psnr_infinite: usize,
    pub uciqe: f64,
    pub uiqm: f64,
    pub sigma_c: f64,
    pub con_l: f64,
    pub mu_s: f64,
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
}

impl MethodAggregate {
    /// PSNR column of a mean row: finite mean, or `inf` when every scored
    /// row was infinite.
    pub fn psnr_summary(&self) -> Option<Psnr> {
        match (self.psnr, self.psnr_infinite) {
            (Some(v), _) => Some(Psnr::Finite(v)),
            (None, n) if n > 0 => Some(Psnr::Infinite),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct QualityReport {
    pub rows: Vec<ReportRow>,
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn psnr_field(p: Option<Psnr>) -> String {
    p.map(Psnr::to_csv_field).unwrap_or_default()
}

/// Scores every item in parallel; rows keep input order.
pub fn evaluate_batch(items: &[EvalItem]) -> Result<QualityReport> {
    if items.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let rows = items
        .par_iter()
        .map(|it| {
            Ok(ReportRow {
                image: it.image.clone(),
                method: it.method,
                scores: score_image(it.reference.as_ref(), &it.test)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QualityReport { rows })
}

impl QualityReport {
    pub fn methods(&self) -> Vec<MethodLabel> {
        MethodLabel::ALL.into_iter().filter(|m| self.rows.iter().any(|r| r.method == *m)).collect()
    }

    pub fn aggregate(&self, method: MethodLabel) -> Option<MethodAggregate> {
        let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.method == method).collect();
        if rows.is_empty() {
            return None;
        }
        let n = rows.len() as f64;
        let mean = |f: fn(&QualityScores) -> f64| rows.iter().map(|r| f(&r.scores)).sum::<f64>() / n;
        let finite: Vec<f64> = rows.iter().filter_map(|r| r.scores.psnr.and_then(Psnr::finite)).collect();
        Some(MethodAggregate {
            method,
            rows: rows.len(),
            psnr: (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64),
            psnr_finite: finite.len(),
            psnr_infinite: rows.iter().filter(|r| r.scores.psnr.is_some_and(Psnr::is_infinite)).count(),
            uciqe: mean(|s| s.uciqe),
            uiqm: mean(|s| s.uiqm),
            sigma_c: mean(|s| s.sigma_c),
            con_l: mean(|s| s.con_l),
            mu_s: mean(|s| s.mu_s),
            uicm: mean(|s| s.uicm),
            uism: mean(|s| s.uism),
            uiconm: mean(|s| s.uiconm),
        })
    }

    pub fn aggregates(&self) -> Vec<MethodAggregate> {
        self.methods().into_iter().filter_map(|m| self.aggregate(m)).collect()
    }

    /// Long format: one row per (image, method), then one `mean` row per
    /// method in table order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let s = &r.scores;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.image,
                r.method,
                psnr_field(s.psnr),
                fmt6(s.uciqe),
                fmt6(s.uiqm),
                fmt6(s.sigma_c),
                fmt6(s.con_l),
                fmt6(s.mu_s),
                fmt6(s.uicm),
                fmt6(s.uism),
                fmt6(s.uiconm)
            );
        }
        for a in self.aggregates() {
            let _ = writeln!(
                out,
                "{MEAN_ROW},{},{},{},{},{},{},{},{},{},{}",
                a.method,
                psnr_field(a.psnr_summary()),
                fmt6(a.uciqe),
                fmt6(a.uiqm),
                fmt6(a.sigma_c),
                fmt6(a.con_l),
                fmt6(a.mu_s),
                fmt6(a.uicm),
                fmt6(a.uism),
                fmt6(a.uiconm)
            );
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output. Mean rows are skipped and
    /// recomputed on demand. Errors name the 1-based line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == REPORT_HEADER => {}
            Some((_, h)) => return Err(Error::Csv { line: 1, message: format!("unexpected header {h:?}") }),
            None => return Ok(Self::default()),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Csv { line: line_no, message };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(bad(format!("expected 11 fields, found {}", f.len())));
            }
            if f[0] == MEAN_ROW {
                continue;
            }
            let method: MethodLabel = f[1].parse().map_err(|_| bad(format!("unknown method {:?}", f[1])))?;
            let psnr = if f[2].is_empty() {
                None
            } else {
                Some(Psnr::parse(f[2]).ok_or_else(|| bad(format!("bad psnr {:?}", f[2])))?)
            };
            let mut nums = [0.0f64; 8];
            for (k, slot) in nums.iter_mut().enumerate() {
                let s = f[3 + k];
                *slot = s
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("bad number {s:?}")))?;
            }
            let [uciqe, uiqm, sigma_c, con_l, mu_s, uicm, uism, uiconm] = nums;
            rows.push(ReportRow {
                image: f[0].to_string(),
                method,
                scores: QualityScores { psnr, uciqe, uiqm, sigma_c, con_l, mu_s, uicm, uism, uiconm },
            });
        }
        Ok(Self { rows })
    }

    pub fn table_iii(&self) -> MethodTable {
        let aggs = self.aggregates();
        MethodTable {
            methods: aggs.iter().map(|a| a.method).collect(),
            psnr: aggs.iter().map(MethodAggregate::psnr_summary).collect(),
            uciqe: aggs.iter().map(|a| a.uciqe).collect(),
            uiqm: aggs.iter().map(|a| a.uiqm).collect(),
        }
    }
}

/// Metric rows by method columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodTable {
    pub methods: Vec<MethodLabel>,
    pub psnr: Vec<Option<Psnr>>,
    pub uciqe: Vec<f64>,
    pub uiqm: Vec<f64>,
}

impl MethodTable {
    fn rows(&self, decimals: usize) -> [(&'static str, Vec<String>); 3] {
        [
            (
                "PSNR",
                self.psnr
                    .iter()
                    .map(|p| match p {
                        Some(Psnr::Finite(v)) => format!("{v:.decimals$}"),
                        Some(Psnr::Infinite) => "inf".into(),
                        None => String::new(),
                    })
                    .collect(),
            ),
            ("UCIQE", self.uciqe.iter().map(|v| format!("{v:.decimals$}")).collect()),
            ("UIQM", self.uiqm.iter().map(|v| format!("{v:.decimals$}")).collect()),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric");
        for m in &self.methods {
            let _ = write!(out, ",{m}");
        }
        out.push('\n');
        for (name, cells) in self.rows(6) {
            let _ = writeln!(out, "{name},{}", cells.join(","));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Metric |");
        for m in &self.methods {
            let _ = write!(out, " {m} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(self.methods.len()));
        out.push('\n');
        for (name, cells) in self.rows(4) {
            let _ = writeln!(out, "| {name} | {} |", cells.join(" | "));
        }
        out
    }
}

/// The published comparison, kept as a layout fixture. Its scale differs
/// from the scores computed here.
pub fn paper_table_iii() -> MethodTable {
    MethodTable {
        methods: vec![MethodLabel::Original, MethodLabel::Unite, MethodLabel::Vgg19, MethodLabel::ResNet50],
        psnr: [10.00, 11.14, 13.80, 12.75].map(|v| Some(Psnr::Finite(v))).to_vec(),
        uciqe: vec![30.23, 94.48, 129.92, 105.63],
        uiqm: vec![43.31, 75.42, 82.96, 81.76],
    }
}
