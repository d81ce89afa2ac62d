//! Dataset-level aggregation of category labels.

use serde::Serialize;

use super::Category8;
use crate::error::{Error, Result};

/// Fraction of images exhibiting each single degradation, regardless of
/// what it co-occurs with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Marginals {
    pub color_cast: f64,
    pub low_light: f64,
    pub blur: f64,
}

/// One cell of the low-light x (cast, blur) co-occurrence grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CooccurrenceCell {
    pub low_light: bool,
    pub color_cast: bool,
    pub blur: bool,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetReport {
    pub total: usize,
    /// Indexed by rank order (`Category8 as usize`).
    pub counts: [usize; 8],
    pub proportions: [f64; 8],
    pub marginals: Marginals,
    /// Eight cells: low light yes then no, each crossed with
    /// (cast, blur) in the order (no, no), (no, yes), (yes, no), (yes, yes).
    pub cooccurrence: Vec<CooccurrenceCell>,
}

impl DatasetReport {
    pub fn summarize(labels: &[Category8]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let total = labels.len();
        let mut counts = [0usize; 8];
        for &c in labels {
            counts[c as usize] += 1;
        }
        let proportions = counts.map(|n| n as f64 / total as f64);

        let rate = |pred: fn(Category8) -> bool| {
            Category8::ALL.iter().filter(|c| pred(**c)).map(|c| proportions[*c as usize]).sum::<f64>()
        };
        let marginals = Marginals {
            color_cast: rate(|c| c.flags().color_cast),
            low_light: rate(|c| c.flags().low_light),
            blur: rate(|c| c.flags().blurred),
        };

        let mut cooccurrence = Vec::with_capacity(8);
        for low_light in [true, false] {
            for (color_cast, blur) in [(false, false), (false, true), (true, false), (true, true)] {
                let count = Category8::ALL
                    .iter()
                    .filter(|c| {
                        let f = c.flags();
                        f.low_light == low_light && f.color_cast == color_cast && f.blurred == blur
                    })
                    .map(|c| counts[*c as usize])
                    .sum();
                cooccurrence.push(CooccurrenceCell { low_light, color_cast, blur, count });
            }
        }
        Ok(Self { total, counts, proportions, marginals, cooccurrence })
    }

    pub fn count(&self, c: Category8) -> usize {
        self.counts[c as usize]
    }

    pub fn proportion(&self, c: Category8) -> f64 {
        self.proportions[c as usize]
    }

    /// `rank,description,count,proportion`, one row per category in rank order.
    pub fn categories_csv(&self) -> String {
        let mut out = String::from("rank,description,count,proportion\n");
        for c in Category8::ALL {
            out.push_str(&format!(
                "{},{},{},{:.4}\n",
                c.rank(),
                c.description(),
                self.count(c),
                self.proportion(c)
            ));
        }
        out
    }

    /// `lowlight,cast,blur,count` grid.
    pub fn cooccurrence_csv(&self) -> String {
        let mut out = String::from("lowlight,cast,blur,count\n");
        for cell in &self.cooccurrence {
            out.push_str(&format!("{},{},{},{}\n", cell.low_light, cell.color_cast, cell.blur, cell.count));
        }
        out
    }

    /// `degradation,rate` for each single degradation.
    pub fn marginals_csv(&self) -> String {
        format!(
            "degradation,rate\ncolor_cast,{:.4}\nlow_light,{:.4}\nblur,{:.4}\n",
            self.marginals.color_cast, self.marginals.low_light, self.marginals.blur
        )
    }

    /// Rank / Description / Proportion table in Markdown.
    pub fn markdown_table(&self) -> String {
        let mut out = String::from("| Rank | Description | Proportion |\n|---:|---|---:|\n");
        for c in Category8::ALL {
            out.push_str(&format!(
                "| {} | {} | {:.2}% |\n",
                c.rank(),
                c.description(),
                100.0 * self.proportion(c)
            ));
        }
        out
    }
}

/// Published category distribution (percent), in rank order. Shipped as a
/// layout fixture for the category table, not as a target.
pub fn paper_table_ii() -> [(Category8, f64); 8] {
    let pct = [51.33, 21.67, 16.33, 4.67, 4.00, 1.00, 0.67, 0.33];
    std::array::from_fn(|i| (Category8::ALL[i], pct[i]))
}
