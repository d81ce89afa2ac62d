use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    Train,
    Val,
    Test,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::Train, Bucket::Val, Bucket::Test];

    pub fn name(self) -> &'static str {
        match self {
            Bucket::Train => "train",
            Bucket::Val => "val",
            Bucket::Test => "test",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Floor of each exact share, then one extra file to the largest remainders
/// (earlier bucket on ties) until all `n` are placed.
pub fn allocate(n: usize, ratios: [f64; 3]) -> Result<[usize; 3]> {
    if ratios.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter(format!("split ratios must be positive, got {ratios:?}")));
    }
    let total: f64 = ratios.iter().sum();
    let shares = ratios.map(|r| n as f64 * r / total);
    // absorb rounding noise such as 7.999999999
    let mut counts = shares.map(|s| ((s + 1e-9).floor() as usize).min(n));
    let rem = shares.map(|s| (s - (s + 1e-9).floor()).max(0.0));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| rem[b].total_cmp(&rem[a]).then(a.cmp(&b)));
    let mut left = n - counts.iter().sum::<usize>().min(n);
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    Ok(counts)
}

/// Bucket of every input file, listed in file-name order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitAssignment {
    pub entries: Vec<(String, Bucket)>,
    pub counts: [usize; 3],
}

impl SplitAssignment {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("file,bucket\n");
        for (f, b) in &self.entries {
            out.push_str(&format!("{f},{b}\n"));
        }
        out
    }

    pub fn bucket_of(&self, file: &str) -> Option<Bucket> {
        self.entries.iter().find(|(f, _)| f == file).map(|(_, b)| *b)
    }
}

/// Seeded shuffle of the sorted names, then consecutive runs of the
/// allocated sizes become train, val and test.
pub fn split_files(files: &[String], ratios: [f64; 3], seed: u64) -> Result<SplitAssignment> {
    if files.len() < Bucket::ALL.len() {
        return Err(Error::TooFewFiles { found: files.len(), buckets: Bucket::ALL.len() });
    }
    let counts = allocate(files.len(), ratios)?;
    let mut names = files.to_vec();
    names.sort();
    names.dedup();
    if names.len() != files.len() {
        return Err(Error::InvalidParameter("duplicate file names".into()));
    }
    let mut shuffled = names.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut entries = Vec::with_capacity(names.len());
    let mut rest = shuffled.as_slice();
    for (bucket, n) in Bucket::ALL.into_iter().zip(counts) {
        let (head, tail) = rest.split_at(n);
        entries.extend(head.iter().map(|f| (f.clone(), bucket)));
        rest = tail;
    }
    entries.sort();
    Ok(SplitAssignment { entries, counts })
}
