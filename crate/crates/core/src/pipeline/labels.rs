use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{Category8, DegradationFlags};
use crate::error::{Error, Result};

pub const LABELS_HEADER: &str = "file,cast,lowlight,blur,category";

/// One line of the per-image labels file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelRow {
    pub file: String,
    pub flags: DegradationFlags,
    pub category: Category8,
}

pub fn labels_to_csv(rows: &[LabelRow]) -> String {
    let mut out = String::from(LABELS_HEADER);
    out.push('\n');
    for r in rows {
        let f = r.flags;
        let _ = writeln!(out, "{},{},{},{},{}", r.file, f.color_cast, f.low_light, f.blurred, r.category);
    }
    out
}

/// Inverse of [`labels_to_csv`]. The category must agree with the flags.
pub fn parse_labels_csv(text: &str) -> Result<Vec<LabelRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == LABELS_HEADER => {}
        Some((_, h)) => return Err(Error::Csv { line: 1, message: format!("unexpected header {h:?}") }),
        None => return Ok(Vec::new()),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Csv { line: line_no, message };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", f.len())));
        }
        let flag = |s: &str| match s {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(bad(format!("bad flag {s:?}"))),
        };
        let flags = DegradationFlags::new(flag(f[1])?, flag(f[2])?, flag(f[3])?);
        let category = Category8::from_id(f[4]).ok_or_else(|| bad(format!("unknown category {:?}", f[4])))?;
        if category != flags.category() {
            return Err(bad(format!("category {category} contradicts the flags")));
        }
        rows.push(LabelRow { file: f[0].to_string(), flags, category });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows: Vec<LabelRow> = Category8::ALL
            .iter()
            .enumerate()
            .map(|(i, c)| LabelRow { file: format!("{i}.ppm"), flags: c.flags(), category: *c })
            .collect();
        let csv = labels_to_csv(&rows);
        assert!(csv.starts_with("file,cast,lowlight,blur,category\n0.ppm,true,false,false,ColorBiasOnly\n"));
        assert_eq!(parse_labels_csv(&csv).unwrap(), rows);
        assert!(parse_labels_csv("").unwrap().is_empty());
    }

    #[test]
    fn errors_name_the_line() {
        let mut csv = String::from("file,cast,lowlight,blur,category\n");
        for i in 0..5 {
            csv.push_str(&format!("{i}.ppm,false,false,false,NoIssues\n"));
        }
        csv.push_str("5.ppm,false,true,false,NoIssues\n");
        match parse_labels_csv(&csv).unwrap_err() {
            Error::Csv { line, .. } => assert_eq!(line, 7),
            e => panic!("{e}"),
        }
        assert!(matches!(parse_labels_csv("a,b\n"), Err(Error::Csv { line: 1, .. })));
        assert!(matches!(parse_labels_csv(&format!("{LABELS_HEADER}\nx,yes,false,false,NoIssues\n")), Err(Error::Csv { line: 2, .. })));
    }
}
