use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::ImageF32;

/// Peak signal-to-noise ratio in dB, with identical images mapped to a
/// dedicated sentinel instead of a float infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn finite(self) -> Option<f64> {
        match self {
            Psnr::Finite(v) => Some(v),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// `"inf"` or the value with six decimals.
    pub fn to_csv_field(self) -> String {
        match self {
            Psnr::Finite(v) => format!("{v:.6}"),
            Psnr::Infinite => "inf".to_string(),
        }
    }

    pub fn parse(field: &str) -> Option<Self> {
        match field.trim() {
            "inf" => Some(Psnr::Infinite),
            s => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Psnr::Finite),
        }
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.6} dB"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Psnr::Finite(v) => s.serialize_f64(*v),
            Psnr::Infinite => s.serialize_str("inf"),
        }
    }
}

pub fn mse(reference: &ImageF32, test: &ImageF32) -> Result<f64> {
    if reference.width() != test.width()
        || reference.height() != test.height()
        || reference.channels() != test.channels()
    {
        return Err(Error::DimMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            reference.width(),
            reference.height(),
            reference.channels(),
            test.width(),
            test.height(),
            test.channels()
        )));
    }
    let sum: f64 = reference
        .samples()
        .iter()
        .zip(test.samples())
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(sum / reference.samples().len() as f64)
}

/// `10 log10(1 / MSE)` with a peak of 1.0.
pub fn psnr(reference: &ImageF32, test: &ImageF32) -> Result<Psnr> {
    let m = mse(reference, test)?;
    Ok(if m == 0.0 { Psnr::Infinite } else { Psnr::Finite(-10.0 * m.log10()) })
}
