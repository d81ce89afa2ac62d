//! Contrast-limited adaptive histogram equalization and plain global
//! histogram equalization, both acting on the HSV value channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{hsv_to_rgb, rgb_to_hsv, ImageF32, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClaheParams {
    pub tiles_x: usize,
    pub tiles_y: usize,
    /// Bin ceiling as a multiple of the uniform bin height `tile_pixels / bins`.
    pub clip_limit: f64,
    pub bins: usize,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self { tiles_x: 8, tiles_y: 8, clip_limit: 2.0, bins: 256 }
    }
}

impl ClaheParams {
    pub fn validate(&self) -> Result<()> {
        if self.tiles_x == 0 || self.tiles_y == 0 {
            return Err(Error::InvalidParameter("CLAHE tile counts must be at least 1".into()));
        }
        if !(self.clip_limit >= 1.0) {
            return Err(Error::InvalidParameter(format!("CLAHE clip_limit {} < 1", self.clip_limit)));
        }
        if self.bins < 2 {
            return Err(Error::InvalidParameter("CLAHE needs at least 2 bins".into()));
        }
        Ok(())
    }
}

/// Intensity mapping derived from one histogram.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Mapping {
    /// Every pixel fell into one bin.
    Identity,
    Table(Vec<f64>),
}

impl Mapping {
    fn apply(&self, v: f32, bins: usize) -> f64 {
        match self {
            Mapping::Identity => v as f64,
            Mapping::Table(t) => t[bin_of(v, bins)],
        }
    }
}

#[inline]
fn bin_of(v: f32, bins: usize) -> usize {
    ((v as f64 * bins as f64) as usize).min(bins - 1)
}

/// CDF mapping `(cdf(v) - cdf_min) / (N - cdf_min)`; `None` when every
/// sample sits in the first occupied bin.
fn cdf_mapping(hist: &[f64], total: f64) -> Option<Vec<f64>> {
    let mut cdf = Vec::with_capacity(hist.len());
    let mut acc = 0.0;
    for h in hist {
        acc += h;
        cdf.push(acc);
    }
    let cdf_min = cdf.iter().copied().find(|&c| c > 0.0).unwrap_or(0.0);
    let denom = total - cdf_min;
    if denom <= total * 1e-12 {
        return None;
    }
    Some(cdf.into_iter().map(|c| ((c - cdf_min) / denom).clamp(0.0, 1.0)).collect())
}

/// Splits `len` into `parts` contiguous ranges with edges `floor(i * len / parts)`.
fn tile_edges(len: usize, parts: usize) -> Vec<usize> {
    (0..=parts).map(|i| i * len / parts).collect()
}

pub(crate) fn tile_mappings(v: &Plane, params: &ClaheParams) -> (Vec<usize>, Vec<usize>, Vec<Mapping>) {
    let tx = params.tiles_x.min(v.width);
    let ty = params.tiles_y.min(v.height);
    let xs = tile_edges(v.width, tx);
    let ys = tile_edges(v.height, ty);
    let bins = params.bins;
    let mut maps = Vec::with_capacity(tx * ty);
    for j in 0..ty {
        for i in 0..tx {
            let mut hist = vec![0.0f64; bins];
            for y in ys[j]..ys[j + 1] {
                for x in xs[i]..xs[i + 1] {
                    hist[bin_of(v.get(x, y), bins)] += 1.0;
                }
            }
            let total = ((xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])) as f64;
            let limit = params.clip_limit * total / bins as f64;
            let mut excess = 0.0;
            for h in hist.iter_mut() {
                if *h > limit {
                    excess += *h - limit;
                    *h = limit;
                }
            }
            if excess > 0.0 {
                let share = excess / bins as f64;
                hist.iter_mut().for_each(|h| *h += share);
            }
            maps.push(match cdf_mapping(&hist, total) {
                Some(t) => Mapping::Table(t),
                None => Mapping::Identity,
            });
        }
    }
    (xs, ys, maps)
}

/// Interpolation neighbours along one axis: indices of the two tiles whose
/// centres bracket `p`, and the weight of the second.
fn bracket(p: usize, edges: &[usize]) -> (usize, usize, f64) {
    let n = edges.len() - 1;
    let center = |i: usize| (edges[i] + edges[i + 1]) as f64 / 2.0 - 0.5;
    let p = p as f64;
    if n == 1 || p <= center(0) {
        return (0, 0, 0.0);
    }
    if p >= center(n - 1) {
        return (n - 1, n - 1, 0.0);
    }
    let mut i = 0;
    while center(i + 1) < p {
        i += 1;
    }
    let (c0, c1) = (center(i), center(i + 1));
    (i, i + 1, (p - c0) / (c1 - c0))
}

pub(crate) fn clahe_plane(v: &Plane, params: &ClaheParams) -> Plane {
    let (xs, ys, maps) = tile_mappings(v, params);
    let tx = xs.len() - 1;
    let bins = params.bins;
    let col: Vec<_> = (0..v.width).map(|x| bracket(x, &xs)).collect();
    let mut out = Vec::with_capacity(v.data.len());
    for y in 0..v.height {
        let (j0, j1, fy) = bracket(y, &ys);
        for (x, &(i0, i1, fx)) in col.iter().enumerate() {
            let s = v.get(x, y);
            let m = |i: usize, j: usize| maps[j * tx + i].apply(s, bins);
            let top = (1.0 - fx) * m(i0, j0) + fx * m(i1, j0);
            let bottom = (1.0 - fx) * m(i0, j1) + fx * m(i1, j1);
            out.push(((1.0 - fy) * top + fy * bottom) as f32);
        }
    }
    Plane { width: v.width, height: v.height, data: out }
}

/// CLAHE on the HSV value channel; hue and saturation are untouched.
pub fn clahe_v(img: &ImageF32, params: &ClaheParams) -> Result<ImageF32> {
    params.validate()?;
    let hsv = rgb_to_hsv(img)?;
    let v = clahe_plane(&hsv.plane(2), params);
    hsv_to_rgb(&ImageF32::from_planes(&[hsv.plane(0), hsv.plane(1), v])?)
}

pub(crate) fn equalize_plane(v: &Plane, bins: usize) -> Plane {
    let mut hist = vec![0.0f64; bins];
    for &s in &v.data {
        hist[bin_of(s, bins)] += 1.0;
    }
    let table = cdf_mapping(&hist, v.data.len() as f64);
    let data = v
        .data
        .iter()
        .map(|&s| match &table {
            Some(t) => t[bin_of(s, bins)] as f32,
            // constant input: numerator and denominator both vanish
            None => 0.0,
        })
        .collect();
    Plane { width: v.width, height: v.height, data }
}

/// Global 256-bin histogram equalization of the HSV value channel. A
/// constant value channel maps to 0.
pub fn hist_equalize_global(img: &ImageF32) -> Result<ImageF32> {
    let hsv = rgb_to_hsv(img)?;
    let v = equalize_plane(&hsv.plane(2), 256);
    hsv_to_rgb(&ImageF32::from_planes(&[hsv.plane(0), hsv.plane(1), v])?)
}
