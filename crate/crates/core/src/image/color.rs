//! RGB <-> HSV (hexcone) and sRGB <-> CIE Lab (D65) conversions.

use super::ImageF32;
use crate::error::Result;

/// Converts RGB to HSV with hue scaled to `[0, 1)`. Achromatic pixels get
/// hue 0.
pub fn rgb_to_hsv(img: &ImageF32) -> Result<ImageF32> {
    img.require_rgb()?;
    let n = img.pixel_count();
    let mut out = vec![0.0f32; 3 * n];
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    for i in 0..n {
        let [h, s, v] = hsv_pixel(r[i] as f64, g[i] as f64, b[i] as f64);
        out[i] = h as f32;
        out[n + i] = s as f32;
        out[2 * n + i] = v as f32;
    }
    ImageF32::from_clamped(img.width(), img.height(), 3, out)
}

pub fn hsv_to_rgb(img: &ImageF32) -> Result<ImageF32> {
    img.require_rgb()?;
    let n = img.pixel_count();
    let mut out = vec![0.0f32; 3 * n];
    let (h, s, v) = (img.channel(0), img.channel(1), img.channel(2));
    for i in 0..n {
        let [r, g, b] = rgb_pixel(h[i] as f64, s[i] as f64, v[i] as f64);
        out[i] = r as f32;
        out[n + i] = g as f32;
        out[2 * n + i] = b as f32;
    }
    ImageF32::from_clamped(img.width(), img.height(), 3, out)
}

pub(crate) fn hsv_pixel(r: f64, g: f64, b: f64) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta <= 0.0 {
        return [0.0, 0.0, max];
    }
    let sector = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let h = sector / 6.0;
    // rem_euclid can return exactly 6.0 for tiny negative inputs
    let h = if h >= 1.0 { h - 1.0 } else { h };
    [h, delta / max, max]
}

pub(crate) fn rgb_pixel(h: f64, s: f64, v: f64) -> [f64; 3] {
    if s <= 0.0 {
        return [v, v, v];
    }
    let h6 = (h * 6.0).rem_euclid(6.0);
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector as u8 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// CIE L*a*b* coordinates, `l` in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabPixel {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

// sRGB primaries, D65 white.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

// Reference white is the image of RGB (1, 1, 1) so that white maps to a = b = 0.
const WHITE: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

const DELTA: f64 = 6.0 / 29.0;

fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb(c: f64) -> f64 {
    if c <= 0.0031308 {
        c * 12.92
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

fn lab_f(t: f64) -> f64 {
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(t: f64) -> f64 {
    if t > DELTA {
        t * t * t
    } else {
        3.0 * DELTA * DELTA * (t - 4.0 / 29.0)
    }
}

pub(crate) fn lab_pixel(r: f64, g: f64, b: f64) -> LabPixel {
    if r == g && g == b {
        // neutral: X/Xn = Y/Yn = Z/Zn, so a and b vanish
        let fy = lab_f(srgb_to_linear(r));
        return LabPixel { l: 116.0 * fy - 16.0, a: 0.0, b: 0.0 };
    }
    let lin = [srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)];
    let xyz: [f64; 3] =
        std::array::from_fn(|i| RGB_TO_XYZ[i][0] * lin[0] + RGB_TO_XYZ[i][1] * lin[1] + RGB_TO_XYZ[i][2] * lin[2]);
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    LabPixel {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Per-pixel Lab coordinates in row-major order.
pub fn rgb_to_lab(img: &ImageF32) -> Result<Vec<LabPixel>> {
    img.require_rgb()?;
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    Ok((0..img.pixel_count())
        .map(|i| lab_pixel(r[i] as f64, g[i] as f64, b[i] as f64))
        .collect())
}

/// Inverse of [`rgb_to_lab`]. Out-of-gamut results are clamped.
pub fn lab_to_rgb(pixels: &[LabPixel], width: usize, height: usize) -> Result<ImageF32> {
    let n = width * height;
    if pixels.len() != n {
        return Err(crate::Error::DimMismatch(format!("{} Lab pixels for {width}x{height}", pixels.len())));
    }
    let inv = invert3(&RGB_TO_XYZ);
    let mut out = vec![0.0f32; 3 * n];
    for (i, p) in pixels.iter().enumerate() {
        let fy = (p.l + 16.0) / 116.0;
        let fx = fy + p.a / 500.0;
        let fz = fy - p.b / 200.0;
        let xyz = [WHITE[0] * lab_f_inv(fx), WHITE[1] * lab_f_inv(fy), WHITE[2] * lab_f_inv(fz)];
        for c in 0..3 {
            let lin = inv[c][0] * xyz[0] + inv[c][1] * xyz[1] + inv[c][2] * xyz[2];
            out[c * n + i] = linear_to_srgb(lin) as f32;
        }
    }
    ImageF32::from_clamped(width, height, 3, out)
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            // cofactor of m[j][i]
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *v = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    inv
}
