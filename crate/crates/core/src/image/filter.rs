//! Spatial filtering on single planes. All borders use edge replication.

use super::{ImageF32, Plane};
use crate::error::{Error, Result};

/// Square kernel with odd side length, weights row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    side: usize,
    weights: Vec<f32>,
}

impl Kernel2D {
    pub fn new(side: usize, weights: Vec<f32>) -> Result<Self> {
        if side % 2 == 0 {
            return Err(Error::EvenKernel(side));
        }
        if weights.len() != side * side {
            return Err(Error::InvalidParameter(format!(
                "kernel of side {side} needs {} weights, got {}",
                side * side,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("kernel weights must be finite".into()));
        }
        Ok(Self { side, weights })
    }

    pub fn from_rows<const N: usize>(rows: [[f32; N]; N]) -> Result<Self> {
        Self::new(N, rows.iter().flatten().copied().collect())
    }

    /// Single 1 at the center.
    pub fn delta(side: usize) -> Result<Self> {
        let mut w = vec![0.0; side * side];
        if let Some(center) = w.get_mut(side * side / 2) {
            *center = 1.0;
        }
        Self::new(side, w)
    }

    /// 4-neighbour Laplacian `[0,1,0; 1,-4,1; 0,1,0]`.
    pub fn laplacian4() -> Self {
        Self::from_rows([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]]).expect("static kernel")
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> f32 {
        self.weights[row * self.side + col]
    }
}

/// True 2-D convolution (kernel flipped) with replicate padding. Sums are
/// accumulated in `f64`.
pub fn convolve2d(plane: &Plane, kernel: &Kernel2D) -> Plane {
    let r = (kernel.side / 2) as isize;
    let (w, h) = (plane.width as isize, plane.height as isize);
    let mut out = Vec::with_capacity(plane.data.len());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f64;
            for ky in 0..kernel.side {
                let sy = y + r - ky as isize;
                for kx in 0..kernel.side {
                    let sx = x + r - kx as isize;
                    acc += kernel.weight(ky, kx) as f64 * plane.get_clamped(sx, sy) as f64;
                }
            }
            out.push(acc as f32);
        }
    }
    Plane { width: plane.width, height: plane.height, data: out }
}

/// Normalized 1-D Gaussian taps with radius `ceil(3 sigma)`.
pub fn gaussian_kernel_1d(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    Ok(taps.into_iter().map(|t| t / sum).collect())
}

/// Separable Gaussian blur with replicate padding. The 2-D kernel is the outer
/// product of the normalized 1-D taps, so it sums to one.
pub fn gaussian_blur(plane: &Plane, sigma: f64) -> Result<Plane> {
    let taps = gaussian_kernel_1d(sigma)?;
    let r = (taps.len() / 2) as isize;
    let (w, h) = (plane.width, plane.height);

    let mut horiz = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            horiz[y * w + x] = taps
                .iter()
                .enumerate()
                .map(|(i, t)| t * plane.get_clamped(x as isize + i as isize - r, y as isize) as f64)
                .sum();
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let acc: f64 = taps
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let sy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                    t * horiz[sy * w + x]
                })
                .sum();
            out.push(acc as f32);
        }
    }
    Ok(Plane { width: w, height: h, data: out })
}

/// Rec. 601 luminance `0.299 R + 0.587 G + 0.114 B`; single-channel images
/// pass through.
pub fn luma(img: &ImageF32) -> Plane {
    if img.channels() == 1 {
        return img.plane(0);
    }
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    let data = (0..img.pixel_count())
        .map(|i| (0.299 * r[i] as f64 + 0.587 * g[i] as f64 + 0.114 * b[i] as f64) as f32)
        .collect();
    Plane { width: img.width(), height: img.height(), data }
}

/// Variance of the 4-neighbour Laplacian response of the luminance plane.
pub fn laplacian_variance(img: &ImageF32) -> f64 {
    convolve2d(&luma(img), &Kernel2D::laplacian4()).variance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct quadruple loop, independent of `convolve2d`.
    fn oracle(plane: &Plane, side: usize, k: &[f32]) -> Vec<f64> {
        let r = side as isize / 2;
        let (w, h) = (plane.width as isize, plane.height as isize);
        let mut out = vec![0.0; plane.data.len()];
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                for u in -r..=r {
                    for v in -r..=r {
                        // flipped kernel: K(u, v) multiplies I(x - u, y - v)
                        let sx = (x - u).max(0).min(w - 1);
                        let sy = (y - v).max(0).min(h - 1);
                        let kw = k[((v + r) * side as isize + (u + r)) as usize] as f64;
                        s += kw * plane.data[(sy * w + sx) as usize] as f64;
                    }
                }
                out[(y * w + x) as usize] = s;
            }
        }
        out
    }

    #[test]
    fn delta_kernel_is_identity() {
        let p = Plane::from_fn(7, 5, |x, y| ((x * 13 + y * 7) % 11) as f32 / 11.0);
        for side in [1, 3, 5] {
            assert_eq!(convolve2d(&p, &Kernel2D::delta(side).unwrap()), p);
        }
    }

    #[test]
    fn box_on_constant() {
        let p = Plane::filled(6, 4, 0.3);
        let k = Kernel2D::new(3, vec![1.0 / 9.0; 9]).unwrap();
        let out = convolve2d(&p, &k);
        assert!(out.data.iter().all(|&v| (v - 0.3).abs() < 1e-7));
    }

    #[test]
    fn even_kernel_rejected() {
        assert!(matches!(Kernel2D::new(2, vec![0.0; 4]), Err(Error::EvenKernel(2))));
    }

    #[test]
    fn orientation_is_flipped() {
        // asymmetric kernel: weight 1 at (row 1, col 2) picks I(x - 1, y)
        let k = Kernel2D::from_rows([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let p = Plane::from_fn(4, 1, |x, _| x as f32);
        assert_eq!(convolve2d(&p, &k).data, vec![0.0, 0.0, 1.0, 2.0]);
    }

    proptest! {
        #[test]
        fn matches_quadruple_loop(
            w in 1usize..=16, h in 1usize..=16, half in 0usize..=2, seed in any::<u64>()
        ) {
            let side = 2 * half + 1;
            let mut s = seed;
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) as f32) / (1u64 << 31) as f32 };
            let p = Plane::from_fn(w, h, |_, _| next());
            let k: Vec<f32> = (0..side * side).map(|_| next() * 2.0 - 1.0).collect();
            let got = convolve2d(&p, &Kernel2D::new(side, k.clone()).unwrap());
            for (g, e) in got.data.iter().zip(oracle(&p, side, &k)) {
                prop_assert!((*g as f64 - e).abs() < 1e-6);
            }
        }

        #[test]
        fn blur_shrinks_variance(w in 2usize..=20, h in 2usize..=20, sigma in 0.3f64..4.0, seed in any::<u64>()) {
            let mut s = seed;
            let p = Plane::from_fn(w, h, |_, _| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); ((s >> 40) as f32) / (1u64 << 24) as f32 });
            let out = gaussian_blur(&p, sigma).unwrap();
            prop_assert!(out.variance() <= p.variance() + 1e-9);
        }
    }

    #[test]
    fn blur_preserves_constants_exactly() {
        let p = Plane::filled(9, 7, 0.3);
        assert_eq!(gaussian_blur(&p, 2.0).unwrap(), p);
    }

    #[test]
    fn blur_impulse_center_is_gaussian_peak() {
        let mut p = Plane::filled(15, 15, 0.0);
        p.data[7 * 15 + 7] = 1.0;
        let out = gaussian_blur(&p, 1.0).unwrap();
        // normalized 2-D kernel evaluated directly, radius 3
        let total: f64 = (-3i32..=3)
            .flat_map(|i| (-3i32..=3).map(move |j| (-((i * i + j * j) as f64) / 2.0).exp()))
            .sum();
        let peak = 1.0 / total;
        assert!((out.get(7, 7) as f64 - peak).abs() < 1e-7);
    }

    #[test]
    fn blur_rejects_bad_sigma() {
        let p = Plane::filled(3, 3, 0.0);
        assert!(matches!(gaussian_blur(&p, 0.0), Err(Error::NonPositiveSigma(_))));
        assert!(matches!(gaussian_blur(&p, -1.0), Err(Error::NonPositiveSigma(_))));
    }

    #[test]
    fn laplacian_variance_constant_is_zero() {
        let img = ImageF32::solid_rgb(8, 8, [0.2, 0.5, 0.9]).unwrap();
        assert_eq!(laplacian_variance(&img), 0.0);
    }

    #[test]
    fn laplacian_variance_step_edge() {
        // 6x4 gray image, columns 0..3 are 0, columns 3..6 are 1. With
        // replicate padding the response is +1 in column 2, -1 in column 3,
        // 0 elsewhere: mean 0, variance 2 * 4 / 24.
        let img = ImageF32::from_fn(6, 4, 1, |_, x, _| if x >= 3 { 1.0 } else { 0.0 }).unwrap();
        assert!((laplacian_variance(&img) - 8.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn laplacian_variance_rotation_invariant() {
        let img = ImageF32::from_fn(9, 9, 3, |c, x, y| ((x * x + 3 * y + c) % 5) as f32 / 5.0).unwrap();
        let a = laplacian_variance(&img);
        let b = laplacian_variance(&img.rotate90());
        assert!((a - b).abs() < 1e-12);
    }
}
