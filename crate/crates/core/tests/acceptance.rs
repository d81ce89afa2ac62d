//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! with its runtime against the budget, and exits non-zero if any failed.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use aquaclear::classify::{classify, Category8, ClassifierThresholds, DatasetReport};
use aquaclear::enhance::{gray_world, nlm_denoise, sharpen, sharpen_unclamped, KernelMode, NlmParams, PlanParams, SharpenParams};
use aquaclear::image::{convolve2d, save_ppm, Kernel2D};
use aquaclear::metrics::{psnr, uciqe, uiqm, Psnr};
use aquaclear::neural::{conv2d_forward, relu, residual_forward, Activation, ConvLayer, ResidualBlock, Tensor};
use aquaclear::pipeline::{allocate, augment_image, cmd_augment, split_files, AugmentConfig, Enhancer, Method, PipelineConfig};
use aquaclear::synth::archetype;
use aquaclear::{ImageF32, Plane};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_image(r: &mut ChaCha8Rng, w: usize, h: usize) -> ImageF32 {
    ImageF32::from_fn(w, h, 3, |_, _, _| r.gen_range(0.0..1.0)).unwrap()
}

fn std_dev(v: &[f32]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().map(|x| *x as f64).sum::<f64>() / n;
    (v.iter().map(|x| (*x as f64 - m).powi(2)).sum::<f64>() / n).sqrt()
}

// ---------------------------------------------------------------------------

fn convolution_oracles() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (w, h) = (r.gen_range(1..=16), r.gen_range(1..=16));
        let side = [1, 3, 5][r.gen_range(0..3)];
        let plane = Plane::from_fn(w, h, |_, _| r.gen_range(0.0..1.0));
        let weights: Vec<f32> = (0..side * side).map(|_| r.gen_range(-1.0..1.0)).collect();
        let k = Kernel2D::new(side, weights.clone()).unwrap();
        let got = convolve2d(&plane, &k);
        let rad = (side / 2) as isize;
        // out(x, y) = sum_{u,v} K(v, u) * I(x - u, y - v), offsets centred
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut acc = 0.0f64;
                for v in -rad..=rad {
                    for u in -rad..=rad {
                        let kw = weights[((v + rad) as usize) * side + (u + rad) as usize] as f64;
                        let sx = (x - u).clamp(0, w as isize - 1) as usize;
                        let sy = (y - v).clamp(0, h as isize - 1) as usize;
                        acc += kw * plane.data[sy * w + sx] as f64;
                    }
                }
                let d = (got.data[y as usize * w + x as usize] as f64 - acc as f32 as f64).abs();
                worst = worst.max(d);
            }
        }
    }
    ensure!(worst <= 1e-6, "convolution deviates by {worst:e}");

    let mut cnn_worst = 0.0f64;
    let mut cases = 0;
    while cases < 50 {
        let (ci, co) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let (h, w) = (r.gen_range(1..=8), r.gen_range(1..=8));
        let k = [1, 3, 5][r.gen_range(0..3)];
        let (s, p) = (r.gen_range(1..=2), r.gen_range(0..=2));
        if h + 2 * p < k || w + 2 * p < k {
            continue;
        }
        cases += 1;
        let act = if r.gen_bool(0.5) { Activation::Relu } else { Activation::None };
        let wts: Vec<f32> = (0..co * ci * k * k).map(|_| r.gen_range(-1.0..1.0)).collect();
        let bias: Vec<f32> = (0..co).map(|_| r.gen_range(-0.5..0.5)).collect();
        let input: Vec<f32> = (0..ci * h * w).map(|_| r.gen_range(-1.0..1.0)).collect();
        let layer = ConvLayer::new(co, ci, k, s, p, act, wts.clone(), bias.clone()).unwrap();
        let t = Tensor::new(ci, h, w, input.clone()).unwrap();
        let out = conv2d_forward(&t, &layer).map_err(|e| e.to_string())?;
        let (oh, ow) = ((h + 2 * p - k) / s + 1, (w + 2 * p - k) / s + 1);
        ensure!(out.shape() == (co, oh, ow), "cnn shape {:?} != {:?}", out.shape(), (co, oh, ow));
        for o in 0..co {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = bias[o] as f64;
                    for i in 0..ci {
                        for ky in 0..k {
                            for kx in 0..k {
                                let iy = (oy * s + ky) as isize - p as isize;
                                let ix = (ox * s + kx) as isize - p as isize;
                                if iy < 0 || ix < 0 || iy >= h as isize || ix >= w as isize {
                                    continue;
                                }
                                acc += wts[((o * ci + i) * k + ky) * k + kx] as f64
                                    * input[(i * h + iy as usize) * w + ix as usize] as f64;
                            }
                        }
                    }
                    if act == Activation::Relu {
                        acc = acc.max(0.0);
                    }
                    cnn_worst = cnn_worst.max((out.get(o, oy, ox) as f64 - acc).abs());
                }
            }
        }
    }
    ensure!(cnn_worst <= 1e-5, "cnn conv deviates by {cnn_worst:e}");
    Ok(format!("200 convolutions max err {worst:.1e}, 50 cnn convs max err {cnn_worst:.1e}"))
}

fn gray_world_invariant() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let base: [f32; 3] = std::array::from_fn(|_| r.gen_range(0.25..0.35));
        let img = ImageF32::from_fn(32, 32, 3, |c, _, _| base[c] + r.gen_range(-0.15..0.15)).unwrap();
        let means: Vec<f64> = (0..3).map(|c| img.channel(c).iter().map(|v| *v as f64).sum::<f64>() / 1024.0).collect();
        let avg = means.iter().sum::<f64>() / 3.0;
        // guarantees no corrected sample reaches the clamp
        for c in 0..3 {
            let max = img.channel(c).iter().fold(0.0f32, |a, b| a.max(*b)) as f64;
            ensure!(max * avg / means[c] < 1.0, "fixture would clamp");
        }
        let out = gray_world(&img).map_err(|e| e.to_string())?.image;
        for c in 0..3 {
            let m = out.channel(c).iter().map(|v| *v as f64).sum::<f64>() / 1024.0;
            worst = worst.max((m - avg).abs());
        }
    }
    ensure!(worst <= 1e-6, "corrected means deviate from the average by {worst:e}");
    let flat = ImageF32::solid_rgb(8, 8, [0.6, 0.3, 0.3]).unwrap();
    let out = gray_world(&flat).map_err(|e| e.to_string())?.image;
    ensure!(out.samples().iter().all(|v| *v == 0.4f32), "constant (0.6, 0.3, 0.3) did not map to 0.4");
    Ok(format!("100 images max mean error {worst:.1e}; (0.6,0.3,0.3) -> 0.4 exactly"))
}

fn sharpening_contract() -> Outcome {
    let mut r = rng(3);
    for _ in 0..20 {
        let c: f32 = r.gen_range(0.0..1.0);
        let img = ImageF32::filled(16, 12, 3, c).unwrap();
        let p = SharpenParams { strength: r.gen_range(0.0..4.0), kernel_mode: KernelMode::ZeroSum };
        let out = sharpen(&img, &p).map_err(|e| e.to_string())?;
        ensure!(out == img, "zero-sum sharpening changed a constant {c} image");
    }
    let img = ImageF32::filled(16, 12, 3, 0.5).unwrap();
    let p = SharpenParams { strength: 1.0, kernel_mode: KernelMode::Paper };
    // center -9 with eight -1 neighbours: I + K*I = 0.5 + (-9 - 8) * 0.5
    let predicted = 0.5 + (-9.0 - 8.0) * 0.5;
    let raw = sharpen_unclamped(&img, &p).map_err(|e| e.to_string())?;
    ensure!(raw.iter().all(|pl| pl.data.iter().all(|v| *v as f64 == predicted)), "unclamped output is not {predicted}");
    let out = sharpen(&img, &p).map_err(|e| e.to_string())?;
    let clamped = predicted.clamp(0.0, 1.0) as f32;
    ensure!(out.samples().iter().all(|v| *v == clamped), "clamped output is not {clamped}");
    Ok(format!("constant images fixed under zero-sum; published kernel gives {predicted} -> {clamped}"))
}

/// Brute-force non-local means, straight from the weighted-average definition.
fn nlm_oracle(plane: &Plane, p: &NlmParams) -> Vec<f64> {
    let (w, h) = (plane.width as isize, plane.height as isize);
    let (pr, wr) = (p.patch_radius as isize, p.window_radius as isize);
    let at = |x: isize, y: isize| plane.data[(y.clamp(0, h - 1) * w + x.clamp(0, w - 1)) as usize] as f64;
    let area = ((2 * pr + 1) * (2 * pr + 1)) as f64;
    let mut out = Vec::with_capacity(plane.data.len());
    for y in 0..h {
        for x in 0..w {
            let (mut num, mut den) = (0.0, 0.0);
            for ny in (y - wr).max(0)..=(y + wr).min(h - 1) {
                for nx in (x - wr).max(0)..=(x + wr).min(w - 1) {
                    let mut d2 = 0.0;
                    for v in -pr..=pr {
                        for u in -pr..=pr {
                            d2 += (at(x + u, y + v) - at(nx + u, ny + v)).powi(2);
                        }
                    }
                    let wt = (-(d2 / area) / (p.h * p.h)).exp();
                    num += wt * at(nx, ny);
                    den += wt;
                }
            }
            out.push(num / den);
        }
    }
    out
}

/// Output/input standard deviation of the brute-force filter on the noise
/// fixture below, recorded from the oracle.
const NLM_STD_RATIO: f64 = 0.061131134244126833;

fn noise_fixture() -> ImageF32 {
    let mut r = rng(4);
    let n = Normal::new(0.0, 0.05).unwrap();
    ImageF32::from_fn(32, 32, 3, |_, _, _| (0.5 + n.sample(&mut r) as f32).clamp(0.0, 1.0)).unwrap()
}

fn nlm_contract() -> Outcome {
    let p = NlmParams::default();
    for c in [0.0f32, 0.37, 1.0] {
        let img = ImageF32::filled(9, 11, 3, c).unwrap();
        ensure!(nlm_denoise(&img, &p).map_err(|e| e.to_string())? == img, "constant {c} image changed");
    }
    let mut r = rng(5);
    let small = NlmParams { patch_radius: 1, window_radius: 2, h: 0.1 };
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let img = random_image(&mut r, 5, 5);
        let out = nlm_denoise(&img, &small).map_err(|e| e.to_string())?;
        for c in 0..3 {
            let oracle = nlm_oracle(&img.plane(c), &small);
            for (a, b) in out.channel(c).iter().zip(&oracle) {
                worst = worst.max((*a as f64 - b).abs());
            }
        }
    }
    ensure!(worst <= 1e-6, "5x5 brute-force deviation {worst:e}");

    let noisy = noise_fixture();
    let fast = nlm_denoise(&noisy, &p).map_err(|e| e.to_string())?;
    let ratio = std_dev(fast.samples()) / std_dev(noisy.samples());
    let oracle: Vec<f32> = (0..3).flat_map(|c| nlm_oracle(&noisy.plane(c), &p)).map(|v| v as f32).collect();
    let oracle_ratio = std_dev(&oracle) / std_dev(noisy.samples());
    ensure!(
        (oracle_ratio - NLM_STD_RATIO).abs() <= 1e-6 * NLM_STD_RATIO,
        "oracle ratio {oracle_ratio} no longer matches the recorded {NLM_STD_RATIO}"
    );
    ensure!(
        (ratio - NLM_STD_RATIO).abs() <= 0.05 * NLM_STD_RATIO,
        "std ratio {ratio:.4} outside 5% of {NLM_STD_RATIO:.4}"
    );
    Ok(format!("5x5 max err {worst:.1e}; noise std ratio {ratio:.4} (recorded {NLM_STD_RATIO:.4})"))
}

fn residual_identities() -> Outcome {
    let mut r = rng(6);
    for _ in 0..20 {
        let (c, h, w) = (r.gen_range(1..=4), r.gen_range(1..=9), r.gen_range(1..=9));
        let data: Vec<f32> = (0..c * h * w).map(|_| r.gen_range(0.0..3.0)).collect();
        let t = Tensor::new(c, h, w, data.clone()).unwrap();
        let k = [1, 3, 5][r.gen_range(0..3)];
        let block = ResidualBlock::zeros(c, k);
        ensure!(residual_forward(&t, &block).map_err(|e| e.to_string())? == t, "zero residual block moved a tensor");

        let mut delta = vec![0.0f32; c * c * k * k];
        for i in 0..c {
            delta[((i * c + i) * k + k / 2) * k + k / 2] = 1.0;
        }
        let signed: Vec<f32> = data.iter().map(|v| v - 1.5).collect();
        let ts = Tensor::new(c, h, w, signed).unwrap();
        let conv = ConvLayer::new(c, c, k, 1, k / 2, Activation::None, delta, vec![0.0; c]).unwrap();
        ensure!(conv2d_forward(&ts, &conv).map_err(|e| e.to_string())? == ts, "delta kernel is not the identity");
        let once = relu(&ts);
        ensure!(relu(&once) == once, "relu is not idempotent");
    }
    Ok("zero residual, delta conv and relu idempotence exact on 20 tensors".into())
}

fn metric_identities() -> Outcome {
    let zeros = ImageF32::filled(8, 8, 3, 0.0).unwrap();
    let ones = ImageF32::filled(8, 8, 3, 1.0).unwrap();
    ensure!(psnr(&zeros, &zeros).unwrap() == Psnr::Infinite, "psnr(a, a) is not infinite");
    ensure!(psnr(&zeros, &ones).unwrap() == Psnr::Finite(0.0), "psnr(0, 1) is not 0 dB");
    for g in [0.0f32, 0.25, 0.5, 1.0] {
        let gray = ImageF32::filled(24, 16, 3, g).unwrap();
        let (u, _) = uciqe(&gray).unwrap();
        let (q, _) = uiqm(&gray).unwrap();
        ensure!(u.abs() <= 1e-12 && q.abs() <= 1e-12, "gray {g}: uciqe {u:e}, uiqm {q:e}");
    }
    let mut r = rng(7);
    for i in 0..50 {
        let (w, h) = if i % 2 == 0 { (8 * r.gen_range(1..=5), 8 * r.gen_range(1..=5)) } else { (r.gen_range(8..40), r.gen_range(8..40)) };
        let img = random_image(&mut r, w, h);
        let (u, uc) = uciqe(&img).unwrap();
        let (q, qc) = uiqm(&img).unwrap();
        let u_sum = 0.4680 * uc.sigma_c + 0.2745 * uc.con_l + 0.2576 * uc.mu_s;
        let q_sum = 0.0282 * qc.uicm + 0.2953 * qc.uism + 3.5753 * qc.uiconm;
        ensure!((u - u_sum).abs() <= 1e-9 && (q - q_sum).abs() <= 1e-9, "weighted sums do not hold on image {i}");
        if w % 8 == 0 && h % 8 == 0 {
            for m in [img.flip_horizontal(), img.flip_vertical()] {
                let (um, _) = uciqe(&m).unwrap();
                let (qm, _) = uiqm(&m).unwrap();
                ensure!((u - um).abs() <= 1e-9 && (q - qm).abs() <= 1e-9, "mirror changed scores on {w}x{h}");
            }
        }
    }
    Ok("zero points exact; weighted sums and mirror invariance on 50 images".into())
}

fn classifier_suite() -> Outcome {
    let t = ClassifierThresholds::default();
    let mut labels = Vec::new();
    let mut wrong = Vec::new();
    for cat in Category8::ALL {
        for seed in 0..25 {
            let img = archetype(cat, seed, 64, 64).unwrap();
            let c = classify(&img, &t).unwrap();
            let f = cat.flags();
            let margins = [
                if f.color_cast { c.cast.max_rel_dev >= 2.0 * t.cast_ratio } else { c.cast.max_rel_dev <= t.cast_ratio / 2.0 },
                if f.low_light { c.mean_v <= t.brightness_floor / 2.0 } else { c.mean_v >= 2.0 * t.brightness_floor },
                if f.blurred { c.laplacian_variance <= t.sharpness_floor / 2.0 } else { c.laplacian_variance >= 2.0 * t.sharpness_floor },
            ];
            ensure!(margins.iter().all(|m| *m), "{cat} seed {seed} is not 2x beyond every threshold");
            if c.category != cat {
                wrong.push(format!("{cat}/{seed}->{}", c.category));
            }
            labels.push(c.category);
        }
    }
    ensure!(wrong.is_empty(), "misclassified: {}", wrong.join(" "));
    let report = DatasetReport::summarize(&labels).unwrap();
    let csv = report.categories_csv();
    let mut lines = csv.lines();
    ensure!(lines.next() == Some("rank,description,count,proportion"), "unexpected category CSV header");
    let expected = [
        "Color bias only",
        "Color bias + blur",
        "Color bias + low light",
        "Color bias + low light + blur",
        "No issues",
        "Blur only",
        "Low light + blur",
        "Low light only",
    ];
    for (i, (line, desc)) in lines.zip(expected).enumerate() {
        ensure!(line == format!("{},{desc},25,0.1250", i + 1), "category row {line:?}");
    }
    let md = report.markdown_table();
    ensure!(md.starts_with("| Rank | Description | Proportion |"), "markdown table is not rank/description/proportion");
    Ok("200/200 archetypes correct with 2x margins; category table in published rank order".into())
}

fn directional_check() -> Outcome {
    let img = archetype(Category8::ColorBiasLowLightBlur, 7, 128, 128).unwrap();
    let (u0, _) = uciqe(&img).unwrap();
    let (q0, _) = uiqm(&img).unwrap();
    let mut parts = vec![format!("input {u0:.4}/{q0:.4}")];
    let mut failures = Vec::new();
    for m in Method::ALL {
        let e = Enhancer::seeded(m, ClassifierThresholds::default(), PlanParams::default(), 0.5, 7).unwrap();
        let out = e.enhance(&img).unwrap().image;
        let (u, _) = uciqe(&out).unwrap();
        let (q, _) = uiqm(&out).unwrap();
        parts.push(format!("{m} {u:.4}/{q:.4}"));
        if !(u > u0) {
            failures.push(format!("{m} UCIQE {u:.4} <= {u0:.4}"));
        }
        if !(q > q0) {
            failures.push(format!("{m} UIQM {q:.4} <= {q0:.4}"));
        }
    }
    let detail = parts.join(", ");
    ensure!(failures.is_empty(), "{} ({detail})", failures.join("; "));
    Ok(detail)
}

fn run_cli(args: &[&str], threads: usize) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_aquaclear"))
        .args(args)
        .args(["--threads", &threads.to_string(), "--seed", "7"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "aquaclear {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(())
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn end_to_end_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = tmp.path().join("input");
    std::fs::create_dir(&input).unwrap();
    for i in 0..20u64 {
        let (w, h) = if i % 5 == 4 { (34, 30) } else { (32, 32) };
        let img = archetype(Category8::ALL[i as usize % 8], i, w, h).unwrap();
        save_ppm(&img, input.join(format!("scene{i:02}.ppm"))).unwrap();
    }
    let inp = input.to_str().unwrap();
    let mut runs = Vec::new();
    for threads in [1, 8] {
        let out = tmp.path().join(format!("run{threads}"));
        let o = |sub: &str| out.join(sub).display().to_string();
        run_cli(&["classify", "--input", inp, "--output", &o("classify")], threads)?;
        run_cli(&["enhance", "--input", inp, "--method", "unite", "--output", &o("enhance")], threads)?;
        run_cli(&["evaluate", "--input", &o("enhance"), "--references", inp, "--output", &o("evaluate")], threads)?;
        let labels = out.join("classify/labels.csv").display().to_string();
        let scores = out.join("evaluate/scores.csv").display().to_string();
        run_cli(&["report", "--labels", &labels, "--scores", &scores, "--output", &o("report")], threads)?;
        runs.push(snapshot(&out));
    }
    let (a, b) = (&runs[0], &runs[1]);
    ensure!(a.len() == b.len() && a.keys().eq(b.keys()), "runs wrote different file sets");
    let differing: Vec<&String> = a.iter().filter(|(k, v)| b[*k] != **v).map(|(k, _)| k).collect();
    ensure!(differing.is_empty(), "files differ between 1 and 8 threads: {differing:?}");
    ensure!(a.keys().filter(|k| k.ends_with(".unite.ppm")).count() == 20, "expected 20 enhanced images");
    Ok(format!("{} output files byte-identical at 1 and 8 threads", a.len()))
}

fn split_augment_contracts() -> Outcome {
    let names = |n: usize| (0..n).map(|i| format!("f{i:02}.ppm")).collect::<Vec<_>>();
    let cfg = PipelineConfig::default();
    for (n, want) in [(10, [8, 1, 1]), (12, [10, 1, 1])] {
        ensure!(allocate(n, cfg.split.as_array()).unwrap() == want, "{n} files not split {want:?}");
        let s = split_files(&names(n), cfg.split.as_array(), 7).unwrap();
        ensure!(s.counts == want && s.entries.len() == n, "{n} file manifest does not partition as {want:?}");
    }
    let identity = AugmentConfig { crop_fraction: 1.0, jitter_amplitude: 0.0, samples_per_image: 2 };
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (src, dst) = (tmp.path().join("src"), tmp.path().join("dst"));
    std::fs::create_dir(&src).unwrap();
    for i in 0..3u64 {
        let img = archetype(Category8::ALL[i as usize], i, 20 + i as usize, 16).unwrap();
        for k in 0..2 {
            let (out, _) = augment_image(&img, &identity, 7, "x.ppm", k).unwrap();
            ensure!(out == img, "identity augmentation changed an image");
        }
        save_ppm(&img, src.join(format!("s{i}.ppm"))).unwrap();
    }
    let run_cfg = PipelineConfig { augment: identity, ..PipelineConfig::default() };
    cmd_augment(&src, &dst, &run_cfg).map_err(|e| e.to_string())?;
    for i in 0..3 {
        let original = std::fs::read(src.join(format!("s{i}.ppm"))).unwrap();
        for k in 0..2 {
            let copy = std::fs::read(dst.join(format!("s{i}_aug{k}.ppm"))).unwrap();
            ensure!(copy == original, "s{i}_aug{k}.ppm differs from its source");
        }
    }
    Ok("10 -> 8/1/1, 12 -> 10/1/1; identity augmentation reproduces inputs byte for byte".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("convolution and cnn oracles", 5, convolution_oracles),
        ("gray-world mean equalization", 1, gray_world_invariant),
        ("sharpening contract", 1, sharpening_contract),
        ("non-local means", 10, nlm_contract),
        ("residual and conv identities", 1, residual_identities),
        ("metric zero points and identities", 5, metric_identities),
        ("classifier synthetic suite", 5, classifier_suite),
        ("enhancement raises UCIQE and UIQM", 30, directional_check),
        ("end-to-end determinism", 60, end_to_end_determinism),
        ("split and augment contracts", 1, split_augment_contracts),
    ];
    let mut passed = 0;
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(budget) => Err(format!("over the {budget}s budget; {d}")),
            o => o,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => {
                passed += 1;
                println!("[{:>2}] PASS {name} ({secs:.2}s of {budget}s): {detail}", i + 1);
            }
            Err(why) => println!("[{:>2}] FAIL {name} ({secs:.2}s of {budget}s): {why}", i + 1),
        }
    }
    println!("acceptance: {passed}/10 passed");
    if passed != 10 {
        std::process::exit(1);
    }
}
