//! Reference implementations written straight from the definitions, with
//! no sharing of intermediate results, plus random inputs for comparisons.
#![allow(dead_code)]

use lipvessel::{BinaryMask, GrayImage, RasterProbe, M};
use rand::Rng;

pub fn lip_sub(a: f64, b: f64) -> f64 {
    M * (a - b) / (M - b)
}

/// `k`-th smallest value with `k = floor(n p / 100) + 1`, in integers.
pub fn kth_min(mut values: Vec<f64>, discard_percent: usize) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = values.len() * discard_percent / 100 + 1;
    Some(values[k - 1])
}

fn samples(
    f: &GrayImage,
    valid: &BinaryMask,
    x: usize,
    y: usize,
    offsets: &[(i32, i32)],
    level: f64,
) -> Vec<f64> {
    let mut out = Vec::new();
    for &(dx, dy) in offsets {
        let sx = x as i64 + dx as i64;
        let sy = y as i64 + dy as i64;
        if sx < 0 || sy < 0 || sx >= f.width() as i64 || sy >= f.height() as i64 {
            continue;
        }
        let (sx, sy) = (sx as usize, sy as usize);
        if valid.get(sx, sy) {
            out.push(lip_sub(f.get(sx, sy), level));
        }
    }
    out
}

/// Detector value of one rasterized probe placed at `(x, y)`.
pub fn detector(
    f: &GrayImage,
    valid: &BinaryMask,
    probe: &RasterProbe,
    x: usize,
    y: usize,
    discard_percent: usize,
) -> Option<f64> {
    if !valid.get(x, y) {
        return None;
    }
    let h = probe.intensities();
    let cc = kth_min(samples(f, valid, x, y, probe.center(), h.center), 0)?;
    let cl = kth_min(
        samples(f, valid, x, y, probe.left(), h.side),
        discard_percent,
    )?;
    let cr = kth_min(
        samples(f, valid, x, y, probe.right(), h.side),
        discard_percent,
    )?;
    let c = cc.min(cl).min(cr);
    Some(lip_sub(cl, c).max(lip_sub(cr, c)))
}

/// Infimum of the detector over every probe and orientation given.
pub fn vesselness(
    f: &GrayImage,
    valid: &BinaryMask,
    probes: &[RasterProbe],
    discard_percent: usize,
) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(f.width() * f.height());
    for y in 0..f.height() {
        for x in 0..f.width() {
            let mut best: Option<f64> = None;
            for p in probes {
                if let Some(e) = detector(f, valid, p, x, y, discard_percent) {
                    best = Some(best.map_or(e, |b| b.min(e)));
                }
            }
            out.push(best);
        }
    }
    out
}

pub fn random_image<R: Rng>(rng: &mut R, w: usize, h: usize) -> GrayImage {
    GrayImage::new(
        w,
        h,
        (0..w * h).map(|_| rng.gen_range(0.0..255.0)).collect(),
    )
    .unwrap()
}

/// Random image with some structure: a smooth background with dark and
/// bright strokes, so that detector values are spread out.
pub fn random_structured_image<R: Rng>(rng: &mut R, w: usize, h: usize) -> GrayImage {
    let base = rng.gen_range(60.0..160.0);
    let gx = rng.gen_range(-1.5..1.5);
    let gy = rng.gen_range(-1.5..1.5);
    let lines: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(0.0..w as f64),
                rng.gen_range(1.0..3.5),
                rng.gen_range(30.0..80.0),
            )
        })
        .collect();
    let noise: Vec<f64> = (0..w * h).map(|_| rng.gen_range(-3.0..3.0)).collect();
    GrayImage::from_fn(w, h, |x, y| {
        let mut v = base + gx * x as f64 + gy * y as f64;
        for &(theta, offset, half, depth) in &lines {
            let d =
                (x as f64 * theta.sin() - y as f64 * theta.cos() + offset - w as f64 / 2.0).abs();
            if d < half {
                v += depth * (1.0 - d / half);
            }
        }
        (v + noise[y * w + x]).clamp(0.0, 250.0)
    })
    .unwrap()
}

pub fn disc(w: usize, h: usize) -> BinaryMask {
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let r = 0.48 * w.min(h) as f64;
    BinaryMask::from_fn(w, h, |x, y| {
        (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r
    })
}

pub fn max_abs_diff(a: &[Option<f64>], b: &[Option<f64>]) -> Result<f64, String> {
    if a.len() != b.len() {
        return Err(format!("length {} vs {}", a.len(), b.len()));
    }
    let mut worst = 0.0f64;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        match (x, y) {
            (Some(x), Some(y)) => worst = worst.max((x - y).abs()),
            (None, None) => {}
            _ => return Err(format!("definedness differs at index {i}: {x:?} vs {y:?}")),
        }
    }
    Ok(worst)
}
