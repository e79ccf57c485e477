//! Procedural fundus-like images with a known vessel mask.
//!
//! A circular FOV holds a vignetted background and a branching vessel tree
//! grown from an off-centre optic disc. Vessels darken the background by
//! LIP addition of an absorbance with a parabolic cross-section, so the
//! image behaves like a transmittance model. A global LIP shift simulates
//! changes of illumination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::lip::{lip_add, ColorImage, GrayImage, M};
use crate::mask::BinaryMask;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticParams {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    /// Width of the main vessels in pixels.
    pub vessel_width: f64,
    /// Peak LIP absorbance of a vessel centre.
    pub vessel_contrast: f64,
    /// Complemented luminance of the background at the FOV centre.
    pub background: f64,
    /// Extra complemented luminance at the FOV rim.
    pub vignetting: f64,
    /// Amplitude of uniform noise on the luminance.
    pub noise: f64,
    /// LIP constant added to the complemented luminance: positive values
    /// darken the whole image, negative values brighten it.
    pub lighting: f64,
    /// Branching depth of the vessel tree.
    pub depth: u32,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            seed: 1,
            vessel_width: 6.0,
            vessel_contrast: 60.0,
            background: 150.0,
            vignetting: 40.0,
            noise: 4.0,
            lighting: 0.0,
            depth: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticFundus {
    pub image: ColorImage,
    /// Complemented luminance before quantisation to 8-bit RGB.
    pub complemented: GrayImage,
    pub vessels: BinaryMask,
    pub fov: BinaryMask,
}

struct Segment {
    a: (f64, f64),
    b: (f64, f64),
    half_width: f64,
}

impl Segment {
    fn distance(&self, p: (f64, f64)) -> f64 {
        let (dx, dy) = (self.b.0 - self.a.0, self.b.1 - self.a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((p.0 - self.a.0) * dx + (p.1 - self.a.1) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (qx, qy) = (self.a.0 + t * dx - p.0, self.a.1 + t * dy - p.1);
        (qx * qx + qy * qy).sqrt()
    }
}

struct Tree<'a> {
    rng: ChaCha8Rng,
    center: (f64, f64),
    radius: f64,
    segments: Vec<Segment>,
    params: &'a SyntheticParams,
}

impl Tree<'_> {
    fn grow(&mut self, start: (f64, f64), mut heading: f64, width: f64, depth: u32) {
        let step = 1.5;
        let length = self.radius * (0.9 - 0.15 * f64::from(self.params.depth - depth));
        let mut p = start;
        let mut travelled = 0.0;
        let branch_at = length * self.rng.gen_range(0.3..0.6);
        let mut branched = false;
        while travelled < length {
            heading += self.rng.gen_range(-0.08..0.08);
            let q = (p.0 + step * heading.cos(), p.1 + step * heading.sin());
            let r = ((q.0 - self.center.0).powi(2) + (q.1 - self.center.1).powi(2)).sqrt();
            if r > self.radius {
                return;
            }
            self.segments.push(Segment {
                a: p,
                b: q,
                half_width: width / 2.0,
            });
            p = q;
            travelled += step;
            if depth > 0 && !branched && travelled >= branch_at {
                branched = true;
                let side = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let child = (width * 0.7).max(1.5);
                let turn = side * self.rng.gen_range(0.5..0.9);
                self.grow(p, heading + turn, child, depth - 1);
                heading -= side * 0.2;
            }
        }
    }
}

/// Renders a synthetic fundus image.
pub fn synthetic_fundus(params: &SyntheticParams) -> Result<SyntheticFundus> {
    let (w, h) = (params.width, params.height);
    if w < 16 || h < 16 {
        return Err(invalid("size", format!("{w}x{h} is below 16x16")));
    }
    if params.lighting >= M || params.lighting.is_nan() {
        return Err(invalid(
            "lighting",
            format!("{} is not below M", params.lighting),
        ));
    }
    let center = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let radius = 0.47 * w.min(h) as f64;
    let mut tree = Tree {
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        center,
        radius,
        segments: Vec::new(),
        params,
    };
    let disc = (center.0 + 0.35 * radius, center.1);
    for k in 0..4 {
        let base = std::f64::consts::PI + (f64::from(k) - 1.5) * 0.6;
        let heading = base + tree.rng.gen_range(-0.15..0.15);
        tree.grow(disc, heading, params.vessel_width, params.depth);
    }

    // smallest normalised distance to a vessel centreline
    let mut ratio = vec![f64::INFINITY; w * h];
    for s in &tree.segments {
        let reach = s.half_width + 1.0;
        let x0 = (s.a.0.min(s.b.0) - reach).floor().max(0.0) as usize;
        let x1 = ((s.a.0.max(s.b.0) + reach).ceil() as usize).min(w - 1);
        let y0 = (s.a.1.min(s.b.1) - reach).floor().max(0.0) as usize;
        let y1 = ((s.a.1.max(s.b.1) + reach).ceil() as usize).min(h - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let r = s.distance((x as f64, y as f64)) / s.half_width;
                let slot = &mut ratio[y * w + x];
                *slot = slot.min(r);
            }
        }
    }

    let fov = BinaryMask::from_fn(w, h, |x, y| {
        (x as f64 - center.0).powi(2) + (y as f64 - center.1).powi(2) <= radius * radius
    });
    let vessels = BinaryMask::from_fn(w, h, |x, y| fov.get(x, y) && ratio[y * w + x] <= 1.0);

    let mut noise = ChaCha8Rng::seed_from_u64(params.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            if !fov.get(x, y) {
                data.push(M - 1.0);
                continue;
            }
            let rr =
                ((x as f64 - center.0).powi(2) + (y as f64 - center.1).powi(2)) / (radius * radius);
            let background = params.background + params.vignetting * rr;
            let r = ratio[y * w + x];
            let absorbance = params.vessel_contrast * (1.0 - r * r).max(0.0);
            let jitter = if params.noise > 0.0 {
                noise.gen_range(-params.noise..=params.noise)
            } else {
                0.0
            };
            let v = lip_add(lip_add(background, absorbance), params.lighting) + jitter;
            data.push(v.clamp(0.0, M - 1.0));
        }
    }
    let complemented = GrayImage::new(w, h, data)?;
    let image = ColorImage::new(
        w,
        h,
        complemented
            .data()
            .iter()
            .zip(fov.data())
            .map(|(&f, &inside)| if inside { tint(M - 1.0 - f) } else { [0, 0, 0] })
            .collect(),
    )?;
    Ok(SyntheticFundus {
        image,
        complemented,
        vessels,
        fov,
    })
}

/// Reddish fundus colour of a given luminance.
fn tint(lum: f64) -> [u8; 3] {
    // channel weights whose luminance sums to ~0.9523
    let k = lum / 0.9523;
    let q = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    [q(1.5 * k), q(0.8 * k), q(0.3 * k)]
}
