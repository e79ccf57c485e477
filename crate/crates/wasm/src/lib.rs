//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Images cross the boundary as flat RGBA byte arrays, row-major.

use lipvessel::synthetic::{synthetic_fundus, SyntheticFundus, SyntheticParams};
use lipvessel::vesselness::Probe1d;
use lipvessel::{
    confusion, metrics, profile_detector_1d, render_overlay, segment_vessels, BinaryMask,
    ColorImage, PipelineParams, RealMap,
};
use wasm_bindgen::prelude::*;

fn js_err(e: lipvessel::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn rgba(img: &ColorImage) -> Vec<u8> {
    img.pixels()
        .iter()
        .flat_map(|&[r, g, b]| [r, g, b, 255])
        .collect()
}

fn mask_rgba(mask: &BinaryMask) -> Vec<u8> {
    mask.data()
        .iter()
        .flat_map(|&v| {
            if v {
                [255, 255, 255, 255]
            } else {
                [0, 0, 0, 255]
            }
        })
        .collect()
}

/// Grey levels for a map scaled to its own range; undefined pixels are dark blue.
fn map_rgba(map: &RealMap) -> Vec<u8> {
    let (lo, hi) = map
        .defined()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    map.values()
        .iter()
        .flat_map(|v| match v {
            Some(v) => {
                let g = (255.0 * (v - lo) / span).round() as u8;
                [g, g, g, 255]
            }
            None => [0, 0, 60, 255],
        })
        .collect()
}

/// A generated fundus-like image with its ground truth.
#[wasm_bindgen]
pub struct Scene {
    inner: SyntheticFundus,
}

#[wasm_bindgen]
impl Scene {
    /// `lighting` is a LIP constant: positive darkens, negative brightens.
    #[wasm_bindgen(constructor)]
    pub fn new(size: u32, seed: u32, lighting: f64) -> Result<Scene, JsValue> {
        let params = SyntheticParams {
            width: size as usize,
            height: size as usize,
            seed: u64::from(seed),
            lighting,
            ..Default::default()
        };
        synthetic_fundus(&params)
            .map(|inner| Scene { inner })
            .map_err(js_err)
    }

    pub fn width(&self) -> u32 {
        self.inner.image.width() as u32
    }

    pub fn height(&self) -> u32 {
        self.inner.image.height() as u32
    }

    pub fn image_rgba(&self) -> Vec<u8> {
        rgba(&self.inner.image)
    }

    pub fn truth_rgba(&self) -> Vec<u8> {
        mask_rgba(&self.inner.vessels)
    }

    /// Runs the full pipeline with the given FOV mask of the scene.
    pub fn segment(
        &self,
        fov_angle: f64,
        max_probes: u32,
        orientations: u32,
        area_fraction: f64,
    ) -> Result<Segmentation, JsValue> {
        let params = PipelineParams {
            fov_angle,
            max_probes: max_probes as usize,
            orientation_count: orientations as usize,
            area_fraction,
            ..Default::default()
        };
        let s = &self.inner;
        let out = segment_vessels(&s.image, Some(&s.fov), &params).map_err(js_err)?;
        let overlay = render_overlay(&out.mask, &s.vessels, &s.fov).map_err(js_err)?;
        let m = metrics(
            "scene",
            confusion(&out.mask, &s.vessels, &s.fov).map_err(js_err)?,
        )
        .map_err(js_err)?;
        Ok(Segmentation {
            mask: mask_rgba(&out.mask),
            phi: map_rgba(out.normalized.map()),
            vesselness: map_rgba(out.vesselness.map()),
            overlay: rgba(&overlay),
            probes_used: out.probes_used as u32,
            probe_widths: out.family.probes().iter().map(|p| p.width).collect(),
            se: m.se.unwrap_or(f64::NAN),
            sp: m.sp.unwrap_or(f64::NAN),
            acc: m.acc,
        })
    }
}

#[wasm_bindgen]
pub struct Segmentation {
    mask: Vec<u8>,
    phi: Vec<u8>,
    vesselness: Vec<u8>,
    overlay: Vec<u8>,
    probes_used: u32,
    probe_widths: Vec<f64>,
    se: f64,
    sp: f64,
    acc: f64,
}

#[wasm_bindgen]
impl Segmentation {
    pub fn mask_rgba(&self) -> Vec<u8> {
        self.mask.clone()
    }

    pub fn phi_rgba(&self) -> Vec<u8> {
        self.phi.clone()
    }

    pub fn vesselness_rgba(&self) -> Vec<u8> {
        self.vesselness.clone()
    }

    pub fn overlay_rgba(&self) -> Vec<u8> {
        self.overlay.clone()
    }

    pub fn probes_used(&self) -> u32 {
        self.probes_used
    }

    pub fn probe_widths(&self) -> Vec<f64> {
        self.probe_widths.clone()
    }

    pub fn se(&self) -> f64 {
        self.se
    }

    pub fn sp(&self) -> f64 {
        self.sp
    }

    pub fn acc(&self) -> f64 {
        self.acc
    }
}

/// Detector response of a 3-point probe along a profile; NaN where the
/// probe does not fit.
#[wasm_bindgen]
pub fn profile_response(
    profile: Vec<f64>,
    side: f64,
    center: f64,
    half_width: u32,
) -> Result<Vec<f64>, JsValue> {
    let probe = Probe1d {
        left: side,
        center,
        right: side,
        half_width: half_width as usize,
    };
    profile_detector_1d(&profile, probe)
        .map(|v| v.into_iter().map(|e| e.unwrap_or(f64::NAN)).collect())
        .map_err(js_err)
}
