//! From vesselness maps to binary vessel masks, and the end-to-end pipeline.

use crate::error::{invalid, Error, Result};
use crate::lip::{complement, image_mean, luminance, ColorImage, GrayImage};
use crate::mask::BinaryMask;
use crate::probe::{adapt_intensities, fov_diameter, orientations, ProbeFamily, ProbeIntensities};
use crate::vesselness::{
    detector_map_probe, normalize_map, DetectorParams, VesselnessMap, DEFAULT_DISCARD_FRACTION,
};

/// Pipeline settings. [`Default`] gives the published parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    /// Fraction of the FOV labelled as vessel by the threshold.
    pub area_fraction: f64,
    /// Maximum fraction of the one-probe vessel area allowed to change
    /// class when more probe scales are added.
    pub change_limit: f64,
    pub max_probes: usize,
    pub orientation_count: usize,
    pub discard_fraction: f64,
    /// Camera FOV angle in degrees.
    pub fov_angle: f64,
    /// Luminance threshold for FOV extraction when no mask is supplied.
    pub fov_threshold: f64,
    /// Place the side segments below the central one (see
    /// [`ProbeIntensities::raised_center`]).
    pub raised_center: bool,
    /// Fixed probe intensities; disables adaptation to the image mean.
    pub probe_intensities: Option<ProbeIntensities>,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            area_fraction: 0.12,
            change_limit: 0.40,
            max_probes: 3,
            orientation_count: 18,
            discard_fraction: DEFAULT_DISCARD_FRACTION,
            fov_angle: 45.0,
            fov_threshold: 20.0,
            raised_center: true,
            probe_intensities: None,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("{v} outside (0, 1)")))
            }
        };
        unit("area_fraction", self.area_fraction)?;
        unit("change_limit", self.change_limit)?;
        if !(0.0..1.0).contains(&self.discard_fraction) {
            return Err(invalid(
                "discard_fraction",
                format!("{} outside [0, 1)", self.discard_fraction),
            ));
        }
        if !(1..=3).contains(&self.max_probes) {
            return Err(invalid(
                "max_probes",
                format!("{} outside 1..=3", self.max_probes),
            ));
        }
        if self.orientation_count == 0 {
            return Err(invalid("orientation_count", "need at least one"));
        }
        if !(self.fov_angle > 0.0 && self.fov_angle.is_finite()) {
            return Err(invalid(
                "fov_angle",
                format!("{} is not positive", self.fov_angle),
            ));
        }
        Ok(())
    }

    pub fn detector_params(&self) -> Result<DetectorParams> {
        DetectorParams::new(self.discard_fraction, orientations(self.orientation_count)?)
    }
}

/// Result of [`threshold_by_area`].
#[derive(Debug, Clone, PartialEq)]
pub struct AreaThreshold {
    pub mask: BinaryMask,
    /// Largest vesselness value labelled as vessel.
    pub value: f64,
    /// `ceil(fraction · N)`.
    pub target: usize,
    /// Set when every defined value equals the threshold.
    pub degenerate: bool,
}

/// Labels as vessel the pixels whose vesselness is at most the
/// `ceil(fraction · N)`-th smallest defined value. More pixels than the
/// target are selected only through ties at the threshold.
pub fn threshold_by_area(e: &VesselnessMap, fraction: f64) -> Result<AreaThreshold> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid(
            "area_fraction",
            format!("{fraction} outside (0, 1)"),
        ));
    }
    let mut values: Vec<f64> = e.defined().collect();
    if values.is_empty() {
        return Err(Error::Empty("vesselness map with no defined pixel"));
    }
    let n = values.len();
    let target = (((fraction * n as f64) - 1e-9).ceil() as usize).clamp(1, n);
    let value = *values.select_nth_unstable_by(target - 1, f64::total_cmp).1;
    let degenerate = values.iter().all(|&v| v == value);
    let data = e
        .values()
        .iter()
        .map(|v| v.is_some_and(|v| v <= value))
        .collect();
    Ok(AreaThreshold {
        mask: BinaryMask::from_vec(e.width(), e.height(), data)?,
        value,
        target,
        degenerate,
    })
}

/// Outcome of the probe-count selection.
#[derive(Debug, Clone)]
pub struct ProbeSelection {
    /// Number of probe scales kept.
    pub probes_used: usize,
    /// Thresholded `e^I` for the selected `I`.
    pub segmentation: BinaryMask,
    /// `e^1, e^2, …` up to the last one evaluated.
    pub maps: Vec<VesselnessMap>,
    /// Pixels changing class against `seg(e^1)`, for each evaluated `I ≥ 2`.
    pub changes: Vec<usize>,
}

impl ProbeSelection {
    pub fn selected_map(&self) -> &VesselnessMap {
        &self.maps[self.probes_used - 1]
    }
}

/// Chooses how many probe scales to combine.
///
/// `seg(e^I)` is compared with `seg(e^1)` for `I = 2, 3, …`; `I` is accepted
/// while the number of FOV pixels changing class stays within
/// `change_limit · |seg(e^1)|`. The first failing `I` stops the search.
pub fn select_probe_count(
    f: &GrayImage,
    family: &ProbeFamily,
    params: &PipelineParams,
    fov: &BinaryMask,
) -> Result<ProbeSelection> {
    params.validate()?;
    let detector = params.detector_params()?;
    let available = family.len().min(params.max_probes);
    let probes = &family.probes()[..available];

    let mut combined = detector_map_probe(f, &probes[0], &detector, fov)?;
    let first = VesselnessMap::new(combined.clone(), fov.clone(), 1)?;
    let seg1 = threshold_by_area(&first, params.area_fraction)?.mask;
    let allowed = params.change_limit * seg1.count() as f64;

    let mut maps = vec![first];
    let mut segmentation = seg1.clone();
    let mut changes = Vec::new();
    let mut probes_used = 1;
    for (i, spec) in probes.iter().enumerate().skip(1) {
        combined = combined.pointwise_min(&detector_map_probe(f, spec, &detector, fov)?)?;
        let e = VesselnessMap::new(combined.clone(), fov.clone(), i + 1)?;
        let seg = threshold_by_area(&e, params.area_fraction)?.mask;
        let changed = seg.changed_count(&seg1, fov)?;
        changes.push(changed);
        maps.push(e);
        if changed as f64 > allowed {
            break;
        }
        segmentation = seg;
        probes_used = i + 1;
    }
    Ok(ProbeSelection {
        probes_used,
        segmentation,
        maps,
        changes,
    })
}

/// Clears 8-connected components with fewer than `min_area` pixels.
pub fn remove_small_components(mask: &BinaryMask, min_area: f64) -> BinaryMask {
    let (labels, sizes) = mask.label_components();
    let data = labels
        .iter()
        .map(|&l| l != 0 && sizes[l as usize] as f64 >= min_area)
        .collect();
    BinaryMask::from_vec(mask.width(), mask.height(), data).expect("same size")
}

/// Fills the holes of a vessel mask that vanish under a 3x3 erosion of the
/// background: the background is eroded by the 3x3 square, reconstructed
/// by dilation under itself, and complemented back.
pub fn fill_small_holes(mask: &BinaryMask) -> BinaryMask {
    let background = mask.complement();
    let seeds = background.erode_square3();
    background
        .reconstruct_from(&seeds)
        .expect("same size")
        .complement()
}

/// FOV mask from a (non-complemented) luminance image: pixels brighter than
/// `threshold`, largest 8-connected component, interior holes filled.
pub fn fov_from_image(lum: &GrayImage, threshold: f64) -> Result<BinaryMask> {
    let bright = BinaryMask::from_vec(
        lum.width(),
        lum.height(),
        lum.data().iter().map(|&v| v > threshold).collect(),
    )?;
    let (labels, sizes) = bright.label_components();
    let largest = (1..sizes.len())
        .max_by_key(|&l| (sizes[l], std::cmp::Reverse(l)))
        .ok_or(Error::NoFov(threshold))?;
    let component = BinaryMask::from_vec(
        lum.width(),
        lum.height(),
        labels.iter().map(|&l| l as usize == largest).collect(),
    )?;
    Ok(component.fill_enclosed())
}

/// Everything the pipeline produces for one image.
#[derive(Debug, Clone)]
pub struct SegmentationOutput {
    /// Final vessel mask, a subset of `fov`.
    pub mask: BinaryMask,
    /// Vesselness map `e^I` for the selected `I`.
    pub vesselness: VesselnessMap,
    /// Normalised map `Φ`.
    pub normalized: VesselnessMap,
    pub probes_used: usize,
    pub fov: BinaryMask,
    pub family: ProbeFamily,
    /// Image mean of the complemented luminance inside the FOV.
    pub mean: f64,
    pub changes: Vec<usize>,
}

/// Full pipeline on a colour image. Without `fov`, the mask is extracted by
/// [`fov_from_image`].
pub fn segment_vessels(
    img: &ColorImage,
    fov: Option<&BinaryMask>,
    params: &PipelineParams,
) -> Result<SegmentationOutput> {
    params.validate()?;
    let lum = luminance(img);
    let fov = match fov {
        Some(m) => {
            if m.dims() != img.dims() {
                return Err(Error::DimensionMismatch {
                    expected: img.dims(),
                    actual: m.dims(),
                });
            }
            m.clone()
        }
        None => fov_from_image(&lum, params.fov_threshold)?,
    };
    segment_lip(&complement(&lum), &fov, params)
}

/// Pipeline on a complemented luminance image `f` (LIP scale).
pub fn segment_lip(
    f: &GrayImage,
    fov: &BinaryMask,
    params: &PipelineParams,
) -> Result<SegmentationOutput> {
    params.validate()?;
    if fov.is_empty() {
        return Err(Error::Empty("FOV mask"));
    }
    let mean = image_mean(f, fov)?;
    let intensities = match params.probe_intensities {
        Some(fixed) => fixed,
        None => adapt_intensities(mean)?,
    };
    let intensities = if params.raised_center {
        intensities.raised_center()
    } else {
        intensities
    };
    let family = ProbeFamily::from_fov(
        fov_diameter(fov)?,
        params.fov_angle,
        intensities,
        params.max_probes,
    )?;
    let w1 = family.largest().width;
    if w1 > f.width().min(f.height()) as f64 {
        return Err(Error::ImageTooSmall {
            width: f.width(),
            height: f.height(),
            probe_width: w1,
        });
    }

    let selection = select_probe_count(f, &family, params, fov)?;
    let cleaned = remove_small_components(&selection.segmentation, (w1 / 2.0).powi(2));
    let mask = fill_small_holes(&cleaned).and(fov)?;
    let vesselness = selection.selected_map().clone();
    let normalized = normalize_map(&vesselness)?;
    Ok(SegmentationOutput {
        mask,
        vesselness,
        normalized,
        probes_used: selection.probes_used,
        fov: fov.clone(),
        family,
        mean,
        changes: selection.changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vesselness::RealMap;
    use proptest::prelude::*;

    fn map_of(values: Vec<Option<f64>>, w: usize) -> VesselnessMap {
        let h = values.len() / w;
        VesselnessMap::new(
            RealMap::new(w, h, values).unwrap(),
            BinaryMask::full(w, h),
            1,
        )
        .unwrap()
    }

    fn parse(rows: &[&str]) -> BinaryMask {
        BinaryMask::from_fn(rows[0].len(), rows.len(), |x, y| {
            rows[y].as_bytes()[x] == b'#'
        })
    }

    #[test]
    fn defaults_match_published_parameters() {
        let p = PipelineParams::default();
        assert_eq!(p.area_fraction, 0.12);
        assert_eq!(p.change_limit, 0.40);
        assert_eq!(p.max_probes, 3);
        assert_eq!(p.orientation_count, 18);
        assert_eq!(p.discard_fraction, 0.20);
        assert_eq!(p.fov_angle, 45.0);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn invalid_params_are_rejected() {
        for p in [
            PipelineParams {
                area_fraction: 0.0,
                ..Default::default()
            },
            PipelineParams {
                change_limit: 1.0,
                ..Default::default()
            },
            PipelineParams {
                max_probes: 4,
                ..Default::default()
            },
            PipelineParams {
                orientation_count: 0,
                ..Default::default()
            },
            PipelineParams {
                discard_fraction: 1.0,
                ..Default::default()
            },
        ] {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn threshold_examples() {
        let e = map_of((1..=100).map(|v| Some(v as f64)).collect(), 10);
        let t = threshold_by_area(&e, 0.12).unwrap();
        assert_eq!(t.mask.count(), 12);
        assert_eq!(t.value, 12.0);
        assert!(!t.degenerate);

        let t = threshold_by_area(&e, 0.001).unwrap();
        assert_eq!(t.mask.count(), 1);
        assert!(t.mask.get(0, 0));

        let tied = map_of(vec![Some(4.0); 20], 5);
        let t = threshold_by_area(&tied, 0.12).unwrap();
        assert_eq!(t.mask.count(), 20);
        assert!(t.degenerate);
    }

    #[test]
    fn threshold_ignores_undefined_pixels() {
        let mut values: Vec<Option<f64>> = (0..10).map(|v| Some(v as f64)).collect();
        values.extend(std::iter::repeat_n(None, 10));
        let t = threshold_by_area(&map_of(values, 10), 0.2).unwrap();
        assert_eq!(t.target, 2);
        assert_eq!(t.mask.count(), 2);
        assert!(threshold_by_area(&map_of(vec![None; 4], 2), 0.2).is_err());
    }

    #[test]
    fn component_filter_examples() {
        // min_area = (10.8 / 2)^2 = 29.16
        let min_area = (10.8f64 / 2.0).powi(2);
        let mut m = BinaryMask::new(40, 20);
        for i in 0..29 {
            m.set(i % 10, i / 10, true);
        }
        for i in 0..30 {
            m.set(20 + i % 10, 10 + i / 10, true);
        }
        let out = remove_small_components(&m, min_area);
        assert_eq!(out.count(), 30);
        assert!(out.get(20, 10) && !out.get(0, 0));

        assert_eq!(remove_small_components(&m, 0.0), m);
        assert!(remove_small_components(&BinaryMask::new(5, 5), 3.0).is_empty());
    }

    #[test]
    fn hole_filling_examples() {
        let blob = parse(&[
            ".........",
            ".........",
            "..#####..",
            "..##.##..",
            "..#####..",
            ".........",
            ".........",
        ]);
        let filled = fill_small_holes(&blob);
        assert!(filled.get(3, 2));
        assert_eq!(filled.count(), blob.count() + 1);

        let lake = parse(&[
            "#########",
            "#.......#",
            "#.......#",
            "#.......#",
            "#.......#",
            "#########",
        ]);
        assert_eq!(fill_small_holes(&lake), lake);
        let full = BinaryMask::full(6, 4);
        assert_eq!(fill_small_holes(&full), full);
    }

    #[test]
    fn fov_extraction() {
        let disc = |x: usize, y: usize| {
            let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
            dx * dx + dy * dy <= 15.0 * 15.0
        };
        let lum = GrayImage::from_fn(41, 41, |x, y| if disc(x, y) { 200.0 } else { 0.0 }).unwrap();
        let fov = fov_from_image(&lum, 20.0).unwrap();
        assert_eq!(fov, BinaryMask::from_fn(41, 41, disc));

        // a speck of 3 dark pixels inside the disc, and an isolated bright pixel outside
        let speck = [(20, 20), (21, 20), (20, 21)];
        let lum2 = GrayImage::from_fn(41, 41, |x, y| {
            if speck.contains(&(x, y)) {
                0.0
            } else if disc(x, y) || (x, y) == (1, 1) {
                200.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(fov_from_image(&lum2, 20.0).unwrap(), fov);

        let at_threshold = GrayImage::filled(5, 5, 20.0).unwrap();
        assert!(matches!(
            fov_from_image(&at_threshold, 20.0),
            Err(Error::NoFov(_))
        ));
    }

    #[test]
    fn all_black_image_has_no_fov() {
        let img = ColorImage::filled(64, 64, [0, 0, 0]).unwrap();
        assert!(matches!(
            segment_vessels(&img, None, &PipelineParams::default()),
            Err(Error::NoFov(_))
        ));
    }

    #[test]
    fn image_smaller_than_probe_is_rejected() {
        let f = GrayImage::filled(8, 8, 100.0).unwrap();
        let fov = BinaryMask::full(8, 8);
        let params = PipelineParams {
            fov_angle: 0.5,
            ..Default::default()
        };
        assert!(matches!(
            segment_lip(&f, &fov, &params),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    fn random_mask() -> impl Strategy<Value = BinaryMask> {
        (3usize..16, 3usize..16).prop_flat_map(|(w, h)| {
            prop::collection::vec(prop::bool::weighted(0.55), w * h)
                .prop_map(move |d| BinaryMask::from_vec(w, h, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn post_filters_are_idempotent_and_monotone(m in random_mask(), area in 0.0..12.0f64) {
            let r = remove_small_components(&m, area);
            prop_assert!(r.is_subset_of(&m));
            prop_assert_eq!(remove_small_components(&r, area), r.clone());
            let f = fill_small_holes(&m);
            prop_assert!(m.is_subset_of(&f));
            prop_assert_eq!(fill_small_holes(&f), f);
        }

        #[test]
        fn threshold_cardinality(values in prop::collection::vec(0u8..20, 1..200), fraction in 0.01..0.99f64) {
            let n = values.len();
            let e = map_of(values.iter().map(|&v| Some(f64::from(v))).collect(), n);
            let t = threshold_by_area(&e, fraction).unwrap();
            let target = ((fraction * n as f64) - 1e-9).ceil() as usize;
            let count = t.mask.count();
            prop_assert!(count >= target.max(1));
            let strictly_below = values.iter().filter(|&&v| f64::from(v) < t.value).count();
            prop_assert!(strictly_below < target.max(1));
        }
    }
}
