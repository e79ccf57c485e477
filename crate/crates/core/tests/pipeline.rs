mod common;

use common::{disc, random_structured_image};
use lipvessel::synthetic::{synthetic_fundus, SyntheticParams};
use lipvessel::{
    confusion, fill_small_holes, remove_small_components, segment_lip, segment_vessels,
    threshold_by_area, ConfusionCounts, PipelineParams,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dice(c: ConfusionCounts) -> f64 {
    2.0 * c.tp as f64 / (2 * c.tp + c.fp + c.fn_) as f64
}

/// FOV angle that gives a largest probe about 10 pixels wide on a
/// 256-pixel synthetic image, the ratio of probe to vessel width seen on
/// 565-pixel-wide fundus photographs at 45 degrees.
const SYNTHETIC_FOV_ANGLE: f64 = 21.6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn contracts_hold_on_random_images(
        seed in any::<u64>(),
        orientations in 2usize..10,
        max_probes in 1usize..=3,
        area in 0.05f64..0.3,
        raised in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_structured_image(&mut rng, 48, 48);
        let fov = disc(48, 48);
        let params = PipelineParams {
            fov_angle: 8.0,
            orientation_count: orientations,
            max_probes,
            area_fraction: area,
            raised_center: raised,
            ..Default::default()
        };
        let out = segment_lip(&f, &fov, &params).unwrap();
        prop_assert!(out.mask.is_subset_of(&fov));
        prop_assert!(out.probes_used >= 1 && out.probes_used <= max_probes);

        let t = threshold_by_area(&out.vesselness, area).unwrap();
        let n = out.vesselness.defined_count();
        prop_assert_eq!(t.target, ((area * n as f64) - 1e-9).ceil() as usize);
        let at_most = out.vesselness.defined().filter(|&v| v <= t.value).count();
        let below = out.vesselness.defined().filter(|&v| v < t.value).count();
        prop_assert!(at_most >= t.target && below < t.target);
        prop_assert_eq!(t.mask.count(), at_most);

        let min_area = (out.family.largest().width / 2.0).powi(2);
        let once = remove_small_components(&out.mask, min_area);
        prop_assert_eq!(remove_small_components(&once, min_area), once);
        let filled = fill_small_holes(&out.mask);
        prop_assert_eq!(fill_small_holes(&filled), filled);

        let again = segment_lip(&f, &fov, &params).unwrap();
        prop_assert_eq!(again.mask, out.mask);
        prop_assert!(again.vesselness == out.vesselness);
    }
}

#[test]
fn recovers_synthetic_vessels() {
    for seed in 1..=2 {
        let s = synthetic_fundus(&SyntheticParams {
            seed,
            ..Default::default()
        })
        .unwrap();
        let params = PipelineParams {
            fov_angle: SYNTHETIC_FOV_ANGLE,
            ..Default::default()
        };
        let out = segment_vessels(&s.image, Some(&s.fov), &params).unwrap();
        let c = confusion(&out.mask, &s.vessels, &s.fov).unwrap();
        assert!(dice(c) > 0.7, "seed {seed}: dice {}", dice(c));
        assert!(out.mask.is_subset_of(&s.fov));
    }
}

#[test]
fn verbatim_polarity_misses_most_vessels() {
    let s = synthetic_fundus(&SyntheticParams::default()).unwrap();
    let run = |raised_center| {
        let params = PipelineParams {
            fov_angle: SYNTHETIC_FOV_ANGLE,
            raised_center,
            ..Default::default()
        };
        let out = segment_vessels(&s.image, Some(&s.fov), &params).unwrap();
        dice(confusion(&out.mask, &s.vessels, &s.fov).unwrap())
    };
    let (raised, verbatim) = (run(true), run(false));
    assert!(
        raised > verbatim + 0.3,
        "raised {raised}, verbatim {verbatim}"
    );
}

#[test]
fn low_contrast_image_still_gives_a_bounded_mask() {
    let s = synthetic_fundus(&SyntheticParams {
        seed: 5,
        vessel_contrast: 18.0,
        vignetting: 70.0,
        noise: 6.0,
        lighting: 60.0,
        ..Default::default()
    })
    .unwrap();
    let params = PipelineParams {
        fov_angle: SYNTHETIC_FOV_ANGLE,
        ..Default::default()
    };
    // FOV extracted from the image itself
    let out = segment_vessels(&s.image, None, &params).unwrap();
    assert!(out.probes_used <= 3);
    assert!(!out.mask.is_empty());
    assert!(out.mask.is_subset_of(&out.fov));
}

#[test]
fn extracted_fov_matches_the_synthetic_disc() {
    let s = synthetic_fundus(&SyntheticParams::default()).unwrap();
    let lum = lipvessel::luminance(&s.image);
    let fov = lipvessel::fov_from_image(&lum, 20.0).unwrap();
    assert_eq!(fov, s.fov);
}
