mod common;

use common::{disc, max_abs_diff, random_image, random_structured_image};
use lipvessel::probe::{ProbeIntensities, ProbeSpec};
use lipvessel::vesselness::{detector_map_rasters, Probe1d};
use lipvessel::{
    detector_map_orientation, lip_sub, orientations, profile_detector_1d, rasterize,
    vesselness_multiscale, BinaryMask, DetectorParams, GrayImage, ProbeFamily, RasterProbe,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn deg(d: f64) -> f64 {
    d.to_radians()
}

#[test]
fn optimized_maps_match_the_literal_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = DetectorParams::new(0.2, orientations(4).unwrap()).unwrap();
    for i in 0..20 {
        let f = if i % 2 == 0 {
            random_image(&mut rng, 24, 24)
        } else {
            random_structured_image(&mut rng, 24, 24)
        };
        let valid = if i % 3 == 0 {
            BinaryMask::full(24, 24)
        } else {
            disc(24, 24)
        };
        let center = rng.gen_range(150.0..240.0);
        let side = rng.gen_range(100.0..240.0);
        let h = ProbeIntensities::new(center, side).unwrap();
        let family = ProbeFamily::new(vec![
            ProbeSpec::new(8.0, h).unwrap(),
            ProbeSpec::new(6.0, h).unwrap(),
        ])
        .unwrap();
        let fast = vesselness_multiscale(&f, &family, 2, &params, &valid).unwrap();
        let rasters: Vec<RasterProbe> = family
            .probes()
            .iter()
            .flat_map(|s| {
                params
                    .orientations
                    .iter()
                    .map(|&t| rasterize(s, t).unwrap())
            })
            .collect();
        let slow = common::vesselness(&f, &valid, &rasters, 20);
        let diff = max_abs_diff(fast.values(), &slow).unwrap();
        assert!(diff <= 1e-9, "image {i}: max difference {diff}");
    }
}

fn point_probe(d: i32, side: f64, center: f64) -> RasterProbe {
    let h = ProbeIntensities::new(center, side).unwrap();
    RasterProbe::from_segments(0.0, vec![(0, 0)], vec![(-d, 0)], vec![(d, 0)], h).unwrap()
}

#[test]
fn one_dimensional_detector_is_the_height_one_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.gen_range(8..60);
        let profile: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..255.0)).collect();
        let d = rng.gen_range(1..(n - 1) / 2) as i32;
        let (side, center) = (rng.gen_range(0.0..250.0), rng.gen_range(0.0..250.0));
        let f = GrayImage::from_profile(&profile).unwrap();
        let two_d = detector_map_orientation(
            &f,
            &point_probe(d, side, center),
            0.2,
            &BinaryMask::full(n, 1),
        )
        .unwrap();
        let one_d = profile_detector_1d(
            &profile,
            Probe1d {
                left: side,
                center,
                right: side,
                half_width: d as usize,
            },
        )
        .unwrap();
        for (x, (a, b)) in two_d.values().iter().zip(&one_d).enumerate() {
            match (a, b) {
                (Some(a), Some(b)) => assert_eq!(a.to_bits(), b.to_bits(), "x = {x}"),
                (None, None) => {}
                _ => panic!("definedness differs at {x}: {a:?} vs {b:?}"),
            }
        }
    }
}

const FLOOR: f64 = 50.0;
const TOP: f64 = 150.0;

fn fixture_probe() -> Probe1d {
    Probe1d {
        left: 10.0,
        center: 100.0,
        right: 10.0,
        half_width: 3,
    }
}

#[test]
fn bump_and_transition_fixtures() {
    let bump = [50.0, 50.0, 50.0, 150.0, 150.0, 150.0, 50.0, 50.0, 50.0];
    let e = profile_detector_1d(&bump, fixture_probe()).unwrap();
    assert_eq!(e[4], Some(0.0));

    let step = [50.0, 50.0, 50.0, 150.0, 150.0, 150.0, 150.0, 150.0, 150.0];
    let e = profile_detector_1d(&step, fixture_probe()).unwrap();
    let expected = lip_sub(lip_sub(TOP, 10.0).unwrap(), lip_sub(FLOOR, 10.0).unwrap()).unwrap();
    assert!((e[3].unwrap() - expected).abs() < 1e-12);
    assert!((expected - 124.27).abs() < 5e-3, "{expected}");
    assert!(e[3].unwrap() >= 100.0);
}

/// True when some interior value is below both ends of the defined range.
fn strict_interior_minimum(e: &[Option<f64>]) -> bool {
    let defined: Vec<f64> = e.iter().flatten().copied().collect();
    let ends = defined[0].min(*defined.last().unwrap());
    defined[1..defined.len() - 1]
        .iter()
        .any(|&v| v < ends - 1e-9)
}

#[test]
fn deep_minimum_at_a_bump_only() {
    let pad = [FLOOR; 8];
    let bump = [&pad[..], &[TOP; 3], &pad[..]].concat();
    let step = [&pad[..], &[TOP; 11]].concat();
    let e_bump = profile_detector_1d(&bump, fixture_probe()).unwrap();
    let e_step = profile_detector_1d(&step, fixture_probe()).unwrap();
    assert!(strict_interior_minimum(&e_bump));
    assert_eq!(e_bump[9], Some(0.0));
    assert!(!strict_interior_minimum(&e_step));
    let step_min = e_step
        .iter()
        .flatten()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(step_min > 90.0, "{step_min}");
}

fn raised() -> ProbeIntensities {
    ProbeIntensities::new(215.0, 225.0).unwrap().raised_center()
}

#[test]
fn vertical_ridge_prefers_the_aligned_probe() {
    let f = GrayImage::from_fn(
        32,
        32,
        |x, _| if (15..=16).contains(&x) { 190.0 } else { 110.0 },
    )
    .unwrap();
    let valid = BinaryMask::full(32, 32);
    let spec = ProbeSpec::new(8.0, raised()).unwrap();
    let across = rasterize(&spec, deg(0.0)).unwrap();
    let along = rasterize(&spec, deg(90.0)).unwrap();
    let e0 = detector_map_orientation(&f, &across, 0.2, &valid).unwrap();
    let e90 = detector_map_orientation(&f, &along, 0.2, &valid).unwrap();
    let both = detector_map_rasters(&f, vec![across.clone(), along.clone()], 0.2, &valid).unwrap();

    let oracle = common::vesselness(&f, &valid, &[across, along], 20);
    assert!(max_abs_diff(both.values(), &oracle).unwrap() <= 1e-9);
    for y in 4..20 {
        for x in [15, 16] {
            let (a, b) = (e90.get(x, y).unwrap(), e0.get(x, y).unwrap());
            assert!(a < b, "({x}, {y}): along {a} across {b}");
            assert_eq!(both.get(x, y), Some(a));
        }
    }
}

#[test]
fn thin_ridge_needs_the_smallest_probe() {
    // background 100, one-pixel ridge at x = 12, wide vessel from x = 15
    let f = GrayImage::from_fn(
        32,
        32,
        |x, _| if x == 12 || x >= 15 { 180.0 } else { 100.0 },
    )
    .unwrap();
    let valid = BinaryMask::full(32, 32);
    let theta = [deg(90.0), deg(270.0)];
    let family = ProbeFamily::new(
        [8.0, 6.0, 4.0]
            .iter()
            .map(|&w| ProbeSpec::new(w, raised()).unwrap())
            .collect(),
    )
    .unwrap();
    let params = DetectorParams::new(0.2, theta.to_vec()).unwrap();
    let per_scale: Vec<Vec<Option<f64>>> = family
        .probes()
        .iter()
        .map(|s| {
            let rasters: Vec<_> = theta.iter().map(|&t| rasterize(s, t).unwrap()).collect();
            common::vesselness(&f, &valid, &rasters, 20)
        })
        .collect();
    for i in 1..=3 {
        let fast = vesselness_multiscale(&f, &family, i, &params, &valid).unwrap();
        let slow: Vec<Option<f64>> = (0..32 * 32)
            .map(|p| per_scale[..i].iter().filter_map(|m| m[p]).reduce(f64::min))
            .collect();
        assert!(max_abs_diff(fast.values(), &slow).unwrap() <= 1e-9);
    }
    for y in 8..24 {
        let at = |scale: usize| per_scale[scale][y * 32 + 12].unwrap();
        assert!(
            at(2) < at(1) && at(2) < at(0),
            "y = {y}: {} {} {}",
            at(0),
            at(1),
            at(2)
        );
    }
}
