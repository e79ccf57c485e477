//! Detector maps of the 3-segment probe and the vesselness map built from
//! them.
//!
//! For a probe `b` at orientation `θ` and a pixel `x`, each segment `s`
//! gives a constant map `c_s(x)`: a rank-order minimum over the segment of
//! `f(x + h) ⊟ b_s`. The central segment uses the exact minimum, the sides a
//! robust k-th minimum. The contact level is `ĉ = min(c_c, c_l, c_r)` and the
//! detector value is `max(c_l ⊟ ĉ, c_r ⊟ ĉ)`. It is zero when the probe rests
//! on its side segments (the central one fits inside a ridge) and positive
//! when it rests on its centre or on a single side.
//!
//! The vesselness map is the infimum of detector values over orientations
//! and probe scales. Samples falling outside the image or the validity mask
//! are left out of every minimum; a pixel with no valid sample for some
//! segment is undefined (`None`).

use crate::error::{invalid, Error, Result};
use crate::lip::{lip_sub, lip_sub_unchecked, GrayImage};
use crate::mask::BinaryMask;
use crate::probe::{rasterize, Offset, ProbeFamily, ProbeSpec, RasterProbe};

/// Default fraction of the smallest samples dropped by the robust minimum.
pub const DEFAULT_DISCARD_FRACTION: f64 = 0.20;

/// 0-based index of the robust minimum in a sorted set of `n` values:
/// `k - 1` with `k = floor(discard · n) + 1`.
#[inline]
fn kth_index(n: usize, discard_fraction: f64) -> usize {
    // the epsilon keeps products like 0.29 · 100 from flooring to 28
    (((discard_fraction * n as f64) + 1e-9).floor() as usize).min(n - 1)
}

/// k-th smallest value with `k = floor(discard_fraction · n) + 1`: the
/// minimum of what remains once the smallest `discard_fraction` of the
/// values is dropped. A fraction of zero gives the exact minimum.
pub fn kth_min(values: &[f64], discard_fraction: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("k-th minimum of an empty set"));
    }
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(invalid(
            "discard_fraction",
            format!("{discard_fraction} outside [0, 1)"),
        ));
    }
    let mut buf = values.to_vec();
    Ok(kth_min_in_place(&mut buf, discard_fraction))
}

#[inline]
fn kth_min_in_place(buf: &mut [f64], discard_fraction: f64) -> f64 {
    if discard_fraction == 0.0 {
        return buf.iter().copied().fold(f64::INFINITY, f64::min);
    }
    let k = kth_index(buf.len(), discard_fraction);
    *buf.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Real-valued map with undefined pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMap {
    width: usize,
    height: usize,
    data: Vec<Option<f64>>,
}

impl RealMap {
    pub fn new(width: usize, height: usize, data: Vec<Option<f64>>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} values for a {width}x{height} map",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn undefined(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![None; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.data[y * self.width + x]
    }

    pub fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().flatten().copied()
    }

    /// Pointwise minimum; a pixel is defined when either input is.
    pub fn pointwise_min(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| min_defined(*a, *b))
                .collect(),
        })
    }

    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut data = vec![None; w * h];
        for y in 0..h {
            for x in 0..w {
                data[x * h + (h - 1 - y)] = self.data[y * w + x];
            }
        }
        Self {
            width: h,
            height: w,
            data,
        }
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v.map(&op)).collect(),
        }
    }
}

#[inline]
fn min_defined(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Vesselness map `e` restricted to a FOV, with the number of probe scales
/// that produced it. Vessels are its valleys.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselnessMap {
    map: RealMap,
    fov: BinaryMask,
    probes_used: usize,
}

impl VesselnessMap {
    /// Values outside `fov` are dropped.
    pub fn new(map: RealMap, fov: BinaryMask, probes_used: usize) -> Result<Self> {
        if map.dims() != fov.dims() {
            return Err(Error::DimensionMismatch {
                expected: map.dims(),
                actual: fov.dims(),
            });
        }
        let data = map
            .data
            .iter()
            .zip(fov.data())
            .map(|(v, &inside)| if inside { *v } else { None })
            .collect();
        Ok(Self {
            map: RealMap { data, ..map },
            fov,
            probes_used,
        })
    }

    pub fn map(&self) -> &RealMap {
        &self.map
    }

    pub fn fov(&self) -> &BinaryMask {
        &self.fov
    }

    pub fn probes_used(&self) -> usize {
        self.probes_used
    }

    pub fn width(&self) -> usize {
        self.map.width
    }

    pub fn height(&self) -> usize {
        self.map.height
    }

    pub fn dims(&self) -> (usize, usize) {
        self.map.dims()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.map.data
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.map.get(x, y)
    }

    pub fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.map.defined()
    }

    pub fn defined_count(&self) -> usize {
        self.map.data.iter().filter(|v| v.is_some()).count()
    }

    /// Range of the defined values.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.defined().fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

/// Parameters shared by all detector maps.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorParams {
    /// Fraction of the smallest side-segment samples dropped by the robust
    /// minimum.
    pub discard_fraction: f64,
    /// Probe orientations in radians.
    pub orientations: Vec<f64>,
}

impl DetectorParams {
    pub fn new(discard_fraction: f64, orientations: Vec<f64>) -> Result<Self> {
        let p = Self {
            discard_fraction,
            orientations,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.discard_fraction) {
            return Err(invalid(
                "discard_fraction",
                format!("{} outside [0, 1)", self.discard_fraction),
            ));
        }
        if self.orientations.is_empty() {
            return Err(invalid("orientations", "need at least one"));
        }
        Ok(())
    }
}

/// Per-pixel sampling context: the image LIP-minus each segment level,
/// and the validity mask.
struct Sampler<'a> {
    width: usize,
    height: usize,
    valid: &'a [bool],
}

impl Sampler<'_> {
    fn new<'a>(f: &GrayImage, valid: &'a BinaryMask) -> Result<Sampler<'a>> {
        if f.dims() != valid.dims() {
            return Err(Error::DimensionMismatch {
                expected: f.dims(),
                actual: valid.dims(),
            });
        }
        Ok(Sampler {
            width: f.width(),
            height: f.height(),
            valid: valid.data(),
        })
    }

    /// Rank-order minimum of `levels` over the offsets around `(x, y)`.
    #[inline]
    fn stat(
        &self,
        levels: &[f64],
        x: usize,
        y: usize,
        offsets: &[Offset],
        discard_fraction: f64,
        buf: &mut Vec<f64>,
    ) -> Option<f64> {
        buf.clear();
        for &(dx, dy) in offsets {
            let sx = x as i64 + i64::from(dx);
            let sy = y as i64 + i64::from(dy);
            if sx < 0 || sy < 0 || sx as usize >= self.width || sy as usize >= self.height {
                continue;
            }
            let i = sy as usize * self.width + sx as usize;
            if self.valid[i] {
                buf.push(levels[i]);
            }
        }
        if buf.is_empty() {
            None
        } else {
            Some(kth_min_in_place(buf, discard_fraction))
        }
    }
}

/// `f ⊟ level` at every pixel.
fn lip_levels(f: &GrayImage, level: f64) -> Result<Vec<f64>> {
    lip_sub(0.0, level)?;
    Ok(f.data()
        .iter()
        .map(|&v| lip_sub_unchecked(v, level))
        .collect())
}

/// Fills `out` row by row; rows run in parallel with the `parallel` feature.
fn fill_rows<T: Send>(out: &mut [T], width: usize, fill: impl Fn(usize, &mut [T]) + Sync + Send) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(width)
            .enumerate()
            .for_each(|(y, row)| fill(y, row));
    }
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| fill(y, row));
}

/// Constant map of one segment: at each valid pixel, the k-th minimum of
/// `f(x + h) ⊟ intensity` over the segment's valid samples.
pub fn constant_map(
    f: &GrayImage,
    segment: &[Offset],
    intensity: f64,
    discard_fraction: f64,
    valid: &BinaryMask,
) -> Result<RealMap> {
    if segment.is_empty() {
        return Err(Error::Empty("segment"));
    }
    let sampler = Sampler::new(f, valid)?;
    let levels = lip_levels(f, intensity)?;
    let mut data = vec![None; f.width() * f.height()];
    fill_rows(&mut data, f.width(), |y, row| {
        let mut buf = Vec::with_capacity(segment.len());
        for (x, out) in row.iter_mut().enumerate() {
            if valid.get(x, y) {
                *out = sampler.stat(&levels, x, y, segment, discard_fraction, &mut buf);
            }
        }
    });
    RealMap::new(f.width(), f.height(), data)
}

/// Per-pixel segment statistics of a rasterized probe.
#[derive(Clone, Copy)]
struct Contact {
    center: f64,
    left: f64,
    right: f64,
}

impl Contact {
    #[inline]
    fn level(&self) -> f64 {
        self.center.min(self.left.min(self.right))
    }

    /// `max(c_l ⊟ ĉ, c_r ⊟ ĉ)`. `ĉ < M` since every sample `f ⊟ b` is.
    #[inline]
    fn detector(&self) -> f64 {
        let c = self.level();
        lip_sub_unchecked(self.left, c).max(lip_sub_unchecked(self.right, c))
    }
}

/// A probe bound to an image: the two LIP level images and the sampler.
struct BoundProbe<'a> {
    sampler: Sampler<'a>,
    center_levels: Vec<f64>,
    side_levels: Vec<f64>,
    rasters: Vec<RasterProbe>,
    discard_fraction: f64,
}

impl<'a> BoundProbe<'a> {
    fn new(
        f: &GrayImage,
        rasters: Vec<RasterProbe>,
        discard_fraction: f64,
        valid: &'a BinaryMask,
    ) -> Result<Self> {
        let intensities = rasters[0].intensities();
        Ok(Self {
            sampler: Sampler::new(f, valid)?,
            center_levels: lip_levels(f, intensities.center)?,
            side_levels: lip_levels(f, intensities.side)?,
            rasters,
            discard_fraction,
        })
    }

    #[inline]
    fn contact(
        &self,
        probe: &RasterProbe,
        x: usize,
        y: usize,
        buf: &mut Vec<f64>,
    ) -> Option<Contact> {
        let s = &self.sampler;
        Some(Contact {
            center: s.stat(&self.center_levels, x, y, probe.center(), 0.0, buf)?,
            left: s.stat(
                &self.side_levels,
                x,
                y,
                probe.left(),
                self.discard_fraction,
                buf,
            )?,
            right: s.stat(
                &self.side_levels,
                x,
                y,
                probe.right(),
                self.discard_fraction,
                buf,
            )?,
        })
    }

    fn per_pixel(
        &self,
        eval: impl Fn(&Self, usize, usize, &mut Vec<f64>) -> Option<f64> + Sync + Send,
    ) -> RealMap {
        let (w, h) = (self.sampler.width, self.sampler.height);
        let mut data = vec![None; w * h];
        let cap = self
            .rasters
            .iter()
            .map(|r| r.center().len())
            .max()
            .unwrap_or(1);
        fill_rows(&mut data, w, |y, row| {
            let mut buf = Vec::with_capacity(cap);
            for (x, out) in row.iter_mut().enumerate() {
                if self.sampler.valid[y * w + x] {
                    *out = eval(self, x, y, &mut buf);
                }
            }
        });
        RealMap {
            width: w,
            height: h,
            data,
        }
    }
}

/// Contact level `ĉ`: pointwise minimum of the exact central constant map
/// and the robust side constant maps. Undefined where any segment has no
/// valid sample.
pub fn grave_constant_map(
    f: &GrayImage,
    probe: &RasterProbe,
    discard_fraction: f64,
    valid: &BinaryMask,
) -> Result<RealMap> {
    let bound = BoundProbe::new(f, vec![probe.clone()], discard_fraction, valid)?;
    Ok(bound.per_pixel(|b, x, y, buf| Some(b.contact(&b.rasters[0], x, y, buf)?.level())))
}

/// Detector map of one rasterized probe: `max(c_l ⊟ ĉ, c_r ⊟ ĉ)`.
pub fn detector_map_orientation(
    f: &GrayImage,
    probe: &RasterProbe,
    discard_fraction: f64,
    valid: &BinaryMask,
) -> Result<RealMap> {
    detector_map_rasters(f, vec![probe.clone()], discard_fraction, valid)
}

/// Infimum of detector values over a set of rasterized probes sharing the
/// same intensities. Undefined orientations are skipped.
pub fn detector_map_rasters(
    f: &GrayImage,
    rasters: Vec<RasterProbe>,
    discard_fraction: f64,
    valid: &BinaryMask,
) -> Result<RealMap> {
    if rasters.is_empty() {
        return Err(invalid("orientations", "need at least one"));
    }
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(invalid(
            "discard_fraction",
            format!("{discard_fraction} outside [0, 1)"),
        ));
    }
    let bound = BoundProbe::new(f, rasters, discard_fraction, valid)?;
    Ok(bound.per_pixel(|b, x, y, buf| {
        b.rasters
            .iter()
            .filter_map(|r| b.contact(r, x, y, buf).map(|c| c.detector()))
            .reduce(f64::min)
    }))
}

/// Detector map of one probe scale: infimum over `params.orientations`.
pub fn detector_map_probe(
    f: &GrayImage,
    spec: &ProbeSpec,
    params: &DetectorParams,
    valid: &BinaryMask,
) -> Result<RealMap> {
    params.validate()?;
    let rasters = params
        .orientations
        .iter()
        .map(|&theta| rasterize(spec, theta))
        .collect::<Result<Vec<_>>>()?;
    detector_map_rasters(f, rasters, params.discard_fraction, valid)
}

/// Detector maps of every scale of `family`, largest first.
pub fn detector_maps(
    f: &GrayImage,
    family: &ProbeFamily,
    params: &DetectorParams,
    valid: &BinaryMask,
) -> Result<Vec<RealMap>> {
    family
        .probes()
        .iter()
        .map(|spec| detector_map_probe(f, spec, params, valid))
        .collect()
}

/// Cumulative infimum of per-scale detector maps: element `i` is `e^(i+1)`.
pub fn cumulative_min(maps: &[RealMap]) -> Result<Vec<RealMap>> {
    let mut out: Vec<RealMap> = Vec::with_capacity(maps.len());
    for m in maps {
        let next = match out.last() {
            Some(prev) => prev.pointwise_min(m)?,
            None => m.clone(),
        };
        out.push(next);
    }
    Ok(out)
}

/// Vesselness map `e^I`: infimum of the detector maps of the first
/// `probes` scales of `family`, restricted to `valid`.
pub fn vesselness_multiscale(
    f: &GrayImage,
    family: &ProbeFamily,
    probes: usize,
    params: &DetectorParams,
    valid: &BinaryMask,
) -> Result<VesselnessMap> {
    if probes == 0 || probes > family.len() {
        return Err(invalid(
            "probes",
            format!("{probes} outside 1..={}", family.len()),
        ));
    }
    let mut acc: Option<RealMap> = None;
    for spec in &family.probes()[..probes] {
        let m = detector_map_probe(f, spec, params, valid)?;
        acc = Some(match acc {
            Some(prev) => prev.pointwise_min(&m)?,
            None => m,
        });
    }
    VesselnessMap::new(acc.expect("probes >= 1"), valid.clone(), probes)
}

/// Three-point probe for 1-D profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe1d {
    pub left: f64,
    pub center: f64,
    pub right: f64,
    /// Distance from the centre point to each side point.
    pub half_width: usize,
}

/// Bump detector along a 1-D profile with a 3-point probe and exact minima.
///
/// At each position `x` with both side points inside the profile:
/// `c = min(f(x-d) ⊟ b_l, f(x) ⊟ b_c, f(x+d) ⊟ b_r)` and the result is
/// `max((f(x-d) ⊟ b_l) ⊟ c, (f(x+d) ⊟ b_r) ⊟ c)`. Other positions are
/// `None`. A bump narrower than the probe gives a deep minimum, a
/// transition does not.
pub fn profile_detector_1d(profile: &[f64], probe: Probe1d) -> Result<Vec<Option<f64>>> {
    let d = probe.half_width;
    if d == 0 {
        return Err(invalid("half_width", "must be at least one sample"));
    }
    if profile.len() <= 2 * d {
        return Err(invalid(
            "half_width",
            format!(
                "probe of width {} does not fit a profile of {}",
                2 * d,
                profile.len()
            ),
        ));
    }
    for v in [probe.left, probe.center, probe.right] {
        lip_sub(0.0, v)?;
    }
    Ok((0..profile.len())
        .map(|x| {
            if x < d || x + d >= profile.len() {
                return None;
            }
            let contact = Contact {
                center: lip_sub_unchecked(profile[x], probe.center),
                left: lip_sub_unchecked(profile[x - d], probe.left),
                right: lip_sub_unchecked(profile[x + d], probe.right),
            };
            Some(contact.detector())
        })
        .collect())
}

/// Median with the midpoint rule for even counts. `values` must be non-empty.
fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Normalised vesselness `Φ` in `[0, 1]`, high on vessels.
///
/// Values above the median `μ` of the defined pixels are clipped to `μ`,
/// then `Φ = 1 - (ē - min ē) / (max ē - min ē)`. A constant clipped map
/// gives `Φ = 0` everywhere.
pub fn normalize_map(e: &VesselnessMap) -> Result<VesselnessMap> {
    let mut values: Vec<f64> = e.defined().collect();
    if values.is_empty() {
        return Err(Error::Empty("vesselness map with no defined pixel"));
    }
    let mu = median(&mut values);
    // values are sorted now
    let lo = values[0].min(mu);
    let hi = mu;
    let span = hi - lo;
    let phi = e.map().map(|v| {
        if span > 0.0 {
            1.0 - (v.min(mu) - lo) / span
        } else {
            0.0
        }
    });
    VesselnessMap::new(phi, e.fov().clone(), e.probes_used())
}
