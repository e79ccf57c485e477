//! Three-segment probes: sizing rules, intensity adaptation and
//! rasterization to pixel offsets.

use std::collections::HashSet;
use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::lip::{lip_add, lip_sub, M};
use crate::mask::BinaryMask;

/// FOV angle of the reference camera, in degrees.
pub const REFERENCE_FOV_ANGLE: f64 = 45.0;
/// Reference intensity of the central segment.
pub const CENTER_REFERENCE: f64 = 215.0;
/// Reference intensity of the side segments.
pub const SIDE_REFERENCE: f64 = 225.0;
/// Ratio between consecutive probe scales: `w2 = 0.75 w1`, `w3 = 0.5 w1`.
pub const SCALE_RATIOS: [f64; 3] = [1.0, 0.75, 0.5];
/// Probe length as a fraction of its width.
pub const LENGTH_RATIO: f64 = 0.75;
/// The FOV diameter is divided by this to get the largest probe width.
pub const FOV_TO_WIDTH: f64 = 50.0;

/// Probe widths `(w1, 0.75 w1, 0.5 w1)` with `w1 = (d_fov / 50)(45 / alpha)`.
pub fn probe_widths(d_fov: f64, fov_angle: f64) -> Result<[f64; 3]> {
    if !(d_fov > 0.0 && d_fov.is_finite()) {
        return Err(invalid("d_fov", format!("{d_fov} is not positive")));
    }
    if !(fov_angle > 0.0 && fov_angle.is_finite()) {
        return Err(invalid("fov_angle", format!("{fov_angle} is not positive")));
    }
    let w1 = (d_fov / FOV_TO_WIDTH) * (REFERENCE_FOV_ANGLE / fov_angle);
    Ok(SCALE_RATIOS.map(|r| r * w1))
}

pub fn probe_lengths(widths: &[f64]) -> Vec<f64> {
    widths.iter().map(|w| LENGTH_RATIO * w).collect()
}

/// FOV diameter: mean of the bounding-box width and height of the mask.
pub fn fov_diameter(mask: &BinaryMask) -> Result<f64> {
    let (x0, y0, x1, y1) = mask.bounding_box().ok_or(Error::Empty("FOV mask"))?;
    Ok(((x1 - x0 + 1) + (y1 - y0 + 1)) as f64 / 2.0)
}

/// `n` orientations equally spaced over the full circle, in radians.
///
/// The probe origin is an extremity of its central segment, so `θ` and
/// `θ + π` are different probes and the whole circle is sampled.
pub fn orientations(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("orientations", "need at least one"));
    }
    Ok((0..n).map(|i| i as f64 * TAU / n as f64).collect())
}

/// LIP intensities of the central and side segments of a probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeIntensities {
    pub center: f64,
    pub side: f64,
}

impl ProbeIntensities {
    pub fn new(center: f64, side: f64) -> Result<Self> {
        for (name, v) in [("center_intensity", center), ("side_intensity", side)] {
            if !(v.is_finite() && v < M) {
                return Err(invalid(name, format!("{v} outside ]-inf, M[")));
            }
        }
        Ok(Self { center, side })
    }

    /// Reflects the side level through the centre level in the LIP group:
    /// the side segments end up below the central one by the LIP contrast
    /// that previously separated them in the other direction.
    pub fn raised_center(self) -> Self {
        let step = lip_sub(self.side, self.center).expect("center < M");
        if step <= 0.0 {
            return self;
        }
        Self {
            center: self.center,
            side: lip_sub(self.center, step).expect("step < M"),
        }
    }
}

/// Adapts the reference probe intensities to an image of mean `m_f`:
/// the centre takes the value `m_f` and the sides are LIP-shifted by the
/// same offset, `225 ⊞ (m_f ⊟ 215)`.
pub fn adapt_intensities(m_f: f64) -> Result<ProbeIntensities> {
    let offset = lip_sub(m_f, CENTER_REFERENCE)?;
    ProbeIntensities::new(m_f, lip_add(SIDE_REFERENCE, offset))
}

/// Geometry and intensities of one probe scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    /// Distance between the left and right segments, in pixels.
    pub width: f64,
    /// Segment length, in pixels.
    pub length: f64,
    pub intensities: ProbeIntensities,
}

impl ProbeSpec {
    /// Probe of the given width with the default length `0.75 w`.
    pub fn new(width: f64, intensities: ProbeIntensities) -> Result<Self> {
        Self::with_length(width, LENGTH_RATIO * width, intensities)
    }

    pub fn with_length(width: f64, length: f64, intensities: ProbeIntensities) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("width", format!("{width} is not positive")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", format!("{length} is not positive")));
        }
        Ok(Self {
            width,
            length,
            intensities,
        })
    }
}

pub type Offset = (i32, i32);

/// A probe at one orientation, as pixel offsets from its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterProbe {
    pub orientation: f64,
    center: Vec<Offset>,
    left: Vec<Offset>,
    right: Vec<Offset>,
    intensities: ProbeIntensities,
}

impl RasterProbe {
    /// Builds a probe from explicit segments. The segments must be
    /// non-empty and pairwise disjoint, and the centre must hold the origin.
    pub fn from_segments(
        orientation: f64,
        center: Vec<Offset>,
        left: Vec<Offset>,
        right: Vec<Offset>,
        intensities: ProbeIntensities,
    ) -> Result<Self> {
        if center.is_empty() || left.is_empty() || right.is_empty() {
            return Err(Error::DegenerateProbe("empty segment".into()));
        }
        if !center.contains(&(0, 0)) {
            return Err(Error::DegenerateProbe(
                "origin not on the central segment".into(),
            ));
        }
        let c: HashSet<_> = center.iter().collect();
        let l: HashSet<_> = left.iter().collect();
        if right.iter().any(|p| c.contains(p) || l.contains(p))
            || left.iter().any(|p| c.contains(p))
        {
            return Err(Error::DegenerateProbe("overlapping segments".into()));
        }
        Ok(Self {
            orientation,
            center,
            left,
            right,
            intensities,
        })
    }

    pub fn center(&self) -> &[Offset] {
        &self.center
    }

    pub fn left(&self) -> &[Offset] {
        &self.left
    }

    pub fn right(&self) -> &[Offset] {
        &self.right
    }

    pub fn intensities(&self) -> ProbeIntensities {
        self.intensities
    }

    /// Largest absolute offset along either axis.
    pub fn reach(&self) -> i32 {
        self.center
            .iter()
            .chain(&self.left)
            .chain(&self.right)
            .map(|&(dx, dy)| dx.abs().max(dy.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Digital line from the origin to `(x1, y1)`, endpoints included.
fn bresenham(x1: i32, y1: i32) -> Vec<Offset> {
    let (dx, dy) = (x1.abs(), -y1.abs());
    let (sx, sy) = (x1.signum(), y1.signum());
    let (mut x, mut y) = (0, 0);
    let mut err = dx + dy;
    let mut points = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        points.push((x, y));
        if x == x1 && y == y1 {
            return points;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Rasterizes `spec` at orientation `theta` (radians, image coordinates with
/// y pointing down).
///
/// The central segment is the digital line from the origin to
/// `round(l (cos θ, sin θ))`. The side segments are that same digital line
/// translated by `±round((w/2) (sin θ, -cos θ))`, so all three segments have
/// the same number of points.
pub fn rasterize(spec: &ProbeSpec, theta: f64) -> Result<RasterProbe> {
    if spec.length < 1.0 {
        return Err(Error::DegenerateProbe(format!(
            "length {} is below one pixel",
            spec.length
        )));
    }
    let (sin, cos) = theta.sin_cos();
    let end = (
        (spec.length * cos).round() as i32,
        (spec.length * sin).round() as i32,
    );
    let half = spec.width / 2.0;
    let shift = ((half * sin).round() as i32, (-half * cos).round() as i32);
    if shift == (0, 0) {
        return Err(Error::DegenerateProbe(format!(
            "width {} rounds to overlapping segments at θ = {theta}",
            spec.width
        )));
    }
    let center = bresenham(end.0, end.1);
    let translate = |s: i32| -> Vec<Offset> {
        center
            .iter()
            .map(|&(x, y)| (x + s * shift.0, y + s * shift.1))
            .collect()
    };
    let (left, right) = (translate(1), translate(-1));
    RasterProbe::from_segments(theta, center, left, right, spec.intensities)
}

/// The probe scales used by the detector, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFamily {
    probes: Vec<ProbeSpec>,
}

impl ProbeFamily {
    pub fn new(probes: Vec<ProbeSpec>) -> Result<Self> {
        if probes.is_empty() {
            return Err(Error::Empty("probe family"));
        }
        if probes.windows(2).any(|p| p[1].width >= p[0].width) {
            return Err(invalid("probes", "widths must be strictly decreasing"));
        }
        Ok(Self { probes })
    }

    /// Family for a FOV of diameter `d_fov` seen under `fov_angle` degrees.
    /// Scales whose width rounds below two pixels are dropped, and at most
    /// `max_probes` scales are kept.
    pub fn from_fov(
        d_fov: f64,
        fov_angle: f64,
        intensities: ProbeIntensities,
        max_probes: usize,
    ) -> Result<Self> {
        let probes = probe_widths(d_fov, fov_angle)?
            .into_iter()
            .take(max_probes)
            .filter(|w| w.round() >= 2.0)
            .map(|w| ProbeSpec::new(w, intensities))
            .collect::<Result<Vec<_>>>()?;
        if probes.is_empty() {
            return Err(Error::DegenerateProbe(format!(
                "FOV diameter {d_fov} gives probes narrower than two pixels"
            )));
        }
        Self::new(probes)
    }

    pub fn probes(&self) -> &[ProbeSpec] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn largest(&self) -> &ProbeSpec {
        &self.probes[0]
    }
}
