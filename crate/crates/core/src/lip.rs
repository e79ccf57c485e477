//! LIP arithmetic and the image types it operates on.
//!
//! Values live on the inverted LIP grey scale: 0 is white (no attenuation)
//! and [`M`] is black. Subtraction can leave `[0, M[` and produce negative
//! values, so every image here stores `f64` and nothing is clamped until a
//! file is written.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

/// Upper bound of the grey scale for 8-bit images.
pub const M: f64 = 256.0;

/// LIP addition `a + b - ab/M`.
#[inline]
pub fn lip_add(a: f64, b: f64) -> f64 {
    a + b - a * b / M
}

/// LIP subtraction `(a - b) / (1 - b/M)`. Fails when `b >= M`.
#[inline]
pub fn lip_sub(a: f64, b: f64) -> Result<f64> {
    if b < M {
        Ok(lip_sub_unchecked(a, b))
    } else {
        Err(Error::LipDomain(b))
    }
}

/// [`lip_sub`] without the domain check; callers guarantee `b < M`.
#[inline]
pub(crate) fn lip_sub_unchecked(a: f64, b: f64) -> f64 {
    (a - b) / (1.0 - b / M)
}

/// Real-valued single-channel image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "empty extent {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} values for a {width}x{height} image",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite() || **v >= M) {
            return Err(Error::InvalidImage(format!("value {v} outside ]-inf, M[")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds a height-1 image from a 1-D profile.
    pub fn from_profile(profile: &[f64]) -> Result<Self> {
        Self::new(profile.len(), 1, profile.to_vec())
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Applies `op` to every pixel, re-validating the result.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.data.iter().map(|&v| op(v)).collect(),
        )
    }

    /// LIP-adds a constant to every pixel: the image as it would appear under
    /// a darker (`c > 0`) or brighter (`c < 0`) illumination.
    pub fn lip_shift(&self, c: f64) -> Result<Self> {
        self.map(|v| lip_add(v, c))
    }

    /// Rotates the image by 90 degrees clockwise (in image coordinates,
    /// y pointing down).
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut data = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                // (x, y) -> (h - 1 - y, x) in a h-wide image
                data[x * h + (h - 1 - y)] = self.data[y * w + x];
            }
        }
        Self {
            width: h,
            height: w,
            data,
        }
    }
}

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, data: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "empty extent {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from interleaved RGB bytes.
    pub fn from_rgb_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::InvalidImage(format!(
                "{} bytes for a {width}x{height} RGB image",
                bytes.len()
            )));
        }
        Self::new(
            width,
            height,
            bytes.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect(),
        )
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
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

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.data[y * self.width + x] = rgb;
    }

    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.data.iter().flatten().copied().collect()
    }
}

/// Luminance `0.299 R + 0.587 G + 0.114 B`, unrounded.
pub fn luminance(img: &ColorImage) -> GrayImage {
    let data = img
        .pixels()
        .iter()
        .map(|&[r, g, b]| 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b))
        .collect();
    GrayImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

/// Grey-scale complement `(M - 1) - v`, mapping white to LIP zero.
pub fn complement(img: &GrayImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|v| (M - 1.0) - v).collect(),
    }
}

/// Arithmetic mean of `img` over the set pixels of `mask`.
pub fn image_mean(img: &GrayImage, mask: &BinaryMask) -> Result<f64> {
    if img.dims() != mask.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            actual: mask.dims(),
        });
    }
    let (sum, n) = img
        .data
        .iter()
        .zip(mask.data())
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, n), (v, _)| (s + v, n + 1));
    if n == 0 {
        return Err(Error::Empty("mean over an empty mask"));
    }
    Ok(sum / n as f64)
}
