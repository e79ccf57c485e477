//! Raster file I/O: colour images, binary masks and float maps.
//!
//! Float maps are written either as PFM (single channel, little-endian,
//! scale `-1.0`, rows stored bottom to top, undefined pixels as NaN) or as a
//! 16-bit greyscale PNG with a sidecar text file recording the affine
//! quantisation. In the PNG, 0 marks an undefined pixel and the defined
//! range `[min, max]` maps linearly onto `[1, 65535]`.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use image::{GrayImage as Luma8, ImageBuffer, ImageReader, Luma, RgbImage};
use lipvessel::vesselness::RealMap;
use lipvessel::{BinaryMask, ColorImage};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

fn image_err(path: &Path) -> impl FnOnce(image::ImageError) -> IoError + '_ {
    move |source| IoError::Image {
        path: path.to_path_buf(),
        source,
    }
}

fn decode(path: &Path) -> Result<image::DynamicImage, IoError> {
    ImageReader::open(path)
        .map_err(file_err(path))?
        .with_guessed_format()
        .map_err(file_err(path))?
        .decode()
        .map_err(image_err(path))
}

/// Loads any supported raster as 8-bit RGB.
pub fn load_color(path: &Path) -> Result<ColorImage, IoError> {
    let rgb = decode(path)?.to_rgb8();
    let (w, h) = rgb.dimensions();
    ColorImage::from_rgb_bytes(w as usize, h as usize, rgb.as_raw()).map_err(|e| IoError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Loads a mask: pixels whose 8-bit luma exceeds 127 are set.
pub fn load_mask(path: &Path) -> Result<BinaryMask, IoError> {
    let luma = decode(path)?.to_luma8();
    let (w, h) = luma.dimensions();
    BinaryMask::from_vec(
        w as usize,
        h as usize,
        luma.as_raw().iter().map(|&v| v > 127).collect(),
    )
    .map_err(|e| IoError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// 8-bit PNG, 0 for background and 255 for set pixels.
pub fn save_mask(mask: &BinaryMask, path: &Path) -> Result<(), IoError> {
    let data = mask
        .data()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let img = Luma8::from_raw(mask.width() as u32, mask.height() as u32, data)
        .expect("buffer matches dimensions");
    img.save(path).map_err(image_err(path))
}

pub fn save_color(img: &ColorImage, path: &Path) -> Result<(), IoError> {
    let buf = RgbImage::from_raw(img.width() as u32, img.height() as u32, img.to_rgb_bytes())
        .expect("buffer matches dimensions");
    buf.save(path).map_err(image_err(path))
}

pub fn save_pfm(map: &RealMap, path: &Path) -> Result<(), IoError> {
    let file = fs::File::create(path).map_err(file_err(path))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        write!(out, "Pf\n{} {}\n-1.0\n", map.width(), map.height())?;
        for y in (0..map.height()).rev() {
            for x in 0..map.width() {
                let v = map.get(x, y).map_or(f32::NAN, |v| v as f32);
                out.write_all(&v.to_le_bytes())?;
            }
        }
        out.flush()
    };
    write().map_err(file_err(path))
}

/// Reads a single-channel PFM written by [`save_pfm`] (either endianness).
pub fn load_pfm(path: &Path) -> Result<RealMap, IoError> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .map_err(file_err(path))?
        .read_to_end(&mut bytes)
        .map_err(file_err(path))?;
    let bad = |reason: &str| IoError::Format {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    // header: three whitespace-terminated tokens and a single separator
    let mut tokens = Vec::new();
    let mut pos = 0;
    while tokens.len() < 4 && pos < bytes.len() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        if tokens.len() == 4 {
            break;
        }
    }
    if tokens.len() < 4 || tokens[0] != "Pf" {
        return Err(bad("not a single-channel PFM"));
    }
    let width: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = tokens[3].parse().map_err(|_| bad("bad scale"))?;
    if pos >= bytes.len() {
        return Err(bad("missing raster"));
    }
    let body = &bytes[pos + 1..];
    if body.len() != width * height * 4 {
        return Err(bad("truncated raster"));
    }
    let mut data = vec![None; width * height];
    for (i, chunk) in body.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if scale < 0.0 {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (x, row) = (i % width, i / width);
        data[(height - 1 - row) * width + x] = (!v.is_nan()).then_some(f64::from(v));
    }
    RealMap::new(width, height, data).map_err(|e| bad(&e.to_string()))
}

/// Range recorded next to a quantised 16-bit PNG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantization {
    pub min: f64,
    pub max: f64,
}

impl Quantization {
    pub fn encode(&self, v: f64) -> u16 {
        let span = self.max - self.min;
        let t = if span > 0.0 {
            (v - self.min) / span
        } else {
            0.0
        };
        1 + (t.clamp(0.0, 1.0) * 65534.0).round() as u16
    }

    pub fn decode(&self, q: u16) -> Option<f64> {
        (q != 0).then(|| self.min + f64::from(q - 1) / 65534.0 * (self.max - self.min))
    }
}

pub fn sidecar_path(png: &Path) -> PathBuf {
    let mut s = png.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

/// Writes the map as a 16-bit PNG plus `<path>.txt` with `min`, `max` and
/// the undefined code.
pub fn save_png16(map: &RealMap, path: &Path) -> Result<Quantization, IoError> {
    let (min, max) = map
        .defined()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let q = if min.is_finite() {
        Quantization { min, max }
    } else {
        Quantization { min: 0.0, max: 0.0 }
    };
    let data: Vec<u16> = map
        .values()
        .iter()
        .map(|v| v.map_or(0, |v| q.encode(v)))
        .collect();
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(map.width() as u32, map.height() as u32, data)
            .expect("buffer matches dimensions");
    img.save(path).map_err(image_err(path))?;
    let side = sidecar_path(path);
    fs::write(
        &side,
        format!(
            "min = {:.17e}\nmax = {:.17e}\nundefined = 0\nlevels = 1..65535\n",
            q.min, q.max
        ),
    )
    .map_err(file_err(&side))?;
    Ok(q)
}

/// Reads a 16-bit PNG and its sidecar back into a map.
pub fn load_png16(path: &Path) -> Result<RealMap, IoError> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(file_err(&side))?;
    let kv = crate::config::parse_key_values(&text).map_err(|reason| IoError::Format {
        path: side.clone(),
        reason,
    })?;
    let field = |k: &str| -> Result<f64, IoError> {
        kv.get(k)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| IoError::Format {
                path: side.clone(),
                reason: format!("missing `{k}`"),
            })
    };
    let q = Quantization {
        min: field("min")?,
        max: field("max")?,
    };
    let img = decode(path)?.to_luma16();
    let (w, h) = img.dimensions();
    RealMap::new(
        w as usize,
        h as usize,
        img.as_raw().iter().map(|&v| q.decode(v)).collect(),
    )
    .map_err(|e| IoError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
