//! Run configuration from a flat `key = value` file and command-line flags.
//!
//! Keys are the long flag names without the leading dashes. Flags given on
//! the command line override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lipvessel::PipelineParams;

use crate::args::PipelineFlags;
use crate::dataset::{DatasetLayout, DEFAULT_STEM_REGEX};

/// Keys accepted in a configuration file.
pub const KNOWN_KEYS: &[&str] = &[
    "fov-angle",
    "fov-threshold",
    "orientations",
    "area-fraction",
    "change-limit",
    "max-probes",
    "discard-fraction",
    "out",
    "save-maps",
    "map-format",
    "full-frame-eval",
    "verbatim-polarity",
    "image-glob",
    "fov-glob",
    "reference-glob",
    "stem-regex",
];

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; a key may appear only once.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(format!("line {}: empty key", n + 1));
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{k}`", n + 1));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum MapFormat {
    /// Single-channel little-endian PFM, NaN where undefined.
    #[default]
    Pfm,
    /// 16-bit PNG with a `.txt` sidecar holding the value range.
    Png16,
}

impl FromStr for MapFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pfm" => Ok(Self::Pfm),
            "png16" => Ok(Self::Png16),
            _ => Err(format!("unknown map format `{s}` (pfm or png16)")),
        }
    }
}

/// Everything a command needs besides its positional inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PipelineParams,
    pub out: PathBuf,
    pub save_maps: bool,
    pub map_format: MapFormat,
    pub full_frame_eval: bool,
    pub layout: Option<DatasetLayout>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PipelineParams::default(),
            out: PathBuf::from("."),
            save_maps: false,
            map_format: MapFormat::Pfm,
            full_frame_eval: false,
            layout: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse()
        .map_err(|_| format!("`{key}`: cannot parse `{v}`"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("`{key}`: expected a boolean, got `{v}`")),
    }
}

/// Resolves `p` against `base` unless it is absolute.
fn anchored(base: &Path, p: &str) -> String {
    let path = Path::new(p);
    if path.is_absolute() {
        p.to_string()
    } else {
        base.join(path).to_string_lossy().into_owned()
    }
}

impl RunConfig {
    /// Builds a configuration from optional file contents and flags.
    /// Relative paths in the file are taken relative to `base`.
    pub fn resolve(
        file: Option<(&BTreeMap<String, String>, &Path)>,
        flags: &PipelineFlags,
    ) -> Result<Self, String> {
        let mut cfg = Self::default();
        let mut globs: BTreeMap<String, String> = BTreeMap::new();
        if let Some((kv, base)) = file {
            for (k, v) in kv {
                let p = &mut cfg.params;
                match k.as_str() {
                    "fov-angle" => p.fov_angle = parse(k, v)?,
                    "fov-threshold" => p.fov_threshold = parse(k, v)?,
                    "orientations" => p.orientation_count = parse(k, v)?,
                    "area-fraction" => p.area_fraction = parse(k, v)?,
                    "change-limit" => p.change_limit = parse(k, v)?,
                    "max-probes" => p.max_probes = parse(k, v)?,
                    "discard-fraction" => p.discard_fraction = parse(k, v)?,
                    "verbatim-polarity" => p.raised_center = !parse_bool(k, v)?,
                    "out" => cfg.out = PathBuf::from(anchored(base, v)),
                    "save-maps" => cfg.save_maps = parse_bool(k, v)?,
                    "map-format" => cfg.map_format = v.parse()?,
                    "full-frame-eval" => cfg.full_frame_eval = parse_bool(k, v)?,
                    "image-glob" | "fov-glob" | "reference-glob" => {
                        globs.insert(k.clone(), anchored(base, v));
                    }
                    "stem-regex" => {
                        globs.insert(k.clone(), v.clone());
                    }
                    _ => return Err(format!("unknown configuration key `{k}`")),
                }
            }
        }
        flags.apply(&mut cfg);
        if let Some(image_glob) = globs.remove("image-glob") {
            let stem = globs
                .remove("stem-regex")
                .unwrap_or_else(|| DEFAULT_STEM_REGEX.to_string());
            cfg.layout = Some(DatasetLayout::new(
                image_glob,
                globs.remove("fov-glob"),
                globs.remove("reference-glob"),
                &stem,
            )?);
        } else if !globs.is_empty() {
            return Err("dataset keys given without `image-glob`".to_string());
        }
        cfg.params.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}
