use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::{MapFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lipvessel",
    version,
    about = "Vessel segmentation of fundus images with LIP probes"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment one image.
    Segment {
        image: PathBuf,
        /// FOV mask; extracted from the image when absent.
        #[arg(long)]
        fov: Option<PathBuf>,
        /// Reference segmentation: adds an overlay and prints Se/Sp/Acc.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Configuration file with default values for the flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Segment every image of a dataset described by a configuration file.
    Batch {
        config: PathBuf,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Score predicted masks (`*_mask.png`) against the dataset references.
    Eval {
        pred_dir: PathBuf,
        config: PathBuf,
        #[command(flatten)]
        flags: PipelineFlags,
    },
}

/// Flags shared by all commands. Unset flags keep the configuration file
/// value or the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct PipelineFlags {
    /// Camera field-of-view angle in degrees (default 45).
    #[arg(long)]
    pub fov_angle: Option<f64>,
    /// Luminance threshold for FOV extraction (default 20).
    #[arg(long)]
    pub fov_threshold: Option<f64>,
    /// Number of probe orientations over the full circle (default 18).
    #[arg(long)]
    pub orientations: Option<usize>,
    /// Fraction of the FOV labelled as vessel (default 0.12).
    #[arg(long)]
    pub area_fraction: Option<f64>,
    /// Largest allowed change when adding a probe scale (default 0.40).
    #[arg(long)]
    pub change_limit: Option<f64>,
    /// Maximum number of probe scales, 1 to 3 (default 3).
    #[arg(long)]
    pub max_probes: Option<usize>,
    /// Fraction of side-segment samples discarded as outliers (default 0.2).
    #[arg(long)]
    pub discard_fraction: Option<f64>,
    /// Output directory (default: current directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the vesselness map and its normalised version.
    #[arg(long)]
    pub save_maps: bool,
    /// File format of saved maps.
    #[arg(long, value_enum)]
    pub map_format: Option<MapFormat>,
    /// Score every pixel of the frame instead of the FOV only.
    #[arg(long)]
    pub full_frame_eval: bool,
    /// Use the probe intensities as given, with the central segment darker
    /// than the sides.
    #[arg(long)]
    pub verbatim_polarity: bool,
}

impl PipelineFlags {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.params;
        if let Some(v) = self.fov_angle {
            p.fov_angle = v;
        }
        if let Some(v) = self.fov_threshold {
            p.fov_threshold = v;
        }
        if let Some(v) = self.orientations {
            p.orientation_count = v;
        }
        if let Some(v) = self.area_fraction {
            p.area_fraction = v;
        }
        if let Some(v) = self.change_limit {
            p.change_limit = v;
        }
        if let Some(v) = self.max_probes {
            p.max_probes = v;
        }
        if let Some(v) = self.discard_fraction {
            p.discard_fraction = v;
        }
        if self.verbatim_polarity {
            p.raised_center = false;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.map_format {
            cfg.map_format = v;
        }
        cfg.save_maps |= self.save_maps;
        cfg.full_frame_eval |= self.full_frame_eval;
    }
}
