//! Retinal vessel segmentation in the Logarithmic Image Processing (LIP) model.
//!
//! Vessels are dark in a colour fundus photograph. After complementing the
//! luminance they become ridges of the image's topographic surface. A probe
//! made of three parallel segments (a raised central one and two lower side
//! ones) is pushed under that surface; the LIP contrast between the side
//! segments and the contact level is close to zero inside a vessel and large
//! elsewhere. Taking the infimum of that contrast over orientations and probe
//! scales gives a vesselness map whose valleys are the vessels.
//!
//! The crate is organised bottom-up:
//!
//! * [`lip`]: LIP arithmetic, luminance, complementation.
//! * [`mask`]: binary masks, connected components, binary morphology.
//! * [`probe`]: probe geometry, rasterization, intensity adaptation.
//! * [`vesselness`]: rank-order detector maps and their normalisation.
//! * [`segmentation`]: thresholding, probe-count selection, post-filters and
//!   the end-to-end pipeline.
//! * [`evaluation`]: confusion counts, Se/Sp/Acc and database aggregation.
//! * [`overlay`]: four-colour comparison rendering.
//! * [`synthetic`]: procedurally generated fundus-like test images.

pub mod error;
pub mod evaluation;
pub mod lip;
pub mod mask;
pub mod overlay;
pub mod probe;
pub mod segmentation;
pub mod synthetic;
pub mod vesselness;

pub use error::{Error, Result};
pub use evaluation::{aggregate, confusion, metrics, ConfusionCounts, MetricsRecord, Summary};
pub use lip::{complement, image_mean, lip_add, lip_sub, luminance, ColorImage, GrayImage, M};
pub use mask::BinaryMask;
pub use overlay::render_overlay;
pub use probe::{
    adapt_intensities, fov_diameter, orientations, probe_lengths, probe_widths, rasterize,
    ProbeFamily, ProbeIntensities, ProbeSpec, RasterProbe,
};
pub use segmentation::{
    fill_small_holes, fov_from_image, remove_small_components, segment_lip, segment_vessels,
    select_probe_count, threshold_by_area, AreaThreshold, PipelineParams, ProbeSelection,
    SegmentationOutput,
};
pub use vesselness::{
    detector_map_orientation, detector_map_probe, kth_min, normalize_map, profile_detector_1d,
    vesselness_multiscale, DetectorParams, RealMap, VesselnessMap,
};
