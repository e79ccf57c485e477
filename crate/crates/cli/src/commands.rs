//! The `segment`, `batch` and `eval` commands.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lipvessel::{
    aggregate, confusion, metrics, render_overlay, segment_vessels, BinaryMask, MetricsRecord,
    Summary,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::args::{Cli, Command, PipelineFlags};
use crate::config::{parse_key_values, MapFormat, RunConfig};
use crate::dataset::{keyed_files, DatasetLayout};
use crate::io::{self, IoError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Pipeline(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Io(_) => 2,
            Self::Pipeline(_) => 3,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<lipvessel::Error> for CliError {
    fn from(e: lipvessel::Error) -> Self {
        Self::Pipeline(e.to_string())
    }
}

/// Result of segmenting one image.
#[derive(Debug, Clone)]
pub struct SegmentReport {
    pub name: String,
    pub probes_used: usize,
    pub seconds: f64,
    pub outputs: Vec<PathBuf>,
    pub metrics: Option<MetricsRecord>,
}

/// Files written so far; removed again unless [`Outputs::keep`] is called.
struct Outputs(Vec<PathBuf>);

impl Outputs {
    fn push(
        &mut self,
        path: PathBuf,
        write: impl FnOnce(&Path) -> Result<(), IoError>,
    ) -> Result<(), IoError> {
        self.0.push(path.clone());
        write(&path)
    }

    fn keep(mut self) -> Vec<PathBuf> {
        std::mem::take(&mut self.0)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        for p in &self.0 {
            let _ = fs::remove_file(p);
            let _ = fs::remove_file(io::sidecar_path(p));
        }
    }
}

fn write_map(
    outputs: &mut Outputs,
    map: &lipvessel::RealMap,
    base: &Path,
    format: MapFormat,
) -> Result<(), IoError> {
    match format {
        MapFormat::Pfm => outputs.push(base.with_extension("pfm"), |p| io::save_pfm(map, p)),
        MapFormat::Png16 => outputs.push(base.with_extension("png"), |p| {
            io::save_png16(map, p).map(|_| ())
        }),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

/// Segments `image` and writes `<name>_mask.png` (plus maps and overlay
/// when requested) to the output directory. Nothing is left on disk if any
/// step fails.
pub fn segment_image(
    image: &Path,
    fov: Option<&Path>,
    reference: Option<&Path>,
    cfg: &RunConfig,
) -> Result<SegmentReport, CliError> {
    let start = Instant::now();
    let name = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| CliError::Usage(format!("{}: not a file name", image.display())))?;
    let img = io::load_color(image)?;
    let fov = fov.map(io::load_mask).transpose()?;
    let reference = reference.map(io::load_mask).transpose()?;

    let out = segment_vessels(&img, fov.as_ref(), &cfg.params)?;
    let scored = match &reference {
        Some(r) => {
            let region = if cfg.full_frame_eval {
                BinaryMask::full(out.mask.width(), out.mask.height())
            } else {
                out.fov.clone()
            };
            let overlay = render_overlay(&out.mask, r, &out.fov)?;
            let record = metrics(name.clone(), confusion(&out.mask, r, &region)?)?;
            Some((overlay, record))
        }
        None => None,
    };

    create_dir(&cfg.out)?;
    let mut outputs = Outputs(Vec::new());
    let base = |suffix: &str| cfg.out.join(format!("{name}_{suffix}"));
    outputs.push(base("mask.png"), |p| io::save_mask(&out.mask, p))?;
    if cfg.save_maps {
        write_map(
            &mut outputs,
            out.vesselness.map(),
            &base("vesselness"),
            cfg.map_format,
        )?;
        write_map(
            &mut outputs,
            out.normalized.map(),
            &base("phi"),
            cfg.map_format,
        )?;
    }
    if let Some((overlay, _)) = &scored {
        outputs.push(base("overlay.png"), |p| io::save_color(overlay, p))?;
    }
    Ok(SegmentReport {
        name,
        probes_used: out.probes_used,
        seconds: start.elapsed().as_secs_f64(),
        outputs: outputs.keep(),
        metrics: scored.map(|(_, m)| m),
    })
}

fn load_config(path: &Path, flags: &PipelineFlags) -> Result<RunConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let kv =
        parse_key_values(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    RunConfig::resolve(Some((&kv, base)), flags)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn layout_of(cfg: &RunConfig, path: &Path) -> Result<DatasetLayout, CliError> {
    cfg.layout
        .clone()
        .ok_or_else(|| CliError::Usage(format!("{}: `image-glob` is required", path.display())))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Per-image rows followed by a `mean` row and a `std` row.
pub fn write_metrics_csv(
    path: &Path,
    records: &[MetricsRecord],
    summary: &Summary,
) -> Result<(), CliError> {
    let io_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(["image_id", "tp", "tn", "fp", "fn", "se", "sp", "acc"])
        .map_err(io_err)?;
    for r in records {
        let c = r.counts;
        w.write_record([
            r.image_id.clone(),
            c.tp.to_string(),
            c.tn.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            fmt_opt(r.se),
            fmt_opt(r.sp),
            format!("{:.6}", r.acc),
        ])
        .map_err(io_err)?;
    }
    let c = summary.counts;
    w.write_record([
        "mean".to_string(),
        c.tp.to_string(),
        c.tn.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        fmt_opt(summary.mean_se),
        fmt_opt(summary.mean_sp),
        format!("{:.6}", summary.mean_acc),
    ])
    .map_err(io_err)?;
    w.write_record([
        "std",
        "",
        "",
        "",
        "",
        "",
        "",
        &format!("{:.6}", summary.std_acc),
    ])
    .map_err(io_err)?;
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn summary_line(s: &Summary) -> String {
    let f = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    format!(
        "Se = {}  Sp = {}  Acc = {:.4} ({:.4})  over {} image(s)",
        f(s.mean_se),
        f(s.mean_sp),
        s.mean_acc,
        s.std_acc,
        s.images
    )
}

/// Segments every image of the layout in parallel. Failures are logged and
/// the remaining images are still processed.
pub fn batch(config: &Path, flags: &PipelineFlags) -> Result<Vec<SegmentReport>, CliError> {
    let cfg = load_config(config, flags)?;
    let entries = layout_of(&cfg, config)?.entries().map_err(CliError::Io)?;
    let results: Vec<_> = entries
        .par_iter()
        .map(|e| {
            let r = segment_image(&e.image, e.fov.as_deref(), e.reference.as_deref(), &cfg);
            match &r {
                Ok(rep) => log::info!(
                    "{}: {} probe(s), {:.2} s",
                    rep.name,
                    rep.probes_used,
                    rep.seconds
                ),
                Err(err) => log::error!("{}: {err}", e.image.display()),
            }
            r
        })
        .collect();
    let total = results.len();
    let mut reports = Vec::new();
    let mut first_error = None;
    let mut failed = 0;
    for r in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                failed += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    let records: Vec<MetricsRecord> = reports.iter().filter_map(|r| r.metrics.clone()).collect();
    if !records.is_empty() {
        let summary = aggregate(&records)?;
        write_metrics_csv(&cfg.out.join("metrics.csv"), &records, &summary)?;
        println!("{}", summary_line(&summary));
    }
    match first_error {
        None => Ok(reports),
        Some(e) => {
            let msg = format!("{failed} of {total} image(s) failed; first error: {e}");
            Err(match e {
                CliError::Usage(_) => CliError::Usage(msg),
                CliError::Io(_) => CliError::Io(msg),
                CliError::Pipeline(_) => CliError::Pipeline(msg),
            })
        }
    }
}

/// Scores every `*_mask.png` of `pred_dir` against the dataset references
/// and writes `metrics.csv` to the output directory.
pub fn eval(pred_dir: &Path, config: &Path, flags: &PipelineFlags) -> Result<Summary, CliError> {
    let cfg = load_config(config, flags)?;
    let layout = layout_of(&cfg, config)?;
    let ref_glob = layout.reference_glob.as_deref().ok_or_else(|| {
        CliError::Usage(format!(
            "{}: `reference-glob` is required",
            config.display()
        ))
    })?;
    let pattern = pred_dir.join("*_mask.png").to_string_lossy().into_owned();
    let preds = keyed_files(&layout.stem, &pattern).map_err(CliError::Io)?;
    if preds.is_empty() {
        return Err(CliError::Io(format!("no prediction matches {pattern}")));
    }
    let refs = layout.keyed(ref_glob).map_err(CliError::Io)?;
    let fovs = match (&layout.fov_glob, cfg.full_frame_eval) {
        (_, true) => None,
        (Some(g), false) => Some(layout.keyed(g).map_err(CliError::Io)?),
        (None, false) => {
            return Err(CliError::Usage(format!(
                "{}: set `fov-glob` or use --full-frame-eval",
                config.display()
            )))
        }
    };
    let missing = |table: &std::collections::BTreeMap<String, PathBuf>, what: &str| {
        let keys: Vec<&str> = preds
            .keys()
            .filter(|k| !table.contains_key(*k))
            .map(String::as_str)
            .collect();
        if keys.is_empty() {
            Ok(())
        } else {
            Err(CliError::Io(format!("no {what} for {}", keys.join(", "))))
        }
    };
    missing(&refs, "reference")?;
    if let Some(f) = &fovs {
        missing(f, "FOV mask")?;
    }

    let records = preds
        .par_iter()
        .map(|(key, pred)| {
            let pred = io::load_mask(pred)?;
            let reference = io::load_mask(&refs[key])?;
            let region = match &fovs {
                Some(f) => io::load_mask(&f[key])?,
                None => BinaryMask::full(pred.width(), pred.height()),
            };
            Ok(metrics(
                key.clone(),
                confusion(&pred, &reference, &region)?,
            )?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let summary = aggregate(&records)?;
    create_dir(&cfg.out)?;
    write_metrics_csv(&cfg.out.join("metrics.csv"), &records, &summary)?;
    println!("{}", summary_line(&summary));
    Ok(summary)
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Segment {
            image,
            fov,
            reference,
            config,
            flags,
        } => {
            let cfg = match config {
                Some(c) => load_config(c, flags)?,
                None => RunConfig::resolve(None, flags).map_err(CliError::Usage)?,
            };
            let r = segment_image(image, fov.as_deref(), reference.as_deref(), &cfg)?;
            println!("{}: I = {}, {:.2} s", r.name, r.probes_used, r.seconds);
            for p in &r.outputs {
                println!("  {}", p.display());
            }
            if let Some(m) = &r.metrics {
                let f = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
                println!("Se = {}  Sp = {}  Acc = {:.4}", f(m.se), f(m.sp), m.acc);
            }
            Ok(())
        }
        Command::Batch { config, flags } => {
            let reports = batch(config, flags)?;
            println!("{} image(s) segmented", reports.len());
            Ok(())
        }
        Command::Eval {
            pred_dir,
            config,
            flags,
        } => eval(pred_dir, config, flags).map(|_| ()),
    }
}
