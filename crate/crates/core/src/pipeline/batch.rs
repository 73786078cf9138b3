//! Offline augmentation of a whole dataset.

use std::path::Path;

use rayon::prelude::*;

use super::dataset::{load_entry, DatasetIndex};
use super::io::{write_class_ids, write_image, write_soft_mask};
use super::manifest::{
    DatasetSummary, EmitSet, Manifest, OutputFile, OutputKind, PairRecord, PairStats, PairStatus,
    SCHEMA_VERSION,
};
use super::pairing::form_pairs;
use crate::error::{Error, Result};
use crate::mixer::{hsmix_pair, PairOutput};
use crate::rng::PairRng;
use crate::superpixel::boundary_overlay;
use crate::types::{argmax_decode, AugConfig, ImageTensor, SuperpixelGrid};

pub const IMAGES_DIR: &str = "images";
pub const MASKS_DIR: &str = "masks";
pub const OVERLAYS_DIR: &str = "overlays";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchOptions {
    pub emit: EmitSet,
    pub overlay: bool,
    /// Size of the worker pool; does not affect any output. Defaults to the
    /// number of logical cores.
    pub workers: usize,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            emit: EmitSet::default(),
            overlay: false,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Tracks files of one pair so a failure can remove the partial set.
struct PairWriter<'a> {
    root: &'a Path,
    written: Vec<OutputFile>,
}

impl PairWriter<'_> {
    fn add(
        &mut self,
        kind: OutputKind,
        subdir: &str,
        name: String,
        write: impl FnOnce(&Path) -> Result<()>,
    ) -> Result<()> {
        let rel = format!("{subdir}/{name}");
        write(&self.root.join(subdir).join(&name))?;
        self.written.push(OutputFile { kind, path: rel });
        Ok(())
    }

    fn discard(self) {
        for file in self.written {
            let _ = std::fs::remove_file(self.root.join(&file.path));
        }
    }
}

fn overlay_color(channels: usize) -> Vec<f64> {
    if channels == 3 {
        vec![0.0, 1.0, 0.0]
    } else {
        vec![1.0; channels]
    }
}

fn write_outputs(
    w: &mut PairWriter<'_>,
    stem: &str,
    x1: &ImageTensor,
    x2: &ImageTensor,
    out: &PairOutput,
    opts: &BatchOptions,
) -> Result<()> {
    let (h, wd) = x1.shape();
    if opts.emit.hard {
        w.add(
            OutputKind::HardImage,
            IMAGES_DIR,
            format!("{stem}_hard.png"),
            |p| write_image(p, &out.hard.image),
        )?;
        let ids = argmax_decode(&out.hard.mask);
        w.add(
            OutputKind::HardMask,
            MASKS_DIR,
            format!("{stem}_hard.png"),
            |p| write_class_ids(p, h, wd, &ids),
        )?;
    }
    if opts.emit.soft {
        w.add(
            OutputKind::SoftImage,
            IMAGES_DIR,
            format!("{stem}_soft.png"),
            |p| write_image(p, &out.soft.image),
        )?;
        let names = write_soft_mask(
            &w.root.join(MASKS_DIR),
            &format!("{stem}_soft"),
            &out.soft.mask,
        )?;
        let last = names.len() - 1;
        for (i, name) in names.into_iter().enumerate() {
            let kind = if i == last {
                OutputKind::SoftMaskSidecar
            } else {
                OutputKind::SoftMaskChannel
            };
            w.written.push(OutputFile {
                kind,
                path: format!("{MASKS_DIR}/{name}"),
            });
        }
    }
    if opts.overlay {
        let color = overlay_color(x1.channels());
        let d = &out.diagnostics;
        let views: [(OutputKind, &str, &ImageTensor, &SuperpixelGrid); 3] = [
            (OutputKind::OverlayFirst, "sp1", x1, &d.sp1),
            (OutputKind::OverlaySecond, "sp2", x2, &d.sp2),
            (OutputKind::OverlayMixed, "spm", &out.hard.image, &d.spm),
        ];
        for (kind, tag, image, grid) in views {
            let painted = boundary_overlay(image, grid, &color)?;
            w.add(kind, OVERLAYS_DIR, format!("{stem}_{tag}.png"), |p| {
                write_image(p, &painted)
            })?;
        }
    }
    Ok(())
}

fn stats(out: &PairOutput) -> PairStats {
    let d = &out.diagnostics;
    PairStats {
        l1: d.l1,
        l2: d.l2,
        labels_first: d.sp1.num_labels(),
        labels_second: d.sp2.num_labels(),
        labels_mixed: d.spm.num_labels(),
        num_selected: d.selection.len(),
        hard_coverage: d.mh.mean(),
        lambda: d.lambdas.summary(),
    }
}

fn process_pair(
    index: &DatasetIndex,
    cfg: &AugConfig,
    root: &Path,
    opts: &BatchOptions,
    k: usize,
    (a, b): (usize, usize),
) -> PairRecord {
    let (ea, eb) = (&index.entries[a], &index.entries[b]);
    let stem = format!("{k:05}_{}_{}", ea.id, eb.id);
    let mut writer = PairWriter {
        root,
        written: Vec::new(),
    };
    let result = (|| {
        let (x1, y1) = load_entry(index, ea)?;
        let (x2, y2) = load_entry(index, eb)?;
        let out = hsmix_pair(&x1, &x2, &y1, &y2, cfg, &PairRng::new(cfg.seed, k as u64))?;
        write_outputs(&mut writer, &stem, &x1, &x2, &out, opts)?;
        Ok::<_, Error>(stats(&out))
    })();
    let mut record = PairRecord {
        pair_index: k,
        first: ea.id.clone(),
        second: eb.id.clone(),
        status: PairStatus::Ok,
        error: None,
        stats: None,
        outputs: Vec::new(),
    };
    match result {
        Ok(s) => {
            record.stats = Some(s);
            record.outputs = writer.written;
        }
        Err(e) => {
            log::error!("pair {k} ({} + {}): {e}", ea.id, eb.id);
            writer.discard();
            record.status = PairStatus::Failed;
            record.error = Some(e.to_string());
        }
    }
    record
}

/// Mixes every entry with a seeded partner and writes results under `out_dir`.
///
/// A failing pair is recorded in the manifest and does not stop the others;
/// check [`Manifest::failures`]. Output bytes depend only on the dataset,
/// `cfg` and `opts.emit`/`opts.overlay`, never on `opts.workers`.
pub fn run_batch(
    index: &DatasetIndex,
    cfg: &AugConfig,
    out_dir: &Path,
    opts: &BatchOptions,
) -> Result<Manifest> {
    cfg.validate()?;
    if !opts.emit.hard && !opts.emit.soft {
        return Err(Error::Config("nothing to emit".into()));
    }
    if opts.workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let pairs = form_pairs(index.len(), cfg.seed)?;
    let mut dirs = vec![IMAGES_DIR, MASKS_DIR];
    if opts.overlay {
        dirs.push(OVERLAYS_DIR);
    }
    for d in dirs {
        let path = out_dir.join(d);
        std::fs::create_dir_all(&path).map_err(|e| Error::io(&path, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let records: Vec<PairRecord> = pool.install(|| {
        pairs
            .par_iter()
            .enumerate()
            .map(|(k, &pair)| process_pair(index, cfg, out_dir, opts, k, pair))
            .collect()
    });
    let failures = records
        .iter()
        .filter(|r| r.status == PairStatus::Failed)
        .count();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        config: cfg.clone(),
        emit: opts.emit,
        overlay: opts.overlay,
        dataset: DatasetSummary {
            entries: index.len(),
            skipped_files: index.issues.len(),
            num_classes: index.num_classes,
            channels: index.channels,
        },
        failures,
        records,
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}
