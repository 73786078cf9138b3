//! Dataset-level driver: discovery, pairing, batch output and sweeps.

mod batch;
mod dataset;
mod io;
mod manifest;
mod pairing;
mod sweep;

pub use batch::{run_batch, BatchOptions, IMAGES_DIR, MASKS_DIR, OVERLAYS_DIR};
pub use dataset::{
    load_entry, load_image, load_mask_ids, scan_dataset, DatasetEntry, DatasetIndex, ScanIssue,
};
pub use io::{
    quantize, read_soft_mask, write_class_ids, write_image, write_soft_mask, SoftMaskSidecar,
    SOFT_SCALE,
};
pub use manifest::{
    DatasetSummary, EmitSet, Manifest, OutputFile, OutputKind, PairRecord, PairStats, PairStatus,
    MANIFEST_FILE, SCHEMA_VERSION,
};
pub use pairing::{form_pairs, pair_indices};
pub use sweep::{
    default_metrics, grid_settings, sweep, sweep_samples, HardCoverage, LabelsFirst, LabelsMixed,
    LabelsSecond, MeanLambda, SoftWeight, SweepMetric, SweepReport, SweepRow, SweepSetting,
};
