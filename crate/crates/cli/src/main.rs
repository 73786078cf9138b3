use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hsmix_core::pipeline::{
    default_metrics, grid_settings, run_batch, scan_dataset, sweep, BatchOptions, DatasetIndex,
    EmitSet,
};
use hsmix_core::{AugConfig, GridStrategy, LambdaStrategy, Modality};

/// Exit status when the run finished but some pairs failed.
const PARTIAL_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hsmix",
    version,
    about = "Hard and soft superpixel mixing for segmentation datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mix every image with a seeded partner and write images, masks and a manifest.
    Augment(AugmentArgs),
    /// Average mixing statistics over a grid of `p` values and superpixel-count ranges.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Directory of input images (PNG).
    #[arg(long)]
    images: PathBuf,
    /// Directory of class-id masks (8-bit PNG), matched to images by file stem.
    #[arg(long)]
    masks: PathBuf,
    /// Total class count when some classes never appear in the masks.
    #[arg(long)]
    num_classes: Option<usize>,
}

#[derive(Args)]
struct MixArgs {
    /// Preset superpixel-count range and compactness for an imaging modality.
    #[arg(long)]
    preset: Option<Modality>,
    #[arg(long)]
    l_min: Option<usize>,
    #[arg(long)]
    l_max: Option<usize>,
    /// Selection probability of each superpixel of the second image.
    #[arg(long)]
    p: Option<f64>,
    /// SLIC compactness.
    #[arg(long)]
    compactness: Option<f64>,
    #[arg(long, env = "HSMIX_SEED", default_value_t = 0)]
    seed: u64,
    /// `superpixel` or `square:K`.
    #[arg(long, default_value = "superpixel")]
    grid: GridStrategy,
    /// `saliency` or `random`.
    #[arg(long, default_value = "saliency")]
    lambda: LambdaStrategy,
}

impl MixArgs {
    fn config(&self) -> Result<AugConfig> {
        let mut cfg = AugConfig::default();
        if let Some(m) = self.preset {
            cfg = cfg.with_preset(m);
        }
        if let Some(v) = self.l_min {
            cfg.l_min = v;
        }
        if let Some(v) = self.l_max {
            cfg.l_max = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.compactness {
            cfg.compactness = v;
        }
        cfg.seed = self.seed;
        cfg.grid_strategy = self.grid;
        cfg.lambda_strategy = self.lambda;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct AugmentArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    mix: MixArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated subset of `hard,soft`.
    #[arg(long, default_value = "hard,soft", value_parser = parse_emit)]
    emit: EmitSet,
    /// Also write superpixel boundary overlays.
    #[arg(long)]
    overlay: bool,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    mix: MixArgs,
    /// Comma-separated selection probabilities, e.g. `0.1,0.3,0.5`.
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    /// Comma-separated `MIN-MAX` superpixel-count ranges, e.g. `30-80,200-400`.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_range)]
    l_ranges: Vec<(usize, usize)>,
    /// Use only the first N pairs.
    #[arg(long)]
    max_pairs: Option<usize>,
    /// Report path (TSV).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_emit(s: &str) -> Result<EmitSet, String> {
    let mut emit = EmitSet {
        hard: false,
        soft: false,
    };
    for part in s.split(',').map(str::trim) {
        match part {
            "hard" => emit.hard = true,
            "soft" => emit.soft = true,
            other => return Err(format!("unknown output `{other}`, expected hard or soft")),
        }
    }
    Ok(emit)
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("expected MIN-MAX, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn load_index(data: &DataArgs) -> Result<DatasetIndex> {
    let index = scan_dataset(&data.images, &data.masks).with_context(|| {
        format!(
            "scanning {} and {}",
            data.images.display(),
            data.masks.display()
        )
    })?;
    let index = match data.num_classes {
        Some(n) => index.with_num_classes(n)?,
        None => index,
    };
    log::info!(
        "{} entries, {} classes, {} skipped files",
        index.len(),
        index.num_classes,
        index.issues.len()
    );
    Ok(index)
}

fn augment(args: &AugmentArgs) -> Result<ExitCode> {
    let cfg = args.mix.config()?;
    let index = load_index(&args.data)?;
    let opts = BatchOptions {
        emit: args.emit,
        overlay: args.overlay,
        workers: worker_count(args.workers),
    };
    let manifest = run_batch(&index, &cfg, &args.out, &opts)?;
    let ok = manifest.records.len() - manifest.failures;
    eprintln!(
        "{ok} pairs written to {}, {} failed",
        args.out.display(),
        manifest.failures
    );
    Ok(if manifest.failures > 0 {
        ExitCode::from(PARTIAL_FAILURE)
    } else {
        ExitCode::SUCCESS
    })
}

fn write_report(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let base = args.mix.config()?;
    let index = load_index(&args.data)?;
    let settings = grid_settings(&args.l_ranges, &args.p_list);
    let metrics = default_metrics();
    let pool = rayon_pool(worker_count(args.workers))?;
    let report = pool.install(|| sweep(&index, &base, &settings, &metrics, args.max_pairs))?;
    write_report(&args.out, &report.to_tsv())?;
    eprintln!(
        "{} settings written to {}",
        report.rows.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn worker_count(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        bail!("workers must be at least 1");
    }
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Augment(a) => augment(a),
        Command::Sweep(s) => run_sweep(s),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
