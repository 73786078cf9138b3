//! Hyperparameter sweeps over `p` and the superpixel-count range.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::dataset::{load_entry, DatasetIndex};
use super::pairing::form_pairs;
use crate::error::{Error, Result};
use crate::mixer::{hsmix_pair, PairOutput};
use crate::rng::PairRng;
use crate::types::{AugConfig, ClassMap, ImageTensor};

/// A per-pair statistic averaged over all pairs of a setting.
pub trait SweepMetric: Sync {
    fn name(&self) -> &str;
    fn measure(&self, out: &PairOutput) -> f64;
}

/// Mean of the per-superpixel soft mixing coefficients.
pub struct MeanLambda;
/// Fraction of pixels taken from the second image by the hard mask.
pub struct HardCoverage;
/// Mean soft-mask value.
pub struct SoftWeight;
/// Realized label counts of the two input grids and the mixed grid.
pub struct LabelsFirst;
pub struct LabelsSecond;
pub struct LabelsMixed;

impl SweepMetric for MeanLambda {
    fn name(&self) -> &str {
        "mean_lambda"
    }
    fn measure(&self, out: &PairOutput) -> f64 {
        out.diagnostics.lambdas.summary().mean
    }
}

impl SweepMetric for HardCoverage {
    fn name(&self) -> &str {
        "hard_coverage"
    }
    fn measure(&self, out: &PairOutput) -> f64 {
        out.diagnostics.mh.mean()
    }
}

impl SweepMetric for SoftWeight {
    fn name(&self) -> &str {
        "soft_weight"
    }
    fn measure(&self, out: &PairOutput) -> f64 {
        out.diagnostics.ms.mean()
    }
}

impl SweepMetric for LabelsFirst {
    fn name(&self) -> &str {
        "labels_first"
    }
    fn measure(&self, out: &PairOutput) -> f64 {
        out.diagnostics.sp1.num_labels() as f64
    }
}

impl SweepMetric for LabelsSecond {
    fn name(&self) -> &str {
        "labels_second"
    }
    fn measure(&self, out: &PairOutput) -> f64 {
        out.diagnostics.sp2.num_labels() as f64
    }
}

impl SweepMetric for LabelsMixed {
    fn name(&self) -> &str {
        "labels_mixed"
    }
    fn measure(&self, out: &PairOutput) -> f64 {
        out.diagnostics.spm.num_labels() as f64
    }
}

pub fn default_metrics() -> Vec<Box<dyn SweepMetric>> {
    vec![
        Box::new(MeanLambda),
        Box::new(HardCoverage),
        Box::new(SoftWeight),
        Box::new(LabelsFirst),
        Box::new(LabelsSecond),
        Box::new(LabelsMixed),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSetting {
    pub l_min: usize,
    pub l_max: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub setting: SweepSetting,
    pub pairs: usize,
    /// Means in the order of [`SweepReport::metrics`].
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub metrics: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn column(&self, metric: &str) -> Option<Vec<f64>> {
        let i = self.metrics.iter().position(|m| m == metric)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("l_min\tl_max\tp\tpairs");
        for m in &self.metrics {
            s.push('\t');
            s.push_str(m);
        }
        s.push('\n');
        for row in &self.rows {
            let st = row.setting;
            let _ = write!(s, "{}\t{}\t{}\t{}", st.l_min, st.l_max, st.p, row.pairs);
            for v in &row.values {
                let _ = write!(s, "\t{v:.6}");
            }
            s.push('\n');
        }
        s
    }
}

/// Settings in row-major order: ranges outer, `p` inner.
pub fn grid_settings(l_ranges: &[(usize, usize)], p_values: &[f64]) -> Vec<SweepSetting> {
    l_ranges
        .iter()
        .flat_map(|&(l_min, l_max)| {
            p_values
                .iter()
                .map(move |&p| SweepSetting { l_min, l_max, p })
        })
        .collect()
}

/// Runs every setting over the same samples and pairs.
///
/// Pair `k` draws from the same random streams under every setting, so
/// settings that share an `l` range share their superpixel grids and
/// selection draws.
pub fn sweep_samples(
    samples: &[(ImageTensor, ClassMap)],
    pairs: &[(usize, usize)],
    base: &AugConfig,
    settings: &[SweepSetting],
    metrics: &[Box<dyn SweepMetric>],
) -> Result<SweepReport> {
    if pairs.is_empty() {
        return Err(Error::Domain("sweep needs at least one pair".into()));
    }
    if settings.is_empty() {
        return Err(Error::Config("sweep needs at least one setting".into()));
    }
    let mut rows = Vec::with_capacity(settings.len());
    for &setting in settings {
        let cfg = AugConfig {
            l_min: setting.l_min,
            l_max: setting.l_max,
            p: setting.p,
            ..base.clone()
        };
        cfg.validate()?;
        let per_pair: Vec<Vec<f64>> = pairs
            .par_iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let (x1, y1) = &samples[a];
                let (x2, y2) = &samples[b];
                let out = hsmix_pair(x1, x2, y1, y2, &cfg, &PairRng::new(cfg.seed, k as u64))?;
                Ok(metrics.iter().map(|m| m.measure(&out)).collect())
            })
            .collect::<Result<_>>()?;
        let n = per_pair.len() as f64;
        let values = (0..metrics.len())
            .map(|i| per_pair.iter().map(|v| v[i]).sum::<f64>() / n)
            .collect();
        rows.push(SweepRow {
            setting,
            pairs: per_pair.len(),
            values,
        });
    }
    Ok(SweepReport {
        metrics: metrics.iter().map(|m| m.name().to_owned()).collect(),
        rows,
    })
}

/// Loads the dataset once and sweeps it with seeded pairs.
///
/// `max_pairs` truncates the pair list for quick runs.
pub fn sweep(
    index: &DatasetIndex,
    base: &AugConfig,
    settings: &[SweepSetting],
    metrics: &[Box<dyn SweepMetric>],
    max_pairs: Option<usize>,
) -> Result<SweepReport> {
    let mut pairs = form_pairs(index.len(), base.seed)?;
    if let Some(m) = max_pairs {
        pairs.truncate(m);
    }
    let samples = index
        .entries
        .iter()
        .map(|e| load_entry(index, e))
        .collect::<Result<Vec<_>>>()?;
    sweep_samples(&samples, &pairs, base, settings, metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::one_hot;

    fn samples() -> Vec<(ImageTensor, ClassMap)> {
        (0..4)
            .map(|s| {
                let img = ImageTensor::from_fn(24, 24, 3, |r, c, ch| {
                    (((r * (s + 1) + c * 3 + ch * 7) % 17) as f64) / 16.0
                })
                .unwrap();
                let ids: Vec<u32> = (0..576).map(|i| u32::from((i / 24 + s) % 5 == 0)).collect();
                (img, one_hot(24, 24, &ids, 2).unwrap())
            })
            .collect()
    }

    #[test]
    fn coverage_is_monotone_in_p() {
        let data = samples();
        let pairs = form_pairs(data.len(), 3).unwrap();
        let base = AugConfig {
            seed: 3,
            ..AugConfig::default()
        };
        let settings = grid_settings(&[(8, 20)], &[0.1, 0.3, 0.5, 0.7, 0.9]);
        let report = sweep_samples(&data, &pairs, &base, &settings, &default_metrics()).unwrap();
        let cov = report.column("hard_coverage").unwrap();
        assert!(cov.windows(2).all(|w| w[0] <= w[1]), "{cov:?}");
        let tsv = report.to_tsv();
        assert_eq!(tsv.lines().count(), 6);
        assert!(tsv.starts_with("l_min\tl_max\tp\tpairs\tmean_lambda"));
    }

    #[test]
    fn realized_labels_grow_with_range() {
        let data = samples();
        let pairs = form_pairs(data.len(), 1).unwrap();
        let base = AugConfig {
            seed: 1,
            ..AugConfig::default()
        };
        let settings = grid_settings(&[(4, 6), (30, 40), (100, 120)], &[0.3]);
        let report = sweep_samples(&data, &pairs, &base, &settings, &default_metrics()).unwrap();
        let labels = report.column("labels_first").unwrap();
        assert!(labels.windows(2).all(|w| w[0] < w[1]), "{labels:?}");
    }
}
