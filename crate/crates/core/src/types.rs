//! Shared domain types.
//!
//! Every raster here is row-major; multi-channel rasters are channel-last, so
//! the value for `(row, col, ch)` lives at `(row * width + col) * channels + ch`.
//! All types validate on construction and are immutable afterwards.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-pixel probability sums must hit 1 within this tolerance.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

fn check_unit_interval(what: &str, data: &[f64]) -> Result<()> {
    if let Some((i, v)) = data
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
    {
        return Err(Error::Domain(format!(
            "{what} value {v} at index {i} outside [0, 1]"
        )));
    }
    Ok(())
}

/// An `H x W x C` floating image with intensities in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageTensor {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::Domain(format!(
                "image dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::dims(height * width * channels, data.len()));
        }
        check_unit_interval("image", &data)?;
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for r in 0..height {
            for c in 0..width {
                for ch in 0..channels {
                    data.push(f(r, c, ch));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(
            height,
            width,
            channels,
            vec![value; height * width * channels],
        )
    }

    /// Builds an image from 8-bit samples, dividing by 255.
    pub fn from_u8(height: usize, width: usize, channels: usize, samples: &[u8]) -> Result<Self> {
        let data = samples.iter().map(|&v| f64::from(v) / 255.0).collect();
        Self::new(height, width, channels, data)
    }

    /// Quantizes back to 8-bit samples with round-half-up.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.channels;
        &self.data[start..start + self.channels]
    }

    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    /// Per-pixel mean over channels.
    pub fn intensity(&self) -> Vec<f64> {
        let c = self.channels as f64;
        self.data
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f64>() / c)
            .collect()
    }

    /// Replicates a single-channel image into `channels` channels.
    pub fn expand_channels(&self, channels: usize) -> Result<Self> {
        if self.channels == channels {
            return Ok(self.clone());
        }
        if self.channels != 1 {
            return Err(Error::Domain(format!(
                "cannot expand a {}-channel image to {channels} channels",
                self.channels
            )));
        }
        let data = self
            .data
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, channels))
            .collect();
        Self::new(self.height, self.width, channels, data)
    }
}

/// Per-pixel class probabilities, `H x W x N`.
///
/// Ground-truth masks are one-hot ("hard"); soft mixing produces fractional maps.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMap {
    height: usize,
    width: usize,
    num_classes: usize,
    data: Vec<f64>,
}

impl ClassMap {
    pub fn new(height: usize, width: usize, num_classes: usize, data: Vec<f64>) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::Domain(format!(
                "a class map needs at least 2 classes, got {num_classes}"
            )));
        }
        if height == 0 || width == 0 {
            return Err(Error::Domain(
                "class map dimensions must be positive".into(),
            ));
        }
        if data.len() != height * width * num_classes {
            return Err(Error::dims(height * width * num_classes, data.len()));
        }
        check_unit_interval("class probability", &data)?;
        for (i, px) in data.chunks_exact(num_classes).enumerate() {
            let sum: f64 = px.iter().sum();
            if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
                return Err(Error::Domain(format!(
                    "class probabilities at pixel {i} sum to {sum}"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            num_classes,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn probs(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.num_classes;
        &self.data[start..start + self.num_classes]
    }

    /// True when every entry is exactly 0 or 1.
    pub fn is_hard(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// One class channel as a plane of `H x W` values.
    pub fn channel(&self, class: usize) -> Vec<f64> {
        self.data
            .chunks_exact(self.num_classes)
            .map(|px| px[class])
            .collect()
    }
}

/// One-hot encodes a mask of class ids.
pub fn one_hot(height: usize, width: usize, ids: &[u32], num_classes: usize) -> Result<ClassMap> {
    if ids.len() != height * width {
        return Err(Error::dims(height * width, ids.len()));
    }
    let mut data = vec![0.0; ids.len() * num_classes];
    for (i, &id) in ids.iter().enumerate() {
        let id = id as usize;
        if id >= num_classes {
            return Err(Error::Domain(format!(
                "class id {id} at pixel {i} is not below {num_classes}"
            )));
        }
        data[i * num_classes + id] = 1.0;
    }
    ClassMap::new(height, width, num_classes, data)
}

/// Per-pixel index of the most probable class; ties go to the lowest index.
pub fn argmax_decode(map: &ClassMap) -> Vec<u32> {
    map.data
        .chunks_exact(map.num_classes)
        .map(|px| {
            let mut best = 0;
            for (n, &v) in px.iter().enumerate().skip(1) {
                if v > px[best] {
                    best = n;
                }
            }
            best as u32
        })
        .collect()
}

/// A partition of the image plane into `num_labels` regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperpixelGrid {
    height: usize,
    width: usize,
    num_labels: usize,
    labels: Vec<u32>,
}

impl SuperpixelGrid {
    /// Validates that labels are in `[0, num_labels)` and that none is empty.
    pub fn new(height: usize, width: usize, num_labels: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != height * width {
            return Err(Error::dims(height * width, labels.len()));
        }
        let mut seen = vec![false; num_labels];
        for &l in &labels {
            let l = l as usize;
            if l >= num_labels {
                return Err(Error::Domain(format!(
                    "label {l} not below num_labels {num_labels}"
                )));
            }
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::Domain(format!("label {empty} has no pixels")));
        }
        Ok(Self {
            height,
            width,
            num_labels,
            labels,
        })
    }

    /// Compacts arbitrary label values to `0..L`, preserving their ascending order.
    pub fn from_raw(height: usize, width: usize, raw: &[u32]) -> Result<Self> {
        if raw.len() != height * width || raw.is_empty() {
            return Err(Error::dims(height * width, raw.len()));
        }
        let mut present: Vec<u32> = raw.to_vec();
        present.sort_unstable();
        present.dedup();
        let labels = raw
            .iter()
            .map(|v| present.binary_search(v).expect("value is present") as u32)
            .collect();
        Ok(Self {
            height,
            width,
            num_labels: present.len(),
            labels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Pixel count of every label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_labels];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

/// Per-pixel saliency in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl SaliencyMap {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::dims(height * width, data.len()));
        }
        check_unit_interval("saliency", &data)?;
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Pointwise `1 - v`.
    pub fn complement(&self) -> SaliencyMap {
        SaliencyMap {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|v| 1.0 - v).collect(),
        }
    }
}

/// Rescales `values` affinely onto `[0, 1]`. A constant plane maps to 0.5.
pub fn minmax_normalize(height: usize, width: usize, values: &[f64]) -> Result<SaliencyMap> {
    if values.len() != height * width {
        return Err(Error::dims(height * width, values.len()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite saliency value {v}")));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let data = if values.is_empty() || range == 0.0 {
        vec![0.5; values.len()]
    } else {
        values
            .iter()
            .map(|&v| ((v - lo) / range).clamp(0.0, 1.0))
            .collect()
    };
    SaliencyMap::new(height, width, data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskKind {
    Hard,
    Soft,
}

/// Per-pixel mixing coefficient: the weight given to the second image.
#[derive(Clone, Debug, PartialEq)]
pub struct MixMask {
    height: usize,
    width: usize,
    data: Vec<f64>,
    kind: MaskKind,
}

impl MixMask {
    pub fn new(height: usize, width: usize, data: Vec<f64>, kind: MaskKind) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::dims(height * width, data.len()));
        }
        check_unit_interval("mask", &data)?;
        if kind == MaskKind::Hard {
            if let Some(v) = data.iter().find(|&&v| v != 0.0 && v != 1.0) {
                return Err(Error::Domain(format!(
                    "hard mask holds non-binary value {v}"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            data,
            kind,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Fraction of the mask weight over the whole plane.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// How the superpixel grids of a pair are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridStrategy {
    /// SLIC superpixels with a count drawn from `[l_min, l_max]`.
    Superpixel,
    /// A fixed `k x k` grid of rectangular cells.
    Square(usize),
}

impl fmt::Display for GridStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridStrategy::Superpixel => f.write_str("superpixel"),
            GridStrategy::Square(k) => write!(f, "square:{k}"),
        }
    }
}

impl FromStr for GridStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "superpixel" => Ok(GridStrategy::Superpixel),
            _ => match s.strip_prefix("square:") {
                Some(k) => k
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k >= 1)
                    .map(GridStrategy::Square)
                    .ok_or_else(|| Error::Config(format!("bad square grid size in {s:?}"))),
                None => Err(Error::Config(format!(
                    "unknown grid strategy {s:?}, expected superpixel or square:K"
                ))),
            },
        }
    }
}

/// Where the per-superpixel soft mixing coefficients come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaStrategy {
    /// Mean relative saliency over each mixed-grid superpixel.
    Saliency,
    /// One uniform coefficient for the whole pair, mixup style.
    Random,
}

impl fmt::Display for LambdaStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaStrategy::Saliency => f.write_str("saliency"),
            LambdaStrategy::Random => f.write_str("random"),
        }
    }
}

impl FromStr for LambdaStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "saliency" => Ok(LambdaStrategy::Saliency),
            "random" => Ok(LambdaStrategy::Random),
            _ => Err(Error::Config(format!(
                "unknown lambda strategy {s:?}, expected saliency or random"
            ))),
        }
    }
}

/// Imaging modality presets for superpixel count range and compactness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    /// Dermoscopy-style camera images.
    Camera,
    /// Histology under a microscope.
    Microscopy,
    Ct,
    Mri,
}

impl Modality {
    /// `(l_min, l_max, compactness)`.
    pub fn parameters(self) -> (usize, usize, f64) {
        match self {
            Modality::Camera => (30, 80, 10.0),
            Modality::Microscopy => (200, 400, 10.0),
            Modality::Ct => (200, 400, 0.1),
            Modality::Mri => (50, 150, 0.003),
        }
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "camera" => Ok(Modality::Camera),
            "microscopy" => Ok(Modality::Microscopy),
            "ct" => Ok(Modality::Ct),
            "mri" => Ok(Modality::Mri),
            _ => Err(Error::Config(format!(
                "unknown preset {s:?}, expected camera, microscopy, ct or mri"
            ))),
        }
    }
}

/// Augmentation hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugConfig {
    pub l_min: usize,
    pub l_max: usize,
    /// Bernoulli probability of selecting each superpixel of the second image.
    pub p: f64,
    pub compactness: f64,
    pub slic_iters: usize,
    /// Guard added to the relative-saliency denominator.
    pub epsilon: f64,
    pub seed: u64,
    pub grid_strategy: GridStrategy,
    pub lambda_strategy: LambdaStrategy,
}

impl Default for AugConfig {
    fn default() -> Self {
        Self {
            l_min: 30,
            l_max: 80,
            p: 0.3,
            compactness: 10.0,
            slic_iters: 10,
            epsilon: 1e-6,
            seed: 0,
            grid_strategy: GridStrategy::Superpixel,
            lambda_strategy: LambdaStrategy::Saliency,
        }
    }
}

impl AugConfig {
    pub fn with_preset(mut self, modality: Modality) -> Self {
        let (l_min, l_max, compactness) = modality.parameters();
        self.l_min = l_min;
        self.l_max = l_max;
        self.compactness = compactness;
        self
    }

    /// Checks everything that does not depend on image size.
    pub fn validate(&self) -> Result<()> {
        if self.l_min < 1 || self.l_min > self.l_max {
            return Err(Error::Config(format!(
                "need 1 <= l_min <= l_max, got [{}, {}]",
                self.l_min, self.l_max
            )));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Config(format!(
                "p must lie in (0, 1), got {}",
                self.p
            )));
        }
        if !(self.compactness > 0.0 && self.compactness.is_finite()) {
            return Err(Error::Config(format!(
                "compactness must be positive, got {}",
                self.compactness
            )));
        }
        if self.slic_iters < 1 {
            return Err(Error::Config("slic_iters must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if self.grid_strategy == GridStrategy::Square(0) {
            return Err(Error::Config("square grid needs k >= 1".into()));
        }
        Ok(())
    }

    /// Full validation against a concrete image size.
    pub fn validate_for(&self, height: usize, width: usize) -> Result<()> {
        self.validate()?;
        if self.l_max > height * width {
            return Err(Error::Config(format!(
                "l_max {} exceeds pixel count {}",
                self.l_max,
                height * width
            )));
        }
        if let GridStrategy::Square(k) = self.grid_strategy {
            if k > height.min(width) {
                return Err(Error::Config(format!(
                    "square grid k={k} exceeds image side {}",
                    height.min(width)
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_hot_single_pixel() {
        let map = one_hot(1, 1, &[0], 2).unwrap();
        assert_eq!(map.data(), &[1.0, 0.0]);
        assert!(map.is_hard());
    }

    #[test]
    fn one_hot_all_ones() {
        let map = one_hot(2, 2, &[1; 4], 2).unwrap();
        assert_eq!(map.channel(1), vec![1.0; 4]);
        assert_eq!(map.channel(0), vec![0.0; 4]);
    }

    #[test]
    fn one_hot_rejects_large_id() {
        assert!(matches!(one_hot(1, 2, &[0, 2], 2), Err(Error::Domain(_))));
    }

    #[test]
    fn argmax_tie_goes_low() {
        let map = ClassMap::new(1, 1, 2, vec![0.5, 0.5]).unwrap();
        assert_eq!(argmax_decode(&map), vec![0]);
        assert!(!map.is_hard());
    }

    #[test]
    fn class_map_rejects_bad_sums() {
        assert!(ClassMap::new(1, 1, 2, vec![0.5, 0.4]).is_err());
        assert!(ClassMap::new(1, 1, 1, vec![1.0]).is_err());
    }

    #[test]
    fn image_rejects_out_of_range() {
        assert!(ImageTensor::new(1, 1, 1, vec![1.5]).is_err());
        assert!(ImageTensor::new(1, 1, 1, vec![f64::NAN]).is_err());
        assert!(ImageTensor::new(1, 2, 1, vec![0.5]).is_err());
    }

    #[test]
    fn u8_round_trip() {
        let samples: Vec<u8> = (0..=255).collect();
        let img = ImageTensor::from_u8(16, 16, 1, &samples).unwrap();
        assert_eq!(img.to_u8(), samples);
    }

    #[test]
    fn normalize_affine() {
        let m = minmax_normalize(1, 3, &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(m.data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_constant_is_half() {
        let m = minmax_normalize(2, 2, &[3.0; 4]).unwrap();
        assert_eq!(m.data(), &[0.5; 4]);
    }

    #[test]
    fn normalize_rejects_nan() {
        assert!(minmax_normalize(1, 2, &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn grid_from_raw_keeps_order() {
        let g = SuperpixelGrid::from_raw(1, 4, &[7, 3, 7, 10]).unwrap();
        assert_eq!(g.labels(), &[1, 0, 1, 2]);
        assert_eq!(g.num_labels(), 3);
    }

    #[test]
    fn grid_rejects_empty_label() {
        assert!(SuperpixelGrid::new(1, 2, 3, vec![0, 2]).is_err());
    }

    #[test]
    fn hard_mask_rejects_fraction() {
        assert!(MixMask::new(1, 1, vec![0.5], MaskKind::Hard).is_err());
        assert!(MixMask::new(1, 1, vec![0.5], MaskKind::Soft).is_ok());
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!(
            "square:7".parse::<GridStrategy>().unwrap(),
            GridStrategy::Square(7)
        );
        assert_eq!(
            "superpixel".parse::<GridStrategy>().unwrap(),
            GridStrategy::Superpixel
        );
        assert!("square:0".parse::<GridStrategy>().is_err());
        assert!("hex".parse::<GridStrategy>().is_err());
        assert_eq!(
            "random".parse::<LambdaStrategy>().unwrap(),
            LambdaStrategy::Random
        );
    }

    #[test]
    fn config_validation() {
        let cfg = AugConfig::default();
        cfg.validate_for(224, 224).unwrap();
        assert!(AugConfig {
            p: 1.0,
            ..cfg.clone()
        }
        .validate()
        .is_err());
        assert!(AugConfig {
            p: 0.0,
            ..cfg.clone()
        }
        .validate()
        .is_err());
        assert!(AugConfig {
            l_min: 90,
            ..cfg.clone()
        }
        .validate()
        .is_err());
        assert!(cfg.validate_for(8, 8).is_err());
        let sq = AugConfig {
            grid_strategy: GridStrategy::Square(9),
            l_min: 1,
            l_max: 1,
            ..cfg
        };
        assert!(sq.validate_for(8, 8).is_err());
    }

    #[test]
    fn presets() {
        let cfg = AugConfig::default().with_preset(Modality::Mri);
        assert_eq!((cfg.l_min, cfg.l_max, cfg.compactness), (50, 150, 0.003));
        assert_eq!(Modality::Ct.parameters().2, 0.1);
    }

    proptest! {
        #[test]
        fn argmax_inverts_one_hot(n in 2usize..6, ids in proptest::collection::vec(0u32..6, 16)) {
            let ids: Vec<u32> = ids.into_iter().map(|v| v % n as u32).collect();
            let map = one_hot(4, 4, &ids, n).unwrap();
            for px in map.data().chunks_exact(n) {
                prop_assert_eq!(px.iter().sum::<f64>(), 1.0);
            }
            prop_assert_eq!(argmax_decode(&map), ids);
        }

        #[test]
        fn normalize_idempotent_and_monotone(vals in proptest::collection::vec(-1e3f64..1e3, 12)) {
            let once = minmax_normalize(3, 4, &vals).unwrap();
            let twice = minmax_normalize(3, 4, once.data()).unwrap();
            prop_assert_eq!(once.data(), twice.data());
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    if vals[i] <= vals[j] {
                        prop_assert!(once.data()[i] <= once.data()[j]);
                    }
                }
            }
        }
    }
}
